#pragma once

// Experiment driver: continuation sweeps, verification suites, entropy grids and op-count
// benchmarks, plus the CSV writers used by the command line tool.

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cgmc/config.hpp"
#include "cgmc/estimators.hpp"

namespace cgmc {

inline constexpr int kSchemaVersion = 1;

enum class SweepBranch { up, down };

const char* to_string(SweepBranch b);

struct SweepRecord {
    Scheme scheme = Scheme::micro;
    double h = 0.0;  ///< conventional field (energy -h sum sigma)
    SweepBranch branch = SweepBranch::up;
    Estimate m;
    double acceptance_rate = 0.0;
    std::uint64_t energy_evals = 0;
    double wall_time_s = 0.0;  ///< 0 unless timing is enabled
};

/// Up branch: all-down start at h_min, increasing h. Down branch: all-up start at h_max,
/// decreasing h. Each point warm-starts from the previous one. Schemes and branches run in
/// parallel on independent streams; the output order is fixed (config scheme order, up then down).
std::vector<SweepRecord> run_sweep(const ExperimentConfig& cfg);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records);

/// Records of one scheme and branch, in increasing h.
std::vector<SweepRecord> select_branch(const std::vector<SweepRecord>& records, Scheme scheme, SweepBranch branch);

/// Trapezoid loop area between the up and down branches of one scheme.
LoopArea sweep_loop_area(const std::vector<SweepRecord>& records, Scheme scheme, std::uint64_t seed = 7);

/// h, ising_nn_m, curie_weiss_upper, curie_weiss_lower on the config grid.
void write_exact_csv(std::ostream& out, const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------------------------
// Verification suites

struct Check {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

struct SuiteReport {
    std::string suite;
    std::vector<Check> checks;
    nlohmann::json details = nlohmann::json::object();
    double seconds = 0.0;

    bool passed() const;
    /// Adds a check that passes when value <= tolerance.
    void expect_le(const std::string& name, double value, double tolerance);
    void expect_true(const std::string& name, bool ok);
    nlohmann::json to_json() const;
};

using MomentFunction = std::function<CellMoments(int alpha, int q)>;

/// Conditional moments against placement enumeration for q = 1..12.
SuiteReport verify_moments(const MomentFunction& moments = conditional_moments);
/// Conditional kernel-fluctuation integrals against brute force, q in {4, 5, 6}.
SuiteReport verify_fluctuation_integrals(std::uint64_t seed = 1, int kernels_per_q = 20);
/// Exact transition matrices of small micro and coarse chains for every rate kind.
SuiteReport verify_detailed_balance();
/// Zeroth-order exactness, pushforward consistency and the variance identity for N in {8, 12, 16}.
SuiteReport verify_kadanoff(std::uint64_t seed = 1);
/// Entropy scaling grid with fitted slopes.
SuiteReport verify_entropy_scaling();

const std::vector<std::string>& verify_suite_names();
/// Throws std::invalid_argument for an unknown suite.
SuiteReport run_verify(const std::string& suite, std::uint64_t seed = 1);

// ---------------------------------------------------------------------------------------------
// Entropy scaling grid (linear profile V(r) = 1 - r, exhaustive enumeration)

struct ScalingGrid {
    int n_sites = 16;
    int q = 4;
    std::vector<int> ranges{4, 8, 16};
    std::vector<double> betas{0.25, 0.5};
};

struct ScalingPoint {
    double beta = 0.0;
    int range = 0;
    double epsilon = 0.0;
    double r_cg0 = 0.0;       ///< exact R / N
    double r_cg2 = 0.0;
    double r_cg0_cross = 0.0;  ///< direct relative entropy of the two coarse laws / N
    double r_cg2_cross = 0.0;
    double cg2_residual = 0.0;  ///< beta max |Hbar - (H0 + H1 + H2)| over coarse states
};

std::vector<ScalingPoint> entropy_grid(const ScalingGrid& grid = {});

struct SlopeFit {
    double slope = 0.0;
    double ci_low = 0.0;  ///< 95% interval from the least-squares standard error
    double ci_high = 0.0;
    double intercept = 0.0;
};

/// Fit of log y against log x; points with y <= 0 are skipped.
SlopeFit log_log_fit(const std::vector<double>& x, const std::vector<double>& y);

void write_entropy_csv(std::ostream& out, const std::vector<ScalingPoint>& points, const ScalingGrid& grid);

struct PosteriorPoint {
    double beta = 0.0;
    int range = 0;
    double epsilon = 0.0;
    double exact_total = 0.0;  ///< N * R(cg0) by enumeration
    double posterior_exact = 0.0;  ///< the a posteriori functional over the exact cg0 measure
    double posterior_mc = 0.0;
    double posterior_stderr = 0.0;
    double residual_fit = 0.0;  ///< fitted cg2 Hamiltonian residual at this epsilon
    double tolerance = 0.0;     ///< max(4 sigma, 3 residual_fit)
};

/// A posteriori estimates on the scaling grid from cg0 chains with the given length.
std::vector<PosteriorPoint> posterior_grid(const ScalingGrid& grid, const RunLength& length, std::uint64_t seed);

void write_posterior_csv(std::ostream& out, const std::vector<PosteriorPoint>& points);

// ---------------------------------------------------------------------------------------------
// Operation counts

struct BenchRow {
    Scheme scheme = Scheme::micro;
    std::uint64_t reads_per_eval = 0;  ///< kernel-table reads for one full energy evaluation
    double ratio_vs_micro = 0.0;       ///< micro reads / scheme reads
    double predicted_ratio = 0.0;      ///< q^2 for cg0, q^3 / L for cg2
    double seconds_per_sweep = 0.0;    ///< 0 unless timing is enabled
};

/// Counts for the config's lattice, kernel and q at h = 0.
std::vector<BenchRow> run_bench(const ExperimentConfig& cfg);

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);

}  // namespace cgmc
