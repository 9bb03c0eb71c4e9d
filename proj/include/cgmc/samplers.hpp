#pragma once

// Discrete-time Metropolis-type chains for the microscopic model and the coarse schemes.
//
// Micro: pick a site uniformly, flip with probability G(beta dH).
// Coarse: pick a cell uniformly, propose a birth with probability (q - alpha)/q or a death with
// probability alpha/q (the same as flipping a uniformly chosen site of the cell), accept with
// probability G(dPhi). The binomial prior enters through the proposal, so the stationary law is
// prior(alpha) exp(-Phi(alpha)) / Z.

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "cgmc/coarse.hpp"
#include "cgmc/corrections.hpp"
#include "cgmc/rng.hpp"

namespace cgmc {

enum class Scheme { micro, cg0, cg2 };
enum class RateKind { metropolis, glauber, symmetric };

const char* to_string(Scheme s);
const char* to_string(RateKind k);
Scheme scheme_from_string(const std::string& name);
RateKind rate_kind_from_string(const std::string& name);

/// G(r) with G(r) = G(-r) exp(-r).
struct RateFunction {
    RateKind kind = RateKind::metropolis;
    double operator()(double r) const;
};

struct ModelSpec {
    Scheme scheme = Scheme::micro;
    int n_sites = 512;
    int q = 1;  ///< cell size; ignored by the micro scheme
    Kernel kernel;
    FieldSpec field;
    double beta = 1.0;
    RateKind rate = RateKind::metropolis;
    BetaMode beta_mode = BetaMode::uniform_beta;
    /// false reproduces coarse rates without beta in front of the coarse energy change.
    bool coarse_beta_in_rate = true;
};

/// Precomputed tables for one scheme at one parameter point. Immutable; share between chains.
class Model {
public:
    explicit Model(ModelSpec spec);

    const ModelSpec& spec() const { return spec_; }
    Scheme scheme() const { return spec_.scheme; }
    bool coarse() const { return spec_.scheme != Scheme::micro; }
    int sites() const { return spec_.n_sites; }
    /// Number of update slots per sweep: N for micro, M for the coarse schemes.
    int slots() const { return coarse() ? part_.cells() : spec_.n_sites; }

    const CoarsePartition& partition() const { return part_; }
    const CoarseKernel& coarse_kernel() const { return ck_; }
    const CoarseField& coarse_field() const { return field_; }
    /// Null unless the scheme is cg2.
    const KernelMoments* moments() const { return km_.get(); }

    /// Phi with target proportional to exp(-Phi): beta H_N for micro.
    double exponent(const SpinConfig& sigma) const;
    /// Phi for the coarse schemes; the binomial prior is not included.
    double exponent(const CoarseConfig& alpha) const;
    double exponent_delta(const SpinConfig& sigma, int x) const;
    double exponent_delta(const CoarseConfig& alpha, int k, int direction) const;

    /// Acceptance probability for an exponent change; G scaled by a chain-wide constant when
    /// G can exceed 1 (symmetric rates).
    double acceptance(double dphi) const { return rate_(dphi) * rate_scale_; }
    double rate_scale() const { return rate_scale_; }

private:
    double exponent_change_bound() const;

    ModelSpec spec_;
    RateFunction rate_;
    CoarsePartition part_{2, 1};
    CoarseKernel ck_;
    CoarseField field_;
    std::shared_ptr<const KernelMoments> km_;
    double rate_scale_ = 1.0;
    double b0_ = 1.0;  // multiplies H0
    double b1_ = 1.0;  // multiplies H1 + H2
};

/// One proposed update; returns true if accepted.
bool micro_step(SpinConfig& sigma, const Model& model, Rng& rng);
bool coarse_step(CoarseConfig& alpha, const Model& model, Rng& rng);

struct SampleBatch {
    std::vector<double> magnetization;  ///< per-site magnetization of each record
    std::vector<CoarseConfig> states;   ///< coarse snapshots when requested
    std::uint64_t proposals = 0;
    std::uint64_t accepted = 0;
    std::uint64_t energy_evals = 0;  ///< local energy-difference evaluations
    std::uint64_t spec_hash = 0;

    std::size_t size() const { return magnetization.size(); }
    double acceptance_rate() const {
        return proposals == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(proposals);
    }
};

struct RunLength {
    long burnin = 10000;   ///< sweeps
    long samples = 10000;  ///< records
    long thinning = 10;    ///< sweeps between records
    bool keep_states = false;
};

/// A chain owning its configuration and random stream. The model can be swapped between runs,
/// which is how field sweeps continue from the previous point.
class Chain {
public:
    /// Starts from the all-up (initial_spin = +1) or all-down (-1) configuration.
    Chain(std::shared_ptr<const Model> model, Rng rng, int initial_spin = 1);

    /// Geometry (scheme, N, q) must match the current model.
    void set_model(std::shared_ptr<const Model> model);
    const Model& model() const { return *model_; }

    void sweep();
    SampleBatch run(const RunLength& length);

    double magnetization() const;
    const SpinConfig& micro_state() const { return sigma_; }
    const CoarseConfig& coarse_state() const { return alpha_; }

private:
    void step();

    std::shared_ptr<const Model> model_;
    Rng rng_;
    SpinConfig sigma_;
    CoarseConfig alpha_;
    long total_ = 0;  // sum of spins (micro) or of eta (coarse)
    std::uint64_t proposals_ = 0, accepted_ = 0;
};

struct ChainSpec {
    ModelSpec model;
    RunLength length;
    std::uint64_t seed = 1;
    std::uint64_t stream = 0;
    int initial_spin = 1;
};

std::uint64_t spec_hash(const ChainSpec& spec);
/// Throws std::invalid_argument for negative lengths or zero thinning.
SampleBatch run_chain(const ChainSpec& spec);

/// Exact one-step matrix of the chain, stored by sparse rows. States are ordered by bit pattern
/// (micro) or mixed-radix occupancy with cell 0 least significant (coarse).
struct TransitionMatrix {
    std::vector<std::vector<std::pair<std::uint32_t, double>>> rows;
    std::vector<double> log_target;  ///< normalized log stationary weights of the model

    std::size_t states() const { return rows.size(); }
    double entry(std::size_t i, std::size_t j) const;
};

inline constexpr std::size_t kTransitionMatrixMaxStates = std::size_t{1} << 16;

/// Throws std::invalid_argument when the state space exceeds kTransitionMatrixMaxStates.
TransitionMatrix transition_matrix(const Model& model);

std::size_t coarse_state_count(int cells, int q);
CoarseConfig coarse_state(std::size_t index, int cells, int q);
std::size_t coarse_index(const CoarseConfig& alpha);

struct BalanceReport {
    double row_sum_error = 0.0;        ///< max |sum_j T_ij - 1|
    double detailed_balance_error = 0.0;  ///< max |pi_i T_ij - pi_j T_ji|
    double stationarity_error = 0.0;   ///< max |(pi T)_j - pi_j|
    bool irreducible = false;
    bool aperiodic = false;
};

BalanceReport check_balance(const TransitionMatrix& t);

}  // namespace cgmc
