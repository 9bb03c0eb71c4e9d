#pragma once

// Observables and error measures between coarse schemes and the exact coarse-grained law.
//
// For the specific relative entropy of a scheme p against the pushforward of the micro
// measure,
//
//   R(p) = log(Zbar / Zbar_p) + E_p[beta Hbar - Phi_p],
//
// and the a posteriori form evaluated on cg0 samples with r = beta (H1 + H2):
//
//   R(cg0) ~ E_0[r] + log E_0[exp(-r)].
//
// The sign of r inside the exponential is the one for which the identity is exact when Hbar
// is replaced by H0 + H1 + H2.

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "cgmc/oracles.hpp"
#include "cgmc/samplers.hpp"

namespace cgmc {

struct Estimate {
    double mean = 0.0;
    double stderr_ = 0.0;
};

/// Mean with a batch-means standard error over ceil(sqrt(n)) batches. Throws on empty input.
Estimate batch_means(std::span<const double> x);

Estimate magnetization(const SampleBatch& batch);

inline constexpr double kInfiniteEntropy = std::numeric_limits<double>::infinity();

/// sum p log(p / q) over probability vectors; +inf when p is not absolutely continuous
/// with respect to q. Throws for negative entries or totals off 1 by more than 1e-10.
double relative_entropy_exact(std::span<const double> p, std::span<const double> q);
/// Same from normalized log-weights (-inf marks an empty state).
double relative_entropy_log(std::span<const double> log_p, std::span<const double> log_q);

struct TvBound {
    double tv = 0.0;       ///< sum |p - q|
    double sqrt_2r = 0.0;  ///< sqrt(2 R(p|q))
    bool holds = true;
};

TvBound ckp_tv_bound(std::span<const double> p, std::span<const double> q);

enum class EntropyMethod { exact_enumeration, mc_cumulant };

struct EntropyReport {
    double r_per_site = 0.0;
    double log_partition_term = 0.0;  ///< log(Zbar / Zbar_p) / N
    double energy_term = 0.0;         ///< E_p[beta Hbar - Phi_p] / N
    double cross_check = 0.0;         ///< direct sum over states / N
    double stderr_ = 0.0;             ///< Monte Carlo only, total (not per site)
    double total = 0.0;               ///< r_per_site * N
    EntropyMethod method = EntropyMethod::exact_enumeration;
    double epsilon = 0.0;
};

/// Exact R(scheme | micro o F^-1) / N by enumeration. The model's scheme must be cg0 or cg2 and
/// N <= 20. Reuses a precomputed table when given.
EntropyReport scheme_entropy_exact(const ModelSpec& spec, const KadanoffTable* table = nullptr);

/// E_0[r] + log E_0[exp(-r)] over cg0 states, with a blocked jackknife error.
EntropyReport a_posteriori_mc(const SampleBatch& batch, const KernelMoments& km, double beta);
/// Same functional over the exact cg0 measure.
EntropyReport a_posteriori_exact(const Model& cg0, const KernelMoments& km);

struct LoopArea {
    double area = 0.0;
    double stderr_ = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

/// Trapezoid integral of (m_up - m_down) over h, with a parametric bootstrap over the
/// per-point standard errors. h must be increasing and shared by both branches.
LoopArea loop_area(std::span<const double> h, std::span<const Estimate> up, std::span<const Estimate> down,
                   std::uint64_t seed = 7, int resamples = 2000);

}  // namespace cgmc
