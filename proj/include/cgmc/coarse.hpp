#pragma once

// Block-spin coarse graining on the 1D ring: the cell map, binomial prior, within-cell
// conditional moments, the cell-averaged kernel and the zeroth-order coarse Hamiltonian
//
//   H0(eta) = -1/2 sum_k sum_{l != k} Jbar(k - l) eta(k) eta(l)
//             -1/2 sum_k Jbar(0) (eta(k)^2 - q) + sum_k hbar_k(eta(k))
//
// Cells are stored by occupancy alpha(k) = number of up spins; eta = 2 alpha - q.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "cgmc/lattice.hpp"
#include "cgmc/rng.hpp"

namespace cgmc {

class CoarsePartition {
public:
    CoarsePartition(int n_sites, int q);

    int q() const { return q_; }
    int cells() const { return m_; }
    int sites() const { return n_; }
    int cell_of(int x) const { return x / q_; }
    int first_site(int k) const { return k * q_; }
    int wrap(long k) const {
        long r = k % m_;
        return static_cast<int>(r < 0 ? r + m_ : r);
    }
    /// Minimal-image distance between cells on the coarse ring.
    int distance(int k, int l) const {
        const int d = wrap(static_cast<long>(l) - k);
        return d <= m_ - d ? d : m_ - d;
    }

private:
    int n_;
    int q_;
    int m_;
};

class CoarseConfig {
public:
    CoarseConfig() = default;
    CoarseConfig(int cells, int q, int fill);
    /// Throws std::invalid_argument if an occupancy is outside 0..q.
    CoarseConfig(std::vector<int> alpha, int q);

    int cells() const { return static_cast<int>(alpha_.size()); }
    int q() const { return q_; }
    int alpha(int k) const { return alpha_[static_cast<std::size_t>(k)]; }
    int eta(int k) const { return 2 * alpha(k) - q_; }
    void set_alpha(int k, int a) { alpha_[static_cast<std::size_t>(k)] = a; }
    std::span<const int> alphas() const { return alpha_; }
    long total_eta() const;
    bool operator==(const CoarseConfig&) const = default;

private:
    std::vector<int> alpha_;
    int q_ = 0;
};

CoarseConfig coarsen(const SpinConfig& sigma, const CoarsePartition& part);

/// log of the binomial prior weight C(q, (eta+q)/2) 2^-q of one cell value.
double coarse_prior_logweight(int eta, int q);
/// Same, indexed by occupancy.
double coarse_prior_logweight_alpha(int alpha, int q);

/// E[sigma(x1)...sigma(xn) | alpha] for n distinct sites of a q-site cell holding alpha up spins.
struct CellMoments {
    double e1 = 0.0;
    double e2 = 0.0;
    double e3 = 0.0;
    double e4 = 0.0;
    int max_order = 0;  ///< highest order that is defined for this q

    /// Throws std::domain_error when the requested order exceeds max_order.
    double at(int order) const;
};

CellMoments conditional_moments(int alpha, int q);

/// Moments for every occupancy 0..q of one cell size.
class MomentTable {
public:
    explicit MomentTable(int q);
    const CellMoments& operator[](int alpha) const { return rows_[static_cast<std::size_t>(alpha)]; }
    int q() const { return q_; }

private:
    int q_;
    std::vector<CellMoments> rows_;
};

/// Cell-averaged kernel: jbar(s) for coarse displacement s on the ring, jbar(0) within a cell.
class CoarseKernel {
public:
    CoarseKernel() = default;
    CoarseKernel(const Kernel& kernel, const CoarsePartition& part);

    const CoarsePartition& partition() const { return part_; }
    /// Largest minimal-image coarse displacement with a nonzero average.
    int reach() const { return reach_; }
    double jbar(int s) const;
    double jbar0() const { return jbar0_; }
    /// The kernel seen by the micro ring: J(minimal-image distance).
    const Kernel& micro_kernel() const { return kernel_; }

private:
    CoarsePartition part_{2, 1};
    Kernel kernel_;
    std::vector<double> jbar_;  // indexed by minimal-image distance 0..m/2, [0] unused
    double jbar0_ = 0.0;
    int reach_ = 0;
};

CoarseKernel coarse_kernel(const Kernel& kernel, const CoarsePartition& part);

/// Per-cell effective field hbar_k(alpha), the deterministic field energy of a cell.
class CoarseField {
public:
    CoarseField() = default;
    CoarseField(int cells, int q);
    static CoarseField uniform(double h0, int cells, int q);

    double operator()(int k, int alpha) const {
        return table_[static_cast<std::size_t>(k) * static_cast<std::size_t>(q_ + 1) + static_cast<std::size_t>(alpha)];
    }
    void set(int k, int alpha, double v) {
        table_[static_cast<std::size_t>(k) * static_cast<std::size_t>(q_ + 1) + static_cast<std::size_t>(alpha)] = v;
    }
    int cells() const { return m_; }
    int q() const { return q_; }

private:
    int m_ = 0;
    int q_ = 0;
    std::vector<double> table_;
};

/// Largest cell size for which a sub-cell varying field is enumerated (2^q placements).
inline constexpr int kEffectiveFieldMaxQ = 20;

/// Uniform or cell-constant fields map to h_k * eta exactly; otherwise hbar is defined by
/// exp(-beta hbar_k(alpha)) = E[exp(-beta sum_{x in C_k} h(x) sigma(x)) | alpha], enumerated.
CoarseField effective_field(const FieldSpec& field, const CoarsePartition& part, double beta);

double h0_energy(const CoarseConfig& alpha, const CoarseKernel& ck, const CoarseField& field,
                 OpCounter* counter = nullptr);
/// Convenience overload; throws std::invalid_argument for fields that vary inside a cell.
double h0_energy(const CoarseConfig& alpha, const CoarseKernel& ck, const FieldSpec& field,
                 OpCounter* counter = nullptr);

/// H0 change for alpha(k) -> alpha(k) + direction, O(L/q).
double h0_energy_delta(const CoarseConfig& alpha, int k, int direction, const CoarseKernel& ck,
                       const CoarseField& field);

/// Uniform placement of alpha(k) up spins in every cell.
SpinConfig sample_conditional(const CoarseConfig& alpha, Rng& rng);

}  // namespace cgmc
