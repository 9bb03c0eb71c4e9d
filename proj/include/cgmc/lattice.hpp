#pragma once

// Microscopic 1D periodic lattice, two-body interaction kernels and the spin Hamiltonian
//
//   H_N(sigma) = -1/2 sum_x sum_{y != x} J(x - y) sigma(x) sigma(y) + sum_x h(x) sigma(x)
//
// Note the plus sign on the field term. Displacements on the ring are taken as minimal
// images and every unordered pair of sites interacts exactly once.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cgmc/numeric.hpp"

namespace cgmc {

using Spin = std::int8_t;

class MicroLattice {
public:
    explicit MicroLattice(int n_sites);

    int size() const { return n_; }
    int wrap(long x) const {
        long r = x % n_;
        return static_cast<int>(r < 0 ? r + n_ : r);
    }
    /// Minimal-image distance between sites x and y.
    int distance(int x, int y) const {
        const int d = wrap(static_cast<long>(y) - x);
        return d <= n_ - d ? d : n_ - d;
    }

private:
    int n_;
};

class SpinConfig {
public:
    SpinConfig() = default;
    explicit SpinConfig(int n_sites, Spin fill = 1);
    /// Throws std::invalid_argument if an entry is not +1 or -1.
    explicit SpinConfig(std::vector<Spin> spins);
    /// Bit i set means sigma(i) = +1.
    static SpinConfig from_bits(std::uint64_t bits, int n_sites);

    int size() const { return static_cast<int>(s_.size()); }
    Spin operator[](int x) const { return s_[static_cast<std::size_t>(x)]; }
    void flip(int x) { s_[static_cast<std::size_t>(x)] = static_cast<Spin>(-s_[static_cast<std::size_t>(x)]); }
    void set(int x, Spin v) { s_[static_cast<std::size_t>(x)] = v; }
    std::span<const Spin> spins() const { return s_; }
    long total() const;
    SpinConfig flipped() const;
    bool operator==(const SpinConfig&) const = default;

private:
    std::vector<Spin> s_;
};

/// Tabulated symmetric pair potential J(r), r = 1..L, zero beyond the range.
class Kernel {
public:
    Kernel() = default;
    explicit Kernel(std::vector<double> values, std::string profile_name = {});

    int range() const { return static_cast<int>(values_.size()); }
    double operator()(int r) const {
        if (r < 0) r = -r;
        return (r >= 1 && r <= range()) ? values_[static_cast<std::size_t>(r - 1)] : 0.0;
    }
    std::span<const double> values() const { return values_; }
    /// sum_{r != 0} |J(r)| over both half-axes.
    double norm() const { return norm_; }
    const std::string& profile_name() const { return profile_; }

private:
    std::vector<double> values_;
    std::string profile_;
    double norm_ = 0.0;
};

/// J(r) = J0 * V(r / L) / L for r = 1..L.
Kernel kernel_from_profile(const std::function<double(double)>& profile, int range, double j0 = 1.0,
                           std::string profile_name = "custom");
/// J(r) = J0 / (2L) for 1 <= r <= L; L = 1 gives the nearest-neighbour model.
Kernel constant_kernel(double j0, int range);
/// J = J0 / N between every pair of sites of an N-site ring (mean-field interaction).
Kernel curie_weiss_kernel(double j0, int n_sites);

struct TruncatedKernel {
    Kernel kernel;
    int effective_range = 0;
    double tail_mass = 0.0;  ///< removed mass over both half-axes
};

/// Smallest range whose one-sided tail mass is at most delta / 2.
TruncatedKernel truncate_kernel(std::span<const double> values, double delta);

class FieldSpec {
public:
    FieldSpec() = default;
    static FieldSpec uniform(double h0);
    static FieldSpec per_site(std::vector<double> h);

    bool is_uniform() const { return per_site_.empty(); }
    double uniform_value() const { return h0_; }
    double at(int x) const { return is_uniform() ? h0_ : per_site_[static_cast<std::size_t>(x)]; }
    std::span<const double> values() const { return per_site_; }
    /// Throws std::invalid_argument if a per-site table does not have n entries.
    void check_size(int n_sites) const;

private:
    double h0_ = 0.0;
    std::vector<double> per_site_;
};

double micro_energy(const SpinConfig& sigma, const Kernel& kernel, const FieldSpec& field,
                    OpCounter* counter = nullptr);

/// H_N(sigma^x) - H_N(sigma), O(L).
double micro_energy_delta_flip(const SpinConfig& sigma, int x, const Kernel& kernel, const FieldSpec& field);

/// Interaction-only local field sum_{y != x} J(x - y) sigma(y).
double local_coupling(const SpinConfig& sigma, int x, const Kernel& kernel);

}  // namespace cgmc
