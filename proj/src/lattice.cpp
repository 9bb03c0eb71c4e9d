#include "cgmc/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cgmc {

MicroLattice::MicroLattice(int n_sites) : n_(n_sites) {
    if (n_sites < 2) throw std::invalid_argument("lattice needs at least 2 sites");
}

SpinConfig::SpinConfig(int n_sites, Spin fill) {
    if (n_sites < 1) throw std::invalid_argument("spin configuration needs at least one site");
    if (fill != 1 && fill != -1) throw std::invalid_argument("spins must be +1 or -1");
    s_.assign(static_cast<std::size_t>(n_sites), fill);
}

SpinConfig::SpinConfig(std::vector<Spin> spins) : s_(std::move(spins)) {
    for (Spin v : s_)
        if (v != 1 && v != -1) throw std::invalid_argument("spins must be +1 or -1");
}

SpinConfig SpinConfig::from_bits(std::uint64_t bits, int n_sites) {
    SpinConfig c(n_sites, -1);
    for (int i = 0; i < n_sites; ++i)
        if ((bits >> i) & 1U) c.s_[static_cast<std::size_t>(i)] = 1;
    return c;
}

long SpinConfig::total() const {
    long t = 0;
    for (Spin v : s_) t += v;
    return t;
}

SpinConfig SpinConfig::flipped() const {
    SpinConfig c = *this;
    for (auto& v : c.s_) v = static_cast<Spin>(-v);
    return c;
}

Kernel::Kernel(std::vector<double> values, std::string profile_name)
    : values_(std::move(values)), profile_(std::move(profile_name)) {
    for (double v : values_) {
        if (!std::isfinite(v)) throw std::invalid_argument("kernel values must be finite");
        norm_ += 2.0 * std::abs(v);
    }
}

Kernel kernel_from_profile(const std::function<double(double)>& profile, int range, double j0,
                           std::string profile_name) {
    if (range < 1) throw std::invalid_argument("kernel range must be positive");
    std::vector<double> v(static_cast<std::size_t>(range));
    const double L = range;
    for (int r = 1; r <= range; ++r) v[static_cast<std::size_t>(r - 1)] = j0 * profile(r / L) / L;
    return Kernel(std::move(v), std::move(profile_name));
}

Kernel constant_kernel(double j0, int range) {
    if (range < 1) throw std::invalid_argument("kernel range must be positive");
    return Kernel(std::vector<double>(static_cast<std::size_t>(range), j0 / (2.0 * range)), "constant");
}

Kernel curie_weiss_kernel(double j0, int n_sites) {
    if (n_sites < 2) throw std::invalid_argument("mean-field kernel needs at least 2 sites");
    return Kernel(std::vector<double>(static_cast<std::size_t>(n_sites / 2), j0 / n_sites), "curie_weiss");
}

TruncatedKernel truncate_kernel(std::span<const double> values, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("truncation tolerance must be positive");
    // tail[r] = sum_{s > r} |J(s)|
    std::vector<double> tail(values.size() + 1, 0.0);
    for (std::size_t r = values.size(); r-- > 0;) tail[r] = tail[r + 1] + std::abs(values[r]);
    std::size_t keep = 0;
    while (tail[keep] > 0.5 * delta) ++keep;
    TruncatedKernel out;
    out.effective_range = static_cast<int>(keep);
    out.tail_mass = 2.0 * tail[keep];
    out.kernel = Kernel(std::vector<double>(values.begin(), values.begin() + static_cast<long>(keep)), "truncated");
    return out;
}

FieldSpec FieldSpec::uniform(double h0) {
    FieldSpec f;
    f.h0_ = h0;
    return f;
}

FieldSpec FieldSpec::per_site(std::vector<double> h) {
    if (h.empty()) throw std::invalid_argument("per-site field table is empty");
    FieldSpec f;
    f.per_site_ = std::move(h);
    return f;
}

void FieldSpec::check_size(int n_sites) const {
    if (!is_uniform() && static_cast<int>(per_site_.size()) != n_sites)
        throw std::invalid_argument("per-site field has " + std::to_string(per_site_.size()) +
                                    " entries, lattice has " + std::to_string(n_sites));
}

namespace {

// Number of forward displacements that can carry an interaction on an n-site ring.
int forward_reach(int n, const Kernel& kernel) { return std::min(kernel.range(), n / 2); }

}  // namespace

double micro_energy(const SpinConfig& sigma, const Kernel& kernel, const FieldSpec& field, OpCounter* counter) {
    const int n = sigma.size();
    field.check_size(n);
    const MicroLattice lat(n);
    const int reach = forward_reach(n, kernel);
    auto site = [&](std::size_t xi) {
        const int x = static_cast<int>(xi);
        double pair = 0.0;
        for (int r = 1; r <= reach; ++r) {
            const double w = (2 * r == n) ? 0.5 : 1.0;
            pair += w * kernel(r) * sigma[lat.wrap(x + r)];
        }
        count(counter, static_cast<std::uint64_t>(reach));
        return sigma[x] * (field.at(x) - pair);
    };
    if (n >= (1 << 16)) return pairwise_sum(0, static_cast<std::size_t>(n), site);
    double e = 0.0;
    for (int x = 0; x < n; ++x) e += site(static_cast<std::size_t>(x));
    return e;
}

double local_coupling(const SpinConfig& sigma, int x, const Kernel& kernel) {
    const int n = sigma.size();
    if (x < 0 || x >= n) throw std::out_of_range("site index " + std::to_string(x) + " out of range");
    const MicroLattice lat(n);
    const int reach = forward_reach(n, kernel);
    double s = 0.0;
    for (int r = 1; r <= reach; ++r) {
        const double j = kernel(r);
        if (2 * r == n)
            s += j * sigma[lat.wrap(x + r)];
        else
            s += j * (sigma[lat.wrap(x + r)] + sigma[lat.wrap(x - r)]);
    }
    return s;
}

double micro_energy_delta_flip(const SpinConfig& sigma, int x, const Kernel& kernel, const FieldSpec& field) {
    field.check_size(sigma.size());
    const double coupling = local_coupling(sigma, x, kernel);
    const double s = sigma[x];
    return 2.0 * s * coupling - 2.0 * field.at(x) * s;
}

}  // namespace cgmc
