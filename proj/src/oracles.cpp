#include "cgmc/oracles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace cgmc {

namespace {

constexpr std::size_t kBlocks = 16;

void check_micro(const MicroParams& p) {
    if (p.n_sites < 2 || p.n_sites > kEnumerateMaxSites)
        throw std::invalid_argument("exhaustive enumeration needs 2 <= N <= " + std::to_string(kEnumerateMaxSites));
    if (!(p.beta >= 0.0) || !std::isfinite(p.beta)) throw std::invalid_argument("beta must be finite and >= 0");
    p.field.check_size(p.n_sites);
}

double energy_of(std::uint64_t bits, const MicroParams& p) {
    return micro_energy(SpinConfig::from_bits(bits, p.n_sites), p.kernel, p.field);
}

std::size_t fiber_index(std::uint64_t bits, int q, int cells) {
    const std::uint64_t mask = (std::uint64_t{1} << q) - 1;
    std::size_t idx = 0;
    for (int k = cells; k-- > 0;)
        idx = idx * static_cast<std::size_t>(q + 1) + static_cast<std::size_t>(std::popcount((bits >> (k * q)) & mask));
    return idx;
}

// Statistics of one fiber: log-sum of exp(-beta H), and sums for mean and variance.
struct FiberAcc {
    LogSumExp lse;
    double sum = 0.0;
    double sq = 0.0;
};

KadanoffTable finish(const MicroParams& p, int q, std::vector<FiberAcc>& acc, const LogSumExp& total) {
    const int cells = p.n_sites / q;
    KadanoffTable t;
    t.n_sites = p.n_sites;
    t.q = q;
    t.beta = p.beta;
    t.log_z_micro = total.value();
    const std::size_t states = acc.size();
    t.hbar.resize(states);
    t.mean.resize(states);
    t.variance.resize(states);
    for (std::size_t s = 0; s < states; ++s) {
        const CoarseConfig alpha = coarse_state(s, cells, q);
        double log_count = 0.0;
        for (int k = 0; k < cells; ++k) log_count += log_binomial(q, alpha.alpha(k));
        const double count = std::round(std::exp(log_count));
        t.mean[s] = acc[s].sum / count;
        t.variance[s] = acc[s].sq / count;
        t.hbar[s] = p.beta < kKadanoffBetaFloor ? t.mean[s] : -(acc[s].lse.value() - log_count) / p.beta;
    }
    return t;
}

}  // namespace

EnumeratedMeasure enumerate_micro_serial(const MicroParams& p) {
    check_micro(p);
    const std::size_t n = std::size_t{1} << p.n_sites;
    EnumeratedMeasure m;
    m.log_weights.resize(n);
    LogSumExp acc;
    for (std::size_t s = 0; s < n; ++s) {
        m.log_weights[s] = -p.beta * energy_of(s, p);
        acc.add(m.log_weights[s]);
    }
    m.log_z = acc.value();
    for (double& v : m.log_weights) v -= m.log_z;
    return m;
}

EnumeratedMeasure enumerate_micro(const MicroParams& p) {
    check_micro(p);
    const std::size_t n = std::size_t{1} << p.n_sites;
    const std::size_t blocks = std::min(kBlocks, n);
    const std::size_t per = n / blocks;
    EnumeratedMeasure m;
    m.log_weights.resize(n);
    std::vector<LogSumExp> part(blocks);
#pragma omp parallel for schedule(static)
    for (std::size_t b = 0; b < blocks; ++b)
        for (std::size_t s = b * per; s < (b + 1) * per; ++s) {
            m.log_weights[s] = -p.beta * energy_of(s, p);
            part[b].add(m.log_weights[s]);
        }
    LogSumExp acc;
    for (const auto& a : part) acc.merge(a);
    m.log_z = acc.value();
    for (double& v : m.log_weights) v -= m.log_z;
    return m;
}

KadanoffTable kadanoff_table_serial(const MicroParams& p, int q) {
    check_micro(p);
    const CoarsePartition part(p.n_sites, q);
    const int cells = part.cells();
    const std::size_t n = std::size_t{1} << p.n_sites;
    std::vector<FiberAcc> acc(coarse_state_count(cells, q));
    std::vector<double> h(n);
    LogSumExp total;
    for (std::size_t s = 0; s < n; ++s) {
        h[s] = energy_of(s, p);
        auto& a = acc[fiber_index(s, q, cells)];
        a.lse.add(-p.beta * h[s]);
        a.sum += h[s];
        total.add(-p.beta * h[s]);
    }
    std::vector<double> count(acc.size(), 0.0);
    for (std::size_t s = 0; s < n; ++s) count[fiber_index(s, q, cells)] += 1.0;
    for (std::size_t s = 0; s < n; ++s) {
        const std::size_t f = fiber_index(s, q, cells);
        const double d = h[s] - acc[f].sum / count[f];
        acc[f].sq += d * d;
    }
    return finish(p, q, acc, total);
}

KadanoffTable kadanoff_table(const MicroParams& p, int q) {
    check_micro(p);
    const CoarsePartition part(p.n_sites, q);
    const int cells = part.cells();
    const std::size_t n = std::size_t{1} << p.n_sites;
    const std::size_t states = coarse_state_count(cells, q);
    const std::size_t blocks = std::min(kBlocks, n);
    const std::size_t per = n / blocks;
    std::vector<double> h(n);
    std::vector<std::vector<FiberAcc>> part_acc(blocks, std::vector<FiberAcc>(states));
    std::vector<LogSumExp> part_total(blocks);
#pragma omp parallel for schedule(static)
    for (std::size_t b = 0; b < blocks; ++b)
        for (std::size_t s = b * per; s < (b + 1) * per; ++s) {
            h[s] = energy_of(s, p);
            auto& a = part_acc[b][fiber_index(s, q, cells)];
            a.lse.add(-p.beta * h[s]);
            a.sum += h[s];
            part_total[b].add(-p.beta * h[s]);
        }
    std::vector<FiberAcc> acc(states);
    LogSumExp total;
    for (std::size_t b = 0; b < blocks; ++b) {
        total.merge(part_total[b]);
        for (std::size_t f = 0; f < states; ++f) {
            acc[f].lse.merge(part_acc[b][f].lse);
            acc[f].sum += part_acc[b][f].sum;
        }
    }
    // Second pass: centred squares against the merged means.
    std::vector<double> mean(states);
    for (std::size_t f = 0; f < states; ++f) {
        const CoarseConfig alpha = coarse_state(f, cells, q);
        double log_count = 0.0;
        for (int k = 0; k < cells; ++k) log_count += log_binomial(q, alpha.alpha(k));
        mean[f] = acc[f].sum / std::round(std::exp(log_count));
    }
#pragma omp parallel for schedule(static)
    for (std::size_t b = 0; b < blocks; ++b) {
        for (auto& a : part_acc[b]) a.sq = 0.0;
        for (std::size_t s = b * per; s < (b + 1) * per; ++s) {
            const std::size_t f = fiber_index(s, q, cells);
            const double d = h[s] - mean[f];
            part_acc[b][f].sq += d * d;
        }
    }
    for (std::size_t b = 0; b < blocks; ++b)
        for (std::size_t f = 0; f < states; ++f) acc[f].sq += part_acc[b][f].sq;
    return finish(p, q, acc, total);
}

namespace {

// All q-bit masks with the given popcount, ascending.
std::vector<std::uint32_t> placements(int q, int alpha) {
    std::vector<std::uint32_t> out;
    for (std::uint32_t b = 0; b < (1U << q); ++b)
        if (std::popcount(b) == alpha) out.push_back(b);
    return out;
}

}  // namespace

double exact_kadanoff_hamiltonian(const CoarseConfig& alpha, const MicroParams& p) {
    check_micro(p);
    const int q = alpha.q();
    const CoarsePartition part(p.n_sites, q);
    if (alpha.cells() != part.cells()) throw std::invalid_argument("coarse configuration does not match N / q");
    std::vector<std::vector<std::uint32_t>> opts;
    for (int k = 0; k < alpha.cells(); ++k) opts.push_back(placements(q, alpha.alpha(k)));
    std::vector<std::size_t> digit(opts.size(), 0);
    LogSumExp lse;
    double sum = 0.0;
    double count = 0.0;
    for (;;) {
        std::uint64_t bits = 0;
        for (std::size_t k = 0; k < opts.size(); ++k) bits |= static_cast<std::uint64_t>(opts[k][digit[k]]) << (k * q);
        const double h = energy_of(bits, p);
        lse.add(-p.beta * h);
        sum += h;
        count += 1.0;
        std::size_t k = 0;
        while (k < digit.size() && ++digit[k] == opts[k].size()) digit[k++] = 0;
        if (k == digit.size()) break;
    }
    if (p.beta < kKadanoffBetaFloor) return sum / count;
    return -(lse.value() - std::log(count)) / p.beta;
}

EnumeratedMeasure pushforward(const EnumeratedMeasure& micro, const CoarsePartition& part) {
    const int n = part.sites();
    if (micro.states() != (std::size_t{1} << n)) throw std::invalid_argument("micro measure does not match the partition");
    std::vector<LogSumExp> acc(coarse_state_count(part.cells(), part.q()));
    for (std::size_t s = 0; s < micro.states(); ++s) acc[fiber_index(s, part.q(), part.cells())].add(micro.log_weights[s]);
    EnumeratedMeasure out;
    out.log_z = micro.log_z;
    out.log_weights.reserve(acc.size());
    for (const auto& a : acc) out.log_weights.push_back(a.value());
    return out;
}

namespace {

EnumeratedMeasure normalized(std::vector<double> lw) {
    LogSumExp acc;
    for (double v : lw) acc.add(v);
    EnumeratedMeasure m;
    m.log_z = acc.value();
    for (double& v : lw) v -= m.log_z;
    m.log_weights = std::move(lw);
    return m;
}

}  // namespace

EnumeratedMeasure kadanoff_measure(const KadanoffTable& t) {
    const int cells = t.n_sites / t.q;
    std::vector<double> lw(t.states());
    for (std::size_t s = 0; s < lw.size(); ++s) {
        const CoarseConfig alpha = coarse_state(s, cells, t.q);
        double lp = 0.0;
        for (int k = 0; k < cells; ++k) lp += coarse_prior_logweight_alpha(alpha.alpha(k), t.q);
        lw[s] = lp - t.beta * t.hbar[s];
    }
    return normalized(std::move(lw));
}

EnumeratedMeasure enumerate_coarse(const Model& model) {
    if (!model.coarse()) throw std::invalid_argument("enumerate_coarse needs a coarse scheme");
    const int cells = model.partition().cells();
    const int q = model.partition().q();
    const std::size_t states = coarse_state_count(cells, q);
    if (states > (std::size_t{1} << 24)) throw std::invalid_argument("coarse state space too large to enumerate");
    std::vector<double> lw(states);
#pragma omp parallel for schedule(static)
    for (std::size_t s = 0; s < states; ++s) {
        const CoarseConfig alpha = coarse_state(s, cells, q);
        double lp = 0.0;
        for (int k = 0; k < cells; ++k) lp += coarse_prior_logweight_alpha(alpha.alpha(k), q);
        lw[s] = lp - model.exponent(alpha);
    }
    return normalized(std::move(lw));
}

void write_measure_csv(std::ostream& out, const EnumeratedMeasure& m) {
    out << "state_id,log_weight\n";
    char buf[64];
    for (std::size_t s = 0; s < m.states(); ++s) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g\n", s, m.log_weights[s]);
        out << buf;
    }
}

const char* to_string(IntegralKind kind) {
    switch (kind) {
        case IntegralKind::kk2: return "kk2";
        case IntegralKind::kl2: return "kl2";
        case IntegralKind::kk_kl: return "kk_kl";
        default: return "triple";
    }
}

namespace {

std::size_t cells_needed(IntegralKind kind) {
    switch (kind) {
        case IntegralKind::kk2: return 1;
        case IntegralKind::triple: return 3;
        default: return 2;
    }
}

void check_cells(IntegralKind kind, int m, const std::vector<int>& cells, const std::vector<int>& alphas, int q) {
    if (cells.size() != cells_needed(kind) || alphas.size() != cells.size())
        throw std::invalid_argument(std::string("wrong number of cells for integral ") + to_string(kind));
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i] < 0 || cells[i] >= m) throw std::out_of_range("cell index out of range");
        if (alphas[i] < 0 || alphas[i] > q) throw std::invalid_argument("occupancy outside 0..q");
        for (std::size_t j = 0; j < i; ++j)
            if (cells[i] == cells[j]) throw std::invalid_argument("integral cells must be distinct");
    }
}

}  // namespace

double fluctuation_integral_oracle(IntegralKind kind, const Kernel& kernel, const CoarsePartition& part,
                        const std::vector<int>& cells, const std::vector<int>& alphas) {
    const int q = part.q();
    if (q > 10) throw std::invalid_argument("fluctuation integral enumeration is limited to q <= 10");
    if (q < 2) throw std::invalid_argument("fluctuation integrals need q >= 2");
    check_cells(kind, part.cells(), cells, alphas, q);
    const MicroLattice lat(part.sites());
    const std::size_t nc = cells.size();

    // Direct cell averages of J, independent of CoarseKernel.
    auto avg = [&](int k, int l) {
        double s = 0.0;
        int c = 0;
        for (int i = 0; i < q; ++i)
            for (int j = 0; j < q; ++j) {
                const int x = part.first_site(k) + i, y = part.first_site(l) + j;
                if (x == y) continue;
                s += kernel(lat.distance(x, y));
                ++c;
            }
        return s / c;
    };
    std::vector<std::vector<double>> jb(nc, std::vector<double>(nc, 0.0));
    for (std::size_t a = 0; a < nc; ++a)
        for (std::size_t b = 0; b < nc; ++b) jb[a][b] = avg(cells[a], cells[b]);

    // Fluctuation blocks and +-1 spin vectors are tabulated once; the loop below only multiplies.
    const auto qq = static_cast<std::size_t>(q) * static_cast<std::size_t>(q);
    std::vector<std::vector<double>> fl(nc * nc, std::vector<double>(qq, 0.0));
    for (std::size_t a = 0; a < nc; ++a)
        for (std::size_t b = 0; b < nc; ++b)
            for (int i = 0; i < q; ++i)
                for (int j = 0; j < q; ++j) {
                    if (a == b && i == j) continue;
                    const int x = part.first_site(cells[a]) + i, y = part.first_site(cells[b]) + j;
                    fl[a * nc + b][static_cast<std::size_t>(i * q + j)] = kernel(lat.distance(x, y)) - jb[a][b];
                }
    std::vector<std::vector<std::vector<double>>> spins(nc);
    for (std::size_t a = 0; a < nc; ++a)
        for (std::uint32_t bits : placements(q, alphas[a])) {
            std::vector<double> v(static_cast<std::size_t>(q));
            for (int i = 0; i < q; ++i) v[static_cast<std::size_t>(i)] = ((bits >> i) & 1U) ? 1.0 : -1.0;
            spins[a].push_back(std::move(v));
        }
    std::vector<std::size_t> digit(nc, 0);
    // Bare sum between the a-th and b-th listed cells (a == b: the diagonal is zero in fl).
    auto bare = [&](std::size_t a, std::size_t b) {
        const std::vector<double>& e = fl[a * nc + b];
        const std::vector<double>& u = spins[a][digit[a]];
        const std::vector<double>& v = spins[b][digit[b]];
        double s = 0.0;
        for (int i = 0; i < q; ++i) {
            double r = 0.0;
            for (int j = 0; j < q; ++j) r += e[static_cast<std::size_t>(i * q + j)] * v[static_cast<std::size_t>(j)];
            s += u[static_cast<std::size_t>(i)] * r;
        }
        return s;
    };
    double sum = 0.0;
    double count = 0.0;
    for (;;) {
        double v = 0.0;
        switch (kind) {
            case IntegralKind::kk2: v = bare(0, 0) * bare(0, 0); break;
            case IntegralKind::kl2: v = bare(0, 1) * bare(0, 1); break;
            case IntegralKind::kk_kl: v = bare(0, 0) * bare(0, 1); break;
            case IntegralKind::triple: v = bare(0, 1) * bare(1, 2); break;
        }
        sum += v;
        count += 1.0;
        std::size_t k = 0;
        while (k < nc && ++digit[k] == spins[k].size()) digit[k++] = 0;
        if (k == nc) break;
    }
    return sum / count;
}

double fluctuation_integral_closed_form(IntegralKind kind, const KernelMoments& km, const std::vector<int>& cells,
                             const std::vector<int>& alphas) {
    const auto& part = km.partition();
    const int q = part.q();
    check_cells(kind, part.cells(), cells, alphas, q);
    std::vector<CellMoments> e;
    for (int a : alphas) e.push_back(conditional_moments(a, q));
    switch (kind) {
        case IntegralKind::kk2: {
            const double e2 = e[0].at(2), e4 = e[0].at(4);
            return 4.0 * km.j2(0) * (-e4 + e2) + 2.0 * km.j1(0) * (e4 + 1.0 - 2.0 * e2);
        }
        case IntegralKind::kl2: {
            const int s = cells[1] - cells[0];
            const double a = e[0].at(2), b = e[1].at(2);
            return km.j2(s) * (-2.0 * a * b + a + b) + km.j1(s) * (a * b - a - b + 1.0);
        }
        case IntegralKind::kk_kl: {
            const int s = cells[1] - cells[0];
            return -2.0 * km.j2t(0, s) * (e[0].at(3) * e[1].at(1) - e[0].at(1) * e[1].at(1));
        }
        default: {
            const double j = km.j2t(cells[0] - cells[1], cells[2] - cells[1]);
            return j * (-e[0].at(1) * e[1].at(2) * e[2].at(1) + e[0].at(1) * e[2].at(1));
        }
    }
}

double ising_nn_exact_m(double beta, double h, double j0) {
    const double s = std::sinh(beta * h);
    return s / std::sqrt(s * s + std::exp(-2.0 * beta * j0));
}

double ising_nn_transfer_m(double beta, double h, double j0, int n_sites) {
    if (n_sites < 1) throw std::invalid_argument("ring needs at least one site");
    // Pair coupling J = J0/2; T(s, s') = exp(beta (J s s' + h (s + s') / 2)).
    const double bj = 0.5 * beta * j0;
    const double bh = beta * h;
    const double c = std::exp(bj) * std::cosh(bh);
    const double root = std::sqrt(std::exp(2.0 * bj) * std::sinh(bh) * std::sinh(bh) + std::exp(-2.0 * bj));
    const double lp = c + root, lm = c - root;
    const double dc = std::exp(bj) * std::sinh(bh);
    const double droot = std::exp(2.0 * bj) * std::sinh(bh) * std::cosh(bh) / root;
    const double dlp = dc + droot, dlm = dc - droot;
    // m = (lp^(N-1) lp' + lm^(N-1) lm') / (lp^N + lm^N), scaled by lp^N.
    const double r = std::pow(lm / lp, n_sites);
    if (lm == 0.0) return dlp / lp;
    return (dlp / lp + r * dlm / lm) / (1.0 + r);
}

CurieWeissRoot curie_weiss_m(double beta, double h, double j0, Branch branch) {
    auto f = [&](double m) { return std::tanh(beta * (j0 * m + h)) - m; };
    constexpr int grid = 4000;
    std::vector<double> roots;
    double x0 = -1.0, f0 = f(x0);
    if (f0 == 0.0) roots.push_back(x0);
    for (int i = 1; i <= grid; ++i) {
        const double x1 = -1.0 + 2.0 * i / grid;
        const double f1 = f(x1);
        if (f1 == 0.0) {
            roots.push_back(x1);
        } else if (f0 != 0.0 && (f0 < 0.0) != (f1 < 0.0)) {
            double lo = x0, hi = x1, flo = f0;
            while (hi - lo > 1e-13) {
                const double mid = 0.5 * (lo + hi);
                const double fm = f(mid);
                if (fm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if ((fm < 0.0) == (flo < 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        x0 = x1;
        f0 = f1;
    }
    CurieWeissRoot out;
    if (roots.empty()) {
        // Tangency missed by the grid; fall back to the sign of the field.
        out.m = h >= 0.0 ? 1.0 : -1.0;
        return out;
    }
    out.unique = roots.size() == 1;
    out.m = branch == Branch::upper ? roots.back() : roots.front();
    return out;
}

}  // namespace cgmc
