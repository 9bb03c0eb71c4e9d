#include "cgmc/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cgmc {

Estimate batch_means(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n == 0) throw std::invalid_argument("cannot estimate from an empty sample");
    Estimate e;
    e.mean = pairwise_sum(0, n, [&](std::size_t i) { return x[i]; }) / static_cast<double>(n);
    const auto batches = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
    const std::size_t size = n / batches;
    if (batches < 2 || size == 0) return e;
    // Trailing records that do not fill a batch are left out of the variance.
    std::vector<double> means(batches);
    for (std::size_t b = 0; b < batches; ++b) {
        double s = 0.0;
        for (std::size_t i = b * size; i < (b + 1) * size; ++i) s += x[i];
        means[b] = s / static_cast<double>(size);
    }
    double mu = 0.0;
    for (double m : means) mu += m;
    mu /= static_cast<double>(batches);
    double var = 0.0;
    for (double m : means) var += (m - mu) * (m - mu);
    var /= static_cast<double>(batches - 1);
    e.stderr_ = std::sqrt(var / static_cast<double>(batches));
    return e;
}

Estimate magnetization(const SampleBatch& batch) {
    if (batch.magnetization.empty()) throw std::invalid_argument("magnetization of an empty batch");
    return batch_means(batch.magnetization);
}

namespace {

void check_distribution(std::span<const double> p, const char* name) {
    double total = 0.0;
    for (double v : p) {
        if (!(v >= 0.0)) throw std::invalid_argument(std::string(name) + " has a negative or NaN weight");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-10)
        throw std::invalid_argument(std::string(name) + " is not normalized (total " + std::to_string(total) + ")");
}

}  // namespace

double relative_entropy_exact(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw std::invalid_argument("distributions have different supports");
    check_distribution(p, "p");
    check_distribution(q, "q");
    double r = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0.0) continue;
        if (q[i] == 0.0) return kInfiniteEntropy;
        r += p[i] * std::log(p[i] / q[i]);
    }
    return r;
}

double relative_entropy_log(std::span<const double> log_p, std::span<const double> log_q) {
    if (log_p.size() != log_q.size()) throw std::invalid_argument("distributions have different supports");
    constexpr double ninf = -std::numeric_limits<double>::infinity();
    double r = 0.0;
    for (std::size_t i = 0; i < log_p.size(); ++i) {
        if (log_p[i] == ninf) continue;
        if (log_q[i] == ninf) return kInfiniteEntropy;
        r += std::exp(log_p[i]) * (log_p[i] - log_q[i]);
    }
    return r;
}

TvBound ckp_tv_bound(std::span<const double> p, std::span<const double> q) {
    const double r = relative_entropy_exact(p, q);
    TvBound b;
    for (std::size_t i = 0; i < p.size(); ++i) b.tv += std::abs(p[i] - q[i]);
    b.sqrt_2r = std::sqrt(2.0 * std::max(r, 0.0));
    b.holds = b.tv <= b.sqrt_2r + 1e-12;
    return b;
}

EntropyReport scheme_entropy_exact(const ModelSpec& spec, const KadanoffTable* table) {
    if (spec.scheme == Scheme::micro) throw std::invalid_argument("relative entropy needs a coarse scheme");
    if (spec.n_sites > kEnumerateMaxSites)
        throw std::invalid_argument("exact relative entropy limited to N <= " + std::to_string(kEnumerateMaxSites));
    KadanoffTable own;
    if (!table) {
        own = kadanoff_table(MicroParams{spec.n_sites, spec.kernel, spec.field, spec.beta}, spec.q);
        table = &own;
    }
    if (table->n_sites != spec.n_sites || table->q != spec.q || table->beta != spec.beta)
        throw std::invalid_argument("Kadanoff table does not match the scheme parameters");
    const Model model(spec);
    const EnumeratedMeasure mp = enumerate_coarse(model);
    const EnumeratedMeasure exact = kadanoff_measure(*table);
    const int cells = model.partition().cells();
    double energy = 0.0;
    for (std::size_t s = 0; s < mp.states(); ++s) {
        const CoarseConfig alpha = coarse_state(s, cells, spec.q);
        energy += std::exp(mp.log_weights[s]) * (spec.beta * table->hbar[s] - model.exponent(alpha));
    }
    const double n = spec.n_sites;
    EntropyReport r;
    r.method = EntropyMethod::exact_enumeration;
    r.log_partition_term = (exact.log_z - mp.log_z) / n;
    r.energy_term = energy / n;
    r.r_per_site = r.log_partition_term + r.energy_term;
    r.cross_check = relative_entropy_log(mp.log_weights, exact.log_weights) / n;
    r.total = r.r_per_site * n;
    return r;
}

namespace {

// mean(r) + log mean(exp(-r)), max-shifted.
double posterior_functional(std::span<const double> r) {
    const double n = static_cast<double>(r.size());
    double mean = 0.0, lo = r[0];
    for (double v : r) {
        mean += v;
        lo = std::min(lo, v);
    }
    double s = 0.0;
    for (double v : r) s += std::exp(-(v - lo));
    return mean / n + (-lo + std::log(s / n));
}

}  // namespace

EntropyReport a_posteriori_mc(const SampleBatch& batch, const KernelMoments& km, double beta) {
    if (batch.states.empty()) throw std::invalid_argument("a posteriori estimate needs recorded coarse states");
    std::vector<double> r;
    r.reserve(batch.states.size());
    for (const auto& a : batch.states) r.push_back(residuum(a, km, beta));
    EntropyReport rep;
    rep.method = EntropyMethod::mc_cumulant;
    rep.total = posterior_functional(r);
    const std::size_t n = r.size();
    const auto blocks = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
    const std::size_t size = n / blocks;
    if (blocks >= 2 && size > 0) {
        std::vector<double> theta(blocks);
        std::vector<double> keep;
        keep.reserve(n);
        for (std::size_t b = 0; b < blocks; ++b) {
            keep.clear();
            for (std::size_t i = 0; i < blocks * size; ++i)
                if (i / size != b) keep.push_back(r[i]);
            theta[b] = posterior_functional(keep);
        }
        double mu = 0.0;
        for (double t : theta) mu += t;
        mu /= static_cast<double>(blocks);
        double var = 0.0;
        for (double t : theta) var += (t - mu) * (t - mu);
        rep.stderr_ = std::sqrt(var * static_cast<double>(blocks - 1) / static_cast<double>(blocks));
    }
    const double sites = km.partition().sites();
    rep.r_per_site = rep.total / sites;
    return rep;
}

EntropyReport a_posteriori_exact(const Model& cg0, const KernelMoments& km) {
    if (cg0.scheme() != Scheme::cg0) throw std::invalid_argument("a posteriori estimate is defined on the cg0 measure");
    const EnumeratedMeasure m = enumerate_coarse(cg0);
    const int cells = cg0.partition().cells();
    const int q = cg0.partition().q();
    const double beta = cg0.spec().beta;
    double mean = 0.0;
    LogSumExp lse;
    for (std::size_t s = 0; s < m.states(); ++s) {
        const double r = residuum(coarse_state(s, cells, q), km, beta);
        mean += std::exp(m.log_weights[s]) * r;
        lse.add(m.log_weights[s] - r);
    }
    EntropyReport rep;
    rep.method = EntropyMethod::exact_enumeration;
    rep.total = mean + lse.value();
    rep.r_per_site = rep.total / cg0.sites();
    return rep;
}

LoopArea loop_area(std::span<const double> h, std::span<const Estimate> up, std::span<const Estimate> down,
                   std::uint64_t seed, int resamples) {
    const std::size_t n = h.size();
    if (n < 2 || up.size() != n || down.size() != n) throw std::invalid_argument("loop area needs matching branches of >= 2 points");
    for (std::size_t i = 1; i < n; ++i)
        if (!(h[i] > h[i - 1])) throw std::invalid_argument("field grid must be strictly increasing");
    auto area = [&](auto&& gap) {
        double a = 0.0;
        for (std::size_t i = 1; i < n; ++i) a += 0.5 * (gap(i) + gap(i - 1)) * (h[i] - h[i - 1]);
        return a;
    };
    LoopArea out;
    out.area = area([&](std::size_t i) { return up[i].mean - down[i].mean; });
    if (resamples < 2) return out;
    Rng rng = make_stream(seed, 0);
    std::vector<double> gap(n), draws(static_cast<std::size_t>(resamples));
    for (auto& d : draws) {
        for (std::size_t i = 0; i < n; ++i)
            gap[i] = (up[i].mean + up[i].stderr_ * standard_normal(rng)) -
                     (down[i].mean + down[i].stderr_ * standard_normal(rng));
        d = area([&](std::size_t i) { return gap[i]; });
    }
    double mu = 0.0;
    for (double d : draws) mu += d;
    mu /= resamples;
    double var = 0.0;
    for (double d : draws) var += (d - mu) * (d - mu);
    out.stderr_ = std::sqrt(var / (resamples - 1));
    std::sort(draws.begin(), draws.end());
    out.ci_low = draws[static_cast<std::size_t>(0.025 * (resamples - 1))];
    out.ci_high = draws[static_cast<std::size_t>(0.975 * (resamples - 1))];
    return out;
}

}  // namespace cgmc
