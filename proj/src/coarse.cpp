#include "cgmc/coarse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cgmc {

CoarsePartition::CoarsePartition(int n_sites, int q) : n_(n_sites), q_(q), m_(0) {
    if (q < 1) throw std::invalid_argument("cell size q must be positive");
    if (n_sites < 2 || n_sites % q != 0)
        throw std::invalid_argument("q=" + std::to_string(q) + " does not divide N=" + std::to_string(n_sites));
    m_ = n_sites / q;
    if (m_ < 2) throw std::invalid_argument("coarse lattice needs at least 2 cells");
}

CoarseConfig::CoarseConfig(int cells, int q, int fill) : q_(q) {
    if (cells < 1 || q < 1) throw std::invalid_argument("coarse configuration needs cells >= 1 and q >= 1");
    if (fill < 0 || fill > q) throw std::invalid_argument("occupancy outside 0..q");
    alpha_.assign(static_cast<std::size_t>(cells), fill);
}

CoarseConfig::CoarseConfig(std::vector<int> alpha, int q) : alpha_(std::move(alpha)), q_(q) {
    if (q < 1) throw std::invalid_argument("cell size q must be positive");
    for (int a : alpha_)
        if (a < 0 || a > q) throw std::invalid_argument("occupancy " + std::to_string(a) + " outside 0.." + std::to_string(q));
}

long CoarseConfig::total_eta() const {
    long t = 0;
    for (int a : alpha_) t += 2 * a - q_;
    return t;
}

CoarseConfig coarsen(const SpinConfig& sigma, const CoarsePartition& part) {
    if (sigma.size() != part.sites())
        throw std::invalid_argument("configuration has " + std::to_string(sigma.size()) + " sites, partition has " +
                                    std::to_string(part.sites()));
    std::vector<int> alpha(static_cast<std::size_t>(part.cells()), 0);
    for (int x = 0; x < sigma.size(); ++x)
        if (sigma[x] == 1) ++alpha[static_cast<std::size_t>(part.cell_of(x))];
    return CoarseConfig(std::move(alpha), part.q());
}

double coarse_prior_logweight_alpha(int alpha, int q) {
    if (q < 1 || alpha < 0 || alpha > q) throw std::invalid_argument("occupancy outside 0..q");
    return log_binomial(q, alpha) - q * std::log(2.0);
}

double coarse_prior_logweight(int eta, int q) {
    if (q < 1 || std::abs(eta) > q || (eta + q) % 2 != 0)
        throw std::invalid_argument("cell value " + std::to_string(eta) + " is not admissible for q=" + std::to_string(q));
    return coarse_prior_logweight_alpha((eta + q) / 2, q);
}

double CellMoments::at(int order) const {
    if (order < 1 || order > max_order)
        throw std::domain_error("moment of order " + std::to_string(order) + " is undefined for this cell size");
    switch (order) {
        case 1: return e1;
        case 2: return e2;
        case 3: return e3;
        default: return e4;
    }
}

CellMoments conditional_moments(int alpha, int q) {
    if (q < 1 || alpha < 0 || alpha > q) throw std::invalid_argument("occupancy outside 0..q");
    const double a = alpha;
    const double w = q - alpha;
    const double Q = q;
    CellMoments m;
    m.max_order = std::min(q, 4);
    m.e1 = (2.0 * a - Q) / Q;
    if (q >= 2) m.e2 = (a * (a - 1) - 2 * a * w + w * (w - 1)) / (Q * (Q - 1));
    if (q >= 3)
        m.e3 = (a * (a - 1) * (a - 2) - 3 * a * (a - 1) * w + 3 * a * (w - 1) * w - (w - 2) * (w - 1) * w) /
               (Q * (Q - 1) * (Q - 2));
    if (q >= 4)
        m.e4 = (a * (a - 1) * (a - 2) * (a - 3) - 4 * a * (a - 1) * (a - 2) * w + 6 * a * (a - 1) * (w - 1) * w -
                4 * a * (w - 2) * (w - 1) * w + w * (w - 1) * (w - 2) * (w - 3)) /
               (Q * (Q - 1) * (Q - 2) * (Q - 3));
    return m;
}

MomentTable::MomentTable(int q) : q_(q) {
    if (q < 1) throw std::invalid_argument("cell size q must be positive");
    rows_.reserve(static_cast<std::size_t>(q + 1));
    for (int a = 0; a <= q; ++a) rows_.push_back(conditional_moments(a, q));
}

CoarseKernel::CoarseKernel(const Kernel& kernel, const CoarsePartition& part) : part_(part), kernel_(kernel) {
    const int q = part.q();
    const int m = part.cells();
    const MicroLattice lat(part.sites());
    jbar_.assign(static_cast<std::size_t>(m / 2 + 1), 0.0);
    // Average over the q*q site pairs of cell 0 and cell s.
    for (int s = 1; s <= m / 2; ++s) {
        double sum = 0.0;
        for (int i = 0; i < q; ++i)
            for (int j = 0; j < q; ++j) sum += kernel(lat.distance(i, s * q + j));
        jbar_[static_cast<std::size_t>(s)] = sum / (static_cast<double>(q) * q);
        if (sum != 0.0) reach_ = s;
    }
    if (q >= 2) {
        double sum = 0.0;
        for (int i = 0; i < q; ++i)
            for (int j = 0; j < q; ++j)
                if (i != j) sum += kernel(lat.distance(i, j));
        jbar0_ = sum / (static_cast<double>(q) * (q - 1));
    }
}

double CoarseKernel::jbar(int s) const {
    const int d = part_.distance(0, s);
    if (d == 0) {
        if (part_.q() < 2) throw std::invalid_argument("within-cell average needs q >= 2");
        return jbar0_;
    }
    return jbar_[static_cast<std::size_t>(d)];
}

CoarseKernel coarse_kernel(const Kernel& kernel, const CoarsePartition& part) { return CoarseKernel(kernel, part); }

CoarseField::CoarseField(int cells, int q) : m_(cells), q_(q) {
    table_.assign(static_cast<std::size_t>(cells) * static_cast<std::size_t>(q + 1), 0.0);
}

CoarseField CoarseField::uniform(double h0, int cells, int q) {
    CoarseField f(cells, q);
    for (int k = 0; k < cells; ++k)
        for (int a = 0; a <= q; ++a) f.set(k, a, h0 * (2 * a - q));
    return f;
}

namespace {

bool constant_on_cells(const FieldSpec& field, const CoarsePartition& part) {
    if (field.is_uniform()) return true;
    for (int k = 0; k < part.cells(); ++k) {
        const int x0 = part.first_site(k);
        for (int i = 1; i < part.q(); ++i)
            if (field.at(x0 + i) != field.at(x0)) return false;
    }
    return true;
}

}  // namespace

CoarseField effective_field(const FieldSpec& field, const CoarsePartition& part, double beta) {
    field.check_size(part.sites());
    const int q = part.q();
    const int m = part.cells();
    CoarseField out(m, q);
    if (constant_on_cells(field, part)) {
        for (int k = 0; k < m; ++k) {
            const double h = field.at(part.first_site(k));
            for (int a = 0; a <= q; ++a) out.set(k, a, h * (2 * a - q));
        }
        return out;
    }
    if (q > kEffectiveFieldMaxQ)
        throw std::invalid_argument("sub-cell field enumeration is limited to q <= " + std::to_string(kEffectiveFieldMaxQ));
    const std::uint32_t patterns = 1U << q;
    for (int k = 0; k < m; ++k) {
        const int x0 = part.first_site(k);
        std::vector<LogSumExp> acc(static_cast<std::size_t>(q + 1));
        std::vector<double> mean(static_cast<std::size_t>(q + 1), 0.0);
        for (std::uint32_t b = 0; b < patterns; ++b) {
            double e = 0.0;
            int up = 0;
            for (int i = 0; i < q; ++i) {
                const bool on = (b >> i) & 1U;
                up += on;
                e += field.at(x0 + i) * (on ? 1.0 : -1.0);
            }
            acc[static_cast<std::size_t>(up)].add(-beta * e);
            mean[static_cast<std::size_t>(up)] += e;
        }
        for (int a = 0; a <= q; ++a) {
            const double lb = log_binomial(q, a);
            if (std::abs(beta) < 1e-8)
                out.set(k, a, mean[static_cast<std::size_t>(a)] / std::exp(lb));
            else
                out.set(k, a, -(acc[static_cast<std::size_t>(a)].value() - lb) / beta);
        }
    }
    return out;
}

namespace {

void check_coarse(const CoarseConfig& alpha, const CoarseKernel& ck) {
    const auto& part = ck.partition();
    if (alpha.cells() != part.cells() || alpha.q() != part.q())
        throw std::invalid_argument("coarse configuration does not match the partition");
}

}  // namespace

double h0_energy(const CoarseConfig& alpha, const CoarseKernel& ck, const CoarseField& field, OpCounter* counter) {
    check_coarse(alpha, ck);
    if (field.cells() != alpha.cells() || field.q() != alpha.q())
        throw std::invalid_argument("coarse field does not match the partition");
    const auto& part = ck.partition();
    const int m = part.cells();
    const int q = part.q();
    const int reach = std::min(ck.reach(), m / 2);
    const double j0 = q >= 2 ? ck.jbar0() : 0.0;
    if (q >= 2) count(counter);
    double e = 0.0;
    for (int k = 0; k < m; ++k) {
        const double ek = alpha.eta(k);
        double pair = 0.0;
        for (int s = 1; s <= reach; ++s) {
            const double w = (2 * s == m) ? 0.5 : 1.0;
            pair += w * ck.jbar(s) * alpha.eta(part.wrap(k + s));
        }
        count(counter, static_cast<std::uint64_t>(reach));
        e += -ek * pair - 0.5 * j0 * (ek * ek - q) + field(k, alpha.alpha(k));
    }
    return e;
}

double h0_energy(const CoarseConfig& alpha, const CoarseKernel& ck, const FieldSpec& field, OpCounter* counter) {
    const auto& part = ck.partition();
    if (!constant_on_cells(field, part))
        throw std::invalid_argument("field varies inside a cell; build an effective field first");
    return h0_energy(alpha, ck, effective_field(field, part, 1.0), counter);
}

double h0_energy_delta(const CoarseConfig& alpha, int k, int direction, const CoarseKernel& ck,
                       const CoarseField& field) {
    check_coarse(alpha, ck);
    const auto& part = ck.partition();
    const int m = part.cells();
    const int q = part.q();
    if (k < 0 || k >= m) throw std::out_of_range("cell index " + std::to_string(k) + " out of range");
    if (direction != 1 && direction != -1) throw std::invalid_argument("direction must be +1 or -1");
    const int a = alpha.alpha(k);
    if (a + direction < 0 || a + direction > q) throw std::invalid_argument("move takes occupancy outside 0..q");
    const int reach = std::min(ck.reach(), m / 2);
    double nb = 0.0;
    for (int s = 1; s <= reach; ++s) {
        if (2 * s == m)
            nb += ck.jbar(s) * alpha.eta(part.wrap(k + s));
        else
            nb += ck.jbar(s) * (alpha.eta(part.wrap(k + s)) + alpha.eta(part.wrap(k - s)));
    }
    const double eta = alpha.eta(k);
    const double d = 2.0 * direction;
    const double j0 = q >= 2 ? ck.jbar0() : 0.0;
    return -d * nb - 0.5 * j0 * ((eta + d) * (eta + d) - eta * eta) + field(k, a + direction) - field(k, a);
}

SpinConfig sample_conditional(const CoarseConfig& alpha, Rng& rng) {
    const int q = alpha.q();
    SpinConfig sigma(alpha.cells() * q, -1);
    std::vector<int> idx(static_cast<std::size_t>(q));
    for (int k = 0; k < alpha.cells(); ++k) {
        for (int i = 0; i < q; ++i) idx[static_cast<std::size_t>(i)] = i;
        const int a = alpha.alpha(k);
        // Partial Fisher-Yates: the first a slots are a uniform a-subset.
        for (int i = 0; i < a; ++i) {
            const auto j = static_cast<std::size_t>(i) + uniform_index(rng, static_cast<std::uint64_t>(q - i));
            std::swap(idx[static_cast<std::size_t>(i)], idx[j]);
            sigma.set(k * q + idx[static_cast<std::size_t>(i)], 1);
        }
    }
    return sigma;
}

}  // namespace cgmc
