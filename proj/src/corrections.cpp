#include "cgmc/corrections.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cgmc {

const char* to_string(BetaMode mode) {
    return mode == BetaMode::uniform_beta ? "uniform_beta" : "split_beta";
}

BetaMode beta_mode_from_string(const std::string& name) {
    if (name == "uniform_beta") return BetaMode::uniform_beta;
    if (name == "split_beta") return BetaMode::split_beta;
    throw std::invalid_argument("unknown beta_mode '" + name + "' (expected uniform_beta or split_beta)");
}

KernelMoments::KernelMoments(const Kernel& kernel, const CoarsePartition& part) : part_(part), table_(part.q()) {
    const int q = part.q();
    const int m = part.cells();
    if (q < 2) throw std::invalid_argument("kernel moments need q >= 2");
    const MicroLattice lat(part.sites());
    const CoarseKernel ck(kernel, part);
    const auto qq = static_cast<std::size_t>(q) * static_cast<std::size_t>(q);
    e_.assign(static_cast<std::size_t>(m) * qq, 0.0);
    j1_.assign(static_cast<std::size_t>(m), 0.0);
    j2_.assign(static_cast<std::size_t>(m), 0.0);
    slot_.assign(static_cast<std::size_t>(m), -1);

    // Row sums r_s(i) = sum_j E_s(i, j); j2t reduces to sum_j r_{d1}(j) r_{d2}(j).
    std::vector<std::vector<double>> rows;
    for (int s = 0; s < m; ++s) {
        double* blk = e_.data() + static_cast<std::size_t>(s) * qq;
        const double jb = ck.jbar(s);
        bool constant = true;
        double first = 0.0;
        bool seen = false;
        for (int i = 0; i < q; ++i)
            for (int j = 0; j < q; ++j) {
                if (s == 0 && i == j) continue;
                const double v = kernel(lat.distance(i, s * q + j));
                if (!seen) {
                    first = v;
                    seen = true;
                } else if (v != first) {
                    constant = false;
                }
                blk[i * q + j] = v - jb;
            }
        // A constant block has no fluctuation; avoid keeping rounding residue of the average.
        if (constant) continue;
        std::vector<double> r(static_cast<std::size_t>(q), 0.0);
        double a1 = 0.0;
        for (int i = 0; i < q; ++i)
            for (int j = 0; j < q; ++j) {
                const double v = blk[i * q + j];
                a1 += v * v;
                r[static_cast<std::size_t>(i)] += v;
            }
        double a2 = 0.0;
        for (double v : r) a2 += v * v;
        j1_[static_cast<std::size_t>(s)] = a1;
        j2_[static_cast<std::size_t>(s)] = a2;
        slot_[static_cast<std::size_t>(s)] = static_cast<int>(support_.size());
        support_.push_back(s);
        rows.push_back(std::move(r));
    }
    for (int s = 0; s < m; ++s)
        if (slot_[static_cast<std::size_t>(s)] < 0)
            std::fill_n(e_.begin() + static_cast<long>(static_cast<std::size_t>(s) * qq), qq, 0.0);

    const std::size_t d = support_.size();
    j2t_.assign(d * d, 0.0);
    for (std::size_t u = 0; u < d; ++u)
        for (std::size_t v = u; v < d; ++v) {
            double t = 0.0;
            for (int j = 0; j < q; ++j) t += rows[u][static_cast<std::size_t>(j)] * rows[v][static_cast<std::size_t>(j)];
            j2t_[u * d + v] = t;
            j2t_[v * d + u] = t;
        }
}

double KernelMoments::j2t(int d1, int d2) const {
    const int u = slot_[static_cast<std::size_t>(part_.wrap(d1))];
    const int v = slot_[static_cast<std::size_t>(part_.wrap(d2))];
    if (u < 0 || v < 0) return 0.0;
    return j2t_[static_cast<std::size_t>(u) * support_.size() + static_cast<std::size_t>(v)];
}

double KernelMoments::fluctuation(int s, int i, int j) const {
    const int q = part_.q();
    return e_[static_cast<std::size_t>(part_.wrap(s)) * static_cast<std::size_t>(q) * static_cast<std::size_t>(q) +
              static_cast<std::size_t>(i * q + j)];
}

KernelMoments kernel_moments(const Kernel& kernel, const CoarsePartition& part) { return KernelMoments(kernel, part); }

namespace {

void check_alpha(const CoarseConfig& alpha, const KernelMoments& km) {
    if (alpha.cells() != km.partition().cells() || alpha.q() != km.partition().q())
        throw std::invalid_argument("coarse configuration does not match the kernel moments");
}

// Moments of every cell, with cell `k` optionally overridden to occupancy `ak`.
struct CellView {
    const CoarseConfig& alpha;
    const MomentTable& table;
    int k = -1;
    int ak = 0;
    const CellMoments& operator()(int l) const { return table[l == k ? ak : alpha.alpha(l)]; }
};

double single_term(const CellMoments& e, const KernelMoments& km) {
    return 4.0 * km.j2(0) * (-e.e4 + e.e2) + 2.0 * km.j1(0) * (e.e4 + 1.0 - 2.0 * e.e2);
}

double pair_term(const CellMoments& a, const CellMoments& b, int s, const KernelMoments& km) {
    return km.j1(s) * (a.e2 * b.e2 - a.e2 - b.e2 + 1.0) + km.j2(s) * (-2.0 * a.e2 * b.e2 + a.e2 + b.e2);
}

// j2t_{kkl} term for l = k + s.
double cross_term(const CellMoments& a, const CellMoments& b, int s, const KernelMoments& km) {
    return km.j2t(0, s) * (-a.e3 * b.e1 + 2.0 * a.e1 * b.e1 - b.e3 * a.e1);
}

double chain_term(const CellMoments& a, const CellMoments& b, const CellMoments& c, int d1, int d2,
                  const KernelMoments& km) {
    return km.j2t(d1, d2) * (-a.e1 * b.e2 * c.e1 + a.e1 * c.e1);
}

void require_order4(const KernelMoments& km) {
    if (km.partition().q() < 4) throw std::domain_error("the first correction needs fourth moments (q >= 4)");
}

double h1_sum(const CellView& mom, const KernelMoments& km, double beta, OpCounter* counter = nullptr) {
    const auto& part = km.partition();
    const int m = part.cells();
    double single = 0.0, pairs = 0.0, cross = 0.0;
    for (int k = 0; k < m; ++k) {
        const CellMoments& ek = mom(k);
        single += single_term(ek, km);
        count(counter, 2);
        for (int s : km.support()) {
            if (s == 0) continue;
            const CellMoments& el = mom(part.wrap(k + s));
            pairs += pair_term(ek, el, s, km);
            cross += cross_term(ek, el, s, km);
            count(counter, 3);
        }
    }
    // Ordered pairs count every unordered pair twice.
    return -(beta / 8.0) * single - (beta / 2.0) * 0.5 * pairs - (beta / 2.0) * cross;
}

double h2_sum(const CellView& mom, const KernelMoments& km, double beta, OpCounter* counter = nullptr) {
    const auto& part = km.partition();
    const int m = part.cells();
    double s2 = 0.0;
    for (int b = 0; b < m; ++b) {
        const CellMoments& eb = mom(b);
        for (int d1 : km.support()) {
            if (d1 == 0) continue;
            for (int d2 : km.support()) {
                if (d2 == 0 || d2 == d1) continue;
                s2 += chain_term(mom(part.wrap(b + d1)), eb, mom(part.wrap(b + d2)), d1, d2, km);
                count(counter);
            }
        }
    }
    // Each unordered end pair appears twice.
    return -(beta / 2.0) * s2;
}

// All H1 + H2 terms that involve cell k, with k's moments taken from view.
double local_terms(const CellView& mom, int k, const KernelMoments& km, double beta) {
    const auto& part = km.partition();
    const CellMoments& ek = mom(k);
    double h1 = -(beta / 8.0) * single_term(ek, km);
    double pairs = 0.0, cross = 0.0;
    for (int s : km.support()) {
        if (s == 0) continue;
        const CellMoments& el = mom(part.wrap(k + s));
        pairs += pair_term(ek, el, s, km);
        cross += cross_term(ek, el, s, km) + cross_term(el, ek, -s, km);
    }
    h1 += -(beta / 2.0) * (pairs + cross);

    double mid = 0.0, end = 0.0;
    for (int d1 : km.support()) {
        if (d1 == 0) continue;
        for (int d2 : km.support()) {
            if (d2 == 0 || d2 == d1) continue;
            // k in the middle.
            mid += chain_term(mom(part.wrap(k + d1)), ek, mom(part.wrap(k + d2)), d1, d2, km);
            // k at an end: a = k, b = k - d1, c = b + d2.
            const int b = part.wrap(k - d1);
            end += chain_term(ek, mom(b), mom(part.wrap(b + d2)), d1, d2, km);
        }
    }
    return h1 - (beta / 2.0) * (mid + 2.0 * end);
}

}  // namespace

double h1_energy(const CoarseConfig& alpha, const KernelMoments& km, double beta, OpCounter* counter) {
    check_alpha(alpha, km);
    require_order4(km);
    return h1_sum(CellView{alpha, km.moments()}, km, beta, counter);
}

double h2_energy(const CoarseConfig& alpha, const KernelMoments& km, double beta, OpCounter* counter) {
    check_alpha(alpha, km);
    return h2_sum(CellView{alpha, km.moments()}, km, beta, counter);
}

double corrected_energy(const CoarseConfig& alpha, const CoarseKernel& ck, const KernelMoments& km,
                        const CoarseField& field, double beta) {
    return h0_energy(alpha, ck, field) + h1_energy(alpha, km, beta) + h2_energy(alpha, km, beta);
}

double residuum(const CoarseConfig& alpha, const KernelMoments& km, double beta) {
    return beta * (h1_energy(alpha, km, beta) + h2_energy(alpha, km, beta));
}

double correction_delta(const CoarseConfig& alpha, int k, int direction, const KernelMoments& km, double beta) {
    check_alpha(alpha, km);
    require_order4(km);
    const int q = km.partition().q();
    if (k < 0 || k >= alpha.cells()) throw std::out_of_range("cell index " + std::to_string(k) + " out of range");
    const int a = alpha.alpha(k);
    if (direction != 1 && direction != -1) throw std::invalid_argument("direction must be +1 or -1");
    if (a + direction < 0 || a + direction > q) throw std::invalid_argument("move takes occupancy outside 0..q");
    const CellView before{alpha, km.moments(), k, a};
    const CellView after{alpha, km.moments(), k, a + direction};
    return local_terms(after, k, km, beta) - local_terms(before, k, km, beta);
}

EpsilonDiag epsilon_diag(double beta, int q, int range, double sup_dv, double c) {
    if (beta < 0.0 || q < 1 || range < 1 || sup_dv < 0.0 || c < 0.0)
        throw std::invalid_argument("epsilon diagnostic needs beta, sup|V'|, C >= 0 and q, L >= 1");
    EpsilonDiag d;
    d.beta = beta;
    d.q = q;
    d.range = range;
    d.sup_dv = sup_dv;
    d.epsilon = c * beta * (static_cast<double>(q) / range) * sup_dv;
    d.delta = q * d.epsilon;
    return d;
}

}  // namespace cgmc
