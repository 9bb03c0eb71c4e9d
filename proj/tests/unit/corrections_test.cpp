#include <gtest/gtest.h>

#include <cmath>

#include "cgmc/corrections.hpp"
#include "cgmc/oracles.hpp"

using namespace cgmc;

namespace {

// Literal site sums over the definitions, sharing no code with KernelMoments.
struct LoopOracle {
    const Kernel& kernel;
    CoarsePartition part;
    MicroLattice lat{part.sites()};

    double jbar(int k, int l) const {
        double s = 0.0;
        int n = 0;
        for (int x : cell(k))
            for (int y : cell(l)) {
                if (x == y) continue;
                s += kernel(lat.distance(x, y));
                ++n;
            }
        return s / n;
    }
    std::vector<int> cell(int k) const {
        std::vector<int> v;
        for (int i = 0; i < part.q(); ++i) v.push_back(part.wrap(k) * part.q() + i);
        return v;
    }
    double e(int k, int l, int x, int y) const { return x == y ? 0.0 : kernel(lat.distance(x, y)) - jbar(k, l); }
    double j1(int k, int l) const {
        double s = 0.0;
        for (int x : cell(k))
            for (int y : cell(l)) s += e(k, l, x, y) * e(k, l, x, y);
        return s;
    }
    double j2(int k, int l) const {
        double s = 0.0;
        for (int x : cell(k))
            for (int y : cell(l))
                for (int z : cell(l)) s += e(k, l, x, y) * e(k, l, x, z);
        return s;
    }
    double j2t(int a, int b, int c) const {
        double s = 0.0;
        for (int x : cell(a))
            for (int y : cell(b))
                for (int z : cell(c)) s += e(a, b, x, y) * e(b, c, y, z);
        return s;
    }
};

std::vector<double> random_values(Rng& rng, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = uniform01(rng) - 0.3;
    return v;
}

CoarseConfig random_config(Rng& rng, int cells, int q) {
    std::vector<int> a(static_cast<std::size_t>(cells));
    for (auto& v : a) v = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(q + 1)));
    return CoarseConfig(a, q);
}

}  // namespace

TEST(KernelMoments, NeedsTwoSitesPerCell) {
    EXPECT_THROW(KernelMoments(constant_kernel(1.0, 1), CoarsePartition(8, 1)), std::invalid_argument);
}

TEST(KernelMoments, CurieWeissVanishes) {
    const KernelMoments km(curie_weiss_kernel(1.0, 24), CoarsePartition(24, 4));
    EXPECT_TRUE(km.support().empty());
    for (int s = 0; s < 6; ++s) {
        EXPECT_EQ(km.j1(s), 0.0);
        EXPECT_EQ(km.j2(s), 0.0);
        for (int t = 0; t < 6; ++t) EXPECT_EQ(km.j2t(s, t), 0.0);
    }
}

TEST(KernelMoments, PairCellWithinBlockIsFlat) {
    const KernelMoments km(Kernel({0.7, 0.2}), CoarsePartition(8, 2));
    EXPECT_EQ(km.j1(0), 0.0);
}

TEST(KernelMoments, MatchLoopOracle) {
    Rng rng = make_stream(21, 0);
    for (int q : {2, 3, 4})
        for (int range : {1, 3, 5, 8}) {
            const Kernel k(random_values(rng, range));
            const CoarsePartition p(6 * q, q);
            const KernelMoments km(k, p);
            const LoopOracle o{k, p};
            for (int s = 0; s < p.cells(); ++s) {
                EXPECT_NEAR(km.j1(s), o.j1(0, s), 1e-13) << "q=" << q << " L=" << range << " s=" << s;
                EXPECT_NEAR(km.j2(s), o.j2(0, s), 1e-13);
                EXPECT_GE(km.j1(s), 0.0);
            }
            for (int d1 = 0; d1 < p.cells(); ++d1)
                for (int d2 = 0; d2 < p.cells(); ++d2) {
                    if (d1 == d2) continue;
                    EXPECT_NEAR(km.j2t(d1, d2), o.j2t(3 + d1, 3, 3 + d2), 1e-13);
                }
        }
}

TEST(KernelMoments, DisplacementSymmetry) {
    Rng rng = make_stream(22, 0);
    const Kernel k(random_values(rng, 7));
    const CoarsePartition p(32, 4);
    const KernelMoments km(k, p);
    for (int s = 1; s < 8; ++s) {
        EXPECT_NEAR(km.j2(s), km.j2(-s), 1e-13);
        EXPECT_NEAR(km.j2t(0, s), km.j2t(s, 0), 1e-15);
    }
}

namespace {

double h1_by_hand(const LoopOracle& o, const CoarseConfig& a, double beta) {
    const int m = a.cells(), q = a.q();
    auto mom = [&](int k) { return conditional_moments(a.alpha(k), q); };
    double single = 0.0, pairs = 0.0, cross = 0.0;
    for (int k = 0; k < m; ++k) {
        const CellMoments e = mom(k);
        single += 4 * o.j2(k, k) * (-e.e4 + e.e2) + 2 * o.j1(k, k) * (e.e4 + 1 - 2 * e.e2);
        for (int l = 0; l < m; ++l) {
            if (l == k) continue;
            const CellMoments f = mom(l);
            pairs += o.j1(k, l) * (e.e2 * f.e2 - e.e2 - f.e2 + 1) + o.j2(k, l) * (-2 * e.e2 * f.e2 + e.e2 + f.e2);
            cross += o.j2t(k, k, l) * (-e.e3 * f.e1 + 2 * e.e1 * f.e1 - f.e3 * e.e1);
        }
    }
    return -beta / 8 * single - beta / 4 * pairs - beta / 2 * cross;
}

double h2_by_hand(const LoopOracle& o, const CoarseConfig& a, double beta) {
    const int m = a.cells(), q = a.q();
    double s = 0.0;
    for (int x = 0; x < m; ++x)
        for (int b = 0; b < m; ++b)
            for (int c = 0; c < m; ++c) {
                if (x == b || b == c || x == c) continue;
                const CellMoments ea = conditional_moments(a.alpha(x), q), eb = conditional_moments(a.alpha(b), q),
                                  ec = conditional_moments(a.alpha(c), q);
                s += o.j2t(x, b, c) * (-ea.e1 * eb.e2 * ec.e1 + ea.e1 * ec.e1);
            }
    return -beta / 2 * s;
}

}  // namespace

TEST(Corrections, H1MatchesHandLoop) {
    Rng rng = make_stream(23, 0);
    for (int m : {2, 3, 5}) {
        const Kernel k(random_values(rng, 3));
        const CoarsePartition p(4 * m, 4);
        const KernelMoments km(k, p);
        const LoopOracle o{k, p};
        for (int t = 0; t < 10; ++t) {
            const CoarseConfig a = random_config(rng, m, 4);
            EXPECT_NEAR(h1_energy(a, km, 0.8), h1_by_hand(o, a, 0.8), 1e-12);
        }
    }
}

TEST(Corrections, H2MatchesTripleLoop) {
    Rng rng = make_stream(24, 0);
    for (int m : {3, 4, 6}) {
        const Kernel k(random_values(rng, 9));
        const CoarsePartition p(4 * m, 4);
        const KernelMoments km(k, p);
        const LoopOracle o{k, p};
        for (int t = 0; t < 10; ++t) {
            const CoarseConfig a = random_config(rng, m, 4);
            EXPECT_NEAR(h2_energy(a, km, 1.3), h2_by_hand(o, a, 1.3), 1e-13);
        }
    }
}

TEST(Corrections, HalfFilledCellsCancelH2) {
    const KernelMoments km(Kernel({0.5, 0.3, 0.2, 0.1, 0.05}), CoarsePartition(24, 4));
    EXPECT_EQ(h2_energy(CoarseConfig(6, 4, 2), km, 1.0), 0.0);
}

TEST(Corrections, H1NeedsFourthMoments) {
    const KernelMoments km(Kernel({0.5, 0.3}), CoarsePartition(12, 3));
    EXPECT_THROW(h1_energy(CoarseConfig(4, 3, 1), km, 1.0), std::domain_error);
}

TEST(Corrections, CurieWeissIsExact) {
    const Kernel k = curie_weiss_kernel(1.0, 24);
    const CoarsePartition p(24, 4);
    const KernelMoments km(k, p);
    const CoarseKernel ck(k, p);
    const CoarseField f = effective_field(FieldSpec::uniform(0.2), p, 1.0);
    Rng rng = make_stream(25, 0);
    for (int t = 0; t < 10; ++t) {
        const CoarseConfig a = random_config(rng, 6, 4);
        EXPECT_EQ(h1_energy(a, km, 1.0), 0.0);
        EXPECT_EQ(h2_energy(a, km, 1.0), 0.0);
        EXPECT_EQ(residuum(a, km, 1.0), 0.0);
        EXPECT_EQ(corrected_energy(a, ck, km, f, 1.0), h0_energy(a, ck, f));
    }
}

TEST(Corrections, SumsAndResiduum) {
    const Kernel k({0.5, 0.3, 0.2, 0.1, 0.05});
    const CoarsePartition p(24, 4);
    const KernelMoments km(k, p);
    const CoarseKernel ck(k, p);
    const CoarseField f = effective_field(FieldSpec::uniform(-0.1), p, 0.7);
    const CoarseConfig a({0, 1, 4, 3, 2, 1}, 4);
    const double h1 = h1_energy(a, km, 0.7), h2 = h2_energy(a, km, 0.7);
    EXPECT_NEAR(corrected_energy(a, ck, km, f, 0.7), h0_energy(a, ck, f) + h1 + h2, 1e-12);
    EXPECT_NEAR(residuum(a, km, 0.7), 0.7 * (h1 + h2), 1e-15);
}

TEST(Corrections, LocalDeltaMatchesRecomputation) {
    Rng rng = make_stream(26, 0);
    for (int m : {2, 3, 4, 7})
        for (int range : {2, 6, 11}) {
            const Kernel k(random_values(rng, range));
            const CoarsePartition p(4 * m, 4);
            const KernelMoments km(k, p);
            for (int t = 0; t < 20; ++t) {
                const CoarseConfig a = random_config(rng, m, 4);
                const int c = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(m)));
                const int dir = a.alpha(c) == 4 ? -1 : a.alpha(c) == 0 ? 1 : (uniform01(rng) < 0.5 ? 1 : -1);
                CoarseConfig b = a;
                b.set_alpha(c, a.alpha(c) + dir);
                const double full = h1_energy(b, km, 0.9) + h2_energy(b, km, 0.9) - h1_energy(a, km, 0.9) -
                                    h2_energy(a, km, 0.9);
                EXPECT_NEAR(correction_delta(a, c, dir, km, 0.9), full, 1e-12) << "M=" << m << " L=" << range;
            }
        }
}

TEST(Corrections, CloserToExactThanZerothOrder) {
    // Small epsilon: long linear kernel, weak coupling.
    const int n = 16, q = 4;
    const double beta = 0.25;
    const Kernel k = kernel_from_profile([](double r) { return 1 - r; }, 8);
    const MicroParams params{n, k, FieldSpec::uniform(0.0), beta};
    const KadanoffTable table = kadanoff_table(params, q);
    const CoarsePartition p(n, q);
    const CoarseKernel ck(k, p);
    const KernelMoments km(k, p);
    const CoarseField f = effective_field(params.field, p, beta);
    double gap0 = 0.0, gap2 = 0.0;
    for (std::size_t s = 0; s < table.states(); ++s) {
        const CoarseConfig a = coarse_state(s, p.cells(), q);
        gap0 = std::max(gap0, std::abs(table.hbar[s] - h0_energy(a, ck, f)));
        gap2 = std::max(gap2, std::abs(table.hbar[s] - corrected_energy(a, ck, km, f, beta)));
    }
    EXPECT_LT(gap2, gap0);
}

TEST(EpsilonDiag, Examples) {
    const EpsilonDiag d = epsilon_diag(2.0, 8, 8, 1.0);
    EXPECT_DOUBLE_EQ(d.epsilon, 2.0);
    EXPECT_DOUBLE_EQ(d.delta, 16.0);
    EXPECT_EQ(epsilon_diag(2.0, 8, 8, 0.0).epsilon, 0.0);
    EXPECT_DOUBLE_EQ(epsilon_diag(1.0, 4, 16, 1.0).epsilon, 0.5 * epsilon_diag(1.0, 4, 8, 1.0).epsilon);
    EXPECT_THROW(epsilon_diag(-1.0, 4, 8, 1.0), std::invalid_argument);
}

TEST(BetaMode, Names) {
    EXPECT_EQ(beta_mode_from_string("split_beta"), BetaMode::split_beta);
    EXPECT_STREQ(to_string(BetaMode::uniform_beta), "uniform_beta");
    EXPECT_THROW(beta_mode_from_string("other"), std::invalid_argument);
}
