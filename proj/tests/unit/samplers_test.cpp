#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "cgmc/estimators.hpp"
#include "cgmc/samplers.hpp"

using namespace cgmc;

namespace {

ModelSpec micro_spec(int n, double beta) {
    ModelSpec s;
    s.scheme = Scheme::micro;
    s.n_sites = n;
    s.kernel = constant_kernel(1.0, 1);
    s.field = FieldSpec::uniform(-0.2);
    s.beta = beta;
    return s;
}

ModelSpec coarse_spec(Scheme scheme, int cells, double beta) {
    ModelSpec s;
    s.scheme = scheme;
    s.q = 4;
    s.n_sites = 4 * cells;
    s.kernel = Kernel({0.4, 0.3, 0.2, 0.1});
    s.field = FieldSpec::uniform(0.15);
    s.beta = beta;
    return s;
}

std::size_t micro_index(const SpinConfig& s) {
    std::size_t i = 0;
    for (int x = 0; x < s.size(); ++x)
        if (s[x] > 0) i |= std::size_t{1} << x;
    return i;
}

}  // namespace

TEST(RateFunction, DetailedBalanceIdentity) {
    for (RateKind k : {RateKind::metropolis, RateKind::glauber, RateKind::symmetric}) {
        const RateFunction g{k};
        for (double r : {-3.0, -0.7, 0.0, 0.2, 1.5, 4.0})
            EXPECT_NEAR(g(r), g(-r) * std::exp(-r), 1e-12) << to_string(k) << " r=" << r;
    }
    EXPECT_DOUBLE_EQ(RateFunction{RateKind::metropolis}(-1.0), 1.0);
    EXPECT_DOUBLE_EQ(RateFunction{RateKind::glauber}(0.0), 0.5);
    EXPECT_DOUBLE_EQ(RateFunction{RateKind::symmetric}(2.0), std::exp(-1.0));
}

TEST(RateFunction, Names) {
    EXPECT_EQ(rate_kind_from_string("glauber"), RateKind::glauber);
    EXPECT_EQ(scheme_from_string("cg2"), Scheme::cg2);
    EXPECT_THROW(scheme_from_string("cg1"), std::invalid_argument);
}

TEST(Model, AcceptanceNeverExceedsOne) {
    for (RateKind k : {RateKind::metropolis, RateKind::glauber, RateKind::symmetric}) {
        ModelSpec s = coarse_spec(Scheme::cg2, 3, 1.2);
        s.rate = k;
        const Model m(s);
        for (int a = 0; a < 5; ++a)
            for (int b = 0; b < 5; ++b)
                for (int c = 0; c < 5; ++c) {
                    const CoarseConfig cfg({a, b, c}, 4);
                    for (int dir : {-1, 1}) {
                        if (a + dir < 0 || a + dir > 4) continue;
                        const double p = m.acceptance(m.exponent_delta(cfg, 0, dir));
                        EXPECT_GE(p, 0.0);
                        EXPECT_LE(p, 1.0 + 1e-15);
                    }
                }
    }
}

TEST(Model, ExponentDeltaMatchesRecomputation) {
    Rng rng = make_stream(31, 0);
    for (Scheme sch : {Scheme::cg0, Scheme::cg2}) {
        const Model m(coarse_spec(sch, 5, 0.9));
        for (int t = 0; t < 50; ++t) {
            std::vector<int> a(5);
            for (auto& v : a) v = static_cast<int>(uniform_index(rng, 5));
            const CoarseConfig cfg(a, 4);
            const int k = static_cast<int>(uniform_index(rng, 5));
            const int dir = a[k] == 4 ? -1 : a[k] == 0 ? 1 : 1 - 2 * static_cast<int>(uniform_index(rng, 2));
            CoarseConfig next = cfg;
            next.set_alpha(k, a[k] + dir);
            EXPECT_NEAR(m.exponent_delta(cfg, k, dir), m.exponent(next) - m.exponent(cfg), 1e-12);
        }
    }
    const Model mm(micro_spec(8, 0.6));
    const SpinConfig s = SpinConfig::from_bits(0b10110010, 8);
    SpinConfig f = s;
    f.flip(3);
    EXPECT_NEAR(mm.exponent_delta(s, 3), mm.exponent(f) - mm.exponent(s), 1e-12);
}

TEST(Chain, InfiniteTemperatureAlwaysAccepts) {
    const auto m = std::make_shared<const Model>(micro_spec(16, 0.0));
    Chain c(m, make_stream(1, 0));
    const SampleBatch b = c.run(RunLength{10, 100, 1, false});
    EXPECT_EQ(b.accepted, b.proposals);
}

TEST(Chain, FullCellsOnlyProposeDeaths) {
    const Model m(coarse_spec(Scheme::cg0, 2, 0.0));
    Rng rng = make_stream(2, 0);
    for (int t = 0; t < 50; ++t) {
        CoarseConfig a(2, 4, 4);
        EXPECT_TRUE(coarse_step(a, m, rng));
        EXPECT_EQ(a.alpha(0) + a.alpha(1), 7);
    }
}

TEST(Chain, MicroStationaryLaw) {
    const auto m = std::make_shared<const Model>(micro_spec(2, 0.8));
    const EnumeratedMeasure exact = enumerate_micro(MicroParams{2, m->spec().kernel, m->spec().field, 0.8});
    Chain c(m, make_stream(3, 0));
    const int n = 200000;
    std::vector<double> count(4, 0.0);
    for (int i = 0; i < n; ++i) {
        c.sweep();
        count[micro_index(c.micro_state())] += 1.0;
    }
    for (std::size_t i = 0; i < 4; ++i) {
        const double p = std::exp(exact.log_weights[i]);
        EXPECT_NEAR(count[i] / n, p, 4 * std::sqrt(2 * p * (1 - p) / n)) << "state " << i;
    }
}

TEST(Chain, CoarseStationaryLaw) {
    for (Scheme sch : {Scheme::cg0, Scheme::cg2}) {
        const auto m = std::make_shared<const Model>(coarse_spec(sch, 2, 0.7));
        const EnumeratedMeasure exact = enumerate_coarse(*m);
        ASSERT_EQ(exact.states(), 25u);
        Chain c(m, make_stream(4, static_cast<int>(sch)));
        // The law is bimodal and sweeps are correlated: error bars from batch means.
        const int n = 200000;
        std::vector<std::size_t> visits(n);
        for (auto& v : visits) {
            c.sweep();
            v = coarse_index(c.coarse_state());
        }
        std::vector<double> hit(n);
        for (std::size_t i = 0; i < 25; ++i) {
            for (int t = 0; t < n; ++t) hit[t] = visits[t] == i ? 1.0 : 0.0;
            const Estimate e = batch_means(hit);
            EXPECT_NEAR(e.mean, std::exp(exact.log_weights[i]), 4 * e.stderr_ + 1e-4) << to_string(sch) << " state " << i;
        }
    }
}

TEST(TransitionMatrix, TwoSiteEntriesByHand) {
    const double beta = 0.7;
    ModelSpec s = micro_spec(2, beta);
    s.field = FieldSpec::uniform(0.0);
    const TransitionMatrix t = transition_matrix(Model(s));
    ASSERT_EQ(t.states(), 4u);
    // All up (index 3): flipping either site costs +1.
    EXPECT_NEAR(t.entry(3, 2), 0.5 * std::exp(-beta), 1e-15);
    EXPECT_NEAR(t.entry(3, 1), 0.5 * std::exp(-beta), 1e-15);
    EXPECT_NEAR(t.entry(3, 3), 1 - std::exp(-beta), 1e-15);
    EXPECT_EQ(t.entry(3, 0), 0.0);
    // Mixed state (index 1): either flip lowers the energy.
    EXPECT_NEAR(t.entry(1, 0), 0.5, 1e-15);
    EXPECT_NEAR(t.entry(1, 3), 0.5, 1e-15);
    EXPECT_NEAR(t.entry(1, 1), 0.0, 1e-15);
}

TEST(TransitionMatrix, DetailedBalance) {
    for (Scheme sch : {Scheme::cg0, Scheme::cg2})
        for (RateKind k : {RateKind::metropolis, RateKind::glauber, RateKind::symmetric}) {
            ModelSpec s = coarse_spec(sch, 3, 1.1);
            s.rate = k;
            const BalanceReport r = check_balance(transition_matrix(Model(s)));
            EXPECT_LE(r.detailed_balance_error, 1e-14);
            EXPECT_LE(r.stationarity_error, 1e-14);
            EXPECT_LE(r.row_sum_error, 1e-14);
            EXPECT_TRUE(r.irreducible);
            EXPECT_TRUE(r.aperiodic);
        }
}

TEST(TransitionMatrix, StateSpaceLimit) {
    EXPECT_THROW(transition_matrix(Model(micro_spec(17, 1.0))), std::invalid_argument);
}

TEST(CoarseStates, IndexRoundTrip) {
    EXPECT_EQ(coarse_state_count(3, 4), 125u);
    for (std::size_t i = 0; i < 125; ++i) EXPECT_EQ(coarse_index(coarse_state(i, 3, 4)), i);
    EXPECT_EQ(coarse_state(1, 3, 4).alpha(0), 1);
}

TEST(RunChain, SeededRunsRepeat) {
    ChainSpec spec{coarse_spec(Scheme::cg2, 8, 1.0), RunLength{50, 200, 2, false}, 9, 0, 1};
    const SampleBatch a = run_chain(spec);
    const SampleBatch b = run_chain(spec);
    EXPECT_EQ(a.magnetization, b.magnetization);
    EXPECT_EQ(a.spec_hash, b.spec_hash);
    spec.stream = 1;
    EXPECT_NE(run_chain(spec).magnetization, a.magnetization);
}

TEST(RunChain, Lengths) {
    ChainSpec spec{micro_spec(16, 1.0), RunLength{5, 0, 1, false}, 1, 0, 1};
    EXPECT_EQ(run_chain(spec).size(), 0u);
    spec.length.keep_states = true;
    spec.model = coarse_spec(Scheme::cg0, 4, 1.0);
    spec.length.samples = 7;
    EXPECT_EQ(run_chain(spec).states.size(), 7u);
    spec.length.thinning = 0;
    EXPECT_THROW(run_chain(spec), std::invalid_argument);
    spec.length = RunLength{-1, 1, 1, false};
    EXPECT_THROW(run_chain(spec), std::invalid_argument);
}

TEST(Chain, ModelSwapRequiresSameGeometry) {
    Chain c(std::make_shared<const Model>(coarse_spec(Scheme::cg0, 4, 1.0)), make_stream(1, 0));
    EXPECT_NO_THROW(c.set_model(std::make_shared<const Model>(coarse_spec(Scheme::cg0, 4, 2.0))));
    EXPECT_THROW(c.set_model(std::make_shared<const Model>(coarse_spec(Scheme::cg0, 5, 1.0))), std::invalid_argument);
    EXPECT_DOUBLE_EQ(c.magnetization(), 1.0);
}
