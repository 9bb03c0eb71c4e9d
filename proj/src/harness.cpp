#include "cgmc/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <bit>
#include <exception>
#include <limits>
#include <memory>
#include <stdexcept>

namespace cgmc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_schema_line(std::ostream& out) { out << "# schema_version=" << kSchemaVersion << '\n'; }

}  // namespace

const char* to_string(SweepBranch b) { return b == SweepBranch::up ? "up" : "down"; }

// ---------------------------------------------------------------------------------------------
// Sweeps

namespace {

std::vector<SweepRecord> run_branch(const ExperimentConfig& cfg, Scheme scheme, SweepBranch branch) {
    std::vector<double> grid = cfg.field_grid();
    if (branch == SweepBranch::down) std::reverse(grid.begin(), grid.end());
    const std::uint64_t stream = 2 * static_cast<std::uint64_t>(scheme) + (branch == SweepBranch::down ? 1 : 0);
    std::unique_ptr<Chain> chain;
    std::vector<SweepRecord> out;
    out.reserve(grid.size());
    for (double h : grid) {
        auto model = std::make_shared<const Model>(cfg.model(scheme, h));
        if (!chain)
            chain = std::make_unique<Chain>(model, make_stream(cfg.seed, stream), branch == SweepBranch::up ? -1 : 1);
        else
            chain->set_model(model);
        const auto t0 = Clock::now();
        const SampleBatch batch = chain->run(cfg.length);
        SweepRecord r;
        r.scheme = scheme;
        r.h = h;
        r.branch = branch;
        r.m = magnetization(batch);
        r.acceptance_rate = batch.acceptance_rate();
        r.energy_evals = batch.energy_evals;
        r.wall_time_s = cfg.timing ? seconds_since(t0) : 0.0;
        out.push_back(r);
    }
    return out;
}

}  // namespace

std::vector<SweepRecord> run_sweep(const ExperimentConfig& cfg) {
    validate(cfg);
    std::vector<std::pair<Scheme, SweepBranch>> tasks;
    for (Scheme s : cfg.schemes) {
        tasks.emplace_back(s, SweepBranch::up);
        tasks.emplace_back(s, SweepBranch::down);
    }
    std::vector<std::vector<SweepRecord>> results(tasks.size());
    std::vector<std::exception_ptr> errors(tasks.size());
    const long n = static_cast<long>(tasks.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        try {
            results[u] = run_branch(cfg, tasks[u].first, tasks[u].second);
        } catch (...) {
            errors[u] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    std::vector<SweepRecord> all;
    for (auto& r : results) all.insert(all.end(), r.begin(), r.end());
    return all;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records) {
    write_schema_line(out);
    out << "scheme,h,branch,m_mean,m_stderr,acceptance_rate,energy_evals,wall_time_s\n";
    for (const auto& r : records)
        out << to_string(r.scheme) << ',' << fmt(r.h) << ',' << to_string(r.branch) << ',' << fmt(r.m.mean) << ','
            << fmt(r.m.stderr_) << ',' << fmt(r.acceptance_rate) << ',' << r.energy_evals << ',' << fmt(r.wall_time_s)
            << '\n';
}

std::vector<SweepRecord> select_branch(const std::vector<SweepRecord>& records, Scheme scheme, SweepBranch branch) {
    std::vector<SweepRecord> out;
    for (const auto& r : records)
        if (r.scheme == scheme && r.branch == branch) out.push_back(r);
    std::sort(out.begin(), out.end(), [](const SweepRecord& a, const SweepRecord& b) { return a.h < b.h; });
    return out;
}

LoopArea sweep_loop_area(const std::vector<SweepRecord>& records, Scheme scheme, std::uint64_t seed) {
    const auto up = select_branch(records, scheme, SweepBranch::up);
    const auto down = select_branch(records, scheme, SweepBranch::down);
    if (up.size() != down.size()) throw std::invalid_argument("branches have different field grids");
    std::vector<double> h;
    std::vector<Estimate> mu, md;
    for (std::size_t i = 0; i < up.size(); ++i) {
        if (up[i].h != down[i].h) throw std::invalid_argument("branches have different field grids");
        h.push_back(up[i].h);
        mu.push_back(up[i].m);
        md.push_back(down[i].m);
    }
    return loop_area(h, mu, md, seed);
}

void write_exact_csv(std::ostream& out, const ExperimentConfig& cfg) {
    write_schema_line(out);
    out << "h,ising_nn_m,curie_weiss_upper,curie_weiss_lower\n";
    for (double h : cfg.field_grid())
        out << fmt(h) << ',' << fmt(ising_nn_exact_m(cfg.beta, h, cfg.j0)) << ','
            << fmt(curie_weiss_m(cfg.beta, h, cfg.j0, Branch::upper).m) << ','
            << fmt(curie_weiss_m(cfg.beta, h, cfg.j0, Branch::lower).m) << '\n';
}

// ---------------------------------------------------------------------------------------------
// Suites

bool SuiteReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

void SuiteReport::expect_le(const std::string& name, double value, double tolerance) {
    checks.push_back({name, value, tolerance, value <= tolerance});
}

void SuiteReport::expect_true(const std::string& name, bool ok) { checks.push_back({name, ok ? 1.0 : 0.0, 1.0, ok}); }

nlohmann::json SuiteReport::to_json() const {
    nlohmann::json j;
    j["suite"] = suite;
    j["passed"] = passed();
    j["seconds"] = seconds;
    j["checks"] = nlohmann::json::array();
    for (const auto& c : checks)
        j["checks"].push_back({{"name", c.name}, {"value", c.value}, {"tolerance", c.tolerance}, {"passed", c.passed}});
    j["details"] = details;
    return j;
}

SuiteReport verify_moments(const MomentFunction& moments) {
    const auto t0 = Clock::now();
    SuiteReport rep;
    rep.suite = "moments";
    double worst = 0.0;
    bool orders = true;
    for (int q = 1; q <= 12; ++q) {
        for (int a = 0; a <= q; ++a) {
            double sum[5] = {0, 0, 0, 0, 0};
            double count = 0.0;
            for (std::uint32_t bits = 0; bits < (1U << q); ++bits) {
                if (std::popcount(bits) != a) continue;
                double prod = 1.0;
                for (int n = 1; n <= std::min(q, 4); ++n) {
                    prod *= ((bits >> (n - 1)) & 1U) ? 1.0 : -1.0;
                    sum[n] += prod;
                }
                count += 1.0;
            }
            const CellMoments e = moments(a, q);
            orders = orders && e.max_order == std::min(q, 4);
            for (int n = 1; n <= std::min(q, 4); ++n) {
                double got = 0.0;
                try {
                    got = e.at(n);
                } catch (const std::domain_error&) {
                    got = std::numeric_limits<double>::infinity();
                }
                worst = std::max(worst, std::abs(got - sum[n] / count));
            }
        }
    }
    rep.expect_le("max |E_n - enumeration|", worst, 1e-12);
    rep.expect_true("max_order = min(q, 4)", orders);
    rep.seconds = seconds_since(t0);
    return rep;
}

SuiteReport verify_fluctuation_integrals(std::uint64_t seed, int kernels_per_q) {
    const auto t0 = Clock::now();
    SuiteReport rep;
    rep.suite = "fluctuation_integrals";
    Rng rng = make_stream(seed, 0xA);
    // Six cells on the ring; every listed geometry is checked for every occupancy combination.
    const std::vector<std::vector<int>> pairs{{0, 1}, {0, 2}, {0, 3}, {0, 5}};
    const std::vector<std::vector<int>> triples{{1, 0, 2}, {5, 0, 1}, {4, 0, 3}};
    double worst[4] = {0, 0, 0, 0};
    long evaluated = 0;
    for (int q = 4; q <= 6; ++q) {
        const CoarsePartition part(6 * q, q);
        for (int t = 0; t < kernels_per_q; ++t) {
            std::vector<double> v(static_cast<std::size_t>(2 * q));
            for (auto& x : v) x = uniform01(rng) / q;
            const Kernel kernel(v, "random");
            const KernelMoments km(kernel, part);
            auto cmp = [&](IntegralKind kind, const std::vector<int>& cells, const std::vector<int>& alphas) {
                const double ref = fluctuation_integral_oracle(kind, kernel, part, cells, alphas);
                const double got = fluctuation_integral_closed_form(kind, km, cells, alphas);
                double& w = worst[static_cast<int>(kind)];
                w = std::max(w, std::abs(ref - got) / std::max(1.0, std::abs(ref)));
                ++evaluated;
            };
            for (int a = 0; a <= q; ++a) cmp(IntegralKind::kk2, {0}, {a});
            for (const auto& c : pairs)
                for (int a = 0; a <= q; ++a)
                    for (int b = 0; b <= q; ++b) {
                        if (c[1] != 5) cmp(IntegralKind::kl2, c, {a, b});
                        cmp(IntegralKind::kk_kl, c, {a, b});
                    }
            for (const auto& c : triples)
                for (int a = 0; a <= q; ++a)
                    for (int b = 0; b <= q; ++b)
                        for (int d = 0; d <= q; ++d) cmp(IntegralKind::triple, c, {a, b, d});
        }
    }
    for (IntegralKind k : {IntegralKind::kk2, IntegralKind::kl2, IntegralKind::kk_kl, IntegralKind::triple})
        rep.expect_le(std::string("relative error ") + to_string(k), worst[static_cast<int>(k)], 1e-12);
    rep.details["integrals_evaluated"] = evaluated;
    rep.seconds = seconds_since(t0);
    return rep;
}

SuiteReport verify_detailed_balance() {
    const auto t0 = Clock::now();
    SuiteReport rep;
    rep.suite = "detailed_balance";
    double db = 0.0, st = 0.0, rs = 0.0;
    bool ergodic = true;
    int chains = 0;
    auto check = [&](const ModelSpec& spec) {
        const TransitionMatrix t = transition_matrix(Model(spec));
        const BalanceReport b = check_balance(t);
        db = std::max(db, b.detailed_balance_error);
        st = std::max(st, b.stationarity_error);
        rs = std::max(rs, b.row_sum_error);
        ergodic = ergodic && b.irreducible && b.aperiodic;
        ++chains;
    };
    const RateKind rates[] = {RateKind::metropolis, RateKind::glauber, RateKind::symmetric};
    for (RateKind rate : rates) {
        for (int n = 2; n <= 4; ++n)
            for (int l = 1; l <= 2; ++l)
                for (double beta : {0.4, 1.3}) {
                    std::vector<double> h(static_cast<std::size_t>(n));
                    for (int x = 0; x < n; ++x) h[static_cast<std::size_t>(x)] = 0.3 - 0.2 * x;
                    ModelSpec s;
                    s.scheme = Scheme::micro;
                    s.n_sites = n;
                    s.kernel = Kernel(std::vector<double>(static_cast<std::size_t>(l), 0.8 / l), "constant");
                    s.field = FieldSpec::per_site(h);
                    s.beta = beta;
                    s.rate = rate;
                    check(s);
                }
        for (int m = 2; m <= 3; ++m)
            for (const Kernel& kernel : {constant_kernel(1.0, 1), Kernel({0.4, 0.3, 0.2, 0.1}, "linear")})
                for (Scheme scheme : {Scheme::cg0, Scheme::cg2})
                    for (BetaMode mode : {BetaMode::uniform_beta, BetaMode::split_beta}) {
                        std::vector<double> h(static_cast<std::size_t>(4 * m));
                        for (int x = 0; x < 4 * m; ++x) h[static_cast<std::size_t>(x)] = 0.25 * std::sin(x + 1.0);
                        ModelSpec s;
                        s.scheme = scheme;
                        s.n_sites = 4 * m;
                        s.q = 4;
                        s.kernel = kernel;
                        s.field = FieldSpec::per_site(h);
                        s.beta = 1.1;
                        s.rate = rate;
                        s.beta_mode = mode;
                        s.coarse_beta_in_rate = mode == BetaMode::uniform_beta;
                        check(s);
                    }
    }
    rep.expect_le("max |pi_i T_ij - pi_j T_ji|", db, 1e-12);
    rep.expect_le("max |(pi T)_j - pi_j|", st, 1e-12);
    rep.expect_le("max |row sum - 1|", rs, 1e-12);
    rep.expect_true("irreducible and aperiodic", ergodic);
    rep.details["chains"] = chains;
    rep.seconds = seconds_since(t0);
    return rep;
}

SuiteReport verify_kadanoff(std::uint64_t seed) {
    const auto t0 = Clock::now();
    SuiteReport rep;
    rep.suite = "kadanoff";
    Rng rng = make_stream(seed, 0xB);
    double h0_err = 0.0, push_err = 0.0, entropy_err = 0.0, var_err = 0.0;
    nlohmann::json cases = nlohmann::json::array();
    for (int n : {8, 12, 16})
        for (int q : {2, 4}) {
            // V(r) = (c0 + c1 cos(pi r) + c2 cos(2 pi r)) (1 - r)^2 is C^1 with V(1) = V'(1) = 0.
            const double c0 = 0.5 + uniform01(rng), c1 = uniform01(rng) - 0.5, c2 = uniform01(rng) - 0.5;
            const int range = 1 + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(n / 2)));
            const Kernel kernel = kernel_from_profile(
                [=](double r) {
                    const double pi = 3.141592653589793;
                    return (c0 + c1 * std::cos(pi * r) + c2 * std::cos(2 * pi * r)) * (1 - r) * (1 - r);
                },
                range + 1, 1.0, "smooth");
            const double h = uniform01(rng) - 0.5;
            const double beta = 0.3 + 1.2 * uniform01(rng);
            const MicroParams params{n, kernel, FieldSpec::uniform(h), beta};
            const CoarsePartition part(n, q);
            const KadanoffTable table = kadanoff_table(params, q);
            const CoarseKernel ck(kernel, part);
            const CoarseField cf = effective_field(params.field, part, beta);
            const int m = part.cells();
            for (std::size_t s = 0; s < table.states(); ++s) {
                const CoarseConfig alpha = coarse_state(s, m, q);
                h0_err = std::max(h0_err, std::abs(h0_energy(alpha, ck, cf) - table.mean[s]));
            }
            const EnumeratedMeasure pf = pushforward(enumerate_micro(params), part);
            const EnumeratedMeasure km = kadanoff_measure(table);
            for (std::size_t s = 0; s < pf.states(); ++s)
                push_err = std::max(push_err, std::abs(std::exp(pf.log_weights[s]) - std::exp(km.log_weights[s])));
            entropy_err = std::max(entropy_err, std::abs(relative_entropy_log(km.log_weights, pf.log_weights) / n));
            if (q >= 4) {
                const KernelMoments mom(kernel, part);
                for (std::size_t s = 0; s < table.states(); ++s) {
                    const CoarseConfig alpha = coarse_state(s, m, q);
                    const double corr = h1_energy(alpha, mom, beta) + h2_energy(alpha, mom, beta);
                    const double target = -0.5 * beta * table.variance[s];
                    var_err = std::max(var_err, std::abs(corr - target) / std::max(1.0, std::abs(target)));
                }
            }
            cases.push_back({{"n_sites", n}, {"q", q}, {"range", kernel.range()}, {"beta", beta}, {"h", h}});
        }
    rep.expect_le("max |H0 - E[H_N | eta]|", h0_err, 1e-10);
    rep.expect_le("max |pushforward - Kadanoff measure|", push_err, 1e-12);
    rep.expect_le("|R(Kadanoff | pushforward)| / N", entropy_err, 1e-12);
    rep.expect_le("max relative |H1 + H2 + beta/2 Var[H_N | eta]|", var_err, 1e-9);
    rep.details["cases"] = cases;
    rep.seconds = seconds_since(t0);
    return rep;
}

// ---------------------------------------------------------------------------------------------
// Entropy grid

namespace {

Kernel linear_kernel(int range) {
    return kernel_from_profile([](double r) { return r < 1.0 ? 1.0 - r : 0.0; }, range, 1.0, "linear");
}

ModelSpec grid_spec(const ScalingGrid& grid, Scheme scheme, int range, double beta) {
    ModelSpec s;
    s.scheme = scheme;
    s.n_sites = grid.n_sites;
    s.q = grid.q;
    s.kernel = linear_kernel(range);
    s.field = FieldSpec::uniform(0.0);
    s.beta = beta;
    return s;
}

// Two-sided 97.5% Student t quantiles for 1..10 degrees of freedom.
double t975(int df) {
    static const double t[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228};
    return df >= 1 && df <= 10 ? t[df - 1] : 1.96;
}

}  // namespace

std::vector<ScalingPoint> entropy_grid(const ScalingGrid& grid) {
    std::vector<ScalingPoint> out;
    for (double beta : grid.betas)
        for (int range : grid.ranges) {
            const ModelSpec s0 = grid_spec(grid, Scheme::cg0, range, beta);
            const ModelSpec s2 = grid_spec(grid, Scheme::cg2, range, beta);
            const KadanoffTable table = kadanoff_table(MicroParams{grid.n_sites, s0.kernel, s0.field, beta}, grid.q);
            const EntropyReport r0 = scheme_entropy_exact(s0, &table);
            const EntropyReport r2 = scheme_entropy_exact(s2, &table);
            const Model cg2(s2);
            double resid = 0.0;
            for (std::size_t s = 0; s < table.states(); ++s) {
                const CoarseConfig alpha = coarse_state(s, cg2.partition().cells(), grid.q);
                resid = std::max(resid, std::abs(beta * table.hbar[s] - cg2.exponent(alpha)));
            }
            ScalingPoint p;
            p.beta = beta;
            p.range = range;
            p.epsilon = epsilon_diag(beta, grid.q, range, 1.0).epsilon;
            p.r_cg0 = r0.r_per_site;
            p.r_cg2 = r2.r_per_site;
            p.r_cg0_cross = r0.cross_check;
            p.r_cg2_cross = r2.cross_check;
            p.cg2_residual = resid;
            out.push_back(p);
        }
    return out;
}

SlopeFit log_log_fit(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i)
        if (x[i] > 0.0 && y[i] > 0.0) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(y[i]));
        }
    if (lx.size() < 2) throw std::invalid_argument("log-log fit needs two positive points");
    const LineFit f = fit_line(lx, ly);
    const double half = t975(static_cast<int>(lx.size()) - 2) * f.slope_stderr;
    return SlopeFit{f.slope, f.slope - half, f.slope + half, f.intercept};
}

void write_entropy_csv(std::ostream& out, const std::vector<ScalingPoint>& points, const ScalingGrid& grid) {
    write_schema_line(out);
    out << "n_sites,q,beta,range,epsilon,r_cg0,r_cg2,r_cg0_cross,r_cg2_cross,cg2_residual\n";
    for (const auto& p : points)
        out << grid.n_sites << ',' << grid.q << ',' << fmt(p.beta) << ',' << p.range << ',' << fmt(p.epsilon) << ','
            << fmt(p.r_cg0) << ',' << fmt(p.r_cg2) << ',' << fmt(p.r_cg0_cross) << ',' << fmt(p.r_cg2_cross) << ','
            << fmt(p.cg2_residual) << '\n';
}

SuiteReport verify_entropy_scaling() {
    const auto t0 = Clock::now();
    SuiteReport rep;
    rep.suite = "entropy_scaling";
    const auto pts = entropy_grid();
    std::vector<double> eps, r0, r2;
    double cross = 0.0, negative = 0.0;
    bool ordered = true;
    for (const auto& p : pts) {
        eps.push_back(p.epsilon);
        r0.push_back(p.r_cg0);
        r2.push_back(p.r_cg2);
        cross = std::max({cross, std::abs(p.r_cg0 - p.r_cg0_cross), std::abs(p.r_cg2 - p.r_cg2_cross)});
        negative = std::max({negative, -p.r_cg0, -p.r_cg2});
        ordered = ordered && p.r_cg2 < p.r_cg0;
    }
    const SlopeFit f0 = log_log_fit(eps, r0);
    const SlopeFit f2 = log_log_fit(eps, r2);
    rep.expect_le("|two-term form - direct sum| per site", cross, 1e-10);
    rep.expect_le("-min R / N", negative, 1e-12);
    rep.expect_le("|slope cg0 - 2|", std::abs(f0.slope - 2.0), 0.5);
    rep.expect_le("|slope cg2 - 3|", std::abs(f2.slope - 3.0), 0.7);
    rep.expect_true("R(cg2) < R(cg0) at every grid point", ordered);
    rep.details["slope_cg0"] = {{"slope", f0.slope}, {"ci95", {f0.ci_low, f0.ci_high}}};
    rep.details["slope_cg2"] = {{"slope", f2.slope}, {"ci95", {f2.ci_low, f2.ci_high}}};
    nlohmann::json grid = nlohmann::json::array();
    for (const auto& p : pts)
        grid.push_back({{"beta", p.beta}, {"range", p.range}, {"epsilon", p.epsilon}, {"r_cg0", p.r_cg0}, {"r_cg2", p.r_cg2}});
    rep.details["grid"] = grid;
    rep.seconds = seconds_since(t0);
    return rep;
}

std::vector<PosteriorPoint> posterior_grid(const ScalingGrid& grid, const RunLength& length, std::uint64_t seed) {
    const auto pts = entropy_grid(grid);
    std::vector<double> eps, resid;
    for (const auto& p : pts) {
        eps.push_back(p.epsilon);
        resid.push_back(p.cg2_residual);
    }
    const SlopeFit fit = log_log_fit(eps, resid);
    RunLength len = length;
    len.keep_states = true;
    std::vector<PosteriorPoint> out;
    std::uint64_t stream = 0;
    for (const auto& p : pts) {
        const ModelSpec spec = grid_spec(grid, Scheme::cg0, p.range, p.beta);
        const Model cg0(spec);
        const KernelMoments km(spec.kernel, cg0.partition());
        const SampleBatch batch = run_chain(ChainSpec{spec, len, seed, stream++, 1});
        const EntropyReport mc = a_posteriori_mc(batch, km, p.beta);
        PosteriorPoint q;
        q.beta = p.beta;
        q.range = p.range;
        q.epsilon = p.epsilon;
        q.exact_total = p.r_cg0 * grid.n_sites;
        q.posterior_exact = a_posteriori_exact(cg0, km).total;
        q.posterior_mc = mc.total;
        q.posterior_stderr = mc.stderr_;
        q.residual_fit = std::exp(fit.intercept) * std::pow(p.epsilon, fit.slope);
        q.tolerance = std::max(4.0 * q.posterior_stderr, 3.0 * q.residual_fit);
        out.push_back(q);
    }
    return out;
}

void write_posterior_csv(std::ostream& out, const std::vector<PosteriorPoint>& points) {
    write_schema_line(out);
    out << "beta,range,epsilon,exact_total,posterior_exact,posterior_mc,posterior_stderr,residual_fit,tolerance\n";
    for (const auto& p : points)
        out << fmt(p.beta) << ',' << p.range << ',' << fmt(p.epsilon) << ',' << fmt(p.exact_total) << ','
            << fmt(p.posterior_exact) << ',' << fmt(p.posterior_mc) << ',' << fmt(p.posterior_stderr) << ','
            << fmt(p.residual_fit) << ',' << fmt(p.tolerance) << '\n';
}

const std::vector<std::string>& verify_suite_names() {
    static const std::vector<std::string> names{"moments", "fluctuation_integrals", "detailed_balance", "kadanoff",
                                                "entropy_scaling"};
    return names;
}

SuiteReport run_verify(const std::string& suite, std::uint64_t seed) {
    if (suite == "moments") return verify_moments();
    if (suite == "fluctuation_integrals") return verify_fluctuation_integrals(seed);
    if (suite == "detailed_balance") return verify_detailed_balance();
    if (suite == "kadanoff") return verify_kadanoff(seed);
    if (suite == "entropy_scaling") return verify_entropy_scaling();
    throw std::invalid_argument("unknown verification suite '" + suite + "'");
}

// ---------------------------------------------------------------------------------------------
// Bench

std::vector<BenchRow> run_bench(const ExperimentConfig& cfg) {
    validate(cfg);
    std::vector<BenchRow> rows;
    Rng rng = make_stream(cfg.seed, 0xBE);
    SpinConfig sigma(cfg.n_sites);
    for (int x = 0; x < cfg.n_sites; ++x)
        if (uniform01(rng) < 0.5) sigma.flip(x);
    const Kernel kernel = cfg.kernel();
    const double q = cfg.q;
    std::uint64_t micro_reads = 0;
    for (Scheme scheme : {Scheme::micro, Scheme::cg0, Scheme::cg2}) {
        if (scheme == Scheme::cg2 && cfg.q < 4) continue;
        const bool wanted = std::find(cfg.schemes.begin(), cfg.schemes.end(), scheme) != cfg.schemes.end();
        if (!wanted && scheme != Scheme::micro) continue;
        const auto model = std::make_shared<const Model>(cfg.model(scheme, 0.0));
        OpCounter c;
        if (scheme == Scheme::micro) {
            micro_energy(sigma, kernel, cfg.model(scheme, 0.0).field, &c);
            micro_reads = c.table_reads;
        } else {
            const CoarseConfig alpha = coarsen(sigma, model->partition());
            h0_energy(alpha, model->coarse_kernel(), model->coarse_field(), &c);
            if (scheme == Scheme::cg2) {
                h1_energy(alpha, *model->moments(), cfg.beta, &c);
                h2_energy(alpha, *model->moments(), cfg.beta, &c);
            }
        }
        BenchRow r;
        r.scheme = scheme;
        r.reads_per_eval = c.table_reads;
        r.ratio_vs_micro = c.table_reads == 0 ? 0.0 : static_cast<double>(micro_reads) / static_cast<double>(c.table_reads);
        r.predicted_ratio = scheme == Scheme::micro ? 1.0 : scheme == Scheme::cg0 ? q * q : q * q * q / kernel.range();
        if (cfg.timing) {
            Chain chain(model, make_stream(cfg.seed, static_cast<std::uint64_t>(scheme)));
            const long sweeps = 50;
            const auto t0 = Clock::now();
            for (long i = 0; i < sweeps; ++i) chain.sweep();
            r.seconds_per_sweep = seconds_since(t0) / sweeps;
        }
        rows.push_back(r);
    }
    return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
    write_schema_line(out);
    out << "scheme,reads_per_eval,ratio_vs_micro,predicted_ratio,seconds_per_sweep\n";
    for (const auto& r : rows)
        out << to_string(r.scheme) << ',' << r.reads_per_eval << ',' << fmt(r.ratio_vs_micro) << ','
            << fmt(r.predicted_ratio) << ',' << fmt(r.seconds_per_sweep) << '\n';
}

}  // namespace cgmc
