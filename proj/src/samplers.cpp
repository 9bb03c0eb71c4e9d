#include "cgmc/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <stdexcept>
#include <string>

namespace cgmc {

const char* to_string(Scheme s) {
    switch (s) {
        case Scheme::micro: return "micro";
        case Scheme::cg0: return "cg0";
        default: return "cg2";
    }
}

const char* to_string(RateKind k) {
    switch (k) {
        case RateKind::metropolis: return "metropolis";
        case RateKind::glauber: return "glauber";
        default: return "symmetric";
    }
}

Scheme scheme_from_string(const std::string& name) {
    if (name == "micro") return Scheme::micro;
    if (name == "cg0") return Scheme::cg0;
    if (name == "cg2") return Scheme::cg2;
    throw std::invalid_argument("unknown scheme '" + name + "' (expected micro, cg0 or cg2)");
}

RateKind rate_kind_from_string(const std::string& name) {
    if (name == "metropolis") return RateKind::metropolis;
    if (name == "glauber") return RateKind::glauber;
    if (name == "symmetric") return RateKind::symmetric;
    throw std::invalid_argument("unknown rate '" + name + "' (expected metropolis, glauber or symmetric)");
}

double RateFunction::operator()(double r) const {
    switch (kind) {
        case RateKind::metropolis: return r <= 0.0 ? 1.0 : std::exp(-r);
        case RateKind::glauber:
            // 1 / (1 + e^r), written to avoid overflow for large |r|.
            return r > 0.0 ? std::exp(-r) / (1.0 + std::exp(-r)) : 1.0 / (1.0 + std::exp(r));
        default: return std::exp(-0.5 * r);
    }
}

Model::Model(ModelSpec spec) : spec_(std::move(spec)), rate_{spec_.rate} {
    if (!std::isfinite(spec_.beta) || spec_.beta < 0.0) throw std::invalid_argument("beta must be finite and >= 0");
    if (spec_.n_sites < 2) throw std::invalid_argument("lattice needs at least 2 sites");
    spec_.field.check_size(spec_.n_sites);
    const double beta = spec_.beta;
    if (coarse()) {
        part_ = CoarsePartition(spec_.n_sites, spec_.q);
        if (spec_.scheme == Scheme::cg2 && spec_.q < 4)
            throw std::invalid_argument("the cg2 scheme needs q >= 4 (fourth conditional moments)");
        ck_ = CoarseKernel(spec_.kernel, part_);
        field_ = effective_field(spec_.field, part_, beta);
        if (spec_.scheme == Scheme::cg2) km_ = std::make_shared<const KernelMoments>(spec_.kernel, part_);
        b0_ = spec_.coarse_beta_in_rate ? beta : 1.0;
        b1_ = spec_.beta_mode == BetaMode::uniform_beta ? b0_ : 1.0;
    } else {
        b0_ = beta;
    }
    if (spec_.rate == RateKind::symmetric) rate_scale_ = std::exp(-0.5 * exponent_change_bound());
}

double Model::exponent_change_bound() const {
    if (!coarse()) {
        double hmax = std::abs(spec_.field.uniform_value());
        for (double h : spec_.field.values()) hmax = std::max(hmax, std::abs(h));
        return spec_.beta * (2.0 * spec_.kernel.norm() + 2.0 * hmax);
    }
    const int q = part_.q();
    const int m = part_.cells();
    double jsum = 0.0;
    for (int s = 1; s < m; ++s) jsum += std::abs(ck_.jbar(s));
    double dh = 0.0;
    for (int k = 0; k < m; ++k)
        for (int a = 0; a < q; ++a) dh = std::max(dh, std::abs(field_(k, a + 1) - field_(k, a)));
    const double j0 = q >= 2 ? std::abs(ck_.jbar0()) : 0.0;
    double bound = b0_ * (2.0 * q * jsum + j0 * (2.0 * q + 2.0) + dh);
    if (km_) {
        const KernelMoments& km = *km_;
        double local = std::abs(km.j2(0)) + km.j1(0);
        for (int s : km.support()) {
            if (s == 0) continue;
            local += 2.0 * (km.j1(s) + std::abs(km.j2(s))) + 4.0 * std::abs(km.j2t(0, s));
            for (int t : km.support())
                if (t != 0 && t != s) local += 3.0 * std::abs(km.j2t(s, t));
        }
        bound += b1_ * 2.0 * spec_.beta * local;
    }
    return bound;
}

double Model::exponent(const SpinConfig& sigma) const {
    if (coarse()) throw std::logic_error("micro configuration passed to a coarse scheme");
    return spec_.beta * micro_energy(sigma, spec_.kernel, spec_.field);
}

double Model::exponent(const CoarseConfig& alpha) const {
    if (!coarse()) throw std::logic_error("coarse configuration passed to the micro scheme");
    double phi = b0_ * h0_energy(alpha, ck_, field_);
    if (km_) phi += b1_ * (h1_energy(alpha, *km_, spec_.beta) + h2_energy(alpha, *km_, spec_.beta));
    return phi;
}

double Model::exponent_delta(const SpinConfig& sigma, int x) const {
    return spec_.beta * micro_energy_delta_flip(sigma, x, spec_.kernel, spec_.field);
}

double Model::exponent_delta(const CoarseConfig& alpha, int k, int direction) const {
    double d = b0_ * h0_energy_delta(alpha, k, direction, ck_, field_);
    if (km_) d += b1_ * correction_delta(alpha, k, direction, *km_, spec_.beta);
    return d;
}

namespace {

bool accept(double p, Rng& rng) { return p >= 1.0 || uniform01(rng) < p; }

// Returns the change of the spin total (0 when rejected).
int micro_move(SpinConfig& sigma, const Model& model, Rng& rng) {
    const int x = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(sigma.size())));
    if (!accept(model.acceptance(model.exponent_delta(sigma, x)), rng)) return 0;
    sigma.flip(x);
    return 2 * sigma[x];
}

// Returns the change of the eta total (0 when rejected).
int coarse_move(CoarseConfig& alpha, const Model& model, Rng& rng) {
    const int q = alpha.q();
    const int k = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(alpha.cells())));
    const int a = alpha.alpha(k);
    // A uniformly chosen site of the cell is up with probability a/q.
    const int dir = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(q))) < a ? -1 : 1;
    if (!accept(model.acceptance(model.exponent_delta(alpha, k, dir)), rng)) return 0;
    alpha.set_alpha(k, a + dir);
    return 2 * dir;
}

}  // namespace

bool micro_step(SpinConfig& sigma, const Model& model, Rng& rng) { return micro_move(sigma, model, rng) != 0; }

bool coarse_step(CoarseConfig& alpha, const Model& model, Rng& rng) { return coarse_move(alpha, model, rng) != 0; }

Chain::Chain(std::shared_ptr<const Model> model, Rng rng, int initial_spin) : model_(std::move(model)), rng_(rng) {
    if (initial_spin != 1 && initial_spin != -1) throw std::invalid_argument("initial spin must be +1 or -1");
    const int n = model_->sites();
    if (model_->coarse()) {
        const int q = model_->partition().q();
        alpha_ = CoarseConfig(model_->partition().cells(), q, initial_spin > 0 ? q : 0);
    } else {
        sigma_ = SpinConfig(n, static_cast<Spin>(initial_spin));
    }
    total_ = static_cast<long>(initial_spin) * n;
}

void Chain::set_model(std::shared_ptr<const Model> model) {
    const ModelSpec& a = model_->spec();
    const ModelSpec& b = model->spec();
    if (a.scheme != b.scheme || a.n_sites != b.n_sites || (model->coarse() && a.q != b.q))
        throw std::invalid_argument("continuation needs the same scheme and geometry");
    model_ = std::move(model);
}

void Chain::step() {
    const int d = model_->coarse() ? coarse_move(alpha_, *model_, rng_) : micro_move(sigma_, *model_, rng_);
    ++proposals_;
    if (d != 0) {
        ++accepted_;
        total_ += d;
    }
}

void Chain::sweep() {
    const int n = model_->slots();
    for (int i = 0; i < n; ++i) step();
}

double Chain::magnetization() const { return static_cast<double>(total_) / model_->sites(); }

SampleBatch Chain::run(const RunLength& length) {
    if (length.burnin < 0 || length.samples < 0 || length.thinning < 1)
        throw std::invalid_argument("chain lengths must be >= 0 and thinning >= 1");
    SampleBatch batch;
    const std::uint64_t p0 = proposals_;
    for (long i = 0; i < length.burnin; ++i) sweep();
    const std::uint64_t p1 = proposals_, a1 = accepted_;
    batch.magnetization.reserve(static_cast<std::size_t>(length.samples));
    for (long i = 0; i < length.samples; ++i) {
        for (long t = 0; t < length.thinning; ++t) sweep();
        batch.magnetization.push_back(magnetization());
        if (length.keep_states && model_->coarse()) batch.states.push_back(alpha_);
    }
    batch.proposals = proposals_ - p1;
    batch.accepted = accepted_ - a1;
    batch.energy_evals = proposals_ - p0;
    return batch;
}

namespace {

void mix(std::uint64_t& h, const std::string& s) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    h ^= 0xff;
    h *= 0x100000001b3ULL;
}

std::string hex(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

}  // namespace

std::uint64_t spec_hash(const ChainSpec& spec) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    const ModelSpec& m = spec.model;
    mix(h, to_string(m.scheme));
    mix(h, std::to_string(m.n_sites) + "/" + std::to_string(m.q));
    for (double v : m.kernel.values()) mix(h, hex(v));
    mix(h, hex(m.field.uniform_value()));
    for (double v : m.field.values()) mix(h, hex(v));
    mix(h, hex(m.beta));
    mix(h, to_string(m.rate));
    mix(h, to_string(m.beta_mode));
    mix(h, m.coarse_beta_in_rate ? "b" : "-");
    mix(h, std::to_string(spec.length.burnin) + "/" + std::to_string(spec.length.samples) + "/" +
               std::to_string(spec.length.thinning));
    mix(h, std::to_string(spec.seed) + "/" + std::to_string(spec.stream) + "/" + std::to_string(spec.initial_spin));
    return h;
}

SampleBatch run_chain(const ChainSpec& spec) {
    auto model = std::make_shared<const Model>(spec.model);
    Chain chain(model, make_stream(spec.seed, spec.stream), spec.initial_spin);
    SampleBatch batch = chain.run(spec.length);
    batch.spec_hash = spec_hash(spec);
    return batch;
}

double TransitionMatrix::entry(std::size_t i, std::size_t j) const {
    for (const auto& [col, v] : rows[i])
        if (col == j) return v;
    return 0.0;
}

std::size_t coarse_state_count(int cells, int q) {
    std::size_t n = 1;
    for (int k = 0; k < cells; ++k) {
        if (n > std::numeric_limits<std::size_t>::max() / static_cast<std::size_t>(q + 1))
            return std::numeric_limits<std::size_t>::max();
        n *= static_cast<std::size_t>(q + 1);
    }
    return n;
}

CoarseConfig coarse_state(std::size_t index, int cells, int q) {
    std::vector<int> a(static_cast<std::size_t>(cells));
    for (int k = 0; k < cells; ++k) {
        a[static_cast<std::size_t>(k)] = static_cast<int>(index % static_cast<std::size_t>(q + 1));
        index /= static_cast<std::size_t>(q + 1);
    }
    return CoarseConfig(std::move(a), q);
}

std::size_t coarse_index(const CoarseConfig& alpha) {
    std::size_t idx = 0;
    for (int k = alpha.cells(); k-- > 0;) idx = idx * static_cast<std::size_t>(alpha.q() + 1) + static_cast<std::size_t>(alpha.alpha(k));
    return idx;
}

namespace {

void normalize_log(std::vector<double>& lw) {
    LogSumExp acc;
    for (double v : lw) acc.add(v);
    const double z = acc.value();
    for (double& v : lw) v -= z;
}

}  // namespace

TransitionMatrix transition_matrix(const Model& model) {
    TransitionMatrix t;
    if (!model.coarse()) {
        const int n = model.sites();
        if (n > 16) throw std::invalid_argument("micro transition matrix limited to N <= 16");
        const std::size_t states = std::size_t{1} << n;
        t.rows.resize(states);
        t.log_target.resize(states);
        for (std::size_t s = 0; s < states; ++s) {
            const SpinConfig sigma = SpinConfig::from_bits(s, n);
            t.log_target[s] = -model.exponent(sigma);
            double stay = 1.0;
            auto& row = t.rows[s];
            for (int x = 0; x < n; ++x) {
                const double p = std::min(1.0, model.acceptance(model.exponent_delta(sigma, x))) / n;
                stay -= p;
                row.emplace_back(static_cast<std::uint32_t>(s ^ (std::size_t{1} << x)), p);
            }
            row.emplace_back(static_cast<std::uint32_t>(s), stay);
        }
    } else {
        const int m = model.partition().cells();
        const int q = model.partition().q();
        const std::size_t states = coarse_state_count(m, q);
        if (states > kTransitionMatrixMaxStates)
            throw std::invalid_argument("coarse transition matrix limited to " +
                                        std::to_string(kTransitionMatrixMaxStates) + " states");
        t.rows.resize(states);
        t.log_target.resize(states);
        for (std::size_t s = 0; s < states; ++s) {
            const CoarseConfig alpha = coarse_state(s, m, q);
            double lp = -model.exponent(alpha);
            for (int k = 0; k < m; ++k) lp += coarse_prior_logweight_alpha(alpha.alpha(k), q);
            t.log_target[s] = lp;
            double stay = 1.0;
            auto& row = t.rows[s];
            std::size_t stride = 1;
            for (int k = 0; k < m; ++k, stride *= static_cast<std::size_t>(q + 1)) {
                const int a = alpha.alpha(k);
                if (a < q) {
                    const double p = (1.0 / m) * (static_cast<double>(q - a) / q) *
                                     std::min(1.0, model.acceptance(model.exponent_delta(alpha, k, 1)));
                    stay -= p;
                    row.emplace_back(static_cast<std::uint32_t>(s + stride), p);
                }
                if (a > 0) {
                    const double p = (1.0 / m) * (static_cast<double>(a) / q) *
                                     std::min(1.0, model.acceptance(model.exponent_delta(alpha, k, -1)));
                    stay -= p;
                    row.emplace_back(static_cast<std::uint32_t>(s - stride), p);
                }
            }
            row.emplace_back(static_cast<std::uint32_t>(s), stay);
        }
    }
    normalize_log(t.log_target);
    return t;
}

BalanceReport check_balance(const TransitionMatrix& t) {
    BalanceReport r;
    const std::size_t n = t.states();
    std::vector<double> pi(n), flow(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) pi[i] = std::exp(t.log_target[i]);
    for (std::size_t i = 0; i < n; ++i) {
        double rs = 0.0;
        for (const auto& [j, v] : t.rows[i]) {
            rs += v;
            flow[j] += pi[i] * v;
            if (j != i) r.detailed_balance_error = std::max(r.detailed_balance_error, std::abs(pi[i] * v - pi[j] * t.entry(j, i)));
        }
        r.row_sum_error = std::max(r.row_sum_error, std::abs(rs - 1.0));
    }
    for (std::size_t j = 0; j < n; ++j) r.stationarity_error = std::max(r.stationarity_error, std::abs(flow[j] - pi[j]));

    std::vector<char> seen(n, 0);
    std::deque<std::size_t> todo{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!todo.empty()) {
        const std::size_t i = todo.front();
        todo.pop_front();
        for (const auto& [j, v] : t.rows[i])
            if (v > 0.0 && !seen[j]) {
                seen[j] = 1;
                ++reached;
                todo.push_back(j);
            }
    }
    r.irreducible = reached == n;
    bool lazy = false;
    for (std::size_t i = 0; i < n && !lazy; ++i) lazy = t.entry(i, i) > 0.0;
    r.aperiodic = r.irreducible && lazy;
    return r;
}

}  // namespace cgmc
