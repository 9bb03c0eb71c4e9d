#include "cgmc/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace cgmc {

ConfigError::ConfigError(const std::string& source, int line, const std::string& message)
    : std::runtime_error(line > 0 ? source + ":" + std::to_string(line) + ": " + message : source + ": " + message),
      line_(line) {}

Kernel ExperimentConfig::kernel() const {
    if (profile == "constant") return constant_kernel(j0, range);
    if (profile == "linear")
        return kernel_from_profile([](double r) { return r < 1.0 ? 1.0 - r : 0.0; }, range, j0, "linear");
    if (profile == "curie_weiss") return curie_weiss_kernel(j0, n_sites);
    if (profile == "table") return Kernel(values, "table");
    throw std::invalid_argument("unknown kernel profile '" + profile + "'");
}

std::vector<double> ExperimentConfig::field_grid() const {
    std::vector<double> h(static_cast<std::size_t>(n_points));
    if (n_points == 1) {
        h[0] = h_min;
        return h;
    }
    for (int i = 0; i < n_points; ++i) h[static_cast<std::size_t>(i)] = h_min + (h_max - h_min) * i / (n_points - 1);
    return h;
}

ModelSpec ExperimentConfig::model(Scheme scheme, double h) const {
    ModelSpec m;
    m.scheme = scheme;
    m.n_sites = n_sites;
    m.q = scheme == Scheme::micro ? 1 : q;
    m.kernel = kernel();
    m.field = FieldSpec::uniform(-h);
    m.beta = beta;
    m.rate = rate;
    m.beta_mode = beta_mode;
    m.coarse_beta_in_rate = coarse_beta_in_rate;
    return m;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Parser {
    std::string source;
    int line = 0;

    [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(source, line, msg); }

    double real(const std::string& v) const {
        errno = 0;
        char* end = nullptr;
        const double x = std::strtod(v.c_str(), &end);
        if (v.empty() || *end != '\0' || errno == ERANGE || !std::isfinite(x)) fail("'" + v + "' is not a finite number");
        return x;
    }
    long integer(const std::string& v) const {
        errno = 0;
        char* end = nullptr;
        const long x = std::strtol(v.c_str(), &end, 10);
        if (v.empty() || *end != '\0' || errno == ERANGE) fail("'" + v + "' is not an integer");
        return x;
    }
    std::uint64_t unsigned64(const std::string& v) const {
        errno = 0;
        char* end = nullptr;
        if (!v.empty() && v[0] == '-') fail("'" + v + "' must be non-negative");
        const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
        if (v.empty() || *end != '\0' || errno == ERANGE) fail("'" + v + "' is not an unsigned integer");
        return x;
    }
    bool boolean(const std::string& v) const {
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        fail("'" + v + "' is not a boolean");
    }
    std::vector<std::string> list(const std::string& v) const {
        std::vector<std::string> out;
        std::stringstream ss(v);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) fail("empty list entry");
            out.push_back(item);
        }
        return out;
    }
    template <class F>
    auto wrap(F&& f) const -> decltype(f()) {
        try {
            return f();
        } catch (const std::invalid_argument& e) {
            fail(e.what());
        }
    }
};

}  // namespace

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
    ExperimentConfig cfg;
    Parser p{source};
    std::map<std::string, int> lines;
    std::string section;
    const std::set<std::string> sections{"lattice", "kernel", "coarse", "chain", "sweep"};

    using Setter = std::function<void(const std::string&)>;
    const std::map<std::string, Setter> keys{
        {"lattice.n_sites", [&](const std::string& v) { cfg.n_sites = static_cast<int>(p.integer(v)); }},
        {"kernel.profile", [&](const std::string& v) { cfg.profile = v; }},
        {"kernel.range", [&](const std::string& v) { cfg.range = static_cast<int>(p.integer(v)); }},
        {"kernel.j0", [&](const std::string& v) { cfg.j0 = p.real(v); }},
        {"kernel.values",
         [&](const std::string& v) {
             cfg.values.clear();
             for (const auto& x : p.list(v)) cfg.values.push_back(p.real(x));
         }},
        {"coarse.q", [&](const std::string& v) { cfg.q = static_cast<int>(p.integer(v)); }},
        {"coarse.beta_mode", [&](const std::string& v) { cfg.beta_mode = p.wrap([&] { return beta_mode_from_string(v); }); }},
        {"coarse.coarse_beta_in_rate", [&](const std::string& v) { cfg.coarse_beta_in_rate = p.boolean(v); }},
        {"chain.beta", [&](const std::string& v) { cfg.beta = p.real(v); }},
        {"chain.rate", [&](const std::string& v) { cfg.rate = p.wrap([&] { return rate_kind_from_string(v); }); }},
        {"chain.burnin", [&](const std::string& v) { cfg.length.burnin = p.integer(v); }},
        {"chain.samples", [&](const std::string& v) { cfg.length.samples = p.integer(v); }},
        {"chain.thinning", [&](const std::string& v) { cfg.length.thinning = p.integer(v); }},
        {"chain.seed", [&](const std::string& v) { cfg.seed = p.unsigned64(v); }},
        {"sweep.h_min", [&](const std::string& v) { cfg.h_min = p.real(v); }},
        {"sweep.h_max", [&](const std::string& v) { cfg.h_max = p.real(v); }},
        {"sweep.n_points", [&](const std::string& v) { cfg.n_points = static_cast<int>(p.integer(v)); }},
        {"sweep.schemes",
         [&](const std::string& v) {
             cfg.schemes.clear();
             for (const auto& x : p.list(v)) cfg.schemes.push_back(p.wrap([&] { return scheme_from_string(x); }));
         }},
        {"sweep.timing", [&](const std::string& v) { cfg.timing = p.boolean(v); }},
    };

    std::string raw;
    while (std::getline(in, raw)) {
        ++p.line;
        const auto hash = raw.find('#');
        const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (text.empty()) continue;
        if (text.front() == '[') {
            if (text.back() != ']') p.fail("malformed section header");
            section = trim(text.substr(1, text.size() - 2));
            if (!sections.count(section)) p.fail("unknown section [" + section + "]");
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos) p.fail("expected key = value");
        if (section.empty()) p.fail("key outside of a section");
        const std::string key = section + "." + trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        const auto it = keys.find(key);
        if (it == keys.end()) p.fail("unknown key '" + trim(text.substr(0, eq)) + "' in [" + section + "]");
        if (lines.count(key)) p.fail("repeated key '" + key + "' (first on line " + std::to_string(lines[key]) + ")");
        lines[key] = p.line;
        it->second(value);
    }
    validate(cfg, source, lines);
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, 0, "cannot open file");
    return parse_config(in, path);
}

void validate(const ExperimentConfig& c, const std::string& source, const std::map<std::string, int>& lines) {
    auto fail = [&](const std::string& key, const std::string& msg) {
        const auto it = lines.find(key);
        throw ConfigError(source, it == lines.end() ? 0 : it->second, key + ": " + msg);
    };
    if (c.n_sites < 2) fail("lattice.n_sites", "must be at least 2");
    if (c.profile != "constant" && c.profile != "linear" && c.profile != "curie_weiss" && c.profile != "table")
        fail("kernel.profile", "expected constant, linear, curie_weiss or table");
    if (c.profile == "table" && c.values.empty()) fail("kernel.profile", "table profile needs kernel.values");
    if (c.profile != "table" && c.profile != "curie_weiss" && c.range < 1) fail("kernel.range", "must be positive");
    const int reach = c.profile == "table" ? static_cast<int>(c.values.size()) : c.range;
    if (c.profile != "curie_weiss" && c.n_sites <= 2 * reach)
        fail("lattice.n_sites", "must exceed twice the kernel range (" + std::to_string(reach) + ")");
    bool coarse = false, cg2 = false;
    for (Scheme s : c.schemes) {
        coarse = coarse || s != Scheme::micro;
        cg2 = cg2 || s == Scheme::cg2;
    }
    if (c.schemes.empty()) fail("sweep.schemes", "no schemes selected");
    if (coarse) {
        if (c.q < 1 || c.n_sites % c.q != 0) fail("coarse.q", "must divide lattice.n_sites");
        if (c.n_sites / c.q < 2) fail("coarse.q", "leaves fewer than 2 cells");
    }
    if (cg2 && c.q < 4) fail("coarse.q", "cg2 needs q >= 4");
    if (c.beta < 0.0) fail("chain.beta", "must be non-negative");
    if (c.length.burnin < 0) fail("chain.burnin", "must be non-negative");
    if (c.length.samples < 1) fail("chain.samples", "must be positive");
    if (c.length.thinning < 1) fail("chain.thinning", "must be positive");
    if (c.n_points < 2) fail("sweep.n_points", "needs at least 2 points");
    if (!(c.h_max > c.h_min)) fail("sweep.h_max", "must exceed sweep.h_min");
}

}  // namespace cgmc
