#pragma once

// Experiment configuration: a flat key = value file with sections.
//
//   [lattice]  n_sites
//   [kernel]   profile (constant | linear | curie_weiss | table), range, j0, values
//   [coarse]   q, beta_mode (uniform_beta | split_beta), coarse_beta_in_rate
//   [chain]    beta, rate (metropolis | glauber | symmetric), burnin, samples, thinning, seed
//   [sweep]    h_min, h_max, n_points, schemes (comma list of micro, cg0, cg2), timing
//
// '#' starts a comment. Unknown sections or keys, repeated keys and bad values are errors that
// carry the line number.

#include <cstdint>
#include <istream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "cgmc/samplers.hpp"

namespace cgmc {

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& source, int line, const std::string& message);
    int line() const { return line_; }

private:
    int line_;
};

struct ExperimentConfig {
    int n_sites = 512;

    std::string profile = "constant";
    int range = 1;
    double j0 = 1.0;
    std::vector<double> values;  ///< profile = table

    int q = 8;
    BetaMode beta_mode = BetaMode::uniform_beta;
    bool coarse_beta_in_rate = true;

    double beta = 1.0;
    RateKind rate = RateKind::metropolis;
    RunLength length;
    std::uint64_t seed = 1;

    double h_min = -1.0;
    double h_max = 1.0;
    int n_points = 11;
    std::vector<Scheme> schemes{Scheme::micro, Scheme::cg0, Scheme::cg2};
    bool timing = false;

    Kernel kernel() const;
    /// Increasing field grid in the conventional sign (energy -h sum sigma).
    std::vector<double> field_grid() const;
    /// Model for one scheme at conventional field h; the stored field is -h.
    ModelSpec model(Scheme scheme, double h) const;
};

ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);

/// Checks cross-key constraints (q divides N, N > 2L, grid monotone, ...).
void validate(const ExperimentConfig& cfg, const std::string& source = "<config>",
              const std::map<std::string, int>& lines = {});

}  // namespace cgmc
