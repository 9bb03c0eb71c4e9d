#pragma once

// Ground truth by exhaustive enumeration and closed forms: the microscopic Gibbs measure, the
// exact coarse (Kadanoff) Hamiltonian
//
//   exp(-beta Hbar(eta)) = E[exp(-beta H_N) | eta]
//
// conditional integrals of the kernel fluctuations, and exact 1D magnetization curves.
//
// Enumeration runs over fixed configuration blocks in parallel; the blocks are merged in block
// order, so results do not depend on the thread count. Serial versions are kept as references.

#include <cstdint>
#include <ostream>
#include <vector>

#include "cgmc/coarse.hpp"
#include "cgmc/corrections.hpp"
#include "cgmc/samplers.hpp"

namespace cgmc {

struct MicroParams {
    int n_sites = 0;
    Kernel kernel;
    FieldSpec field;
    double beta = 1.0;
};

inline constexpr int kEnumerateMaxSites = 20;

/// Normalized log-weights over states in enumeration order.
struct EnumeratedMeasure {
    std::vector<double> log_weights;
    double log_z = 0.0;

    std::size_t states() const { return log_weights.size(); }
};

/// Micro states in bit-pattern order (bit x set means sigma(x) = +1).
EnumeratedMeasure enumerate_micro(const MicroParams& params);
EnumeratedMeasure enumerate_micro_serial(const MicroParams& params);

/// Per-fiber statistics of H_N over {sigma : F(sigma) = alpha}, indexed by coarse_index(alpha).
struct KadanoffTable {
    int n_sites = 0;
    int q = 0;
    double beta = 0.0;
    std::vector<double> hbar;      ///< exact coarse Hamiltonian
    std::vector<double> mean;      ///< E[H_N | alpha]
    std::vector<double> variance;  ///< Var[H_N | alpha]
    double log_z_micro = 0.0;      ///< log Z_N from the same pass

    std::size_t states() const { return hbar.size(); }
};

/// Below this beta the coarse Hamiltonian is replaced by its limit E[H_N | eta].
inline constexpr double kKadanoffBetaFloor = 1e-8;

KadanoffTable kadanoff_table(const MicroParams& params, int q);
KadanoffTable kadanoff_table_serial(const MicroParams& params, int q);

/// Hbar for one coarse state, enumerating only its fiber.
double exact_kadanoff_hamiltonian(const CoarseConfig& alpha, const MicroParams& params);

/// F-pushforward of a micro measure, indexed by coarse_index.
EnumeratedMeasure pushforward(const EnumeratedMeasure& micro, const CoarsePartition& part);

/// prior(alpha) exp(-beta Hbar(alpha)) / Zbar.
EnumeratedMeasure kadanoff_measure(const KadanoffTable& table);

/// Coarse measure prior(alpha) exp(-Phi(alpha)) / Z of a coarse scheme, indexed by coarse_index.
EnumeratedMeasure enumerate_coarse(const Model& model);

/// Writes "state_id,log_weight" rows with 17 significant digits.
void write_measure_csv(std::ostream& out, const EnumeratedMeasure& m);

// Conditional integrals of products of the bare fluctuation sums
//   S_kk = sum_{x != y in C_k} E_kk(x-y) sigma(x) sigma(y),   S_kl = sum_{x in C_k, y in C_l} E_kl(x-y) sigma(x) sigma(y)
// under the uniform within-cell placement of the given occupancies.
enum class IntegralKind { kk2, kl2, kk_kl, triple };

const char* to_string(IntegralKind kind);

/// cells: {k} for kk2, {k, l} for kl2 and kk_kl, {k1, k2, k3} for triple (k2 in the middle).
/// alphas: occupancies of those cells. Throws std::invalid_argument for q > 10.
double fluctuation_integral_oracle(IntegralKind kind, const Kernel& kernel, const CoarsePartition& part,
                        const std::vector<int>& cells, const std::vector<int>& alphas);

/// The same integrals from the kernel moments and conditional moments.
double fluctuation_integral_closed_form(IntegralKind kind, const KernelMoments& km, const std::vector<int>& cells,
                             const std::vector<int>& alphas);

/// m = sinh(beta h) / sqrt(sinh^2(beta h) + exp(-2 beta J0)) for the nearest-neighbour chain
/// with pair coupling J0/2 and the conventional field term -h sum sigma.
double ising_nn_exact_m(double beta, double h, double j0);

/// Finite-ring transfer-matrix magnetization for the same model.
double ising_nn_transfer_m(double beta, double h, double j0, int n_sites);

enum class Branch { upper, lower };

struct CurieWeissRoot {
    double m = 0.0;
    bool unique = true;  ///< only one solution; the branch request was not needed
};

/// Solves m = tanh(beta (J0 m + h)) by bracketing and bisection to 1e-12.
CurieWeissRoot curie_weiss_m(double beta, double h, double j0, Branch branch);

}  // namespace cgmc
