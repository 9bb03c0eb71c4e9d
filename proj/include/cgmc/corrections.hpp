#pragma once

// Higher-order corrections to the coarse Hamiltonian, built from the kernel fluctuations
// E_kl(x - y) = J(x - y) - Jbar(k - l) and the within-cell conditional moments:
//
//   j1(k,l)     = sum_{x in C_k, y in C_l} E_kl(x-y)^2
//   j2(k,l)     = sum_{x in C_k; y, y' in C_l} E_kl(x-y) E_kl(x-y')
//   j2t(a,b,c)  = sum_{x in C_a, y in C_b, z in C_c} E_ab(x-y) E_bc(y-z)
//
// with x != y (and x != y') whenever both points sit in the same cell.
//
// H1 collects the one- and two-cell terms, H2 the three-cell chain terms. Both carry one
// factor of beta. With these signs H1 + H2 = -(beta/2) Var[H_N | eta] exactly, which is the
// second cumulant term of -(1/beta) log E[exp(-beta H_N) | eta].

#include <string>
#include <vector>

#include "cgmc/coarse.hpp"

namespace cgmc {

/// Where beta sits in the cg2 weight.
///   uniform_beta:  exp(-beta (H0 + H1 + H2))
///   split_beta:    exp(-beta H0 - H1 - H2)
enum class BetaMode { uniform_beta, split_beta };

const char* to_string(BetaMode mode);
/// Throws std::invalid_argument for an unknown name.
BetaMode beta_mode_from_string(const std::string& name);

class KernelMoments {
public:
    KernelMoments() = default;
    /// Throws std::invalid_argument for q < 2.
    KernelMoments(const Kernel& kernel, const CoarsePartition& part);

    const CoarsePartition& partition() const { return part_; }
    const MomentTable& moments() const { return table_; }

    /// Coarse displacements (residues mod M, 0 first) with a nonzero fluctuation block.
    const std::vector<int>& support() const { return support_; }

    double j1(int s) const { return j1_[static_cast<std::size_t>(part_.wrap(s))]; }
    double j2(int s) const { return j2_[static_cast<std::size_t>(part_.wrap(s))]; }
    /// j2t for cells (b + d1, b, b + d2); symmetric in (d1, d2).
    double j2t(int d1, int d2) const;

    /// Fluctuation E_kl(x - y) for x = first_site(0) + i, y = first_site(s) + j.
    double fluctuation(int s, int i, int j) const;

private:
    CoarsePartition part_{2, 1};
    MomentTable table_{1};
    std::vector<int> support_;
    std::vector<int> slot_;        // residue -> index into support_, or -1
    std::vector<double> e_;        // M blocks of q*q fluctuations
    std::vector<double> j1_, j2_;  // indexed by residue
    std::vector<double> j2t_;      // support x support
};

KernelMoments kernel_moments(const Kernel& kernel, const CoarsePartition& part);

/// Throws std::domain_error for q < 4.
double h1_energy(const CoarseConfig& alpha, const KernelMoments& km, double beta, OpCounter* counter = nullptr);
double h2_energy(const CoarseConfig& alpha, const KernelMoments& km, double beta, OpCounter* counter = nullptr);

/// H0 + H1 + H2.
double corrected_energy(const CoarseConfig& alpha, const CoarseKernel& ck, const KernelMoments& km,
                        const CoarseField& field, double beta);

/// beta (H1 + H2): the correction in exponent units, so that beta Hbar ~ beta H0 + residuum.
double residuum(const CoarseConfig& alpha, const KernelMoments& km, double beta);

/// Change of H1 + H2 for alpha(k) -> alpha(k) + direction, touching only terms that involve cell k.
double correction_delta(const CoarseConfig& alpha, int k, int direction, const KernelMoments& km, double beta);

struct EpsilonDiag {
    double epsilon = 0.0;
    double delta = 0.0;
    double beta = 0.0;
    int q = 0;
    int range = 0;
    double sup_dv = 0.0;
};

/// epsilon = C beta (q / L) sup|V'|, delta = q epsilon. Throws for negative or zero inputs.
EpsilonDiag epsilon_diag(double beta, int q, int range, double sup_dv, double c = 1.0);

}  // namespace cgmc
