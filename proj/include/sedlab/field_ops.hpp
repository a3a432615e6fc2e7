#pragma once

#include <array>
#include <vector>

#include "sedlab/matrix_ops.hpp"
#include "sedlab/units.hpp"

namespace sedlab {

// Identifies one radiation mode: wavevector (|k| = omega/c), a transverse
// unit polarization, and the angular frequency.
struct ModeLabel {
    std::array<double, 3> k{0.0, 0.0, 0.0};
    std::array<double, 3> polarization{0.0, 0.0, 0.0};
    double omega = 0.0;

    bool operator==(const ModeLabel&) const = default;
};

// Validates the geometric invariants at 1e-12 and returns the label.
ModeLabel make_mode_label(const std::array<double, 3>& k,
                          const std::array<double, 3>& polarization,
                          double omega, double c);

// k along z, polarization along x.
ModeLabel default_mode_label(double omega, double c);

// Single-mode quadrature matrices q, p: tridiagonal with n <-> n+-1 couplings
// only, q_{n,n+1} real positive (phase convention), p = -i omega_{n'n} q
// entrywise. [q, p] = i hbar on the non-edge diagonal.
struct QuadraturePair {
    Eigen::Index dim = 0;
    ComplexMatrix q;
    ComplexMatrix p;
};
QuadraturePair build_quadrature_matrices(const PhysicalScale& scale, double omega,
                                         Eigen::Index n);

// Residuals of the coupling constraints omega q_{n,n+1} - i p_{n,n+1} = 0 and
// omega q_{n,n-1} + i p_{n,n-1} = 0 (zero by construction; nonzero for
// user-supplied inputs).
double quadrature_constraint_residual(const QuadraturePair& qp, double omega);

struct LadderPair {
    Eigen::Index dim = 0;
    ComplexMatrix a;
    ComplexMatrix adag;
    ModeLabel label;
    PhysicalScale scale;
};

// a = (omega q + i p)/sqrt(2 hbar omega), adag its adjoint. Rejects inputs
// whose coupling-constraint residual exceeds 1e-10.
LadderPair ladder_from_quadratures(const QuadraturePair& qp,
                                   const PhysicalScale& scale,
                                   const ModeLabel& label);
LadderPair ladder_from_quadratures(const QuadraturePair& qp,
                                   const PhysicalScale& scale, double omega);

// Convenience: quadratures + ladder in one step.
LadderPair make_ladder(const PhysicalScale& scale, const ModeLabel& label,
                       Eigen::Index n);

// Multimode check on disjoint index blocks: [a_i, adag_j] = delta_ij I on the
// non-edge diagonal and [a_i, a_j] = 0, verified blockwise on the assembled
// block-diagonal matrices.
struct MultimodeReport {
    Eigen::Index n_modes = 0;
    // worst deviation of [a_i, adag_j] from delta_ij (non-edge part)
    double max_canonical_error = 0.0;
    // worst |[a_i, a_j]| over all pairs
    double max_aa_error = 0.0;
    // worst cross-mode |[a_i, adag_j]|, i != j
    double max_cross_error = 0.0;
};
MultimodeReport multimode_commutators(const std::vector<LadderPair>& pairs);

// H_sym = (hbar omega/2)(a adag + adag a); H_absorb = hbar omega adag a;
// H_emit = hbar omega a adag. On basis state n (below the edge):
// (n + 1/2) hbar omega, n hbar omega, (n+1) hbar omega.
struct ModeHamiltonians {
    ComplexMatrix h_sym;
    ComplexMatrix h_absorb;
    ComplexMatrix h_emit;
};
ModeHamiltonians mode_hamiltonians(const LadderPair& pair);

}  // namespace sedlab
