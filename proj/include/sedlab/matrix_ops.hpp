#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sedlab/units.hpp"

namespace sedlab {

using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;

// Truncated response-coefficient matrices. Entry (n, k) of `x` is the
// coefficient x_nk with which state n responds to the field mode connecting
// it to state k; omega(n, k) stores the transition frequency
// omega_kn = (E_k - E_n)/hbar, and p(n, k) = -i m omega_kn x(n, k).
//
// The matrices are the top-left N x N block of the infinite ladder; the last
// row/column is physically deficient ("edge") and identities are asserted
// only for indices <= N-2.
struct ResponseMatrices {
    Eigen::Index dim = 0;
    ComplexMatrix x;
    ComplexMatrix p;
    RealMatrix omega;
    PhysicalScale scale;

    Eigen::Index edge_index() const { return dim - 1; }
};

// Throws InvariantViolation when Hermiticity, antisymmetry of omega, or the
// p = -i m omega x relation fail beyond tol.
void validate(const ResponseMatrices& mats, double tol = 1e-12);

// Nearest-neighbour SHO matrices:
//   x_nk = sqrt(hbar/(2 m omega0)) (sqrt(n) delta_{k,n-1} + sqrt(n+1) delta_{k,n+1})
// with omega_{n+-1, n} = +-omega0. The coupling pattern is derived, not
// assumed: see tests for the recursion solve of the sum rule that fixes it.
ResponseMatrices sho_response_matrices(const PhysicalScale& scale, double omega0,
                                       Eigen::Index n);

// Thomas-Reiche-Kuhn sum: sum_k omega_kn |x_nk|^2. For SHO matrices this is
// hbar/(2m) exactly below the edge; at the edge it is deficient and flagged.
struct TrkResult {
    double value = 0.0;
    bool edge_deficient = false;
};
TrkResult trk_sum(const ResponseMatrices& mats, Eigen::Index n);

struct CommutatorReport {
    ComplexMatrix matrix;                 // [x, p]
    std::vector<double> diagonal_errors;  // |[x,p]_nn - i hbar|
    bool edge_flag = false;               // last row truncation-corrupted
    double max_offdiagonal = 0.0;
};
CommutatorReport commutator(const ResponseMatrices& mats);

std::string to_json(const ResponseMatrices& mats);
ResponseMatrices response_matrices_from_json(const std::string& text,
                                             const PhysicalScale& scale);
std::string to_json(const CommutatorReport& report);

// --- bilinear form over normal variables ------------------------------------

// A function linear in the normal variables {a_alpha, a*_alpha} of a shared
// mode basis: f = sum_alpha (a_coeff[alpha] a_alpha + astar_coeff[alpha] a*_alpha).
struct LinearForm {
    std::vector<std::string> modes;  // shared basis labels, order significant
    std::vector<std::complex<double>> a_coeff;
    std::vector<std::complex<double>> astar_coeff;
};

// [f, g] = sum_alpha (df/da dg/da* - dg/da df/da*), the transformed Poisson
// bracket for linear forms: a plain coefficient contraction.
std::complex<double> bilinear_form(const LinearForm& f, const LinearForm& g);

// x_n(t) and p_n(t) as linear forms over the modes a_{nk}, built from a
// response-matrix row: coefficient of a_nk is x_nk e^{-i omega_kn t}.
LinearForm position_form(const ResponseMatrices& mats, Eigen::Index n, double t);
LinearForm momentum_form(const ResponseMatrices& mats, Eigen::Index n, double t);

}  // namespace sedlab
