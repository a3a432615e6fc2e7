#pragma once

#include <string>
#include <vector>

#include "sedlab/dynamics.hpp"
#include "sedlab/matrix_ops.hpp"
#include "sedlab/units.hpp"

namespace sedlab {

// Closed-form energy flows for a system in state n, built from response
// matrices. The zero-point spectrum's delta functions are resolved
// symbolically onto the discrete transition frequencies; nothing here is a
// numerical delta approximation.
//
// absorbed: (2 e^2 / 3 c^3) sum_k |x_nk|^2 omega_kn^4 sgn(omega_kn)
// radiated: -(2 e^2 / 3 c^3) sum_k |x_nk|^2 omega_kn^4           (always <= 0)
// net:      -(4 e^2 / 3 c^3) sum over downward k of |x_nk|^2 omega_kn^4
// The three are related by the algebraic identity absorbed + radiated = net.

struct TransitionContribution {
    Eigen::Index k = 0;
    double omega_emit = 0.0;   // positive emission frequency omega_nk
    double einstein_a = 0.0;   // A_nk
    double power = 0.0;        // hbar omega_nk * A_nk
};

struct BalanceReport {
    Eigen::Index state_n = 0;
    double absorbed_power = 0.0;
    double radiated_power = 0.0;
    double net_rate = 0.0;
    std::vector<TransitionContribution> per_transition;
};

double absorbed_power(const ResponseMatrices& mats, Eigen::Index n);
double radiated_power(const ResponseMatrices& mats, Eigen::Index n);
BalanceReport net_rate(const ResponseMatrices& mats, Eigen::Index n);

// Spontaneous-emission coefficient for the downward transition n -> k:
// A_nk = (4 e^2 / 3 hbar c^3) |x_nk|^2 |omega_kn|^3.
double einstein_a(const ResponseMatrices& mats, Eigen::Index n, Eigen::Index k);

std::string to_json(const BalanceReport& report);
std::string to_table(const BalanceReport& report);

// Ensemble cross-validation of the ground-state balance: estimates the
// absorbed power e<E.v> and the order-reduced radiated power tau <(J v).v>
// over the stationary window and compares both with the closed forms.
struct BalanceComparison {
    double closed_absorbed = 0.0;
    double closed_radiated = 0.0;
    Estimate absorbed;
    Estimate radiated;
    Estimate net;
    Estimate mean_H;
    double expected_mean_H = 0.0;  // hbar omega0 / 2
    std::size_t n_traj = 0;
};

BalanceComparison simulate_balance(const EnsembleSpec& spec);

// Same comparison from already-computed ensemble statistics.
BalanceComparison compare_balance(const EnsembleSpec& spec,
                                  const EnsembleStats& stats);

}  // namespace sedlab
