#pragma once

// Independent oracles used by the tests. Everything here is deliberately
// written against the mathematics, not against the library implementation:
// plain loops, quadrature, recursions. Frozen expected values in the tests
// were produced by these routines.

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace oracle {

// mean of f over the uniform phase distribution on (-pi, pi], by trapezoid
template <typename F>
double phase_average(F&& f, std::size_t n = 1 << 16) {
    const double pi = 3.14159265358979323846;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double phi = -pi + 2.0 * pi * (static_cast<double>(i) + 0.5) /
                                      static_cast<double>(n);
        sum += f(phi);
    }
    return sum / static_cast<double>(n);
}

// composite Simpson on [a, b]
template <typename F>
double integrate(F&& f, double a, double b, std::size_t n = 4096) {
    if (n % 2 != 0) ++n;
    const double h = (b - a) / static_cast<double>(n);
    double sum = f(a) + f(b);
    for (std::size_t i = 1; i < n; ++i) {
        sum += f(a + h * static_cast<double>(i)) * (i % 2 == 0 ? 2.0 : 4.0);
    }
    return sum * h / 3.0;
}

// roots of m s^2 = -m omega0^2 (1 + tau s): the characteristic polynomial of
// the order-reduced damped oscillator s^2 + gamma s + omega0^2 = 0
inline std::pair<std::complex<double>, std::complex<double>>
damped_oscillator_roots(double omega0, double gamma) {
    const std::complex<double> disc =
        std::sqrt(std::complex<double>(gamma * gamma - 4.0 * omega0 * omega0, 0.0));
    return {(-gamma + disc) / 2.0, (-gamma - disc) / 2.0};
}

// Solve the nearest-neighbour sum rule recursion:
//   omega0 (c_n - c_{n-1}) = hbar / (2 m),  c_{-1} = 0,
// where c_n = |x_{n,n+1}|^2. Returns the positive couplings x_{n,n+1}.
inline std::vector<double> trk_recursion_couplings(double hbar, double mass,
                                                   double omega0, std::size_t n) {
    std::vector<double> x(n);
    double c_prev = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double c = c_prev + hbar / (2.0 * mass * omega0);
        x[k] = std::sqrt(c);
        c_prev = c;
    }
    return x;
}

// dense complex matrix product, plain loops
using CMat = std::vector<std::vector<std::complex<double>>>;

inline CMat matmul(const CMat& a, const CMat& b) {
    const std::size_t n = a.size();
    CMat c(n, std::vector<std::complex<double>>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
        }
    }
    return c;
}

inline CMat commutator(const CMat& a, const CMat& b) {
    const CMat ab = matmul(a, b);
    const CMat ba = matmul(b, a);
    CMat c = ab;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a.size(); ++j) c[i][j] = ab[i][j] - ba[i][j];
    }
    return c;
}

}  // namespace oracle
