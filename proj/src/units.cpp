#include "sedlab/units.hpp"

#include <cmath>

#include "sedlab/errors.hpp"

namespace sedlab {

double PhysicalScale::tau() const {
    return 2.0 * charge * charge / (3.0 * mass * c * c * c);
}

double PhysicalScale::epsilon() const { return tau() * omega0; }

PhysicalScale make_scale(double charge, double mass, double c, double omega0,
                         double hbar) {
    if (!(charge > 0.0) || !(mass > 0.0) || !(c > 0.0) || !(omega0 > 0.0) ||
        !(hbar > 0.0)) {
        throw NonPositiveInput("make_scale requires strictly positive inputs");
    }
    PhysicalScale s{hbar, mass, charge, c, omega0};
    if (s.epsilon() >= kMaxEpsilon) {
        throw StrongCouplingOutOfScope(
            "tau*omega0 = " + std::to_string(s.epsilon()) +
            " >= 0.1; outside the weak-coupling regime");
    }
    return s;
}

PhysicalScale natural_scale(double epsilon) {
    if (!(epsilon > 0.0)) {
        throw NonPositiveInput("natural_scale requires epsilon > 0");
    }
    // tau = 2 e^2 / 3 with m = c = 1, so e = sqrt(3 eps / 2) gives tau = eps.
    const double charge = std::sqrt(1.5 * epsilon);
    return make_scale(charge, 1.0, 1.0, 1.0, 1.0);
}

PhysicalScale electron_scale(double omega0) {
    const double e_statC = 4.80320425e-10;
    const double m_g = 9.1093837015e-28;
    const double c_cm_s = 2.99792458e10;
    const double hbar_erg_s = 1.054571817e-27;
    return make_scale(e_statC, m_g, c_cm_s, omega0, hbar_erg_s);
}

double dissipation_time(const PhysicalScale& scale) {
    return 1.0 / (scale.tau() * scale.omega0 * scale.omega0);
}

double UnitSystem::length_unit() const {
    return std::sqrt(scale_.hbar / (scale_.mass * scale_.omega0));
}

double UnitSystem::momentum_unit() const {
    return std::sqrt(scale_.hbar * scale_.mass * scale_.omega0);
}

std::string to_string(UnitSystem::Mode mode) {
    return mode == UnitSystem::Mode::Natural ? "natural" : "si";
}

}  // namespace sedlab
