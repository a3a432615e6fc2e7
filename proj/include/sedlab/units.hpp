#pragma once

#include <string>

namespace sedlab {

// Physical-constant bundle shared by every module.
//
// Conventions: Gaussian-cgs electromagnetic units, so the radiation-reaction
// time is tau = 2 e^2 / (3 m c^3) with no epsilon_0 factor. tau is always
// recomputed from (charge, mass, c), never stored independently.
//
// The dimensionless damping epsilon = tau * omega0 must stay well below 1;
// the weak-coupling expansions behind the whole model assume it. We reject
// epsilon >= 0.1 at construction.
struct PhysicalScale {
    double hbar;    // action
    double mass;    // particle mass
    double charge;  // particle charge (Gaussian convention)
    double c;       // speed of light
    double omega0;  // characteristic system frequency

    double tau() const;      // 2 e^2 / (3 m c^3)
    double epsilon() const;  // tau * omega0
};

inline constexpr double kMaxEpsilon = 0.1;

// Builds a validated scale; tau/epsilon derive from the invariant formula.
PhysicalScale make_scale(double charge, double mass, double c, double omega0,
                         double hbar = 1.0);

// Natural units hbar = m = c = omega0 = 1 with the charge chosen so that
// tau * omega0 equals the requested damping epsilon.
PhysicalScale natural_scale(double epsilon);

// Gaussian-cgs electron constants (statC, g, cm/s), hbar in erg*s.
PhysicalScale electron_scale(double omega0);

// Energy decay time of the zeroth-order motion, 1/(tau * omega0^2): the
// e-folding time of the mechanical energy of the order-reduced damped
// oscillator, which is also the timescale on which initial conditions are
// forgotten.
double dissipation_time(const PhysicalScale& scale);

// Conversion between natural units (hbar = m = omega0 = 1) and the physical
// units the scale was specified in. Quantities convert by their dimension in
// (time, length, energy, ...) built from the base factors below.
class UnitSystem {
  public:
    enum class Mode { Natural, SI };

    explicit UnitSystem(const PhysicalScale& scale) : scale_(scale) {}

    // one natural unit expressed in physical units
    double time_unit() const { return 1.0 / scale_.omega0; }
    double frequency_unit() const { return scale_.omega0; }
    double energy_unit() const { return scale_.hbar * scale_.omega0; }
    double length_unit() const;    // sqrt(hbar / (m omega0))
    double momentum_unit() const;  // sqrt(hbar m omega0)

    double to_natural_time(double t_physical) const { return t_physical / time_unit(); }
    double to_physical_time(double t_natural) const { return t_natural * time_unit(); }
    double to_natural_energy(double e) const { return e / energy_unit(); }
    double to_physical_energy(double e) const { return e * energy_unit(); }
    double to_natural_length(double x) const { return x / length_unit(); }
    double to_physical_length(double x) const { return x * length_unit(); }

  private:
    PhysicalScale scale_;
};

std::string to_string(UnitSystem::Mode mode);

}  // namespace sedlab
