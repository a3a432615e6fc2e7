#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sedlab/units.hpp"

namespace sedlab {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

// External force acting on the particle. Dimension is 1 or 3; 1D forces use
// component 0 only. Polynomial coefficients are those of the force itself,
// f(x) = sum_k c_k x^k, not of the potential.
class ForceModel {
  public:
    enum class Kind { Harmonic, Polynomial1D, Custom };

    using ForceFn = std::function<Vec3(const Vec3&)>;
    using JacobianFn = std::function<Mat3(const Vec3&)>;
    using PotentialFn = std::function<double(const Vec3&)>;
    // returns (1/2) d2f_i/dx_j dx_k  y_j y_k
    using HessianContractFn = std::function<Vec3(const Vec3&, const Vec3&)>;

    // isotropic harmonic restoring force f = -m omega0^2 x
    static ForceModel harmonic(const PhysicalScale& scale, int dimension = 1);
    static ForceModel polynomial1d(std::vector<double> force_coefficients);
    static ForceModel custom(int dimension, ForceFn force, JacobianFn jacobian,
                             PotentialFn potential = nullptr,
                             HessianContractFn hessian = nullptr);

    Kind kind() const { return kind_; }
    int dimension() const { return dim_; }
    const std::string& description() const { return description_; }

    Vec3 force(const Vec3& x) const;
    Mat3 jacobian(const Vec3& x) const;

    bool has_potential() const;
    double potential(const Vec3& x) const;

    bool has_hessian() const;
    Vec3 hessian_contract(const Vec3& x, const Vec3& y) const;

  private:
    ForceModel() = default;

    Kind kind_ = Kind::Harmonic;
    int dim_ = 1;
    std::string description_;
    double stiffness_ = 0.0;             // harmonic: m omega0^2
    std::vector<double> coeffs_;         // polynomial force coefficients
    ForceFn force_fn_;
    JacobianFn jacobian_fn_;
    PotentialFn potential_fn_;
    HessianContractFn hessian_fn_;
};

// Finite-difference check of the supplied jacobian at seeded random points.
// Returns the worst relative mismatch; the type invariant wants < 1e-6.
double jacobian_consistency(const ForceModel& force, std::uint64_t seed = 42,
                            int n_points = 16, double span = 1.0);

}  // namespace sedlab
