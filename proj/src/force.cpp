#include "sedlab/force.hpp"

#include <cmath>

#include "sedlab/errors.hpp"
#include "sedlab/rng.hpp"

namespace sedlab {

ForceModel ForceModel::harmonic(const PhysicalScale& scale, int dimension) {
    if (dimension != 1 && dimension != 3) {
        throw InconsistentInputs("force dimension must be 1 or 3");
    }
    ForceModel f;
    f.kind_ = Kind::Harmonic;
    f.dim_ = dimension;
    f.stiffness_ = scale.mass * scale.omega0 * scale.omega0;
    f.description_ = "harmonic(omega0=" + std::to_string(scale.omega0) + ")";
    return f;
}

ForceModel ForceModel::polynomial1d(std::vector<double> coeffs) {
    ForceModel f;
    f.kind_ = Kind::Polynomial1D;
    f.dim_ = 1;
    f.coeffs_ = std::move(coeffs);
    f.description_ = "polynomial1d(" + std::to_string(f.coeffs_.size()) + " coeffs)";
    return f;
}

ForceModel ForceModel::custom(int dimension, ForceFn force, JacobianFn jacobian,
                              PotentialFn potential, HessianContractFn hessian) {
    if (dimension != 1 && dimension != 3) {
        throw InconsistentInputs("force dimension must be 1 or 3");
    }
    if (!force) throw InconsistentInputs("custom force requires a force callable");
    ForceModel f;
    f.kind_ = Kind::Custom;
    f.dim_ = dimension;
    f.force_fn_ = std::move(force);
    f.jacobian_fn_ = std::move(jacobian);
    f.potential_fn_ = std::move(potential);
    f.hessian_fn_ = std::move(hessian);
    f.description_ = "custom";
    return f;
}

Vec3 ForceModel::force(const Vec3& x) const {
    switch (kind_) {
        case Kind::Harmonic: {
            Vec3 out{0.0, 0.0, 0.0};
            for (int i = 0; i < dim_; ++i) out[i] = -stiffness_ * x[i];
            return out;
        }
        case Kind::Polynomial1D: {
            double v = 0.0;
            double xn = 1.0;
            for (double c : coeffs_) {
                v += c * xn;
                xn *= x[0];
            }
            return {v, 0.0, 0.0};
        }
        case Kind::Custom:
            return force_fn_(x);
    }
    return {0.0, 0.0, 0.0};
}

Mat3 ForceModel::jacobian(const Vec3& x) const {
    Mat3 j{};
    switch (kind_) {
        case Kind::Harmonic:
            for (int i = 0; i < dim_; ++i) j[i][i] = -stiffness_;
            return j;
        case Kind::Polynomial1D: {
            double v = 0.0;
            double xn = 1.0;
            for (std::size_t k = 1; k < coeffs_.size(); ++k) {
                v += static_cast<double>(k) * coeffs_[k] * xn;
                xn *= x[0];
            }
            j[0][0] = v;
            return j;
        }
        case Kind::Custom:
            if (!jacobian_fn_) {
                throw MissingJacobian("custom force has no jacobian");
            }
            return jacobian_fn_(x);
    }
    return j;
}

bool ForceModel::has_potential() const {
    return kind_ != Kind::Custom || static_cast<bool>(potential_fn_);
}

double ForceModel::potential(const Vec3& x) const {
    switch (kind_) {
        case Kind::Harmonic: {
            double v = 0.0;
            for (int i = 0; i < dim_; ++i) v += x[i] * x[i];
            return 0.5 * stiffness_ * v;
        }
        case Kind::Polynomial1D: {
            // V = -integral f dx
            double v = 0.0;
            double xn = x[0];
            for (std::size_t k = 0; k < coeffs_.size(); ++k) {
                v -= coeffs_[k] * xn / static_cast<double>(k + 1);
                xn *= x[0];
            }
            return v;
        }
        case Kind::Custom:
            if (!potential_fn_) {
                throw NonConservativeForce(
                    "custom force supplies no potential");
            }
            return potential_fn_(x);
    }
    return 0.0;
}

bool ForceModel::has_hessian() const {
    return kind_ != Kind::Custom || static_cast<bool>(hessian_fn_);
}

Vec3 ForceModel::hessian_contract(const Vec3& x, const Vec3& y) const {
    switch (kind_) {
        case Kind::Harmonic:
            return {0.0, 0.0, 0.0};
        case Kind::Polynomial1D: {
            double v = 0.0;
            double xn = 1.0;
            for (std::size_t k = 2; k < coeffs_.size(); ++k) {
                v += static_cast<double>(k * (k - 1)) * coeffs_[k] * xn;
                xn *= x[0];
            }
            return {0.5 * v * y[0] * y[0], 0.0, 0.0};
        }
        case Kind::Custom:
            if (!hessian_fn_) {
                throw MissingSecondDerivative(
                    "custom force supplies no second derivative");
            }
            return hessian_fn_(x, y);
    }
    return {0.0, 0.0, 0.0};
}

double jacobian_consistency(const ForceModel& force, std::uint64_t seed,
                            int n_points, double span) {
    double worst = 0.0;
    const int dim = force.dimension();
    for (int p = 0; p < n_points; ++p) {
        Vec3 x{0.0, 0.0, 0.0};
        for (int i = 0; i < dim; ++i) {
            x[i] = span * (2.0 * uniform01(derive(seed, StreamTag::Ensemble,
                                                  static_cast<std::uint64_t>(p),
                                                  static_cast<std::uint64_t>(i))) -
                           1.0);
        }
        const Mat3 j = force.jacobian(x);
        double scale_ref = 0.0;
        for (int a = 0; a < dim; ++a)
            for (int b = 0; b < dim; ++b) scale_ref = std::max(scale_ref, std::abs(j[a][b]));
        if (scale_ref == 0.0) scale_ref = 1.0;
        const double h = 1e-6 * span;
        for (int b = 0; b < dim; ++b) {
            Vec3 xp = x, xm = x;
            xp[b] += h;
            xm[b] -= h;
            const Vec3 fp = force.force(xp);
            const Vec3 fm = force.force(xm);
            for (int a = 0; a < dim; ++a) {
                const double fd = (fp[a] - fm[a]) / (2.0 * h);
                worst = std::max(worst, std::abs(fd - j[a][b]) / scale_ref);
            }
        }
    }
    return worst;
}

}  // namespace sedlab
