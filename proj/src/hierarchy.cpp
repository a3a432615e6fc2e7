#include "sedlab/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "sedlab/errors.hpp"

namespace sedlab {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_uniform(const std::vector<double>& grid) {
    if (grid.size() < 2) throw GridMismatch("grid needs at least 2 points");
    const double h = grid[1] - grid[0];
    if (!(h > 0.0)) throw GridMismatch("grid must be increasing");
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
        if (std::abs((grid[i + 1] - grid[i]) - h) > 1e-9 * h) {
            throw GridMismatch("grid must be uniform");
        }
    }
}

}  // namespace

bool GreenKernel::stable() const {
    for (int e = 0; e < dim; ++e) {
        if (!(eigvals[e] < 0.0)) return false;
    }
    return true;
}

double GreenKernel::mode_omega(int e) const {
    if (!(eigvals[e] < 0.0)) {
        throw InconsistentInputs("mode_omega: non-oscillatory eigenmode");
    }
    return std::sqrt(-eigvals[e] / mass);
}

double GreenKernel::mode_eval(int e, double lag) const {
    if (representation == Representation::ClosedFormSHO) {
        const double om = mode_omega(e);
        return std::sin(om * lag) / (mass * om);
    }
    if (lag < 0.0 || lag > lag_max * (1.0 + 1e-12)) {
        throw GridMismatch("lag outside tabulated range");
    }
    const auto& u = u_tab[static_cast<std::size_t>(e)];
    const auto& du = du_tab[static_cast<std::size_t>(e)];
    const double pos = lag / dlag;
    auto k = static_cast<std::size_t>(pos);
    if (k + 1 >= u.size()) k = u.size() - 2;
    const double s = pos - static_cast<double>(k);
    // Hermite cubic on [k, k+1]
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    const double h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s);
    const double h11 = s * s * (s - 1);
    return h00 * u[k] + h10 * dlag * du[k] + h01 * u[k + 1] + h11 * dlag * du[k + 1];
}

double GreenKernel::mode_eval_dt(int e, double lag) const {
    if (representation == Representation::ClosedFormSHO) {
        const double om = mode_omega(e);
        return std::cos(om * lag) / mass;
    }
    if (lag < 0.0 || lag > lag_max * (1.0 + 1e-12)) {
        throw GridMismatch("lag outside tabulated range");
    }
    const auto& u = u_tab[static_cast<std::size_t>(e)];
    const auto& du = du_tab[static_cast<std::size_t>(e)];
    const double pos = lag / dlag;
    auto k = static_cast<std::size_t>(pos);
    if (k + 1 >= u.size()) k = u.size() - 2;
    const double s = pos - static_cast<double>(k);
    // Hermite on du, using the ODE for its derivative: du' = (lambda/m) u
    const double lam_m = eigvals[e] / mass;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    const double h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s);
    const double h11 = s * s * (s - 1);
    return h00 * du[k] + h10 * dlag * lam_m * u[k] + h01 * du[k + 1] +
           h11 * dlag * lam_m * u[k + 1];
}

double GreenKernel::eval(int i, int k, double t, double s) const {
    double g = 0.0;
    for (int e = 0; e < dim; ++e) {
        g += eigvecs[static_cast<std::size_t>(e * 3 + i)] *
             eigvecs[static_cast<std::size_t>(e * 3 + k)] * mode_eval(e, t - s);
    }
    return g;
}

double GreenKernel::eval_dt(int i, int k, double t, double s) const {
    double g = 0.0;
    for (int e = 0; e < dim; ++e) {
        g += eigvecs[static_cast<std::size_t>(e * 3 + i)] *
             eigvecs[static_cast<std::size_t>(e * 3 + k)] * mode_eval_dt(e, t - s);
    }
    return g;
}

GreenKernel build_green_kernel(const PhysicalScale& scale, const ForceModel& force,
                               const Vec3& expansion_point,
                               GreenKernel::Representation representation,
                               const KernelTabulation& tab) {
    const Mat3 j = force.jacobian(expansion_point);  // throws MissingJacobian
    const int dim = force.dimension();

    GreenKernel kernel;
    kernel.representation = representation;
    kernel.dim = dim;
    kernel.mass = scale.mass;

    if (dim == 1) {
        kernel.eigvals[0] = j[0][0];
        kernel.eigvecs[0] = 1.0;
    } else {
        Eigen::Matrix3d jm;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) jm(a, b) = j[a][b];
        if ((jm - jm.transpose()).norm() > 1e-9 * std::max(1.0, jm.norm())) {
            throw InconsistentInputs(
                "jacobian at expansion point is not symmetric");
        }
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(jm);
        for (int e = 0; e < 3; ++e) {
            kernel.eigvals[static_cast<std::size_t>(e)] = es.eigenvalues()(e);
            for (int a = 0; a < 3; ++a) {
                kernel.eigvecs[static_cast<std::size_t>(e * 3 + a)] =
                    es.eigenvectors()(a, e);
            }
        }
    }

    if (representation == GreenKernel::Representation::ClosedFormSHO) {
        if (!kernel.stable()) {
            throw InconsistentInputs(
                "closed-form kernel needs a negative-definite jacobian");
        }
        return kernel;
    }

    // tabulate m u'' = lambda u by RK4 on (u, u')
    double period = 0.0;
    for (int e = 0; e < dim; ++e) {
        const double lam = kernel.eigvals[static_cast<std::size_t>(e)];
        if (lam < 0.0) {
            period = std::max(period, kTwoPi / std::sqrt(-lam / scale.mass));
        }
    }
    if (period == 0.0) period = kTwoPi / scale.omega0;
    kernel.lag_max = tab.lag_max > 0.0 ? tab.lag_max : 20.0 * period;
    kernel.dlag = tab.dlag > 0.0 ? tab.dlag : period * 1e-3;
    const auto n = static_cast<std::size_t>(std::ceil(kernel.lag_max / kernel.dlag));
    kernel.lag_max = static_cast<double>(n) * kernel.dlag;

    kernel.u_tab.resize(static_cast<std::size_t>(dim));
    kernel.du_tab.resize(static_cast<std::size_t>(dim));
    for (int e = 0; e < dim; ++e) {
        auto& u = kernel.u_tab[static_cast<std::size_t>(e)];
        auto& du = kernel.du_tab[static_cast<std::size_t>(e)];
        u.resize(n + 1);
        du.resize(n + 1);
        const double lam_m = kernel.eigvals[static_cast<std::size_t>(e)] / scale.mass;
        double uu = 0.0;
        double ww = 1.0 / scale.mass;
        u[0] = uu;
        du[0] = ww;
        const double h = kernel.dlag;
        for (std::size_t i = 0; i < n; ++i) {
            const double k1u = ww, k1w = lam_m * uu;
            const double k2u = ww + 0.5 * h * k1w, k2w = lam_m * (uu + 0.5 * h * k1u);
            const double k3u = ww + 0.5 * h * k2w, k3w = lam_m * (uu + 0.5 * h * k2u);
            const double k4u = ww + h * k3w, k4w = lam_m * (uu + h * k3u);
            uu += h / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u);
            ww += h / 6.0 * (k1w + 2 * k2w + 2 * k3w + k4w);
            u[i + 1] = uu;
            du[i + 1] = ww;
        }
    }
    return kernel;
}

KernelBoundary kernel_boundary_residuals(const GreenKernel& kernel, double h) {
    KernelBoundary b;
    for (int i = 0; i < kernel.dim; ++i) {
        for (int k = 0; k < kernel.dim; ++k) {
            b.g_tt = std::max(b.g_tt, std::abs(kernel.eval(i, k, 0.0, 0.0)));
            // one-sided 4th-order difference for dG/dt at lag 0
            const double fd =
                (-25.0 * kernel.eval(i, k, 0.0, 0.0) +
                 48.0 * kernel.eval(i, k, h, 0.0) -
                 36.0 * kernel.eval(i, k, 2.0 * h, 0.0) +
                 16.0 * kernel.eval(i, k, 3.0 * h, 0.0) -
                 3.0 * kernel.eval(i, k, 4.0 * h, 0.0)) /
                (12.0 * h);
            const double expected = (i == k) ? 1.0 / kernel.mass : 0.0;
            b.dgdt_rel_err = std::max(
                b.dgdt_rel_err, std::abs(fd - expected) * kernel.mass);
        }
    }
    return b;
}

ZerothOrderSolution solve_zeroth(const PhysicalScale& scale, const ForceModel& force,
                                 const Vec3& x0, const Vec3& p0, double t_end,
                                 double dt, bool radiation_reaction) {
    BmOptions opts;
    opts.radiation_reaction = radiation_reaction;
    ZerothOrderSolution sol;
    sol.trajectory = integrate_bm(scale, force, x0, p0, t_end, dt, opts);

    // least-squares fit of ln H(t); decay time = -1/slope
    const std::vector<double> H = energy_series(sol.trajectory, force);
    const double h0 = H.front();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < H.size(); ++i) {
        if (!(H[i] > h0 * 1e-12)) continue;
        const double xg = sol.trajectory.times[i];
        const double yg = std::log(H[i]);
        sx += xg;
        sy += yg;
        sxx += xg * xg;
        sxy += xg * yg;
        ++n;
    }
    const double denom = static_cast<double>(n) * sxx - sx * sx;
    const double slope = denom != 0.0 ? (static_cast<double>(n) * sxy - sx * sy) / denom : 0.0;
    sol.fitted_decay_time = slope < -1e-300
                                ? -1.0 / slope
                                : std::numeric_limits<double>::infinity();
    return sol;
}

FirstOrderResponse first_order_response(const PhysicalScale& scale,
                                        const GreenKernel& kernel,
                                        const FieldModeSet& modes,
                                        const std::vector<double>& t_grid,
                                        const ResponseOptions& opts) {
    check_uniform(t_grid);
    if (!kernel.stable()) {
        throw InconsistentInputs(
            "first_order_response needs an oscillatory (stable) kernel");
    }
    if (kernel.dim == 3 && modes.components != 3) {
        throw InconsistentInputs("3D kernel needs a 3-component field");
    }
    const double h = t_grid[1] - t_grid[0];
    const std::size_t n = t_grid.size();
    const int dim = kernel.dim;
    const double e = scale.charge;
    const double m = kernel.mass;
    const double tau = scale.tau();

    // field on the half grid, projected onto kernel eigenmodes
    FieldPhasors phasors(modes, t_grid[0], 0.5 * h);

    FirstOrderResponse out;
    out.dim = dim;
    out.times = t_grid;
    out.x1.assign(n * static_cast<std::size_t>(dim), 0.0);
    out.p1.assign(n * static_cast<std::size_t>(dim), 0.0);

    // Project the field samples once per eigenmode; for dim 1 the projection
    // is the identity on component 0.
    std::vector<std::vector<double>> eproj(
        static_cast<std::size_t>(dim), std::vector<double>(2 * n - 1, 0.0));
    for (std::size_t half = 0; half < 2 * n - 1; ++half) {
        const auto& ef = phasors.value();
        for (int emode = 0; emode < dim; ++emode) {
            double v = 0.0;
            if (dim == 1) {
                v = ef[0];
            } else {
                for (int c = 0; c < 3; ++c) {
                    v += kernel.eigvecs[static_cast<std::size_t>(emode * 3 + c)] * ef[c];
                }
            }
            eproj[static_cast<std::size_t>(emode)][half] = v;
        }
        if (half + 1 < 2 * n - 1) phasors.step();
    }

    for (int emode = 0; emode < dim; ++emode) {
        const double om = kernel.mode_omega(emode);
        const double gamma = tau * om * om;
        double kappa = 0.0;
        std::size_t window_steps = 0;
        if (opts.memory == MemoryModel::DampedExponential) {
            kappa = 0.5 * gamma;
        } else if (opts.memory == MemoryModel::SharpWindow) {
            const double T = opts.sharp_window > 0.0 ? opts.sharp_window : 1.0 / gamma;
            window_steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(T / h)));
        }

        const std::complex<double> lam(-kappa, om);
        const std::complex<double> d_full = std::exp(lam * h);
        const std::complex<double> d_half = std::exp(lam * (0.5 * h));
        const auto& ef = eproj[static_cast<std::size_t>(emode)];

        // y_j = int_{t0}^{t_j} e^{(i om - kappa)(t_j - s)} E(s) ds
        std::vector<std::complex<double>> y(n);
        y[0] = 0.0;
        for (std::size_t jstep = 0; jstep + 1 < n; ++jstep) {
            const std::complex<double> q =
                h / 6.0 *
                (d_full * ef[2 * jstep] + 4.0 * d_half * ef[2 * jstep + 1] +
                 ef[2 * jstep + 2]);
            y[jstep + 1] = d_full * y[jstep] + q;
        }

        if (opts.memory == MemoryModel::SharpWindow) {
            // subtract the pre-window part: y_win(t) = y(t) - e^{lam T} y(t-T)
            const std::complex<double> shift =
                std::exp(lam * (static_cast<double>(window_steps) * h));
            for (std::size_t jstep = n; jstep-- > 0;) {
                const std::complex<double> tail =
                    jstep >= window_steps ? y[jstep - window_steps]
                                          : std::complex<double>(0.0);
                y[jstep] -= shift * tail;
            }
        }

        for (std::size_t jstep = 0; jstep < n; ++jstep) {
            const double x1m = e / (m * om) * y[jstep].imag();
            const double p1m = e * y[jstep].real();
            if (dim == 1) {
                out.x1[jstep] += x1m;
                out.p1[jstep] += p1m;
            } else {
                for (int a = 0; a < 3; ++a) {
                    const double v = kernel.eigvecs[static_cast<std::size_t>(emode * 3 + a)];
                    out.x1[jstep * 3 + static_cast<std::size_t>(a)] += v * x1m;
                    out.p1[jstep * 3 + static_cast<std::size_t>(a)] += v * p1m;
                }
            }
        }
    }
    return out;
}

std::vector<double> second_order_response(const PhysicalScale& scale,
                                          const ForceModel& force,
                                          const Trajectory& x0_traj,
                                          const FirstOrderResponse& x1,
                                          const std::vector<double>& t_grid) {
    check_uniform(t_grid);
    if (!force.has_hessian()) {
        throw MissingSecondDerivative(force.description() +
                                      " has no second derivative");
    }
    const std::size_t n = t_grid.size();
    if (x0_traj.size() != n || x1.times.size() != n ||
        std::abs(x0_traj.times.front() - t_grid.front()) > 1e-9 ||
        std::abs(x0_traj.times.back() - t_grid.back()) > 1e-9) {
        throw GridMismatch("x0/x1 series must share the response grid");
    }
    const int dim = force.dimension();
    const double h = t_grid[1] - t_grid[0];
    const double m = scale.mass;

    // 4-point midpoint interpolation, clamped at the ends
    auto midpoint = [n](auto&& value, std::size_t j) {
        const std::size_t jm = j > 0 ? j - 1 : 0;
        const std::size_t jp2 = std::min(j + 2, n - 1);
        return (-value(jm) + 9.0 * value(j) + 9.0 * value(j + 1) - value(jp2)) / 16.0;
    };

    auto source = [&](const Vec3& x0v, const Vec3& x1v) {
        return force.hessian_contract(x0v, x1v);
    };

    std::vector<double> x2(n * static_cast<std::size_t>(dim), 0.0);
    Vec3 y{0.0, 0.0, 0.0};
    Vec3 w{0.0, 0.0, 0.0};

    auto x0_at = [&](std::size_t j) {
        Vec3 v{0, 0, 0};
        for (int a = 0; a < dim; ++a) v[a] = x0_traj.x_at(j, a);
        return v;
    };
    auto x1_at = [&](std::size_t j) {
        Vec3 v{0, 0, 0};
        for (int a = 0; a < dim; ++a) v[a] = x1.x1_at(j, a);
        return v;
    };

    auto deriv = [&](const Vec3& yv, const Vec3& wv, const Vec3& x0v, const Vec3& x1v,
                     Vec3& dy, Vec3& dw) {
        const Mat3 j = force.jacobian(x0v);
        const Vec3 s = source(x0v, x1v);
        for (int a = 0; a < dim; ++a) {
            dy[a] = wv[a];
            double jy = 0.0;
            for (int b = 0; b < dim; ++b) jy += j[a][b] * yv[b];
            dw[a] = (jy + s[a]) / m;
        }
    };

    for (std::size_t j = 0; j + 1 < n; ++j) {
        const Vec3 x0a = x0_at(j);
        const Vec3 x1a = x1_at(j);
        Vec3 x0m{0, 0, 0}, x1m{0, 0, 0};
        for (int a = 0; a < dim; ++a) {
            x0m[a] = midpoint([&](std::size_t k) { return x0_traj.x_at(k, a); }, j);
            x1m[a] = midpoint([&](std::size_t k) { return x1.x1_at(k, a); }, j);
        }
        const Vec3 x0b = x0_at(j + 1);
        const Vec3 x1b = x1_at(j + 1);

        Vec3 k1y, k1w, k2y, k2w, k3y, k3w, k4y, k4w, ty, tw;
        deriv(y, w, x0a, x1a, k1y, k1w);
        for (int a = 0; a < dim; ++a) {
            ty[a] = y[a] + 0.5 * h * k1y[a];
            tw[a] = w[a] + 0.5 * h * k1w[a];
        }
        deriv(ty, tw, x0m, x1m, k2y, k2w);
        for (int a = 0; a < dim; ++a) {
            ty[a] = y[a] + 0.5 * h * k2y[a];
            tw[a] = w[a] + 0.5 * h * k2w[a];
        }
        deriv(ty, tw, x0m, x1m, k3y, k3w);
        for (int a = 0; a < dim; ++a) {
            ty[a] = y[a] + h * k3y[a];
            tw[a] = w[a] + h * k3w[a];
        }
        deriv(ty, tw, x0b, x1b, k4y, k4w);
        for (int a = 0; a < dim; ++a) {
            y[a] += h / 6.0 * (k1y[a] + 2 * k2y[a] + 2 * k3y[a] + k4y[a]);
            w[a] += h / 6.0 * (k1w[a] + 2 * k2w[a] + 2 * k3w[a] + k4w[a]);
        }
        for (int a = 0; a < dim; ++a) {
            x2[(j + 1) * static_cast<std::size_t>(dim) + static_cast<std::size_t>(a)] = y[a];
        }
    }
    return x2;
}

HierarchySolution solve_hierarchy(const PhysicalScale& scale, const ForceModel& force,
                                  const FieldModeSet& modes, const Vec3& x0,
                                  const Vec3& p0, double t_end, double dt,
                                  int max_order, const ResponseOptions& opts) {
    HierarchySolution sol;
    sol.zeroth = solve_zeroth(scale, force, x0, p0, t_end, dt);
    const GreenKernel kernel = build_green_kernel(scale, force, Vec3{0.0, 0.0, 0.0});
    sol.first = first_order_response(scale, kernel, modes,
                                     sol.zeroth.trajectory.times, opts);
    sol.order_included = 1;
    if (max_order >= 2) {
        sol.x2 = second_order_response(scale, force, sol.zeroth.trajectory,
                                       sol.first, sol.zeroth.trajectory.times);
        sol.order_included = 2;
    }
    return sol;
}

}  // namespace sedlab
