#pragma once

#include <optional>
#include <vector>

#include "sedlab/dynamics.hpp"
#include "sedlab/force.hpp"
#include "sedlab/units.hpp"
#include "sedlab/zpf.hpp"

namespace sedlab {

// Linear-response kernel G_ik(t, s) of the force linearized at a fixed
// expansion point: m d2/dt2 G = J G with G(s, s) = 0 and dG/dt -> I/m as
// s -> t. The jacobian is diagonalized once (it is symmetric for the
// conservative forces in scope), and the kernel acts through scalar
// fundamental solutions per eigenmode, each solving
//   m u'' = lambda u,  u(0) = 0,  u'(0) = 1/m.
// ClosedFormSHO uses u = sin(Omega lag)/(m Omega), Omega = sqrt(-lambda/m);
// NumericTabulated integrates the same ODE and interpolates (Hermite cubic).
struct GreenKernel {
    enum class Representation { ClosedFormSHO, NumericTabulated };

    Representation representation = Representation::ClosedFormSHO;
    int dim = 1;
    double mass = 1.0;
    std::array<double, 9> eigvecs{};  // column-major V, J = V diag(lambda) V^T
    std::array<double, 3> eigvals{};
    // tabulation (NumericTabulated only)
    double dlag = 0.0;
    double lag_max = 0.0;
    std::vector<std::vector<double>> u_tab, du_tab;  // per eigenmode

    bool stable() const;  // all eigenvalues negative
    double mode_omega(int e) const;  // sqrt(-lambda_e / m)

    double mode_eval(int e, double lag) const;
    double mode_eval_dt(int e, double lag) const;

    double eval(int i, int k, double t, double s) const;      // G_ik(t,s)
    double eval_dt(int i, int k, double t, double s) const;   // dG_ik/dt
};

struct KernelTabulation {
    double lag_max = 0.0;  // <= 0: 20 periods of the slowest stable mode
    double dlag = 0.0;     // <= 0: ~1e-3 of a period
};

GreenKernel build_green_kernel(
    const PhysicalScale& scale, const ForceModel& force, const Vec3& expansion_point,
    GreenKernel::Representation representation = GreenKernel::Representation::ClosedFormSHO,
    const KernelTabulation& tab = {});

// Boundary-condition residuals of a constructed kernel: max |G(t,t)| over
// the diagonal and the one-sided finite-difference error of dG/dt against
// delta_ik / m.
struct KernelBoundary {
    double g_tt = 0.0;
    double dgdt_rel_err = 0.0;
};
KernelBoundary kernel_boundary_residuals(const GreenKernel& kernel, double h = 1e-3);

// --- zeroth order -----------------------------------------------------------

// Deterministic decaying solution of m x'' = f(x) + tau (df/dx) x' (no field).
// fitted_decay_time is the e-folding time of the mechanical energy, fitted by
// least squares on ln H(t); it approaches 1/(tau omega0^2) for the SHO.
struct ZerothOrderSolution {
    Trajectory trajectory;
    double fitted_decay_time = 0.0;
};

ZerothOrderSolution solve_zeroth(const PhysicalScale& scale, const ForceModel& force,
                                 const Vec3& x0, const Vec3& p0, double t_end,
                                 double dt, bool radiation_reaction = true);

// --- first order ------------------------------------------------------------

// How the response integral realizes the paper's t0 = -infinity limit. The
// kernel itself carries no radiative damping; the memory model decides how
// much of the past the integral keeps.
//   None:              x1(t) = e int_{t0}^t G(t,s) E(s) ds     (secular growth)
//   SharpWindow:       integrate over (t - T, t] only; T defaults to the
//                      mode's dissipation time 1/(tau Omega^2), which makes
//                      the stationary variance match the damped response.
//   DampedExponential: weight the integrand by exp(-gamma (t-s)/2) with
//                      gamma = tau Omega^2, i.e. exactly the memory loss the
//                      dropped damping term would impose. Default.
enum class MemoryModel { None, SharpWindow, DampedExponential };

struct ResponseOptions {
    MemoryModel memory = MemoryModel::DampedExponential;
    double sharp_window = 0.0;  // <= 0: dissipation time per mode
};

struct FirstOrderResponse {
    int dim = 1;
    std::vector<double> times;
    std::vector<double> x1;  // dim-major
    std::vector<double> p1;

    double x1_at(std::size_t i, int axis = 0) const { return x1[i * dim + axis]; }
    double p1_at(std::size_t i, int axis = 0) const { return p1[i * dim + axis]; }
};

// x1(t) = e int G(t,s) E(s) ds on a uniform grid (composite Simpson per
// step); p1 uses the momentum kernel m dG/dt rather than differentiating x1.
FirstOrderResponse first_order_response(const PhysicalScale& scale,
                                        const GreenKernel& kernel,
                                        const FieldModeSet& modes,
                                        const std::vector<double>& t_grid,
                                        const ResponseOptions& opts = {});

// --- second order -----------------------------------------------------------

// Integrates m x2'' = J(x0(t)) x2 + (1/2) f''(x0(t)) (x1)^2 along the grid.
std::vector<double> second_order_response(const PhysicalScale& scale,
                                          const ForceModel& force,
                                          const Trajectory& x0_traj,
                                          const FirstOrderResponse& x1,
                                          const std::vector<double>& t_grid);

// --- assembled hierarchy ----------------------------------------------------

struct HierarchySolution {
    ZerothOrderSolution zeroth;
    FirstOrderResponse first;
    std::optional<std::vector<double>> x2;  // absent below order 2
    int order_included = 1;
};

HierarchySolution solve_hierarchy(const PhysicalScale& scale, const ForceModel& force,
                                  const FieldModeSet& modes, const Vec3& x0,
                                  const Vec3& p0, double t_end, double dt,
                                  int max_order = 1,
                                  const ResponseOptions& opts = {});

}  // namespace sedlab
