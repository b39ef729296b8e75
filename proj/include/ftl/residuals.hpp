#pragma once

#include <vector>

#include "ftl/reconstruction.hpp"
#include "ftl/riemann.hpp"
#include "ftl/velocity.hpp"

namespace ftl {

// Separable C^2 test function (1 - s^2)^3 in both variables, supported on
// [center_x - width_x, center_x + width_x] x [center_t - width_t, center_t + width_t]
// (the time support is used clipped to [0, T); a support reaching below zero
// activates the initial term).
struct Bump {
  double center_x = 0.0;
  double width_x = 1.0;
  double center_t = 0.0;
  double width_t = 1.0;
  int id = 0;
};

double bump_space(const Bump& bump, double x);
double bump_space_deriv(const Bump& bump, double x);
double bump_time(const Bump& bump, double t);
double bump_time_deriv(const Bump& bump, double t);

// Fixed catalog of 9 bumps covering the space-time box [x_lo, x_hi] x [0, T):
// three spatial placements crossed with early/middle/late time supports, the
// early family active at t = 0.
std::vector<Bump> bump_catalog(double x_lo, double x_hi, double horizon);

// Weak-form residual of the reconstruction:
//   integral of rho d_t(phi) + f(rho) d_x(phi) over space-time
//   plus integral of rho(., 0) phi(., 0).
// Piecewise-constant density against a polynomial bump integrates exactly
// (order-5 Gauss per cell and slab, split at the support edges).
double weak_residual(const DiscreteDensity& density, const VelocityModel& model,
                     const Bump& bump);

// Kruzhkov residual for a constant k in [0, R]:
//   integral of |rho - k| d_t(phi) + sgn(rho - k)(f(rho) - f(k)) d_x(phi)
//   plus integral of |rho(., 0) - k| phi(., 0).
// Vacuum outside the particle span contributes the k and f(k) tail terms.
// Nonnegative for entropy solutions; the discrete residual rises toward zero
// under refinement.
double entropy_residual(const DiscreteDensity& density,
                        const VelocityModel& model, double k, const Bump& bump);

// Residuals of the exact self-similar solution of two-state Riemann data
// (density_left for x < jump_location). Quadrature panels are split along
// every wave line and at k-crossings, so the values are accurate to roughly
// 1e-10 for affine laws.
double riemann_weak_residual(const RiemannFan& fan, const VelocityModel& model,
                             double jump_location, double horizon,
                             const Bump& bump);
double riemann_entropy_residual(const RiemannFan& fan,
                                const VelocityModel& model,
                                double jump_location, double horizon, double k,
                                const Bump& bump);

}  // namespace ftl
