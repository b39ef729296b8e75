#pragma once

#include <vector>

#include "ftl/scheme.hpp"
#include "ftl/step_density.hpp"
#include "ftl/velocity.hpp"

namespace ftl {

// One wave of a self-similar Riemann fan. Shocks carry a single speed;
// rarefactions carry a speed interval plus a monotone (speed -> density)
// profile table (or the closed affine form rho = (a - xi) / (2 b)).
struct RiemannWave {
  bool shock = false;
  double speed_lo = 0.0;
  double speed_hi = 0.0;
  double density_before = 0.0;  // value for xi < speed_lo
  double density_after = 0.0;   // value for xi > speed_hi
  bool affine_profile = false;
  double affine_a = 0.0;
  double affine_b = 0.0;
  std::vector<double> profile_speeds;     // sampled rarefaction, increasing
  std::vector<double> profile_densities;  // matching densities
};

// Entropy solution of the Riemann problem as a wave fan; the solution value
// depends on (x, t) only through xi = x / t.
struct RiemannFan {
  double density_left = 0.0;
  double density_right = 0.0;
  std::vector<RiemannWave> waves;  // speeds nondecreasing

  double value_at(double xi) const;
  double min_speed() const;
  double max_speed() const;
};

// Envelope construction: convex hull of the flux between the states when
// density_left <= density_right, concave hull otherwise. Chords that skip
// sample nodes become shocks with the chord (Rankine-Hugoniot) speed; runs
// that follow the graph become rarefactions with speed f'. Closed form for
// affine velocity laws, 4097 flux samples otherwise.
RiemannFan solve_riemann_fan(const VelocityModel& model, double density_left,
                             double density_right);

// Entropy solution value at xi = x / t.
double solve_riemann(const VelocityModel& model, double density_left,
                     double density_right, double xi);

struct ComparisonWindow {
  double lo = 0.0;
  double hi = 0.0;
};

// Spatial window on which the solution of the compactly supported two-block
// data still coincides with the fan of the middle jump: the waves emanating
// from the outer edges of the support have not yet intruded.
ComparisonWindow riemann_validity_window(const VelocityModel& model,
                                         double support_lo, double support_hi,
                                         double density_left,
                                         double density_right,
                                         double jump_location, double t);

// Exact-in-space L1 distance between a reconstructed slice and the fan
// profile at time t over the window. Affine rarefactions integrate in closed
// form; other laws discretize the profile on `profile_cells` cells.
double l1_error_vs_riemann(const StepDensity& slice, const VelocityModel& model,
                           const RiemannFan& fan, double jump_location,
                           double t, const ComparisonWindow& window,
                           int profile_cells = 100000);

// Convenience wrapper: window and fan from the trajectory's initial support.
double l1_error_vs_riemann(const Trajectory& trajectory,
                           const VelocityModel& model, double density_left,
                           double density_right, double jump_location,
                           double t);

}  // namespace ftl
