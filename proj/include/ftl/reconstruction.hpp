#pragma once

#include <vector>

#include "ftl/scheme.hpp"
#include "ftl/step_density.hpp"
#include "ftl/velocity.hpp"

namespace ftl {

// Piecewise-constant density reconstruction from a trajectory: one step
// density per time level, constant in time on [t^m, t^{m+1}) and extended to
// t = T by continuity.
class DiscreteDensity {
 public:
  explicit DiscreteDensity(const Trajectory& trajectory);

  int level_count() const { return static_cast<int>(slices_.size()); }
  double time_step() const { return time_step_; }
  double horizon() const { return horizon_; }
  double interval_mass() const { return interval_mass_; }
  double total_mass() const { return total_mass_; }
  double initial_tv() const { return initial_tv_; }

  const StepDensity& slice(int level) const { return slices_[level]; }
  int level_of_time(double t) const;  // throws outside [0, T]
  double density_at(double x, double t) const;
  double slice_tv(int level) const { return slices_[level].total_variation(); }
  double slice_mass(int level) const { return slices_[level].total_mass(); }

 private:
  std::vector<StepDensity> slices_;
  double time_step_ = 0.0;
  double horizon_ = 0.0;
  double interval_mass_ = 0.0;
  double total_mass_ = 0.0;
  double initial_tv_ = 0.0;
};

// Piecewise-linear pseudo-inverse of the cumulative distribution: on the mass
// segment (cum_k, cum_{k+1}) the slope is 1 / value_k; continuous and
// nondecreasing. Transport coordinates for the scaled 1-Wasserstein distance.
struct PseudoInverse {
  std::vector<double> mass_breaks;      // 0 = z_0 < ... < z_S = total mass
  std::vector<double> position_breaks;  // x at each mass break

  double total_mass() const { return mass_breaks.back(); }
  double operator()(double z) const;
};

// Rejects densities with interior vacuum cells (their pseudo-inverse jumps);
// particle slices never have them.
PseudoInverse pseudo_inverse(const StepDensity& density);

// Exact integral of |a - b| via a merged-breakpoint sweep.
double l1_distance(const StepDensity& a, const StepDensity& b);

// Scaled 1-Wasserstein distance: integral of |X_a - X_b| over the mass
// coordinate (0, L), closed form per merged linear segment. Masses must agree
// to 1e-12 relative.
double wasserstein_d1(const StepDensity& a, const StepDensity& b);

struct InterpolationBoundCheck {
  double lhs = 0.0;  // L1 distance
  double rhs = 0.0;  // 2 (TV(a) + TV(b))^(1/2) d1(a, b)^(1/2)
  bool pass = false;
};
InterpolationBoundCheck interpolation_bound_check(const StepDensity& a,
                                                  const StepDensity& b);

struct TimeContinuityCheck {
  double d1_value = 0.0;
  double d1_bound = 0.0;  // 4 L V (t2 - t1 + tau)
  double l1_value = 0.0;
  double l1_bound = 0.0;  // 4 (2 TV(initial) L V)^(1/2) (t2 - t1 + tau)^(1/2)
  bool pass = false;
};
TimeContinuityCheck time_continuity_check(const DiscreteDensity& density,
                                          double t1, double t2,
                                          const VelocityModel& model);

// Linear-in-time interpolated particle positions; diagnostics only, density
// queries always use the piecewise-constant convention.
std::vector<double> interpolated_positions(const Trajectory& trajectory,
                                           double t);

}  // namespace ftl
