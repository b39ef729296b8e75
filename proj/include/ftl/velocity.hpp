#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ftl {

// v(rho) = a - b * rho. Kept as a tag on the model so downstream code can use
// closed-form flux envelopes instead of sampled ones.
struct AffineLaw {
  double a = 0.0;
  double b = 0.0;
};

// Strictly decreasing velocity law on [0, max_density]. Construction samples
// the derivative at 10001 uniform points (endpoints included) and rejects the
// law if any sample is nonnegative. `velocity_extended` is the flat extension
// v(rho) = v(0) for rho < 0 and v(rho) = v(max_density) above, which keeps
// root-finder iterates outside the physical density range harmless.
//
// Immutable after construction; safe to share across concurrent runs.
class VelocityModel {
 public:
  VelocityModel(double max_density, std::function<double(double)> velocity,
                std::function<double(double)> velocity_deriv, double lipschitz,
                std::optional<AffineLaw> affine = std::nullopt,
                std::vector<double> flux_extrema_hints = {});

  double max_density() const { return max_density_; }
  // Any valid upper bound for the Lipschitz constant of v on [0, R]; exact
  // for the closed-form families.
  double lipschitz() const { return lipschitz_; }
  // max(|v(0)|, |v(R)|); equals the sup norm since v is monotone.
  double max_abs_velocity() const { return max_abs_velocity_; }
  double max_abs_flux_deriv() const { return max_abs_flux_deriv_; }

  double velocity(double rho) const { return velocity_(rho); }
  double velocity_deriv(double rho) const { return velocity_deriv_(rho); }
  double velocity_extended(double rho) const {
    if (rho < 0.0) return velocity_at_zero_;
    if (rho > max_density_) return velocity_at_max_;
    return velocity_(rho);
  }

  // f(rho) = rho * v(rho); throws std::domain_error outside [0, R].
  double flux(double rho) const;
  // rho * v_ext(rho): tolerant of densities a rounding error outside [0, R].
  double flux_extended(double rho) const {
    return rho * velocity_extended(rho);
  }
  double flux_deriv(double rho) const {
    return velocity_(rho) + rho * velocity_deriv_(rho);
  }

  const std::optional<AffineLaw>& affine() const { return affine_; }
  // Interior points of [0, R] where f may attain an extremum (smooth critical
  // points plus interpolation nodes of tabulated laws).
  std::span<const double> flux_extrema_candidates() const {
    return flux_extrema_;
  }

 private:
  double max_density_;
  std::function<double(double)> velocity_;
  std::function<double(double)> velocity_deriv_;
  double lipschitz_;
  double velocity_at_zero_ = 0.0;
  double velocity_at_max_ = 0.0;
  double max_abs_velocity_ = 0.0;
  double max_abs_flux_deriv_ = 0.0;
  std::optional<AffineLaw> affine_;
  std::vector<double> flux_extrema_;
};

// v = a - b rho; requires b > 0 (otherwise the monotonicity gate rejects).
VelocityModel make_affine_model(double a, double b, double max_density);

// v = vmax (1 - (rho/R)^p). Only p = 1 has a strictly negative derivative on
// all of [0, R]; p > 1 is rejected at construction because v'(0) = 0.
VelocityModel make_greenshields_model(double vmax, double max_density,
                                      double exponent = 1.0);

// Piecewise-linear interpolation of strictly decreasing samples; nodes must
// start at 0 and end at the maximal density. The Lipschitz bound is the
// largest absolute segment slope, exact for the interpolant.
VelocityModel make_tabulated_model(std::vector<double> density_nodes,
                                   std::vector<double> velocity_nodes);

// Parses "affine:a=0.5,b=1", "greenshields:vmax=1" or "greenshields:vmax=1,p=1",
// and "tabulated:file=PATH" (lines of "rho v").
VelocityModel make_model(const std::string& description, double max_density);

}  // namespace ftl
