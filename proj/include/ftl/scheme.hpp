#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "ftl/particle_state.hpp"
#include "ftl/step_density.hpp"
#include "ftl/velocity.hpp"

namespace ftl {

// Fully discrete theta-method configuration. theta = 1 is explicit Euler,
// theta = 1/2 Crank-Nicolson, theta = 0 implicit Euler.
struct SchemeConfig {
  double theta = 0.0;
  int particle_intervals = 100;  // N
  int time_steps = 100;          // M
  double horizon = 1.0;          // T
  double cfl_margin = 1e-6;      // strict inequality needs a margin in floats
  double solver_tol = 1e-13;     // scaled by max(1, |rhs|) per implicit solve
  int solver_max_iter = 200;
  bool run_checks = true;

  double time_step() const {
    return time_steps > 0 ? horizon / time_steps : 0.0;
  }
};

struct CflReport {
  bool pass = false;
  double lhs = 0.0;  // theta * tau * lip * R^2
  double rhs = 0.0;  // (1 - margin) * interval_mass
  double time_step = 0.0;
  double interval_mass = 0.0;
  int min_time_steps = 1;  // minimal admissible M at this N
  std::string summary() const;
};

// Pass iff theta * tau * lip * R^2 <= (1 - margin) * ell.
CflReport check_cfl(const SchemeConfig& config, const VelocityModel& model,
                    double total_mass);

// Raised when a step violates an invariant or an implicit solve fails;
// carries the offending particle index and time level.
class SchemeError : public std::runtime_error {
 public:
  SchemeError(const std::string& what, int particle, int level)
      : std::runtime_error(what), particle_(particle), level_(level) {}
  int particle() const { return particle_; }
  int level() const { return level_; }

 private:
  int particle_;
  int level_;
};

// Leader law: x_N + tau * v(0).
double rightmost_update(const ParticleState& state, double time_step,
                        const VelocityModel& model);

// Solves x - (1-theta) * tau * v_ext(interval_mass / (x_right_new - x)) = rhs
// by a safeguarded bisection-Newton hybrid on
// [rhs + (1-theta) tau v(R), rhs + (1-theta) tau v(0)] cut at x_right_new.
// The map has derivative >= 1, so the root is unique; returns x with
// |residual| <= tol. Throws on iteration cap (tol below the arithmetic
// resolution) or bracket failure (corrupted state).
double implicit_gap_solve(double rhs, double x_right_new, double interval_mass,
                          double time_step, double theta,
                          const VelocityModel& model, double tol,
                          int max_iter = 200);

// One theta-method step: the rightmost particle moves explicitly, then
// particles are solved right to left (x_i needs x_{i+1} at the new level).
ParticleState step(const ParticleState& state, const SchemeConfig& config,
                   const VelocityModel& model);

struct Trajectory {
  std::vector<ParticleState> states;  // time_steps + 1 levels
  double time_step = 0.0;
  double horizon = 0.0;
  double interval_mass = 0.0;
  double initial_mass = 0.0;
  double initial_tv = 0.0;

  int level_count() const { return static_cast<int>(states.size()); }
  // Piecewise-constant-in-time convention; t = horizon maps to the last level.
  int level_of_time(double t) const;
  const ParticleState& state_at_time(double t) const {
    return states[level_of_time(t)];
  }
};

// Places particles and advances time_steps steps. With run_checks on, every
// step re-verifies ordering, the gap lower bound, TV non-increase, the
// leader-gap monotonicity, mass conservation, the rightmost law, and the
// discrete evolution-law identity; violations abort with the offending (i, m).
Trajectory run(const StepDensity& data, const SchemeConfig& config,
               const VelocityModel& model);

// TV and mass of the density slice carried by one particle state.
double state_total_variation(const ParticleState& state);
double state_mass(const ParticleState& state);

}  // namespace ftl
