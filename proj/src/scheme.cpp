#include "ftl/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ftl/numerics.hpp"

namespace ftl {

namespace {

constexpr double kGapSlack = 1e-10;      // relative slack on the ell/R bound
constexpr double kTvSlack = 1e-10;       // absolute slack on TV non-increase
constexpr double kLeaderSlack = 1e-12;   // absolute slack on leader-gap law
constexpr double kMassRelTol = 1e-12;

std::string describe_positions(const ParticleState& s, int center) {
  std::ostringstream os;
  os.precision(17);
  const int lo = std::max(0, center - 2);
  const int hi = std::min(static_cast<int>(s.positions.size()) - 1, center + 2);
  for (int i = lo; i <= hi; ++i) os << " x[" << i << "]=" << s.positions[i];
  return os.str();
}

}  // namespace

std::string CflReport::summary() const {
  std::ostringstream os;
  os.precision(17);
  os << (pass ? "pass" : "fail") << ": theta*tau*lip*R^2 = " << lhs
     << (pass ? " <= " : " > ") << rhs << " = (1-margin)*ell"
     << " (tau = " << time_step << ", ell = " << interval_mass
     << ", minimal admissible M = " << min_time_steps << ")";
  return os.str();
}

CflReport check_cfl(const SchemeConfig& config, const VelocityModel& model,
                    double total_mass) {
  if (!(config.theta >= 0.0 && config.theta <= 1.0))
    throw std::invalid_argument("theta must lie in [0, 1]");
  if (config.particle_intervals < 1)
    throw std::invalid_argument("particle interval count must be positive");
  if (config.time_steps < 1)
    throw std::invalid_argument("time step count must be positive");
  if (!(config.horizon > 0.0))
    throw std::invalid_argument("horizon must be positive");
  if (!(config.cfl_margin > 0.0 && config.cfl_margin < 1.0))
    throw std::invalid_argument("cfl margin must lie in (0, 1)");
  if (!(total_mass > 0.0))
    throw std::invalid_argument("total mass must be positive");

  const double r = model.max_density();
  const double rate = config.theta * model.lipschitz() * r * r;

  CflReport report;
  report.time_step = config.time_step();
  report.interval_mass = total_mass / config.particle_intervals;
  report.lhs = rate * report.time_step;
  report.rhs = (1.0 - config.cfl_margin) * report.interval_mass;
  report.pass = report.lhs <= report.rhs;

  if (rate <= 0.0) {
    report.min_time_steps = 1;
  } else {
    auto passes = [&](double steps) {
      return rate * (config.horizon / steps) <=
             (1.0 - config.cfl_margin) * report.interval_mass;
    };
    double m = std::ceil(rate * config.horizon /
                         ((1.0 - config.cfl_margin) * report.interval_mass));
    m = std::max(m, 1.0);
    while (!passes(m)) m += 1.0;
    report.min_time_steps =
        m < 2e9 ? static_cast<int>(m) : std::numeric_limits<int>::max();
  }
  return report;
}

double rightmost_update(const ParticleState& state, double time_step,
                        const VelocityModel& model) {
  return state.positions.back() + time_step * model.velocity(0.0);
}

double implicit_gap_solve(double rhs, double x_right_new, double interval_mass,
                          double time_step, double theta,
                          const VelocityModel& model, double tol,
                          int max_iter) {
  const double weight = (1.0 - theta) * time_step;
  if (weight == 0.0) return rhs;  // the map degenerates to the identity
  if (!(interval_mass > 0.0))
    throw std::invalid_argument("implicit solve: interval mass must be positive");

  auto residual = [&](double x) {
    return x -
           weight * model.velocity_extended(interval_mass / (x_right_new - x)) -
           rhs;
  };

  // The root equals rhs + weight * v_ext(.), so it lies between the extreme
  // velocities. g is increasing with slope >= 1 left of x_right_new.
  double lo = rhs + weight * model.velocity(model.max_density());
  double hi = rhs + weight * model.velocity(0.0);
  if (!(lo <= hi)) std::swap(lo, hi);
  if (!(lo < x_right_new))
    throw std::runtime_error("implicit solve: bracket failure (gap collapsed)");
  hi = std::min(hi, x_right_new);

  double res_lo = residual(lo);
  double res_hi = residual(hi);
  if (std::abs(res_lo) <= tol) return lo;
  if (std::abs(res_hi) <= tol) return hi;
  if (res_lo > 0.0 || res_hi < 0.0)
    throw std::runtime_error("implicit solve: bracket failure (no sign change)");

  double x = 0.5 * (lo + hi);
  for (int it = 0; it < max_iter; ++it) {
    const double res = residual(x);
    if (std::abs(res) <= tol) return x;
    if (res > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    double slope = 1.0;
    const double gap = x_right_new - x;
    if (gap > 0.0) {
      const double rho = interval_mass / gap;
      if (rho <= model.max_density())
        slope = 1.0 - weight * model.velocity_deriv(rho) * rho / gap;
    }
    double next = x - res / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    x = next;
  }
  throw std::runtime_error(
      "implicit solve: iteration cap exceeded (tolerance below the arithmetic "
      "resolution)");
}

ParticleState step(const ParticleState& state, const SchemeConfig& config,
                   const VelocityModel& model) {
  const int n = state.interval_count();
  const double tau = config.time_step();
  const double theta = config.theta;
  const double ell = state.interval_mass;

  ParticleState out;
  out.positions.assign(state.positions.size(), 0.0);
  out.interval_mass = ell;
  out.time_index = state.time_index + 1;

  out.positions[n] = rightmost_update(state, tau, model);
  for (int i = n - 1; i >= 0; --i) {
    const double local = ell / (state.positions[i + 1] - state.positions[i]);
    const double rhs =
        state.positions[i] + theta * tau * model.velocity_extended(local);
    if (theta == 1.0) {
      out.positions[i] = rhs;  // explicit path, bit-identical to the formula
      continue;
    }
    const double tol = config.solver_tol * std::max(1.0, std::abs(rhs));
    try {
      out.positions[i] =
          implicit_gap_solve(rhs, out.positions[i + 1], ell, tau, theta, model,
                             tol, config.solver_max_iter);
    } catch (const std::runtime_error& e) {
      throw SchemeError(std::string(e.what()) + " at particle " +
                            std::to_string(i) + ", level " +
                            std::to_string(out.time_index),
                        i, out.time_index);
    }
  }

  if (config.run_checks) {
    const double min_gap =
        (ell / model.max_density()) * (1.0 - kGapSlack);
    for (int i = 0; i < n; ++i) {
      const double gap = out.positions[i + 1] - out.positions[i];
      if (!(gap > 0.0))
        throw SchemeError("ordering violated" + describe_positions(out, i), i,
                          out.time_index);
      if (gap < min_gap) {
        std::ostringstream os;
        os.precision(17);
        os << "max principle violated: gap " << gap << " < ell/R = "
           << ell / model.max_density() << describe_positions(out, i);
        throw SchemeError(os.str(), i, out.time_index);
      }
    }
  }
  return out;
}

double state_total_variation(const ParticleState& state) {
  const int n = state.interval_count();
  CompensatedSum acc;
  acc.add(state.local_density(0));
  for (int i = 0; i + 1 < n; ++i)
    acc.add(std::abs(state.local_density(i + 1) - state.local_density(i)));
  acc.add(state.local_density(n - 1));
  return acc.value();
}

double state_mass(const ParticleState& state) {
  CompensatedSum acc;
  for (int i = 0; i < state.interval_count(); ++i)
    acc.add(state.local_density(i) * state.gap(i));
  return acc.value();
}

int Trajectory::level_of_time(double t) const {
  const double slack = 1e-12 * std::max(1.0, std::abs(horizon));
  if (t < -slack || t > horizon + slack)
    throw std::out_of_range("time " + std::to_string(t) + " outside [0, T]");
  if (time_step <= 0.0) return 0;
  const int m = static_cast<int>(std::floor(std::max(t, 0.0) / time_step));
  return std::min(m, level_count() - 1);
}

namespace {

// Discrete evolution law for the local densities, derived from the update by
// eliminating positions: the residual must stay at solver-tolerance level.
void check_evolution_law(const ParticleState& prev, const ParticleState& next,
                         const SchemeConfig& config,
                         const VelocityModel& model) {
  const int n = prev.interval_count();
  const double tau = config.time_step();
  const double theta = config.theta;
  const double ell = prev.interval_mass;
  const double eps = std::numeric_limits<double>::epsilon();

  for (int i = 0; i < n; ++i) {
    const double before = prev.local_density(i);
    const double after = next.local_density(i);
    const double before_up = i + 1 < n ? prev.local_density(i + 1) : 0.0;
    const double after_up = i + 1 < n ? next.local_density(i + 1) : 0.0;
    const double dv_before = model.velocity_extended(before_up) -
                             model.velocity_extended(before);
    const double dv_after =
        model.velocity_extended(after_up) - model.velocity_extended(after);
    const double flux_term = tau * (before * after / ell) *
                             (theta * dv_before + (1.0 - theta) * dv_after);
    const double residual = (after - before) + flux_term;

    const double tol_scale =
        theta == 1.0
            ? 0.0
            : config.solver_tol *
                  std::max(1.0, std::abs(prev.positions[i]) +
                                    tau * model.max_abs_velocity());
    const double bound =
        4.0 * (before * after / ell) * tol_scale +
        1e3 * eps *
            (before + after + std::abs(flux_term) +
             tau * (before * after / ell) * model.max_abs_velocity());
    if (!(std::abs(residual) <= bound)) {
      std::ostringstream os;
      os.precision(17);
      os << "evolution-law residual " << residual << " exceeds bound " << bound;
      throw SchemeError(os.str(), i, next.time_index);
    }
  }
}

}  // namespace

Trajectory run(const StepDensity& data, const SchemeConfig& config,
               const VelocityModel& model) {
  if (!(config.theta >= 0.0 && config.theta <= 1.0))
    throw std::invalid_argument("theta must lie in [0, 1]");
  if (config.particle_intervals < 1)
    throw std::invalid_argument("particle interval count must be positive");
  if (config.time_steps < 0)
    throw std::invalid_argument("time step count must be nonnegative");
  if (!(config.horizon > 0.0))
    throw std::invalid_argument("horizon must be positive");
  if (data.max_value() > model.max_density() * (1.0 + 1e-12))
    throw std::invalid_argument(
        "initial data exceeds the model's maximal density");

  if (config.time_steps > 0) {
    const CflReport report = check_cfl(config, model, data.total_mass());
    if (!report.pass)
      throw std::invalid_argument("CFL condition fails; " + report.summary());
  }

  Trajectory traj;
  traj.time_step = config.time_step();
  traj.horizon = config.horizon;
  traj.initial_mass = data.total_mass();
  traj.initial_tv = data.total_variation();
  traj.interval_mass = data.total_mass() / config.particle_intervals;
  traj.states.reserve(static_cast<std::size_t>(config.time_steps) + 1);
  traj.states.push_back(place_particles(data, config.particle_intervals));

  const double leader_reference = traj.states.front().positions.back();
  const double speed_at_zero = model.velocity(0.0);
  double prev_tv = config.run_checks
                       ? state_total_variation(traj.states.front())
                       : 0.0;

  for (int m = 0; m < config.time_steps; ++m) {
    const ParticleState& prev = traj.states.back();
    ParticleState next = step(prev, config, model);

    if (config.run_checks) {
      const int n = next.interval_count();
      const double tv = state_total_variation(next);
      if (!(tv <= prev_tv + kTvSlack))
        throw SchemeError("total variation increased: " + std::to_string(tv) +
                              " > " + std::to_string(prev_tv),
                          -1, next.time_index);
      prev_tv = tv;

      if (!(next.local_density(n - 1) <=
            prev.local_density(n - 1) + kLeaderSlack))
        throw SchemeError("leader gap density increased", n - 1,
                          next.time_index);

      const double mass = state_mass(next);
      if (!(std::abs(mass - traj.initial_mass) <=
            kMassRelTol * traj.initial_mass))
        throw SchemeError("mass drifted to " + std::to_string(mass), -1,
                          next.time_index);

      const double expected_leader =
          leader_reference + (next.time_index * traj.time_step) * speed_at_zero;
      const double leader_tol =
          1e-12 * (1.0 + std::abs(leader_reference) +
                   traj.horizon * model.max_abs_velocity());
      if (!(std::abs(next.positions.back() - expected_leader) <= leader_tol))
        throw SchemeError("rightmost particle drifted from its closed form", n,
                          next.time_index);

      check_evolution_law(prev, next, config, model);
    }
    traj.states.push_back(std::move(next));
  }
  return traj;
}

}  // namespace ftl
