#include "ftl/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ftl/numerics.hpp"

namespace ftl {

DiscreteDensity::DiscreteDensity(const Trajectory& trajectory)
    : time_step_(trajectory.time_step),
      horizon_(trajectory.horizon),
      interval_mass_(trajectory.interval_mass),
      total_mass_(trajectory.initial_mass),
      initial_tv_(trajectory.initial_tv) {
  slices_.reserve(trajectory.states.size());
  for (const ParticleState& state : trajectory.states) {
    std::vector<double> edges(state.positions.begin(), state.positions.end());
    std::vector<double> values(state.interval_count());
    for (int i = 0; i < state.interval_count(); ++i)
      values[i] = state.local_density(i);
    slices_.emplace_back(std::move(edges), std::move(values));
  }
}

int DiscreteDensity::level_of_time(double t) const {
  const double slack = 1e-12 * std::max(1.0, std::abs(horizon_));
  if (t < -slack || t > horizon_ + slack)
    throw std::out_of_range("time " + std::to_string(t) + " outside [0, T]");
  if (time_step_ <= 0.0) return 0;
  const int m = static_cast<int>(std::floor(std::max(t, 0.0) / time_step_));
  return std::min(m, level_count() - 1);
}

double DiscreteDensity::density_at(double x, double t) const {
  return slices_[level_of_time(t)].value_at(x);
}

double PseudoInverse::operator()(double z) const {
  if (z <= 0.0) return position_breaks.front();
  if (z >= mass_breaks.back()) return position_breaks.back();
  const auto it = std::upper_bound(mass_breaks.begin(), mass_breaks.end(), z);
  const std::size_t k = static_cast<std::size_t>(it - mass_breaks.begin()) - 1;
  const double span = mass_breaks[k + 1] - mass_breaks[k];
  const double frac = (z - mass_breaks[k]) / span;
  return position_breaks[k] +
         frac * (position_breaks[k + 1] - position_breaks[k]);
}

PseudoInverse pseudo_inverse(const StepDensity& density) {
  const auto edges = density.edges();
  const auto values = density.values();
  const auto cum = density.cumulative();

  // Trim zero padding; interior vacuum makes the pseudo-inverse jump.
  std::size_t first = 0;
  while (first < values.size() && values[first] <= 0.0) ++first;
  std::size_t last = values.size();
  while (last > first && values[last - 1] <= 0.0) --last;
  for (std::size_t k = first; k < last; ++k)
    if (values[k] <= 0.0)
      throw std::invalid_argument(
          "pseudo-inverse: interior vacuum cell (discontinuous transport map)");

  PseudoInverse inv;
  inv.mass_breaks.reserve(last - first + 1);
  inv.position_breaks.reserve(last - first + 1);
  const double base = cum[first];
  for (std::size_t k = first; k <= last; ++k) {
    inv.mass_breaks.push_back(cum[k] - base);
    inv.position_breaks.push_back(edges[k]);
  }
  return inv;
}

double l1_distance(const StepDensity& a, const StepDensity& b) {
  std::vector<double> breaks;
  breaks.reserve(a.edges().size() + b.edges().size());
  breaks.insert(breaks.end(), a.edges().begin(), a.edges().end());
  breaks.insert(breaks.end(), b.edges().begin(), b.edges().end());
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  CompensatedSum acc;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double mid = breaks[k] + 0.5 * (breaks[k + 1] - breaks[k]);
    acc.add(std::abs(a.value_at(mid) - b.value_at(mid)) *
            (breaks[k + 1] - breaks[k]));
  }
  return acc.value();
}

double wasserstein_d1(const StepDensity& a, const StepDensity& b) {
  const double mass_a = a.total_mass();
  const double mass_b = b.total_mass();
  if (std::abs(mass_a - mass_b) > 1e-12 * std::max(mass_a, mass_b))
    throw std::invalid_argument("wasserstein_d1: masses differ");

  const PseudoInverse inv_a = pseudo_inverse(a);
  const PseudoInverse inv_b = pseudo_inverse(b);
  const double mass = std::min(inv_a.total_mass(), inv_b.total_mass());

  std::vector<double> breaks;
  breaks.reserve(inv_a.mass_breaks.size() + inv_b.mass_breaks.size());
  for (double z : inv_a.mass_breaks)
    if (z < mass) breaks.push_back(z);
  for (double z : inv_b.mass_breaks)
    if (z < mass) breaks.push_back(z);
  breaks.push_back(mass);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  CompensatedSum acc;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double z0 = breaks[k];
    const double z1 = breaks[k + 1];
    acc.add(abs_linear_integral(z0, z1, inv_a(z0) - inv_b(z0),
                                inv_a(z1) - inv_b(z1)));
  }
  return acc.value();
}

InterpolationBoundCheck interpolation_bound_check(const StepDensity& a,
                                                  const StepDensity& b) {
  InterpolationBoundCheck check;
  check.lhs = l1_distance(a, b);
  check.rhs = 2.0 *
              std::sqrt(a.total_variation() + b.total_variation()) *
              std::sqrt(wasserstein_d1(a, b));
  check.pass = check.lhs <= check.rhs * (1.0 + 1e-9);
  return check;
}

TimeContinuityCheck time_continuity_check(const DiscreteDensity& density,
                                          double t1, double t2,
                                          const VelocityModel& model) {
  if (!(t1 <= t2))
    throw std::invalid_argument("time_continuity_check: need t1 <= t2");
  const StepDensity& early = density.slice(density.level_of_time(t1));
  const StepDensity& late = density.slice(density.level_of_time(t2));

  const double spread = t2 - t1 + density.time_step();
  const double mass = density.total_mass();
  const double vmax = model.max_abs_velocity();

  TimeContinuityCheck check;
  check.d1_value = wasserstein_d1(early, late);
  check.d1_bound = 4.0 * mass * vmax * spread;
  check.l1_value = l1_distance(early, late);
  check.l1_bound =
      4.0 * std::sqrt(2.0 * density.initial_tv() * mass * vmax) *
      std::sqrt(spread);
  check.pass = check.d1_value <= check.d1_bound * (1.0 + 1e-9) &&
               check.l1_value <= check.l1_bound * (1.0 + 1e-9);
  return check;
}

std::vector<double> interpolated_positions(const Trajectory& trajectory,
                                           double t) {
  const int level = trajectory.level_of_time(t);
  const ParticleState& before = trajectory.states[level];
  if (level + 1 >= trajectory.level_count()) return before.positions;
  const ParticleState& after = trajectory.states[level + 1];
  const double frac =
      (t - level * trajectory.time_step) / trajectory.time_step;
  std::vector<double> positions(before.positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i)
    positions[i] = before.positions[i] +
                   frac * (after.positions[i] - before.positions[i]);
  return positions;
}

}  // namespace ftl
