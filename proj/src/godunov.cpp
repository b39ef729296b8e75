#include "ftl/godunov.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace ftl {

double godunov_flux(const VelocityModel& model, double left, double right) {
  const double r = model.max_density();
  if (!(left >= 0.0 && left <= r) || !(right >= 0.0 && right <= r))
    throw std::domain_error("godunov_flux: states must lie in [0, R]");
  const double lo = std::min(left, right);
  const double hi = std::max(left, right);
  const bool minimize = left <= right;

  double best = model.flux_extended(left);
  auto consider = [&](double rho) {
    const double f = model.flux_extended(rho);
    if (minimize ? f < best : f > best) best = f;
  };
  consider(right);
  for (double c : model.flux_extrema_candidates())
    if (c > lo && c < hi) consider(c);
  return best;
}

StepDensity godunov_reference(const VelocityModel& model,
                              const StepDensity& data, double t, int cells) {
  if (cells < 100)
    throw std::invalid_argument("godunov_reference: need at least 100 cells");
  if (!(t >= 0.0))
    throw std::invalid_argument("godunov_reference: time must be nonnegative");
  if (data.max_value() > model.max_density() * (1.0 + 1e-12))
    throw std::invalid_argument("godunov_reference: data exceeds max density");

  const double wave_speed = std::max(model.max_abs_flux_deriv(), 1e-300);
  const double data_lo = data.edges().front();
  const double data_hi = data.edges().back();
  const double pad = 1e-9 * (data_hi - data_lo + wave_speed * t);
  const double lo = data_lo - wave_speed * t - pad;
  const double hi = data_hi + wave_speed * t + pad;
  const double dx = (hi - lo) / cells;

  std::vector<double> edges(static_cast<std::size_t>(cells) + 1);
  for (int j = 0; j <= cells; ++j) edges[j] = lo + dx * j;
  edges.back() = hi;

  // Exact cell averages of the step data.
  std::vector<double> values(cells);
  for (int j = 0; j < cells; ++j)
    values[j] = data.mass_between(edges[j], edges[j + 1]) / dx;

  if (t > 0.0) {
    const int steps =
        std::max(1, static_cast<int>(std::ceil(t * wave_speed / (0.9 * dx))));
    const double dt = t / steps;
    if (dt * wave_speed > dx)
      throw std::runtime_error("godunov_reference: CFL violation");

    std::vector<double> fluxes(static_cast<std::size_t>(cells) + 1);
    const double clamp_hi = model.max_density();
    for (int n = 0; n < steps; ++n) {
      fluxes[0] = godunov_flux(model, 0.0, values[0]);
      for (int j = 1; j < cells; ++j)
        fluxes[j] = godunov_flux(model, values[j - 1], values[j]);
      fluxes[cells] = godunov_flux(model, values[cells - 1], 0.0);
      const double lambda = dt / dx;
      for (int j = 0; j < cells; ++j) {
        values[j] -= lambda * (fluxes[j + 1] - fluxes[j]);
        values[j] = std::clamp(values[j], 0.0, clamp_hi);  // roundoff guard
      }
    }
  }
  return StepDensity(std::move(edges), std::move(values));
}

}  // namespace ftl
