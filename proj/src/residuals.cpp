#include "ftl/residuals.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "ftl/numerics.hpp"

namespace ftl {

namespace {

double shape(double s) {
  const double w = 1.0 - s * s;
  return w > 0.0 ? w * w * w : 0.0;
}

double shape_deriv(double s) {
  const double w = 1.0 - s * s;
  return w > 0.0 ? -6.0 * s * w * w : 0.0;
}

void validate_bump(const Bump& bump) {
  if (!(bump.width_x > 0.0) || !(bump.width_t > 0.0))
    throw std::invalid_argument(
        "bump: widths must be positive (the test function must be >= 0)");
}

double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

double bump_space(const Bump& bump, double x) {
  return shape((x - bump.center_x) / bump.width_x);
}

double bump_space_deriv(const Bump& bump, double x) {
  return shape_deriv((x - bump.center_x) / bump.width_x) / bump.width_x;
}

double bump_time(const Bump& bump, double t) {
  return shape((t - bump.center_t) / bump.width_t);
}

double bump_time_deriv(const Bump& bump, double t) {
  return shape_deriv((t - bump.center_t) / bump.width_t) / bump.width_t;
}

namespace {

// Integrals of the polynomial pieces; order-5 Gauss is exact at degree 6 once
// the range is clipped to the support.
double space_integral(const Bump& bump, double a, double b) {
  const double lo = std::max(a, bump.center_x - bump.width_x);
  const double hi = std::min(b, bump.center_x + bump.width_x);
  if (!(lo < hi)) return 0.0;
  return gauss5(lo, hi, [&](double x) { return bump_space(bump, x); });
}

double space_cumulative(const Bump& bump, double x) {
  return space_integral(bump, bump.center_x - bump.width_x, x);
}

double space_total(const Bump& bump) {
  return space_integral(bump, bump.center_x - bump.width_x,
                        bump.center_x + bump.width_x);
}

double time_integral(const Bump& bump, double a, double b) {
  const double lo = std::max(a, bump.center_t - bump.width_t);
  const double hi = std::min(b, bump.center_t + bump.width_t);
  if (!(lo < hi)) return 0.0;
  return gauss5(lo, hi, [&](double t) { return bump_time(bump, t); });
}

// Cell terms of one slice: weight_dt multiplies value-against-d_t(phi),
// weight_dx multiplies flux-against-d_x(phi).
template <typename ValueFn, typename FluxFn>
void add_slice_terms(CompensatedSum& acc, const StepDensity& slice,
                     const Bump& bump, double weight_dt, double weight_dx,
                     ValueFn&& value_of, FluxFn&& flux_of) {
  if (weight_dt == 0.0 && weight_dx == 0.0) return;
  const auto edges = slice.edges();
  const auto values = slice.values();
  const double sup_lo = bump.center_x - bump.width_x;
  const double sup_hi = bump.center_x + bump.width_x;
  std::size_t first = static_cast<std::size_t>(
      std::upper_bound(edges.begin(), edges.end(), sup_lo) - edges.begin());
  first = first > 0 ? first - 1 : 0;
  for (std::size_t k = first; k < values.size() && edges[k] < sup_hi; ++k) {
    if (edges[k + 1] <= sup_lo) continue;
    if (weight_dt != 0.0)
      acc.add(value_of(values[k]) * space_integral(bump, edges[k], edges[k + 1]) *
              weight_dt);
    if (weight_dx != 0.0)
      acc.add(flux_of(values[k]) *
              (bump_space(bump, edges[k + 1]) - bump_space(bump, edges[k])) *
              weight_dx);
  }
}

}  // namespace

std::vector<Bump> bump_catalog(double x_lo, double x_hi, double horizon) {
  if (!(x_hi > x_lo) || !(horizon > 0.0))
    throw std::invalid_argument("bump_catalog: empty space-time box");
  const double span = x_hi - x_lo;
  const double t_centers[3] = {0.0, 0.45 * horizon, 0.72 * horizon};
  const double t_widths[3] = {0.50 * horizon, 0.40 * horizon, 0.27 * horizon};
  std::vector<Bump> bumps;
  bumps.reserve(9);
  int id = 0;
  for (int jx = 0; jx < 3; ++jx) {
    for (int jt = 0; jt < 3; ++jt) {
      const double x_widths[3] = {0.20, 0.30, 0.22};
      Bump bump;
      bump.center_x = x_lo + (0.25 + 0.25 * jx) * span;
      bump.width_x = x_widths[jx] * span;
      bump.center_t = t_centers[jt];
      bump.width_t = t_widths[jt];
      bump.id = id++;
      bumps.push_back(bump);
    }
  }
  return bumps;
}

double weak_residual(const DiscreteDensity& density, const VelocityModel& model,
                     const Bump& bump) {
  validate_bump(bump);
  CompensatedSum acc;
  const double tau = density.time_step();
  const double t_lo = bump.center_t - bump.width_t;
  const double t_hi = bump.center_t + bump.width_t;

  auto identity = [](double v) { return v; };
  auto flux = [&](double v) { return model.flux_extended(v); };

  for (int m = 0; m + 1 < density.level_count(); ++m) {
    const double t0 = tau * m;
    const double t1 = tau * (m + 1);
    if (t1 <= t_lo || t0 >= t_hi) continue;
    // Bt is C^1 across its support edges, so the slab integral of Bt' is the
    // endpoint difference.
    const double dt_weight = bump_time(bump, t1) - bump_time(bump, t0);
    const double dx_weight = time_integral(bump, t0, t1);
    add_slice_terms(acc, density.slice(m), bump, dt_weight, dx_weight, identity,
                    flux);
  }

  const double initial_weight = bump_time(bump, 0.0);
  if (initial_weight != 0.0)
    add_slice_terms(acc, density.slice(0), bump, initial_weight, 0.0, identity,
                    flux);
  return acc.value();
}

double entropy_residual(const DiscreteDensity& density,
                        const VelocityModel& model, double k,
                        const Bump& bump) {
  validate_bump(bump);
  if (!(k >= 0.0 && k <= model.max_density()))
    throw std::domain_error("entropy_residual: k outside [0, R]");
  CompensatedSum acc;
  const double tau = density.time_step();
  const double t_lo = bump.center_t - bump.width_t;
  const double t_hi = bump.center_t + bump.width_t;
  const double flux_k = model.flux(k);
  const double total = space_total(bump);

  auto entropy_value = [&](double v) { return std::abs(v - k); };
  auto entropy_flux = [&](double v) {
    return sgn(v - k) * (model.flux_extended(v) - flux_k);
  };
  // Vacuum tails outside the particle span: |0 - k| = k against d_t(phi) and
  // sgn(0 - k)(f(0) - f(k)) = f(k) against d_x(phi).
  auto add_vacuum = [&](const StepDensity& slice, double dt_weight,
                        double dx_weight) {
    if (k == 0.0) return;
    const double left_edge = slice.edges().front();
    const double right_edge = slice.edges().back();
    if (dt_weight != 0.0)
      acc.add(k *
              (space_cumulative(bump, left_edge) +
               (total - space_cumulative(bump, right_edge))) *
              dt_weight);
    if (dx_weight != 0.0)
      acc.add(flux_k *
              (bump_space(bump, left_edge) - bump_space(bump, right_edge)) *
              dx_weight);
  };

  for (int m = 0; m + 1 < density.level_count(); ++m) {
    const double t0 = tau * m;
    const double t1 = tau * (m + 1);
    if (t1 <= t_lo || t0 >= t_hi) continue;
    const double dt_weight = bump_time(bump, t1) - bump_time(bump, t0);
    const double dx_weight = time_integral(bump, t0, t1);
    add_slice_terms(acc, density.slice(m), bump, dt_weight, dx_weight,
                    entropy_value, entropy_flux);
    add_vacuum(density.slice(m), dt_weight, dx_weight);
  }

  const double initial_weight = bump_time(bump, 0.0);
  if (initial_weight != 0.0) {
    add_slice_terms(acc, density.slice(0), bump, initial_weight, 0.0,
                    entropy_value, entropy_flux);
    add_vacuum(density.slice(0), initial_weight, 0.0);
  }
  return acc.value();
}

namespace {

// Speed at which a rarefaction attains the density k.
double profile_speed_of_density(const RiemannWave& wave, double k) {
  if (wave.affine_profile) return wave.affine_a - 2.0 * wave.affine_b * k;
  const auto& dens = wave.profile_densities;
  const auto& spd = wave.profile_speeds;
  const bool increasing = dens.back() > dens.front();
  for (std::size_t i = 0; i + 1 < dens.size(); ++i) {
    const double a = dens[i];
    const double b = dens[i + 1];
    const bool inside = increasing ? (k >= a && k <= b) : (k <= a && k >= b);
    if (inside) {
      const double span = b - a;
      const double frac = span == 0.0 ? 0.0 : (k - a) / span;
      return spd[i] + frac * (spd[i + 1] - spd[i]);
    }
  }
  return 0.5 * (spd.front() + spd.back());
}

double riemann_residual_impl(const RiemannFan& fan, const VelocityModel& model,
                             double jump_location, double horizon,
                             const std::optional<double>& entropy_k,
                             const Bump& bump) {
  validate_bump(bump);
  if (entropy_k &&
      !(*entropy_k >= 0.0 && *entropy_k <= model.max_density()))
    throw std::domain_error("riemann residual: k outside [0, R]");
  const double x_lo = bump.center_x - bump.width_x;
  const double x_hi = bump.center_x + bump.width_x;
  const double flux_k = entropy_k ? model.flux(*entropy_k) : 0.0;

  // Characteristic lines x = jump_location + s t across which the integrand
  // is not smooth: wave edges plus the k-crossing inside rarefactions.
  std::vector<double> speeds;
  for (const RiemannWave& wave : fan.waves) {
    speeds.push_back(wave.speed_lo);
    if (wave.speed_hi != wave.speed_lo) speeds.push_back(wave.speed_hi);
    if (entropy_k && !wave.shock) {
      const double lo = std::min(wave.density_before, wave.density_after);
      const double hi = std::max(wave.density_before, wave.density_after);
      if (*entropy_k > lo && *entropy_k < hi)
        speeds.push_back(profile_speed_of_density(wave, *entropy_k));
    }
  }

  auto space_part = [&](double t) {
    std::vector<double> x_breaks{x_lo, x_hi};
    for (double s : speeds) {
      const double x = jump_location + s * t;
      if (x > x_lo && x < x_hi) x_breaks.push_back(x);
    }
    std::sort(x_breaks.begin(), x_breaks.end());
    const double bt = bump_time(bump, t);
    const double btd = bump_time_deriv(bump, t);
    double sum = 0.0;
    for (std::size_t j = 0; j + 1 < x_breaks.size(); ++j) {
      sum += gauss5(x_breaks[j], x_breaks[j + 1], [&](double x) {
        const double rho = fan.value_at((x - jump_location) / t);
        if (entropy_k) {
          const double flux_part =
              sgn(rho - *entropy_k) * (model.flux_extended(rho) - flux_k);
          return std::abs(rho - *entropy_k) * bump_space(bump, x) * btd +
                 flux_part * bump_space_deriv(bump, x) * bt;
        }
        return rho * bump_space(bump, x) * btd +
               model.flux_extended(rho) * bump_space_deriv(bump, x) * bt;
      });
    }
    return sum;
  };

  // Time panels split where a characteristic line crosses a support edge.
  std::vector<double> t_breaks{0.0, horizon};
  auto push_t = [&](double t) {
    if (t > 0.0 && t < horizon) t_breaks.push_back(t);
  };
  push_t(bump.center_t - bump.width_t);
  push_t(bump.center_t + bump.width_t);
  for (double s : speeds) {
    if (s == 0.0) continue;
    push_t((x_lo - jump_location) / s);
    push_t((x_hi - jump_location) / s);
  }
  std::sort(t_breaks.begin(), t_breaks.end());
  t_breaks.erase(std::unique(t_breaks.begin(), t_breaks.end()), t_breaks.end());

  CompensatedSum acc;
  const double t_lo = bump.center_t - bump.width_t;
  const double t_hi = bump.center_t + bump.width_t;
  const double max_panel = horizon / 64.0;
  for (std::size_t j = 0; j + 1 < t_breaks.size(); ++j) {
    const double a = std::max(t_breaks[j], t_lo);
    const double b = std::min(t_breaks[j + 1], t_hi);
    if (!(a < b)) continue;
    const int pieces =
        std::max(1, static_cast<int>(std::ceil((b - a) / max_panel)));
    const double width = (b - a) / pieces;
    for (int p = 0; p < pieces; ++p)
      acc.add(gauss5(a + p * width, a + (p + 1) * width, space_part));
  }

  const double initial_weight = bump_time(bump, 0.0);
  if (initial_weight != 0.0) {
    auto initial_term = [&](double x) {
      const double rho =
          x < jump_location ? fan.density_left : fan.density_right;
      const double value = entropy_k ? std::abs(rho - *entropy_k) : rho;
      return value * bump_space(bump, x) * initial_weight;
    };
    if (jump_location > x_lo && jump_location < x_hi) {
      acc.add(gauss5(x_lo, jump_location, initial_term));
      acc.add(gauss5(jump_location, x_hi, initial_term));
    } else {
      acc.add(gauss5(x_lo, x_hi, initial_term));
    }
  }
  return acc.value();
}

}  // namespace

double riemann_weak_residual(const RiemannFan& fan, const VelocityModel& model,
                             double jump_location, double horizon,
                             const Bump& bump) {
  return riemann_residual_impl(fan, model, jump_location, horizon, std::nullopt,
                               bump);
}

double riemann_entropy_residual(const RiemannFan& fan,
                                const VelocityModel& model,
                                double jump_location, double horizon, double k,
                                const Bump& bump) {
  return riemann_residual_impl(fan, model, jump_location, horizon, k, bump);
}

}  // namespace ftl
