#include "ftl/riemann.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ftl/numerics.hpp"

namespace ftl {

namespace {

constexpr int kEnvelopeNodes = 4097;

struct SamplePoint {
  double rho;
  double flux;
  int index;
};

double cross(const SamplePoint& o, const SamplePoint& a, const SamplePoint& b) {
  return (a.rho - o.rho) * (b.flux - o.flux) -
         (a.flux - o.flux) * (b.rho - o.rho);
}

// Andrew monotone chain over samples sorted by increasing density. The lower
// hull keeps left turns (slopes increasing); the upper hull keeps right turns.
std::vector<SamplePoint> hull(const std::vector<SamplePoint>& pts, bool lower) {
  std::vector<SamplePoint> stack;
  for (const SamplePoint& p : pts) {
    while (stack.size() >= 2) {
      const double c = cross(stack[stack.size() - 2], stack.back(), p);
      if (lower ? c <= 0.0 : c >= 0.0)
        stack.pop_back();
      else
        break;
    }
    stack.push_back(p);
  }
  return stack;
}

void validate_states(const VelocityModel& model, double left, double right) {
  const double r = model.max_density();
  if (!(left >= 0.0 && left <= r) || !(right >= 0.0 && right <= r))
    throw std::domain_error("riemann: states must lie in [0, R]");
}

}  // namespace

double RiemannFan::value_at(double xi) const {
  double current = density_left;
  for (const RiemannWave& wave : waves) {
    if (xi < wave.speed_lo) return current;
    if (xi <= wave.speed_hi) {
      if (wave.shock) return wave.density_after;
      if (wave.affine_profile)
        return (wave.affine_a - xi) / (2.0 * wave.affine_b);
      const auto& speeds = wave.profile_speeds;
      const auto it = std::upper_bound(speeds.begin(), speeds.end(), xi);
      const std::size_t hi = std::min<std::size_t>(
          static_cast<std::size_t>(it - speeds.begin()), speeds.size() - 1);
      if (hi == 0) return wave.profile_densities.front();
      const std::size_t lo = hi - 1;
      const double span = speeds[hi] - speeds[lo];
      if (span <= 0.0) return wave.profile_densities[hi];
      const double frac = (xi - speeds[lo]) / span;
      return wave.profile_densities[lo] +
             frac * (wave.profile_densities[hi] - wave.profile_densities[lo]);
    }
    current = wave.density_after;
  }
  return current;
}

double RiemannFan::min_speed() const {
  return waves.empty() ? 0.0 : waves.front().speed_lo;
}

double RiemannFan::max_speed() const {
  return waves.empty() ? 0.0 : waves.back().speed_hi;
}

RiemannFan solve_riemann_fan(const VelocityModel& model, double density_left,
                             double density_right) {
  validate_states(model, density_left, density_right);
  RiemannFan fan;
  fan.density_left = density_left;
  fan.density_right = density_right;
  if (density_left == density_right) return fan;

  if (model.affine()) {
    const double a = model.affine()->a;
    const double b = model.affine()->b;
    RiemannWave wave;
    if (density_left < density_right) {
      wave.shock = true;
      wave.speed_lo = wave.speed_hi = a - b * (density_left + density_right);
    } else {
      wave.shock = false;
      wave.speed_lo = a - 2.0 * b * density_left;
      wave.speed_hi = a - 2.0 * b * density_right;
      wave.affine_profile = true;
      wave.affine_a = a;
      wave.affine_b = b;
    }
    wave.density_before = density_left;
    wave.density_after = density_right;
    fan.waves.push_back(wave);
    return fan;
  }

  // Sampled envelope between the states. Lower convex hull for an upward
  // jump, upper concave hull for a downward one.
  const bool upward = density_left < density_right;
  const double lo_state = std::min(density_left, density_right);
  const double hi_state = std::max(density_left, density_right);
  std::vector<SamplePoint> pts(kEnvelopeNodes);
  for (int i = 0; i < kEnvelopeNodes; ++i) {
    // Endpoints land on the states exactly so the fan's outer values do too.
    const double rho =
        i == kEnvelopeNodes - 1
            ? hi_state
            : lo_state + (hi_state - lo_state) * i / (kEnvelopeNodes - 1);
    pts[i] = {rho, model.flux_extended(rho), i};
  }
  const std::vector<SamplePoint> vertices = hull(pts, /*lower=*/upward);

  // Segments in increasing density; traversal order in xi depends on the
  // jump direction (the solution runs from density_left to density_right).
  struct Segment {
    int from, to;  // vertex indices into `vertices`
  };
  std::vector<Segment> segments;
  for (std::size_t j = 0; j + 1 < vertices.size(); ++j)
    segments.push_back({static_cast<int>(j), static_cast<int>(j) + 1});
  if (!upward) std::reverse(segments.begin(), segments.end());

  auto slope = [&](const Segment& s) {
    const SamplePoint& p = vertices[s.from];
    const SamplePoint& q = vertices[s.to];
    return (q.flux - p.flux) / (q.rho - p.rho);
  };
  auto is_chord = [&](const Segment& s) {
    return vertices[s.to].index - vertices[s.from].index > 1;
  };

  std::size_t j = 0;
  while (j < segments.size()) {
    const Segment& seg = segments[j];
    const SamplePoint& near_side = upward ? vertices[seg.from] : vertices[seg.to];
    const SamplePoint& far_side = upward ? vertices[seg.to] : vertices[seg.from];
    if (is_chord(seg)) {
      RiemannWave wave;
      wave.shock = true;
      wave.speed_lo = wave.speed_hi = slope(seg);
      wave.density_before = near_side.rho;
      wave.density_after = far_side.rho;
      fan.waves.push_back(wave);
      ++j;
      continue;
    }
    // Maximal run of graph-following segments forms one rarefaction.
    std::size_t end = j;
    while (end < segments.size() && !is_chord(segments[end])) ++end;
    RiemannWave wave;
    wave.shock = false;
    wave.density_before = near_side.rho;
    const Segment& last = segments[end - 1];
    wave.density_after = (upward ? vertices[last.to] : vertices[last.from]).rho;
    // Node sequence from the near side to the far side; speeds are the exact
    // characteristic speeds f', forced monotone against sampling noise.
    const int node_lo = std::min(vertices[segments[j].from].index,
                                 vertices[segments[end - 1].from].index);
    const int node_hi = std::max(vertices[segments[j].to].index,
                                 vertices[segments[end - 1].to].index);
    double prev_speed = -std::numeric_limits<double>::infinity();
    for (int node = upward ? node_lo : node_hi;
         upward ? node <= node_hi : node >= node_lo; upward ? ++node : --node) {
      const double rho = pts[node].rho;
      const double speed = std::max(model.flux_deriv(rho), prev_speed);
      wave.profile_speeds.push_back(speed);
      wave.profile_densities.push_back(rho);
      prev_speed = speed;
    }
    wave.speed_lo = wave.profile_speeds.front();
    wave.speed_hi = wave.profile_speeds.back();
    fan.waves.push_back(wave);
    j = end;
  }
  return fan;
}

double solve_riemann(const VelocityModel& model, double density_left,
                     double density_right, double xi) {
  return solve_riemann_fan(model, density_left, density_right).value_at(xi);
}

ComparisonWindow riemann_validity_window(const VelocityModel& model,
                                         double support_lo, double support_hi,
                                         double density_left,
                                         double density_right,
                                         double jump_location, double t) {
  const RiemannFan left_edge = solve_riemann_fan(model, 0.0, density_left);
  const RiemannFan right_edge = solve_riemann_fan(model, density_right, 0.0);
  ComparisonWindow window;
  window.lo = support_lo + left_edge.max_speed() * t;
  window.hi = support_hi + right_edge.min_speed() * t;
  if (!(window.lo < window.hi))
    throw std::invalid_argument(
        "riemann window: outer waves already collided at t = " +
        std::to_string(t));
  const RiemannFan middle =
      solve_riemann_fan(model, density_left, density_right);
  if (jump_location + middle.min_speed() * t < window.lo ||
      jump_location + middle.max_speed() * t > window.hi)
    throw std::invalid_argument(
        "riemann window: the middle fan left the comparison window at t = " +
        std::to_string(t));
  return window;
}

double l1_error_vs_riemann(const StepDensity& slice, const VelocityModel& model,
                           const RiemannFan& fan, double jump_location,
                           double t, const ComparisonWindow& window,
                           int profile_cells) {
  if (!(window.lo < window.hi))
    throw std::invalid_argument("l1_error_vs_riemann: empty window");
  if (profile_cells < 100)
    throw std::invalid_argument("l1_error_vs_riemann: need >= 100 profile cells");

  // Breakpoints of the exact profile inside the window.
  std::vector<double> breaks{window.lo, window.hi};
  auto push = [&](double x) {
    if (x > window.lo && x < window.hi) breaks.push_back(x);
  };
  if (t == 0.0) {
    push(jump_location);
  } else {
    for (const RiemannWave& wave : fan.waves) {
      push(jump_location + wave.speed_lo * t);
      push(jump_location + wave.speed_hi * t);
    }
  }
  for (double e : slice.edges()) push(e);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  auto profile = [&](double x) {
    if (t == 0.0)
      return x < jump_location ? fan.density_left : fan.density_right;
    return fan.value_at((x - jump_location) / t);
  };

  // Inside a rarefaction of an affine law the profile is linear in x, so the
  // per-interval integral is closed form; other laws get a fine staircase.
  const bool affine = !fan.waves.empty() && t > 0.0 &&
                      std::all_of(fan.waves.begin(), fan.waves.end(),
                                  [](const RiemannWave& w) {
                                    return w.shock || w.affine_profile;
                                  });
  const double staircase_dx = (window.hi - window.lo) / profile_cells;

  (void)model;
  CompensatedSum acc;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double x0 = breaks[k];
    const double x1 = breaks[k + 1];
    const double mid = x0 + 0.5 * (x1 - x0);
    const double slice_value = slice.value_at(mid);
    const bool in_fan =
        t > 0.0 && !fan.waves.empty() &&
        (mid - jump_location) / t > fan.min_speed() &&
        (mid - jump_location) / t < fan.max_speed();
    if (!in_fan || affine) {
      // Profile constant or linear on the open interval; sample at interior
      // quartiles and extrapolate so breakpoint discontinuities never leak in.
      const double width = x1 - x0;
      const double at_25 = profile(x0 + 0.25 * width) - slice_value;
      const double at_75 = profile(x0 + 0.75 * width) - slice_value;
      const double half_rise = 0.5 * (at_75 - at_25);
      acc.add(abs_linear_integral(x0, x1, at_25 - half_rise, at_75 + half_rise));
    } else {
      const int pieces =
          std::max(1, static_cast<int>(std::ceil((x1 - x0) / staircase_dx)));
      const double width = (x1 - x0) / pieces;
      for (int p = 0; p < pieces; ++p) {
        const double c = x0 + (p + 0.5) * width;
        acc.add(std::abs(profile(c) - slice_value) * width);
      }
    }
  }
  return acc.value();
}

double l1_error_vs_riemann(const Trajectory& trajectory,
                           const VelocityModel& model, double density_left,
                           double density_right, double jump_location,
                           double t) {
  const ParticleState& initial = trajectory.states.front();
  const ComparisonWindow window = riemann_validity_window(
      model, initial.positions.front(), initial.positions.back(), density_left,
      density_right, jump_location, t);
  const RiemannFan fan =
      solve_riemann_fan(model, density_left, density_right);

  const ParticleState& state = trajectory.state_at_time(t);
  std::vector<double> edges(state.positions.begin(), state.positions.end());
  std::vector<double> values(state.interval_count());
  for (int i = 0; i < state.interval_count(); ++i)
    values[i] = state.local_density(i);
  const StepDensity slice(std::move(edges), std::move(values));

  return l1_error_vs_riemann(slice, model, fan, jump_location, t, window);
}

}  // namespace ftl
