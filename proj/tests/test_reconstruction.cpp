#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "ftl/reconstruction.hpp"

using namespace ftl;

namespace {

StepDensity figure_one_rarefaction() {
  return StepDensity({-1.0, 0.0, 1.0}, {0.8, 0.4});
}

Trajectory figure_one_run(double theta = 0.0, int n = 100, int m = 100) {
  const VelocityModel model = make_affine_model(0.5, 1.0, 1.0);
  SchemeConfig config;
  config.theta = theta;
  config.particle_intervals = n;
  config.time_steps = m;
  config.horizon = 1.0;
  return run(figure_one_rarefaction(), config, model);
}

// Strictly positive cells so the pseudo-inverse is continuous.
StepDensity random_positive_density(std::mt19937_64& rng, double target_mass) {
  std::uniform_int_distribution<int> cell_count(1, 8);
  std::uniform_real_distribution<double> width(0.1, 1.2);
  std::uniform_real_distribution<double> value(0.05, 1.0);
  std::uniform_real_distribution<double> offset(-2.0, 2.0);
  const int cells = cell_count(rng);
  std::vector<double> edges{offset(rng)};
  std::vector<double> values;
  for (int k = 0; k < cells; ++k) {
    edges.push_back(edges.back() + width(rng));
    values.push_back(value(rng));
  }
  StepDensity raw(edges, values);
  if (target_mass > 0.0) {
    const double scale = target_mass / raw.total_mass();
    for (double& v : values) v *= scale;
    return StepDensity(std::move(edges), std::move(values));
  }
  return raw;
}

}  // namespace

TEST_SUITE_BEGIN("reconstruction");

TEST_CASE("density_at follows the piecewise-constant-in-time convention") {
  const Trajectory traj = figure_one_run(0.0, 20, 40);
  const DiscreteDensity density(traj);

  // At t = 0 a point strictly inside cell i reads the initial local density.
  const ParticleState& initial = traj.states.front();
  for (int i : {0, 7, 19}) {
    const double mid = 0.5 * (initial.positions[i] + initial.positions[i + 1]);
    CHECK(density.density_at(mid, 0.0) ==
          doctest::Approx(initial.local_density(i)).epsilon(1e-15));
  }
  // t = T maps to the final level by continuity.
  CHECK(density.level_of_time(1.0) == traj.level_count() - 1);
  // Left of the leftmost particle the density vanishes.
  CHECK(density.density_at(initial.positions.front() - 0.5, 0.3) == 0.0);
  CHECK_THROWS_AS(density.density_at(0.0, 1.5), std::out_of_range);
  CHECK_THROWS_AS(density.density_at(0.0, -0.1), std::out_of_range);
}

TEST_CASE("slice TV: uniform slice doubles the value, runs stay under the initial TV") {
  StepDensity uniform = StepDensity::single_block(0.0, 1.0, 0.7);
  CHECK(uniform.total_variation() == doctest::Approx(1.4).epsilon(1e-15));

  const Trajectory traj = figure_one_run();
  const DiscreteDensity density(traj);
  for (int m = 0; m < density.level_count(); ++m)
    CHECK(density.slice_tv(m) <= 1.6 * (1.0 + 1e-12));
}

TEST_CASE("two-value slice TV is a + |b - a| + b") {
  const StepDensity two({0.0, 1.0, 2.0}, {0.3, 0.9});
  CHECK(two.total_variation() == doctest::Approx(0.3 + 0.6 + 0.9).epsilon(1e-15));
}

TEST_CASE("exact L1 distance between step densities") {
  const StepDensity box = StepDensity::single_block(0.0, 1.0, 1.0);
  CHECK(l1_distance(box, box) == 0.0);

  const double h = 0.25;
  const StepDensity shifted = StepDensity::single_block(h, 1.0 + h, 1.0);
  CHECK(l1_distance(box, shifted) == doctest::Approx(2.0 * h).epsilon(1e-14));

  const StepDensity a = StepDensity::single_block(0.0, 1.0, 0.8);
  const StepDensity b = StepDensity::single_block(0.0, 1.0, 0.4);
  CHECK(l1_distance(a, b) == doctest::Approx(0.4).epsilon(1e-14));
}

TEST_CASE("pseudo-inverse of simple profiles") {
  const PseudoInverse identity = pseudo_inverse(StepDensity::single_block(0.0, 1.0, 1.0));
  CHECK(identity(0.25) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(identity(0.9) == doctest::Approx(0.9).epsilon(1e-15));

  const PseudoInverse half = pseudo_inverse(StepDensity::single_block(0.0, 0.5, 2.0));
  CHECK(half(0.5) == doctest::Approx(0.25).epsilon(1e-15));

  // Interior vacuum makes the transport map jump.
  const StepDensity gap = StepDensity::from_blocks({{0.0, 1.0, 1.0}, {2.0, 3.0, 1.0}});
  CHECK_THROWS_AS(pseudo_inverse(gap), std::invalid_argument);
}

TEST_CASE("pseudo-inverse of a particle slice: intercepts and slopes") {
  const Trajectory traj = figure_one_run(0.0, 25, 50);
  const ParticleState& state = traj.states[10];
  std::vector<double> edges(state.positions.begin(), state.positions.end());
  std::vector<double> values(state.interval_count());
  for (int i = 0; i < state.interval_count(); ++i)
    values[i] = state.local_density(i);
  const StepDensity slice(edges, values);
  const PseudoInverse inv = pseudo_inverse(slice);
  const double ell = traj.interval_mass;
  for (int i = 0; i < state.interval_count(); ++i) {
    CHECK(inv(i * ell) == doctest::Approx(state.positions[i]).epsilon(1e-12));
    const double mid = (i + 0.5) * ell;
    CHECK(inv(mid) == doctest::Approx(state.positions[i] + 0.5 * state.gap(i))
                          .epsilon(1e-12));
  }
}

TEST_CASE("pseudo-inverse inverts the CDF on segment interiors") {
  std::mt19937_64 rng(5150);
  for (int trial = 0; trial < 30; ++trial) {
    const StepDensity d = random_positive_density(rng, 0.0);
    const PseudoInverse inv = pseudo_inverse(d);
    const double mass = d.total_mass();
    for (int s = 1; s < 20; ++s) {
      const double z = mass * s / 20.0;
      CHECK(d.cdf(inv(z)) == doctest::Approx(z).epsilon(1e-13));
    }
  }
}

TEST_CASE("wasserstein distance: translation and closed forms") {
  const StepDensity box = StepDensity::single_block(0.0, 1.0, 1.0);
  CHECK(wasserstein_d1(box, box) == 0.0);

  const double h = 0.3;
  const StepDensity shifted = StepDensity::single_block(h, 1.0 + h, 1.0);
  CHECK(wasserstein_d1(box, shifted) == doctest::Approx(1.0 * h).epsilon(1e-13));

  // X_A(z) = z against X_B(z) = z/2: integral of z/2 over (0,1).
  const StepDensity tall = StepDensity::single_block(0.0, 0.5, 2.0);
  CHECK(wasserstein_d1(box, tall) == doctest::Approx(0.25).epsilon(1e-13));

  const StepDensity heavy = StepDensity::single_block(0.0, 1.0, 2.0);
  CHECK_THROWS_AS(wasserstein_d1(box, heavy), std::invalid_argument);
}

TEST_CASE("wasserstein distance is a metric on equal-mass densities") {
  std::mt19937_64 rng(31337);
  for (int trial = 0; trial < 40; ++trial) {
    const StepDensity a = random_positive_density(rng, 1.0);
    const StepDensity b = random_positive_density(rng, 1.0);
    const StepDensity c = random_positive_density(rng, 1.0);
    const double ab = wasserstein_d1(a, b);
    const double ba = wasserstein_d1(b, a);
    const double ac = wasserstein_d1(a, c);
    const double cb = wasserstein_d1(c, b);
    CHECK(ab == ba);
    CHECK(ab >= 0.0);
    CHECK(ab <= ac + cb + 1e-12);
  }
}

TEST_CASE("interpolation bound: box against shifted box") {
  const StepDensity box = StepDensity::single_block(0.0, 1.0, 1.0);
  const InterpolationBoundCheck same = interpolation_bound_check(box, box);
  CHECK(same.lhs == 0.0);
  CHECK(same.rhs == 0.0);
  CHECK(same.pass);

  const StepDensity shifted = StepDensity::single_block(0.1, 1.1, 1.0);
  const InterpolationBoundCheck check = interpolation_bound_check(box, shifted);
  CHECK(check.lhs == doctest::Approx(0.2).epsilon(1e-13));
  CHECK(check.rhs == doctest::Approx(2.0 * std::sqrt(4.0) * std::sqrt(0.1)).epsilon(1e-12));
  CHECK(check.pass);
}

TEST_CASE("interpolation bound holds on random equal-mass pairs") {
  std::mt19937_64 rng(479001600);
  for (int trial = 0; trial < 200; ++trial) {
    const StepDensity a = random_positive_density(rng, 1.0);
    const StepDensity b = random_positive_density(rng, 1.0);
    CHECK(interpolation_bound_check(a, b).pass);
  }
}

TEST_CASE("time continuity bounds at figure-one scale") {
  const Trajectory traj = figure_one_run();
  const DiscreteDensity density(traj);
  const VelocityModel model = make_affine_model(0.5, 1.0, 1.0);

  SUBCASE("same-level query is free") {
    const TimeContinuityCheck check = time_continuity_check(density, 0.3, 0.3, model);
    CHECK(check.d1_value == 0.0);
    CHECK(check.pass);
  }
  SUBCASE("bound constants match hand arithmetic") {
    const TimeContinuityCheck check = time_continuity_check(density, 0.25, 0.75, model);
    CHECK(check.d1_bound == doctest::Approx(4.0 * 1.2 * 0.5 * 0.51).epsilon(1e-12));
    CHECK(check.l1_bound ==
          doctest::Approx(4.0 * std::sqrt(2.0 * 1.6 * 1.2 * 0.5) * std::sqrt(0.51))
              .epsilon(1e-12));
    CHECK(check.pass);
  }
  SUBCASE("random pairs satisfy both bounds") {
    std::mt19937_64 rng(8675309);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      double t1 = unit(rng), t2 = unit(rng);
      if (t1 > t2) std::swap(t1, t2);
      CHECK(time_continuity_check(density, t1, t2, model).pass);
    }
  }
}

TEST_CASE("interpolated positions: endpoints, midpoints, slopes") {
  const Trajectory traj = figure_one_run(1.0, 30, 120);
  const double tau = traj.time_step;

  const auto at_level = interpolated_positions(traj, 5 * tau);
  for (std::size_t i = 0; i < at_level.size(); ++i)
    CHECK(at_level[i] == traj.states[5].positions[i]);

  const auto midway = interpolated_positions(traj, 5.5 * tau);
  for (std::size_t i = 0; i < midway.size(); ++i)
    CHECK(midway[i] == doctest::Approx(0.5 * (traj.states[5].positions[i] +
                                              traj.states[6].positions[i]))
                           .epsilon(1e-14));

  // Slope on the open slab equals theta v(R^m) + (1-theta) v(R^{m+1}).
  const VelocityModel model = make_affine_model(0.5, 1.0, 1.0);
  const auto a = interpolated_positions(traj, 5.25 * tau);
  const auto b = interpolated_positions(traj, 5.75 * tau);
  for (int i = 0; i < traj.states[5].interval_count(); ++i) {
    const double slope = (b[i] - a[i]) / (0.5 * tau);
    const double expected = model.velocity_extended(traj.states[5].local_density(i));
    CHECK(slope == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("every slice carries the initial mass") {
  const Trajectory traj = figure_one_run(0.5, 64, 128);
  const DiscreteDensity density(traj);
  for (int m = 0; m < density.level_count(); ++m)
    CHECK(std::abs(density.slice_mass(m) - 1.2) <= 1e-12 * 1.2);
}

TEST_SUITE_END();
