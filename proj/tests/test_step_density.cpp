#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>

#include "ftl/step_density.hpp"

using namespace ftl;

namespace {

StepDensity figure_one_data() {
  return StepDensity({-1.0, 0.0, 1.0}, {0.8, 0.4});
}

// Random positive-mass step density with optional vacuum cells.
StepDensity random_density(std::mt19937_64& rng, bool allow_vacuum,
                           double max_value) {
  std::uniform_int_distribution<int> cell_count(1, 6);
  std::uniform_real_distribution<double> width(0.1, 1.5);
  std::uniform_real_distribution<double> value(0.05, max_value);
  std::uniform_real_distribution<double> offset(-2.0, 2.0);
  std::bernoulli_distribution vacuum(0.25);

  const int cells = cell_count(rng);
  std::vector<double> edges{offset(rng)};
  std::vector<double> values;
  bool has_mass = false;
  for (int k = 0; k < cells; ++k) {
    edges.push_back(edges.back() + width(rng));
    const bool zero = allow_vacuum && vacuum(rng) && k != 0 && k != cells - 1;
    values.push_back(zero ? 0.0 : value(rng));
    has_mass = has_mass || values.back() > 0.0;
  }
  if (!has_mass) values.front() = value(rng);
  return StepDensity(std::move(edges), std::move(values));
}

}  // namespace

TEST_SUITE_BEGIN("initial_data");

TEST_CASE("total mass of step data") {
  CHECK(figure_one_data().total_mass() == doctest::Approx(1.2).epsilon(1e-15));
  CHECK(StepDensity::single_block(0.0, 1.0, 1.0).total_mass() == 1.0);
  const StepDensity two = StepDensity::from_blocks({{0.0, 1.0, 1.0}, {2.0, 3.0, 1.0}});
  CHECK(two.total_mass() == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("total variation counts boundary values and the vacuum gap") {
  CHECK(figure_one_data().total_variation() == doctest::Approx(1.6).epsilon(1e-15));
  CHECK(StepDensity::single_block(0.0, 2.0, 0.7).total_variation() ==
        doctest::Approx(1.4).epsilon(1e-15));
  const StepDensity two = StepDensity::from_blocks({{0.0, 1.0, 1.0}, {2.0, 3.0, 1.0}});
  CHECK(two.total_variation() == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("construction rejects malformed data") {
  CHECK_THROWS_AS(StepDensity({0.0, 0.0}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(StepDensity({0.0, 1.0}, {-0.5}), std::invalid_argument);
  CHECK_THROWS_AS(StepDensity({0.0, 1.0}, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(StepDensity({0.0, 1.0, 2.0}, {1.0}), std::invalid_argument);
}

TEST_CASE("uniform quantiles on a unit box") {
  const auto positions =
      place_particle_positions(StepDensity::single_block(0.0, 1.0, 1.0), 4);
  REQUIRE(positions.size() == 5);
  const double expected[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  for (int i = 0; i < 5; ++i)
    CHECK(positions[i] == doctest::Approx(expected[i]).epsilon(1e-14));
  CHECK(positions.front() == 0.0);
  CHECK(positions.back() == 1.0);
}

TEST_CASE("quantiles jump across the vacuum gap") {
  const StepDensity two = StepDensity::from_blocks({{0.0, 1.0, 1.0}, {2.0, 3.0, 1.0}});
  const auto positions = place_particle_positions(two, 4);
  REQUIRE(positions.size() == 5);
  // The minimal point reaching mass 1.0 is the left edge of the plateau.
  const double expected[] = {0.0, 0.5, 1.0, 2.5, 3.0};
  for (int i = 0; i < 5; ++i)
    CHECK(positions[i] == doctest::Approx(expected[i]).epsilon(1e-14));
  CHECK(positions[2] == 1.0);
}

TEST_CASE("figure-one placement: 101 positions spanning the support") {
  const StepDensity data = figure_one_data();
  const ParticleState state = place_particles(data, 100);
  REQUIRE(state.positions.size() == 101);
  CHECK(state.positions.front() == -1.0);
  CHECK(state.positions.back() == 1.0);
  CHECK(state.interval_mass == doctest::Approx(0.012).epsilon(1e-15));
}

TEST_CASE("placement agrees with a brute-force quantile sweep") {
  // Independent oracle: accumulate mass on a fine uniform grid and read the
  // quantiles off the running sum.
  std::mt19937_64 rng(13579);
  for (int trial = 0; trial < 12; ++trial) {
    const StepDensity data = random_density(rng, true, 1.0);
    const int intervals = 2 + static_cast<int>(rng() % 12);
    const auto positions = place_particle_positions(data, intervals);

    const double lo = data.edges().front();
    const double hi = data.edges().back();
    const int grid = 2'000'000;
    const double dx = (hi - lo) / grid;
    const double quantum = data.total_mass() / intervals;
    double running = 0.0;
    int next = 1;
    std::vector<double> brute{data.support_min()};
    for (int j = 0; j < grid && next < intervals; ++j) {
      const double cell_lo = lo + j * dx;
      running += data.value_at(cell_lo + 0.5 * dx) * dx;
      while (next < intervals && running >= quantum * next) {
        brute.push_back(cell_lo + dx);
        ++next;
      }
    }
    brute.push_back(data.support_max());
    REQUIRE(brute.size() == positions.size());
    // Crossing location error is at most dx / (smallest positive value).
    for (std::size_t i = 0; i < brute.size(); ++i)
      CHECK(std::abs(positions[i] - brute[i]) <= 25.0 * dx);
  }
}

TEST_CASE("mass between consecutive particles is exactly the quantum") {
  std::mt19937_64 rng(987654321);
  for (int trial = 0; trial < 50; ++trial) {
    const StepDensity data = random_density(rng, true, 1.0);
    const int intervals = 1 + static_cast<int>(rng() % 40);
    const auto positions = place_particle_positions(data, intervals);
    const double quantum = data.total_mass() / intervals;
    for (std::size_t i = 0; i + 1 < positions.size(); ++i) {
      const double mass = data.mass_between(positions[i], positions[i + 1]);
      CHECK(std::abs(mass - quantum) <= 1e-12 * quantum);
    }
  }
}

TEST_CASE("initial local densities live in (0, R]") {
  std::mt19937_64 rng(24601);
  const double max_density = 1.0;
  for (int trial = 0; trial < 50; ++trial) {
    const StepDensity data = random_density(rng, true, max_density);
    const int intervals = 1 + static_cast<int>(rng() % 60);
    const ParticleState state = place_particles(data, intervals);
    for (int i = 0; i < state.interval_count(); ++i) {
      const double local = state.local_density(i);
      CHECK(local > 0.0);
      CHECK(local <= max_density * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("averaging onto particles does not increase total variation") {
  std::mt19937_64 rng(777);
  for (int trial = 0; trial < 50; ++trial) {
    const StepDensity data = random_density(rng, true, 1.0);
    const int intervals = 1 + static_cast<int>(rng() % 50);
    const ParticleState state = place_particles(data, intervals);
    std::vector<double> edges(state.positions.begin(), state.positions.end());
    std::vector<double> values(state.interval_count());
    for (int i = 0; i < state.interval_count(); ++i)
      values[i] = state.local_density(i);
    const StepDensity reconstructed(std::move(edges), std::move(values));
    CHECK(reconstructed.total_variation() <=
          data.total_variation() * (1.0 + 1e-12));
  }
}

TEST_CASE("text and file round trips") {
  const StepDensity parsed = parse_step_density("-1:0.8,0:0.4,1");
  CHECK(parsed.total_mass() == doctest::Approx(1.2).epsilon(1e-15));
  CHECK(parsed.value_at(-0.5) == 0.8);
  CHECK(parsed.value_at(0.5) == 0.4);
  CHECK(parsed.value_at(1.5) == 0.0);
  CHECK_THROWS_AS(parse_step_density("-1:0.8"), std::invalid_argument);
  CHECK_THROWS_AS(parse_step_density("-1:0.8,0:0.4,1:2,3:4"),
                  std::invalid_argument);

  namespace fs = std::filesystem;
  const fs::path path = fs::temp_directory_path() / "ftl_initial_test.dat";
  {
    std::ofstream out(path);
    out << "# two blocks\n-1 0.8\n0 0.4\n1\n";
  }
  const StepDensity loaded = load_step_density(path.string());
  CHECK(loaded.total_mass() == doctest::Approx(1.2).epsilon(1e-15));
  CHECK(loaded.total_variation() == doctest::Approx(1.6).epsilon(1e-15));
  {
    std::ofstream out(path);
    out << "-1 0.8\n0 0.4\n";  // missing right endpoint
  }
  CHECK_THROWS_AS(load_step_density(path.string()), std::invalid_argument);
  CHECK_THROWS_AS(load_step_density("/nonexistent/initial.dat"),
                  std::invalid_argument);
}

TEST_SUITE_END();
