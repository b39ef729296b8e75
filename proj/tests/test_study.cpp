#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ftl/csv.hpp"
#include "ftl/study.hpp"

using namespace ftl;

namespace {

StudyPlan figure_one_plan() {
  StudyPlan plan;
  plan.theta = 0.0;
  plan.horizon = 1.0;
  plan.levels = {{50, 50}, {100, 140}};
  return plan;
}

}  // namespace

TEST_SUITE_BEGIN("study_harness");

TEST_CASE("default entropy schedule: N doubling, M ~ N^{3/2}") {
  const auto levels = default_entropy_schedule(100, 3);
  REQUIRE(levels.size() == 3);
  CHECK(levels[0].particle_intervals == 100);
  CHECK(levels[0].time_steps == 100);
  CHECK(levels[1].particle_intervals == 200);
  CHECK(levels[1].time_steps == 283);
  CHECK(levels[2].particle_intervals == 400);
  CHECK(levels[2].time_steps == 800);
  // N/M strictly decreasing along the schedule.
  for (std::size_t j = 0; j + 1 < levels.size(); ++j) {
    const double a =
        static_cast<double>(levels[j].particle_intervals) / levels[j].time_steps;
    const double b = static_cast<double>(levels[j + 1].particle_intervals) /
                     levels[j + 1].time_steps;
    CHECK(b < a);
  }
}

TEST_CASE("plan validation: CFL per level and the entropy schedule rule") {
  const VelocityModel model = make_affine_model(0.5, 1.0, 1.0);
  StudyPlan plan;
  plan.theta = 1.0;
  plan.horizon = 1.0;
  plan.levels = {{100, 83}};
  CHECK_THROWS_AS(validate_plan(plan, model, 1.2), std::invalid_argument);

  plan.levels = {{100, 100}, {200, 200}};
  plan.require_entropy_schedule = true;
  CHECK_THROWS_AS(validate_plan(plan, model, 1.2), std::invalid_argument);

  plan.levels = {{100, 100}, {200, 283}};
  CHECK_NOTHROW(validate_plan(plan, model, 1.2));
}

TEST_CASE("oracle spec parsing") {
  const OracleSpec riemann = parse_oracle_spec("riemann:rl=0.8,rr=0.4,x0=0");
  CHECK(riemann.kind == OracleSpec::Kind::riemann);
  CHECK(riemann.density_left == 0.8);
  CHECK(riemann.density_right == 0.4);
  CHECK(riemann.jump_location == 0.0);

  const OracleSpec godunov = parse_oracle_spec("godunov:cells=20000");
  CHECK(godunov.kind == OracleSpec::Kind::godunov);
  CHECK(godunov.cells == 20000);

  CHECK_THROWS_AS(parse_oracle_spec("riemann:rl=0.8"), std::invalid_argument);
  CHECK_THROWS_AS(parse_oracle_spec("magic:beans=1"), std::invalid_argument);
}

TEST_CASE("empty plan produces an empty report") {
  const VelocityModel model = make_affine_model(0.5, 1.0, 1.0);
  const StepDensity data({-1.0, 0.0, 1.0}, {0.8, 0.4});
  StudyPlan plan;
  const auto rows = run_study(plan, data, model, OracleSpec{}, 0.5);
  CHECK(rows.empty());
}

TEST_CASE("study rows carry the schedule arithmetic and shrinking errors") {
  const VelocityModel model = make_affine_model(0.5, 1.0, 1.0);
  const StepDensity data({-1.0, 0.0, 1.0}, {0.8, 0.4});
  OracleSpec oracle;
  oracle.kind = OracleSpec::Kind::riemann;
  oracle.density_left = 0.8;
  oracle.density_right = 0.4;
  oracle.jump_location = 0.0;

  const StudyPlan plan = figure_one_plan();
  const auto rows = run_study(plan, data, model, oracle, 0.5);
  REQUIRE(rows.size() == 2);
  for (const StudyRow& row : rows) {
    CHECK(row.cfl_pass);
    CHECK(row.time_step == doctest::Approx(1.0 / row.time_steps));
    CHECK(row.interval_mass == doctest::Approx(1.2 / row.particle_intervals));
    CHECK(row.step_ratio == doctest::Approx(row.time_step / row.interval_mass));
    CHECK(row.max_tv_drift <= 1e-10);
    CHECK(row.max_principle_margin >= -1e-12);
    CHECK(std::isfinite(row.l1_error));
  }
  CHECK(rows[1].l1_error < rows[0].l1_error);
}

TEST_CASE("single-level study matches a plain run") {
  const VelocityModel model = make_affine_model(0.5, 1.0, 1.0);
  const StepDensity data({-1.0, 0.0, 1.0}, {0.8, 0.4});
  OracleSpec oracle;
  oracle.kind = OracleSpec::Kind::riemann;
  oracle.density_left = 0.8;
  oracle.density_right = 0.4;

  StudyPlan plan;
  plan.theta = 0.0;
  plan.levels = {{100, 100}};
  const auto rows = run_study(plan, data, model, oracle, 0.5);
  REQUIRE(rows.size() == 1);

  SchemeConfig config;
  config.theta = 0.0;
  config.particle_intervals = 100;
  config.time_steps = 100;
  const Trajectory traj = run(data, config, model);
  const double direct = l1_error_vs_riemann(traj, model, 0.8, 0.4, 0.0, 0.5);
  CHECK(rows[0].l1_error == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("study CSV is deterministic without the wall-time column") {
  const VelocityModel model = make_affine_model(0.5, 1.0, 1.0);
  const StepDensity data({-1.0, 0.0, 1.0}, {0.8, 0.4});
  OracleSpec oracle;
  oracle.kind = OracleSpec::Kind::riemann;
  oracle.density_left = 0.8;
  oracle.density_right = 0.4;
  const StudyPlan plan = figure_one_plan();

  std::string first, second;
  {
    std::ostringstream out;
    write_study_csv(out, run_study(plan, data, model, oracle, 0.5),
                    {{"theta", "0"}, {"initial", "-1:0.8,0:0.4,1"}});
    first = out.str();
  }
  {
    std::ostringstream out;
    write_study_csv(out, run_study(plan, data, model, oracle, 0.5),
                    {{"theta", "0"}, {"initial", "-1:0.8,0:0.4,1"}});
    second = out.str();
  }
  CHECK(first == second);
  CHECK(first.find("# theta = 0") != std::string::npos);
  CHECK(first.find("wall_ms") == std::string::npos);
}

TEST_CASE("plot data lands on disk for initial and final times") {
  namespace fs = std::filesystem;
  const VelocityModel model = make_affine_model(0.5, 1.0, 1.0);
  const StepDensity data({-1.0, 0.0, 1.0}, {0.8, 0.4});
  SchemeConfig config;
  config.theta = 0.0;
  config.particle_intervals = 20;
  config.time_steps = 20;
  const Trajectory traj = run(data, config, model);

  OracleSpec oracle;
  oracle.kind = OracleSpec::Kind::riemann;
  oracle.density_left = 0.8;
  oracle.density_right = 0.4;

  const std::string prefix =
      (fs::temp_directory_path() / "ftl_plotdata_test").string();
  const std::vector<double> times{0.0, 1.0};
  emit_plotdata(traj, model, oracle, times, prefix);

  for (int idx : {0, 1}) {
    std::ifstream in(prefix + "_t" + std::to_string(idx) + ".csv");
    REQUIRE(in.good());
    std::string header;
    std::getline(in, header);
    CHECK(header == "x_left,x_right,value");
    int rows = 0;
    std::string line;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == config.particle_intervals);
    CHECK(fs::exists(prefix + "_oracle_t" + std::to_string(idx) + ".csv"));
  }
  // The t = T file uses the continuity extension: the final level.
  std::ifstream in(prefix + "_t1.csv");
  std::string header, first_row;
  std::getline(in, header);
  std::getline(in, first_row);
  std::ostringstream expected;
  expected << csv_number(traj.states.back().positions[0]);
  CHECK(first_row.substr(0, expected.str().size()) == expected.str());
}

TEST_CASE("diagnostics CSV shape") {
  const VelocityModel model = make_affine_model(0.5, 1.0, 1.0);
  const StepDensity data({-1.0, 0.0, 1.0}, {0.8, 0.4});
  SchemeConfig config;
  config.theta = 0.0;
  config.particle_intervals = 20;
  config.time_steps = 10;
  const DiscreteDensity density(run(data, config, model));
  std::ostringstream out;
  write_diagnostics_csv(out, density);
  std::istringstream in(out.str());
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 1 + density.level_count());
}

TEST_SUITE_END();
