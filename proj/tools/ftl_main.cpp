// Batch front end for the follow-the-leader particle solver: single runs,
// refinement studies, oracle profiles, and the property suites.
//
// Exit codes: 0 all checks pass, 1 numerical check failure, 2 configuration
// error.

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ftl/csv.hpp"
#include "ftl/godunov.hpp"
#include "ftl/reconstruction.hpp"
#include "ftl/residuals.hpp"
#include "ftl/riemann.hpp"
#include "ftl/scheme.hpp"
#include "ftl/step_density.hpp"
#include "ftl/study.hpp"
#include "ftl/velocity.hpp"

namespace {

using namespace ftl;

struct ModelOptions {
  std::string velocity = "affine:a=0.5,b=1";
  double max_density = 1.0;
};

struct InitialOptions {
  std::string initial = "steps:-1:0.8,0:0.4,1";
  std::string initial_file;
};

void add_model_options(CLI::App* cmd, ModelOptions& options) {
  cmd->add_option("--velocity", options.velocity,
                  "velocity law, e.g. affine:a=0.5,b=1, greenshields:vmax=1, "
                  "tabulated:file=PATH")
      ->capture_default_str();
  cmd->add_option("--max-density", options.max_density, "maximal density R")
      ->capture_default_str();
}

void add_initial_options(CLI::App* cmd, InitialOptions& options) {
  cmd->add_option("--initial", options.initial,
                  "step data steps:x0:v0,x1:v1,...,xK (last token is the "
                  "right endpoint)")
      ->capture_default_str();
  cmd->add_option("--initial-file", options.initial_file,
                  "file with one 'x value' pair per line, right endpoint last");
}

VelocityModel build_model(const ModelOptions& options) {
  return make_model(options.velocity, options.max_density);
}

StepDensity build_initial(const InitialOptions& options) {
  if (!options.initial_file.empty())
    return load_step_density(options.initial_file);
  const std::string prefix = "steps:";
  if (options.initial.rfind(prefix, 0) != 0)
    throw std::invalid_argument(
        "--initial must look like steps:x0:v0,...,xK (got '" +
        options.initial + "')");
  return parse_step_density(options.initial.substr(prefix.size()));
}

// Plain "key = value" config support: values fill in for flags the command
// line leaves unset, so explicit flags always win. The value may contain '='
// (velocity specs do); only the first one separates the key.
std::vector<std::string> apply_config_file(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + i, args.begin() + i + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + i);
      break;
    }
  }
  if (path.empty()) return args;

  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  auto trim = [](std::string text) {
    const auto first = text.find_first_not_of(" \t");
    if (first == std::string::npos) return std::string();
    const auto last = text.find_last_not_of(" \t");
    return text.substr(first, last - first + 1);
  };
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config file: expected key = value, got '" +
                                  line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("config file: empty key in '" + line + "'");
    const std::string flag = "--" + key;
    bool given = false;
    for (const std::string& arg : args)
      given = given || arg == flag || arg.rfind(flag + "=", 0) == 0;
    if (!given) args.push_back(flag + "=" + value);
  }
  return args;
}

std::vector<double> parse_time_list(const std::string& text) {
  std::vector<double> times;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) times.push_back(std::stod(item));
  return times;
}

std::vector<StudyLevel> parse_levels(const std::string& text) {
  std::vector<StudyLevel> levels;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("--levels expects N:M pairs, got '" + item + "'");
    levels.push_back({std::stoi(item.substr(0, colon)),
                      std::stoi(item.substr(colon + 1))});
  }
  return levels;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write to '" + path + "'");
  return out;
}

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

struct RunOptions {
  ModelOptions model;
  InitialOptions initial;
  double theta = 0.0;
  int particles = 100;
  int steps = 100;
  double horizon = 1.0;
  double cfl_margin = 1e-6;
  double solver_tol = 1e-13;
  bool no_checks = false;
  std::string snapshots;
  std::string oracle = "none";
  std::string output = "ftl_run";
};

int command_run(const RunOptions& options) {
  const VelocityModel model = build_model(options.model);
  const StepDensity data = build_initial(options.initial);

  SchemeConfig config;
  config.theta = options.theta;
  config.particle_intervals = options.particles;
  config.time_steps = options.steps;
  config.horizon = options.horizon;
  config.cfl_margin = options.cfl_margin;
  config.solver_tol = options.solver_tol;
  config.run_checks = !options.no_checks;

  if (config.time_steps > 0) {
    const CflReport report = check_cfl(config, model, data.total_mass());
    std::cout << "cfl: " << report.summary() << "\n";
    if (!report.pass) {
      std::cerr << "error: CFL condition fails\n";
      return 2;
    }
  }

  const Trajectory trajectory = run(data, config, model);

  auto trajectory_out = open_output(options.output + "_trajectory.csv");
  trajectory_out << "m,t,i,x\n";
  for (const ParticleState& state : trajectory.states) {
    const double t = state.time_index * trajectory.time_step;
    for (std::size_t i = 0; i < state.positions.size(); ++i)
      trajectory_out << state.time_index << ',' << csv_number(t) << ',' << i
                     << ',' << csv_number(state.positions[i]) << "\n";
  }

  const DiscreteDensity density(trajectory);
  auto diagnostics_out = open_output(options.output + "_diagnostics.csv");
  write_diagnostics_csv(diagnostics_out, density);

  const OracleSpec oracle = parse_oracle_spec(options.oracle);
  if (!options.snapshots.empty()) {
    const std::vector<double> times = parse_time_list(options.snapshots);
    emit_plotdata(trajectory, model, oracle, times, options.output);
  }

  std::cout << "run: " << trajectory.level_count() - 1 << " steps, "
            << options.particles << " intervals, final TV "
            << csv_number(state_total_variation(trajectory.states.back()))
            << ", outputs at " << options.output << "_*.csv\n";
  return 0;
}

// ---------------------------------------------------------------------------
// study
// ---------------------------------------------------------------------------

struct StudyOptions {
  ModelOptions model;
  InitialOptions initial;
  double theta = 0.0;
  double horizon = 1.0;
  double cfl_margin = 1e-6;
  double solver_tol = 1e-13;
  std::string levels;
  int base_n = 100;
  int level_count = 3;
  double m_coeff = 0.1;
  double m_power = 1.5;
  bool entropy_schedule = false;
  std::string oracle = "none";
  double sample_time = 0.5;
  std::string output = "ftl_study";
};

int command_study(const StudyOptions& options) {
  const VelocityModel model = build_model(options.model);
  const StepDensity data = build_initial(options.initial);

  StudyPlan plan;
  plan.theta = options.theta;
  plan.horizon = options.horizon;
  plan.cfl_margin = options.cfl_margin;
  plan.solver_tol = options.solver_tol;
  plan.require_entropy_schedule = options.entropy_schedule;
  plan.levels = options.levels.empty()
                    ? default_entropy_schedule(options.base_n,
                                               options.level_count,
                                               options.m_coeff, options.m_power)
                    : parse_levels(options.levels);

  const OracleSpec oracle = parse_oracle_spec(options.oracle);
  const auto rows = run_study(plan, data, model, oracle, options.sample_time);

  const std::vector<std::pair<std::string, std::string>> provenance = {
      {"velocity", options.model.velocity},
      {"max_density", csv_number(options.model.max_density)},
      {"initial", options.initial.initial_file.empty()
                      ? options.initial.initial
                      : options.initial.initial_file},
      {"theta", csv_number(options.theta)},
      {"horizon", csv_number(options.horizon)},
      {"cfl_margin", csv_number(options.cfl_margin)},
      {"solver_tol", csv_number(options.solver_tol)},
      {"oracle", options.oracle},
      {"sample_time", csv_number(options.sample_time)},
      {"entropy_schedule", options.entropy_schedule ? "1" : "0"},
      {"levels", [&] {
         std::string text;
         for (const StudyLevel& level : plan.levels) {
           if (!text.empty()) text += ',';
           text += std::to_string(level.particle_intervals) + ':' +
                   std::to_string(level.time_steps);
         }
         return text;
       }()},
  };

  auto csv_out = open_output(options.output + ".csv");
  write_study_csv(csv_out, rows, provenance);

  // Human-readable table with wall times on stdout; the CSV stays
  // byte-identical across reruns.
  write_study_csv(std::cout, rows, provenance, /*include_wall_time=*/true);
  return 0;
}

// ---------------------------------------------------------------------------
// oracle
// ---------------------------------------------------------------------------

struct OracleOptions {
  ModelOptions model;
  InitialOptions initial;
  std::string oracle = "riemann:rl=0.8,rr=0.4,x0=0";
  double time = 0.5;
  std::string window;
  int samples = 2001;
  std::string output = "ftl_oracle.csv";
};

int command_oracle(const OracleOptions& options) {
  const VelocityModel model = build_model(options.model);
  const OracleSpec oracle = parse_oracle_spec(options.oracle);
  auto out = open_output(options.output);

  if (oracle.kind == OracleSpec::Kind::riemann) {
    double lo = 0.0, hi = 0.0;
    if (!options.window.empty()) {
      const auto colon = options.window.find(':');
      if (colon == std::string::npos)
        throw std::invalid_argument("--window expects lo:hi");
      lo = std::stod(options.window.substr(0, colon));
      hi = std::stod(options.window.substr(colon + 1));
    } else {
      const double spread =
          (model.max_abs_flux_deriv() + 1.0) * std::max(options.time, 1.0);
      lo = oracle.jump_location - spread;
      hi = oracle.jump_location + spread;
    }
    const RiemannFan fan =
        solve_riemann_fan(model, oracle.density_left, oracle.density_right);
    out << "x,value\n";
    for (int s = 0; s < options.samples; ++s) {
      const double x = lo + (hi - lo) * s / (options.samples - 1);
      const double value =
          options.time > 0.0
              ? fan.value_at((x - oracle.jump_location) / options.time)
              : (x < oracle.jump_location ? oracle.density_left
                                          : oracle.density_right);
      out << csv_number(x) << ',' << csv_number(value) << "\n";
    }
    std::cout << "oracle: riemann profile at t = " << options.time << " in "
              << options.output << "\n";
    return 0;
  }
  if (oracle.kind == OracleSpec::Kind::godunov) {
    const StepDensity data = build_initial(options.initial);
    const StepDensity reference =
        godunov_reference(model, data, options.time, oracle.cells);
    out << "x_left,x_right,value\n";
    for (int j = 0; j < reference.cell_count(); ++j)
      out << csv_number(reference.edges()[j]) << ','
          << csv_number(reference.edges()[j + 1]) << ','
          << csv_number(reference.values()[j]) << "\n";
    std::cout << "oracle: godunov reference (" << oracle.cells << " cells) at t = "
              << options.time << " in " << options.output << "\n";
    return 0;
  }
  throw std::invalid_argument("oracle subcommand needs --oracle riemann:... or godunov:...");
}

// ---------------------------------------------------------------------------
// check: property suites.
// ---------------------------------------------------------------------------

struct CheckOptions {
  int trials = 60;
  int pairs = 200;
  unsigned long long seed = 20240811ULL;
  std::string output;
};

struct CheckTally {
  int failed = 0;
  void record(const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] %s%s%s\n", pass ? "ok" : "FAIL", name.c_str(),
                detail.empty() ? "" : ": ", detail.c_str());
    if (!pass) ++failed;
  }
};

StepDensity random_step_density(std::mt19937_64& rng, double max_value,
                                bool allow_vacuum) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int cells = 1 + static_cast<int>(rng() % 6);
  std::vector<double> edges{-2.0 + 4.0 * unit(rng)};
  std::vector<double> values;
  bool has_mass = false;
  for (int k = 0; k < cells; ++k) {
    edges.push_back(edges.back() + 0.15 + 1.2 * unit(rng));
    const bool vacuum =
        allow_vacuum && cells >= 3 && k > 0 && k + 1 < cells && unit(rng) < 0.3;
    values.push_back(vacuum ? 0.0 : max_value * (0.1 + 0.9 * unit(rng)));
    has_mass = has_mass || values.back() > 0.0;
  }
  if (!has_mass) values.front() = 0.5 * max_value;
  return StepDensity(std::move(edges), std::move(values));
}

int command_check(const CheckOptions& options) {
  CheckTally tally;
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  {  // CFL gate.
    const VelocityModel model = make_affine_model(0.5, 1.0, 1.0);
    SchemeConfig config;
    config.theta = 1.0;
    config.particle_intervals = 100;
    config.horizon = 1.0;
    config.time_steps = 83;
    const bool reject = !check_cfl(config, model, 1.2).pass;
    config.time_steps = 85;
    const bool accept = check_cfl(config, model, 1.2).pass;
    config.theta = 0.0;
    config.time_steps = 1;
    const bool implicit_free = check_cfl(config, model, 1.2).pass;
    tally.record("cfl gate", reject && accept && implicit_free, "");
  }

  {  // Implicit solver closed forms.
    const VelocityModel model = make_affine_model(0.5, 1.0, 1.0);
    const double quadratic =
        implicit_gap_solve(0.0, 2.0, 0.5, 0.1, 0.0, model, 1e-14);
    const double expected = (2.05 - std::sqrt(2.05 * 2.05 - 0.2)) / 2.0;
    tally.record("implicit solve closed forms",
                 std::abs(quadratic - expected) <= 1e-12 &&
                     implicit_gap_solve(0.37, 2.0, 0.5, 0.1, 1.0, model, 1e-13) ==
                         0.37,
                 "");
  }

  {  // Randomized stability sweep.
    bool stable = true;
    std::string note;
    for (int trial = 0; trial < options.trials && stable; ++trial) {
      const double max_density = 0.6 + 1.2 * unit(rng);
      const VelocityModel model = make_affine_model(-0.5 + 1.5 * unit(rng),
                                                    0.3 + 1.7 * unit(rng),
                                                    max_density);
      const StepDensity data = random_step_density(rng, max_density, true);
      SchemeConfig config;
      const double pick = unit(rng);
      config.theta = pick < 0.25 ? 0.0 : (pick > 0.75 ? 1.0 : unit(rng));
      config.particle_intervals = 8 + static_cast<int>(rng() % 33);
      config.horizon = 0.4 + 0.8 * unit(rng);
      config.time_steps = 1;
      const CflReport probe = check_cfl(config, model, data.total_mass());
      if (probe.min_time_steps > 400) continue;
      config.time_steps = std::max(probe.min_time_steps, 20) +
                          static_cast<int>(rng() % 40);
      try {
        const Trajectory traj = run(data, config, model);  // internal checks on
        const DiscreteDensity density(traj);
        for (int pair = 0; pair < 10; ++pair) {
          double t1 = config.horizon * unit(rng);
          double t2 = config.horizon * unit(rng);
          if (t1 > t2) std::swap(t1, t2);
          if (!time_continuity_check(density, t1, t2, model).pass) {
            stable = false;
            note = "time continuity bound failed";
          }
        }
      } catch (const std::exception& e) {
        stable = false;
        note = e.what();
      }
    }
    tally.record("stability sweep (" + std::to_string(options.trials) + " runs)",
                 stable, note);
  }

  {  // Interpolation inequality and metric properties.
    bool holds = true;
    for (int trial = 0; trial < options.pairs && holds; ++trial) {
      auto make_positive = [&]() {
        const int cells = 1 + static_cast<int>(rng() % 6);
        std::vector<double> e{-2.0 + 4.0 * unit(rng)};
        std::vector<double> v;
        for (int j = 0; j < cells; ++j) {
          e.push_back(e.back() + 0.1 + 1.0 * unit(rng));
          v.push_back(0.05 + unit(rng));
        }
        StepDensity raw(e, v);
        const double scale = 1.0 / raw.total_mass();
        for (double& value : v) value *= scale;
        return StepDensity(std::move(e), std::move(v));
      };
      const StepDensity a = make_positive();
      const StepDensity b = make_positive();
      const StepDensity c = make_positive();
      holds = holds && interpolation_bound_check(a, b).pass;
      const double ab = wasserstein_d1(a, b);
      holds = holds && ab == wasserstein_d1(b, a);
      holds = holds && ab <= wasserstein_d1(a, c) + wasserstein_d1(c, b) + 1e-12;
    }
    tally.record("interpolation inequality + d1 metric (" +
                     std::to_string(options.pairs) + " pairs)",
                 holds, "");
  }

  {  // Residual catalog on the figure-one shock case.
    const VelocityModel model = make_affine_model(0.5, 1.0, 1.0);
    const StepDensity data({-1.0, 0.0, 1.0}, {0.4, 0.8});
    SchemeConfig config;
    config.theta = 0.0;
    config.particle_intervals = 60;
    config.time_steps = 80;
    config.horizon = 1.0;
    const DiscreteDensity density(run(data, config, model));
    const auto bumps = bump_catalog(-1.5, 1.5, 1.0);

    bool reductions = true;
    double min_residual = std::numeric_limits<double>::infinity();
    std::ofstream residual_out;
    if (!options.output.empty()) {
      residual_out = open_output(options.output + "_residuals.csv");
      residual_out << "k,bump_id,residual\n";
    }
    for (int kk = 0; kk <= 10; ++kk) {
      const double k = kk / 10.0;
      for (const Bump& bump : bumps) {
        const double value = entropy_residual(density, model, k, bump);
        min_residual = std::min(min_residual, value);
        if (residual_out.is_open())
          residual_out << csv_number(k) << ',' << bump.id << ','
                       << csv_number(value) << "\n";
      }
    }
    for (const Bump& bump : bumps) {
      const double weak = weak_residual(density, model, bump);
      reductions =
          reductions &&
          std::abs(entropy_residual(density, model, 0.0, bump) - weak) <=
              1e-12 * std::max(1.0, std::abs(weak)) &&
          std::abs(entropy_residual(density, model, 1.0, bump) + weak) <= 1e-10;
    }
    tally.record("entropy residual catalog",
                 reductions && min_residual > -0.05,
                 "min residual = " + csv_number(min_residual));
  }

  std::printf("%d suite(s) failed\n", tally.failed);
  return tally.failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"follow-the-leader particle solver for 1D scalar conservation laws"};
  app.require_subcommand(1);

  std::string config_path_doc;
  RunOptions run_options;
  CLI::App* run_cmd = app.add_subcommand("run", "single simulation with CSV export");
  run_cmd->add_option("--config", config_path_doc,
                      "plain key = value file; flags override it");
  add_model_options(run_cmd, run_options.model);
  add_initial_options(run_cmd, run_options.initial);
  run_cmd->add_option("--theta", run_options.theta, "time discretization parameter in [0,1]")
      ->capture_default_str();
  run_cmd->add_option("--particles", run_options.particles, "particle interval count N")
      ->capture_default_str();
  run_cmd->add_option("--steps", run_options.steps, "time step count M")
      ->capture_default_str();
  run_cmd->add_option("--horizon", run_options.horizon, "time horizon T")
      ->capture_default_str();
  run_cmd->add_option("--cfl-margin", run_options.cfl_margin, "CFL safety factor")
      ->capture_default_str();
  run_cmd->add_option("--solver-tol", run_options.solver_tol, "implicit solve tolerance")
      ->capture_default_str();
  run_cmd->add_flag("--no-checks", run_options.no_checks, "disable per-step invariant checks");
  run_cmd->add_option("--snapshots", run_options.snapshots, "comma list of snapshot times");
  run_cmd->add_option("--oracle", run_options.oracle,
                      "overlay oracle: riemann:rl=..,rr=..,x0=.. or godunov:cells=..")
      ->capture_default_str();
  run_cmd->add_option("--output", run_options.output, "output path prefix")
      ->capture_default_str();

  StudyOptions study_options;
  CLI::App* study_cmd = app.add_subcommand("study", "refinement/convergence study");
  study_cmd->add_option("--config", config_path_doc,
                        "plain key = value file; flags override it");
  add_model_options(study_cmd, study_options.model);
  add_initial_options(study_cmd, study_options.initial);
  study_cmd->add_option("--theta", study_options.theta, "time discretization parameter")
      ->capture_default_str();
  study_cmd->add_option("--horizon", study_options.horizon, "time horizon T")
      ->capture_default_str();
  study_cmd->add_option("--cfl-margin", study_options.cfl_margin, "CFL safety factor")
      ->capture_default_str();
  study_cmd->add_option("--solver-tol", study_options.solver_tol, "implicit solve tolerance")
      ->capture_default_str();
  study_cmd->add_option("--levels", study_options.levels, "explicit N:M pairs, comma separated");
  study_cmd->add_option("--base-n", study_options.base_n, "base N for the default schedule")
      ->capture_default_str();
  study_cmd->add_option("--level-count", study_options.level_count, "levels in the default schedule")
      ->capture_default_str();
  study_cmd->add_option("--m-coeff", study_options.m_coeff, "M = ceil(coeff * N^power)")
      ->capture_default_str();
  study_cmd->add_option("--m-power", study_options.m_power, "M = ceil(coeff * N^power)")
      ->capture_default_str();
  study_cmd->add_flag("--entropy-schedule", study_options.entropy_schedule,
                      "require N/M strictly decreasing across levels");
  study_cmd->add_option("--oracle", study_options.oracle, "error oracle spec")
      ->capture_default_str();
  study_cmd->add_option("--sample-time", study_options.sample_time,
                        "time at which the L1 error is measured")
      ->capture_default_str();
  study_cmd->add_option("--output", study_options.output, "output path prefix")
      ->capture_default_str();

  OracleOptions oracle_options;
  CLI::App* oracle_cmd = app.add_subcommand("oracle", "evaluate an oracle profile");
  oracle_cmd->add_option("--config", config_path_doc,
                         "plain key = value file; flags override it");
  add_model_options(oracle_cmd, oracle_options.model);
  add_initial_options(oracle_cmd, oracle_options.initial);
  oracle_cmd->add_option("--oracle", oracle_options.oracle, "oracle spec")
      ->capture_default_str();
  oracle_cmd->add_option("--time", oracle_options.time, "evaluation time")
      ->capture_default_str();
  oracle_cmd->add_option("--window", oracle_options.window, "lo:hi sample window");
  oracle_cmd->add_option("--samples", oracle_options.samples, "sample count")
      ->capture_default_str();
  oracle_cmd->add_option("--output", oracle_options.output, "output CSV path")
      ->capture_default_str();

  CheckOptions check_options;
  CLI::App* check_cmd = app.add_subcommand("check", "run the property suites");
  check_cmd->add_option("--config", config_path_doc,
                        "plain key = value file; flags override it");
  check_cmd->add_option("--trials", check_options.trials, "randomized sweep size")
      ->capture_default_str();
  check_cmd->add_option("--pairs", check_options.pairs, "interpolation-inequality pairs")
      ->capture_default_str();
  check_cmd->add_option("--seed", check_options.seed, "RNG seed")
      ->capture_default_str();
  check_cmd->add_option("--output", check_options.output,
                        "path prefix for the residual report CSV");

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = apply_config_file(std::move(args));
    std::reverse(args.begin(), args.end());  // CLI11 consumes reversed args
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (run_cmd->parsed()) return command_run(run_options);
    if (study_cmd->parsed()) return command_study(study_options);
    if (oracle_cmd->parsed()) return command_oracle(oracle_options);
    if (check_cmd->parsed()) return command_check(check_options);
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
