#include "ftl/study.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "ftl/csv.hpp"
#include "ftl/godunov.hpp"

namespace ftl {

namespace {

double parse_number_field(const std::string& s) {
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size())
    throw std::invalid_argument("oracle: bad number '" + s + "'");
  return v;
}

SchemeConfig level_config(const StudyPlan& plan, const StudyLevel& level) {
  SchemeConfig config;
  config.theta = plan.theta;
  config.particle_intervals = level.particle_intervals;
  config.time_steps = level.time_steps;
  config.horizon = plan.horizon;
  config.cfl_margin = plan.cfl_margin;
  config.solver_tol = plan.solver_tol;
  return config;
}

StepDensity slice_of_state(const ParticleState& state) {
  std::vector<double> edges(state.positions.begin(), state.positions.end());
  std::vector<double> values(state.interval_count());
  for (int i = 0; i < state.interval_count(); ++i)
    values[i] = state.local_density(i);
  return StepDensity(std::move(edges), std::move(values));
}

}  // namespace

OracleSpec parse_oracle_spec(const std::string& text) {
  OracleSpec spec;
  const auto colon = text.find(':');
  const std::string kind =
      colon == std::string::npos ? text : text.substr(0, colon);
  const std::string args =
      colon == std::string::npos ? "" : text.substr(colon + 1);

  std::vector<std::pair<std::string, std::string>> kv;
  std::stringstream ss(args);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("oracle: expected key=value, got '" + item + "'");
    kv.emplace_back(item.substr(0, eq), item.substr(eq + 1));
  }

  if (kind == "riemann") {
    spec.kind = OracleSpec::Kind::riemann;
    bool got_l = false, got_r = false;
    for (const auto& [key, value] : kv) {
      if (key == "rl") { spec.density_left = parse_number_field(value); got_l = true; }
      else if (key == "rr") { spec.density_right = parse_number_field(value); got_r = true; }
      else if (key == "x0") { spec.jump_location = parse_number_field(value); }
      else throw std::invalid_argument("oracle riemann: unknown key '" + key + "'");
    }
    if (!got_l || !got_r)
      throw std::invalid_argument("oracle riemann: need rl=... and rr=...");
    return spec;
  }
  if (kind == "godunov") {
    spec.kind = OracleSpec::Kind::godunov;
    for (const auto& [key, value] : kv) {
      if (key == "cells") spec.cells = static_cast<int>(parse_number_field(value));
      else throw std::invalid_argument("oracle godunov: unknown key '" + key + "'");
    }
    return spec;
  }
  if (kind == "none") return spec;
  throw std::invalid_argument("unknown oracle kind '" + kind + "'");
}

void validate_plan(const StudyPlan& plan, const VelocityModel& model,
                   double total_mass) {
  if (plan.levels.empty()) return;
  std::string cfl_failures;
  for (std::size_t j = 0; j < plan.levels.size(); ++j) {
    const CflReport report =
        check_cfl(level_config(plan, plan.levels[j]), model, total_mass);
    if (!report.pass)
      cfl_failures += "\n  level " + std::to_string(j) + ": " + report.summary();
  }
  if (!cfl_failures.empty())
    throw std::invalid_argument("study levels fail CFL:" + cfl_failures);
  if (plan.require_entropy_schedule) {
    for (std::size_t j = 0; j + 1 < plan.levels.size(); ++j) {
      const double ratio_a = static_cast<double>(plan.levels[j].particle_intervals) /
                             plan.levels[j].time_steps;
      const double ratio_b =
          static_cast<double>(plan.levels[j + 1].particle_intervals) /
          plan.levels[j + 1].time_steps;
      if (!(ratio_b < ratio_a))
        throw std::invalid_argument(
            "entropy schedule requires N/M strictly decreasing; level " +
            std::to_string(j + 1) + " breaks it");
    }
  }
}

std::vector<StudyRow> run_study(const StudyPlan& plan, const StepDensity& data,
                                const VelocityModel& model,
                                const OracleSpec& oracle, double sample_time) {
  std::vector<StudyRow> rows(plan.levels.size());
  if (plan.levels.empty()) return rows;
  validate_plan(plan, model, data.total_mass());

  auto run_level = [&](std::size_t j) {
    StudyRow row;
    const StudyLevel& level = plan.levels[j];
    row.particle_intervals = level.particle_intervals;
    row.time_steps = level.time_steps;
    const SchemeConfig config = level_config(plan, level);
    row.time_step = config.time_step();
    row.interval_mass = data.total_mass() / level.particle_intervals;
    row.step_ratio = row.time_step / row.interval_mass;
    row.cfl_pass = true;

    const auto start = std::chrono::steady_clock::now();
    const Trajectory trajectory = run(data, config, model);
    row.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - start)
                      .count();

    double max_density_seen = 0.0;
    double max_drift = -std::numeric_limits<double>::infinity();
    double prev_tv = state_total_variation(trajectory.states.front());
    for (const ParticleState& state : trajectory.states) {
      for (int i = 0; i < state.interval_count(); ++i)
        max_density_seen = std::max(max_density_seen, state.local_density(i));
      if (state.time_index > 0) {
        const double tv = state_total_variation(state);
        max_drift = std::max(max_drift, tv - prev_tv);
        prev_tv = tv;
      }
    }
    row.max_principle_margin = model.max_density() - max_density_seen;
    row.max_tv_drift =
        trajectory.level_count() > 1 ? max_drift : 0.0;

    switch (oracle.kind) {
      case OracleSpec::Kind::riemann:
        row.l1_error = l1_error_vs_riemann(
            trajectory, model, oracle.density_left, oracle.density_right,
            oracle.jump_location, sample_time);
        break;
      case OracleSpec::Kind::godunov: {
        const StepDensity reference =
            godunov_reference(model, data, sample_time, oracle.cells);
        row.l1_error =
            l1_distance(slice_of_state(trajectory.state_at_time(sample_time)),
                        reference);
        break;
      }
      case OracleSpec::Kind::none:
        row.l1_error = std::numeric_limits<double>::quiet_NaN();
        break;
    }
    return row;
  };

  std::vector<std::future<StudyRow>> futures;
  futures.reserve(plan.levels.size());
  for (std::size_t j = 0; j < plan.levels.size(); ++j)
    futures.push_back(std::async(std::launch::async, run_level, j));
  for (std::size_t j = 0; j < plan.levels.size(); ++j) rows[j] = futures[j].get();
  return rows;
}

std::vector<StudyLevel> default_entropy_schedule(int base_n, int level_count,
                                                 double m_coeff,
                                                 double m_power) {
  if (base_n < 1 || level_count < 1)
    throw std::invalid_argument("schedule: need positive base N and level count");
  std::vector<StudyLevel> levels;
  levels.reserve(level_count);
  int n = base_n;
  for (int j = 0; j < level_count; ++j) {
    const int m = static_cast<int>(
        std::ceil(m_coeff * std::pow(static_cast<double>(n), m_power)));
    levels.push_back({n, std::max(m, 1)});
    n *= 2;
  }
  return levels;
}

void write_study_csv(
    std::ostream& out, const std::vector<StudyRow>& rows,
    const std::vector<std::pair<std::string, std::string>>& provenance,
    bool include_wall_time) {
  for (const auto& [key, value] : provenance)
    out << "# " << key << " = " << value << "\n";
  out << "n,m,tau,ell,tau_over_ell,l1_error,max_tv_drift,max_principle_margin";
  if (include_wall_time) out << ",wall_ms";
  out << "\n";
  for (const StudyRow& row : rows) {
    out << row.particle_intervals << ',' << row.time_steps << ','
        << csv_number(row.time_step) << ',' << csv_number(row.interval_mass)
        << ',' << csv_number(row.step_ratio) << ',' << csv_number(row.l1_error)
        << ',' << csv_number(row.max_tv_drift) << ','
        << csv_number(row.max_principle_margin);
    if (include_wall_time) out << ',' << csv_number(row.wall_ms);
    out << "\n";
  }
}

void emit_plotdata(const Trajectory& trajectory, const VelocityModel& model,
                   const OracleSpec& oracle, std::span<const double> times,
                   const std::string& path_prefix) {
  for (std::size_t idx = 0; idx < times.size(); ++idx) {
    const double t = times[idx];
    const ParticleState& state = trajectory.state_at_time(t);

    std::ofstream slice_out(path_prefix + "_t" + std::to_string(idx) + ".csv");
    if (!slice_out)
      throw std::invalid_argument("emit_plotdata: cannot write to '" +
                                  path_prefix + "'");
    slice_out << "x_left,x_right,value\n";
    for (int i = 0; i < state.interval_count(); ++i)
      slice_out << csv_number(state.positions[i]) << ','
                << csv_number(state.positions[i + 1]) << ','
                << csv_number(state.local_density(i)) << "\n";

    if (oracle.kind == OracleSpec::Kind::none) continue;
    std::ofstream oracle_out(path_prefix + "_oracle_t" + std::to_string(idx) +
                             ".csv");
    if (!oracle_out)
      throw std::invalid_argument("emit_plotdata: cannot write to '" +
                                  path_prefix + "'");
    if (oracle.kind == OracleSpec::Kind::riemann) {
      const RiemannFan fan = solve_riemann_fan(model, oracle.density_left,
                                               oracle.density_right);
      oracle_out << "x,value\n";
      const double lo = state.positions.front();
      const double hi = state.positions.back();
      const int samples = 2001;
      for (int s = 0; s < samples; ++s) {
        const double x = lo + (hi - lo) * s / (samples - 1);
        const double value =
            t > 0.0 ? fan.value_at((x - oracle.jump_location) / t)
                    : (x < oracle.jump_location ? fan.density_left
                                                : fan.density_right);
        oracle_out << csv_number(x) << ',' << csv_number(value) << "\n";
      }
    } else {
      const StepDensity initial = slice_of_state(trajectory.states.front());
      const StepDensity reference =
          godunov_reference(model, initial, t, oracle.cells);
      oracle_out << "x_left,x_right,value\n";
      for (int j = 0; j < reference.cell_count(); ++j)
        oracle_out << csv_number(reference.edges()[j]) << ','
                   << csv_number(reference.edges()[j + 1]) << ','
                   << csv_number(reference.values()[j]) << "\n";
    }
  }
}

void write_diagnostics_csv(std::ostream& out, const DiscreteDensity& density) {
  out << "m,t,tv,mass,d1_from_initial\n";
  for (int m = 0; m < density.level_count(); ++m) {
    const double t = m * density.time_step();
    out << m << ',' << csv_number(t) << ','
        << csv_number(density.slice_tv(m)) << ','
        << csv_number(density.slice_mass(m)) << ','
        << csv_number(wasserstein_d1(density.slice(m), density.slice(0)))
        << "\n";
  }
}

}  // namespace ftl
