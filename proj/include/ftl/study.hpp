#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ftl/reconstruction.hpp"
#include "ftl/riemann.hpp"
#include "ftl/scheme.hpp"
#include "ftl/step_density.hpp"
#include "ftl/velocity.hpp"

namespace ftl {

struct StudyLevel {
  int particle_intervals = 0;
  int time_steps = 0;
};

// Refinement study: a list of (N, M) pairs sharing theta and horizon. With
// require_entropy_schedule set, N/M must strictly decrease along the list
// (the discrete form of the tau = o(ell) requirement).
struct StudyPlan {
  std::vector<StudyLevel> levels;
  double theta = 0.0;
  double horizon = 1.0;
  double cfl_margin = 1e-6;
  double solver_tol = 1e-13;
  bool require_entropy_schedule = false;
};

struct OracleSpec {
  enum class Kind { none, riemann, godunov };
  Kind kind = Kind::none;
  double density_left = 0.0;   // riemann
  double density_right = 0.0;  // riemann
  double jump_location = 0.0;  // riemann
  int cells = 20000;           // godunov
};

OracleSpec parse_oracle_spec(const std::string& text);  // "riemann:rl=..,rr=..,x0=.."

struct StudyRow {
  int particle_intervals = 0;
  int time_steps = 0;
  double time_step = 0.0;
  double interval_mass = 0.0;
  double step_ratio = 0.0;  // tau / ell
  double l1_error = 0.0;    // vs the configured oracle; NaN when none
  double max_tv_drift = 0.0;
  double max_principle_margin = 0.0;  // R - max local density
  double wall_ms = 0.0;
  bool cfl_pass = false;
  std::string note;
};

// Throws std::invalid_argument when a level fails CFL or the entropy schedule
// requirement is violated; all levels are vetted before any run starts.
void validate_plan(const StudyPlan& plan, const VelocityModel& model,
                   double total_mass);

// Runs every level (concurrently) and assembles rows in plan order. The L1
// error compares the slice at sample_time against the configured oracle.
std::vector<StudyRow> run_study(const StudyPlan& plan, const StepDensity& data,
                                const VelocityModel& model,
                                const OracleSpec& oracle, double sample_time);

// N doubling from base_n, M = ceil(m_coeff * N^m_power). The default
// m_power = 3/2 makes N/M shrink, the simplest schedule satisfying both the
// CFL condition and the entropy-identification scaling.
std::vector<StudyLevel> default_entropy_schedule(int base_n, int level_count,
                                                 double m_coeff = 0.1,
                                                 double m_power = 1.5);

// CSV report; provenance key/value pairs land in '#' comment lines. The wall
// time column is excluded unless requested: it is the one nondeterministic
// column, and re-running an identical config must produce identical bytes.
void write_study_csv(
    std::ostream& out, const std::vector<StudyRow>& rows,
    const std::vector<std::pair<std::string, std::string>>& provenance,
    bool include_wall_time = false);

// One CSV per requested time with "x_left,x_right,value" rows, plus an
// "_oracle" companion profile when an oracle is configured.
void emit_plotdata(const Trajectory& trajectory, const VelocityModel& model,
                   const OracleSpec& oracle, std::span<const double> times,
                   const std::string& path_prefix);

// Diagnostics CSV: m,t,tv,mass,d1_from_initial rows.
void write_diagnostics_csv(std::ostream& out, const DiscreteDensity& density);

}  // namespace ftl
