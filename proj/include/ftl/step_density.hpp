#pragma once

#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "ftl/particle_state.hpp"

namespace ftl {

// Compactly supported piecewise-constant density: values[k] on
// [edges[k], edges[k+1]), zero outside [edges.front(), edges.back()].
// Cells with value zero model vacuum. Immutable after construction.
class StepDensity {
 public:
  StepDensity(std::vector<double> edges, std::vector<double> values);

  static StepDensity single_block(double lo, double hi, double value);
  // Disjoint (lo, hi, value) blocks in increasing position order; gaps get
  // explicit zero cells so the cell list stays contiguous.
  static StepDensity from_blocks(
      const std::vector<std::tuple<double, double, double>>& blocks);

  std::span<const double> edges() const { return edges_; }
  std::span<const double> values() const { return values_; }
  // Cumulative mass at each edge; cumulative().back() == total_mass().
  std::span<const double> cumulative() const { return cum_; }
  int cell_count() const { return static_cast<int>(values_.size()); }

  double value_at(double x) const;
  double cdf(double x) const;  // mass over (-inf, x]
  double mass_between(double a, double b) const { return cdf(b) - cdf(a); }
  double total_mass() const { return mass_; }
  // Boundary values plus absolute jumps: |v_0| + sum |v_{k+1}-v_k| + |v_last|.
  double total_variation() const;
  double support_min() const;  // left edge of the first positive cell
  double support_max() const;
  double max_value() const;

 private:
  std::vector<double> edges_;
  std::vector<double> values_;
  std::vector<double> cum_;
  double mass_ = 0.0;
};

// Quantile placement: returns n_intervals + 1 strictly increasing positions
// with exactly total_mass / n_intervals between consecutive ones. Vacuum
// plateaus are skipped by the min convention of the placement rule.
std::vector<double> place_particle_positions(const StepDensity& density,
                                             int n_intervals);
ParticleState place_particles(const StepDensity& density, int n_intervals);

// "-1:0.8,0:0.4,1": breakpoint:value pairs, last token the right endpoint.
StepDensity parse_step_density(const std::string& text);
// One "breakpoint value" pair per line, final line the right endpoint alone.
StepDensity load_step_density(const std::string& path);

}  // namespace ftl
