#include "ftl/step_density.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ftl/numerics.hpp"

namespace ftl {

StepDensity::StepDensity(std::vector<double> edges, std::vector<double> values)
    : edges_(std::move(edges)), values_(std::move(values)) {
  if (edges_.size() < 2 || values_.size() + 1 != edges_.size())
    throw std::invalid_argument("step density: need K+1 edges for K cells");
  for (std::size_t k = 0; k + 1 < edges_.size(); ++k) {
    if (!std::isfinite(edges_[k]) || !(edges_[k] < edges_[k + 1]))
      throw std::invalid_argument("step density: edges must strictly increase");
  }
  if (!std::isfinite(edges_.back()))
    throw std::invalid_argument("step density: edges must be finite");

  CompensatedSum acc;
  cum_.reserve(edges_.size());
  cum_.push_back(0.0);
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!std::isfinite(values_[k]) || values_[k] < 0.0)
      throw std::invalid_argument("step density: values must be finite and >= 0");
    acc.add(values_[k] * (edges_[k + 1] - edges_[k]));
    cum_.push_back(acc.value());
  }
  mass_ = cum_.back();
  if (!(mass_ > 0.0))
    throw std::invalid_argument("step density: total mass must be positive");
}

StepDensity StepDensity::single_block(double lo, double hi, double value) {
  return StepDensity({lo, hi}, {value});
}

StepDensity StepDensity::from_blocks(
    const std::vector<std::tuple<double, double, double>>& blocks) {
  std::vector<double> edges, values;
  for (const auto& [lo, hi, value] : blocks) {
    if (edges.empty()) {
      edges.push_back(lo);
    } else if (lo < edges.back()) {
      throw std::invalid_argument("from_blocks: blocks must not overlap");
    } else if (lo > edges.back()) {
      values.push_back(0.0);  // explicit vacuum cell for the gap
      edges.push_back(lo);
    }
    values.push_back(value);
    edges.push_back(hi);
  }
  return StepDensity(std::move(edges), std::move(values));
}

double StepDensity::value_at(double x) const {
  if (x < edges_.front() || x >= edges_.back()) return 0.0;
  const auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
  return values_[static_cast<std::size_t>(it - edges_.begin()) - 1];
}

double StepDensity::cdf(double x) const {
  if (x <= edges_.front()) return 0.0;
  if (x >= edges_.back()) return mass_;
  const auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
  const std::size_t k = static_cast<std::size_t>(it - edges_.begin()) - 1;
  return cum_[k] + values_[k] * (x - edges_[k]);
}

double StepDensity::total_variation() const {
  CompensatedSum acc;
  acc.add(std::abs(values_.front()));
  for (std::size_t k = 0; k + 1 < values_.size(); ++k)
    acc.add(std::abs(values_[k + 1] - values_[k]));
  acc.add(std::abs(values_.back()));
  return acc.value();
}

double StepDensity::support_min() const {
  for (std::size_t k = 0; k < values_.size(); ++k)
    if (values_[k] > 0.0) return edges_[k];
  return edges_.front();  // unreachable: mass > 0
}

double StepDensity::support_max() const {
  for (std::size_t k = values_.size(); k-- > 0;)
    if (values_[k] > 0.0) return edges_[k + 1];
  return edges_.back();
}

double StepDensity::max_value() const {
  return *std::max_element(values_.begin(), values_.end());
}

std::vector<double> place_particle_positions(const StepDensity& density,
                                             int n_intervals) {
  if (n_intervals < 1)
    throw std::invalid_argument("placement: need at least one interval");
  const auto edges = density.edges();
  const auto values = density.values();
  const auto cum = density.cumulative();
  const double mass = density.total_mass();
  const double interval_mass = mass / n_intervals;

  std::vector<double> positions;
  positions.reserve(static_cast<std::size_t>(n_intervals) + 1);
  positions.push_back(density.support_min());

  std::size_t k = 0;
  const std::size_t cells = values.size();
  for (int i = 1; i <= n_intervals; ++i) {
    const double target =
        (i == n_intervals) ? mass : std::min(interval_mass * i, mass);
    while (k < cells && (cum[k + 1] < target || values[k] <= 0.0)) ++k;
    if (k >= cells)
      throw std::runtime_error("placement: ran past the support (mass bookkeeping)");
    if (target == cum[k + 1]) {
      positions.push_back(edges[k + 1]);
    } else {
      positions.push_back(
          std::min(edges[k] + (target - cum[k]) / values[k], edges[k + 1]));
    }
  }

  for (std::size_t i = 0; i + 1 < positions.size(); ++i)
    if (!(positions[i] < positions[i + 1]))
      throw std::runtime_error(
          "placement: positions collapsed; interval count too large for the "
          "floating-point resolution of this density");
  return positions;
}

ParticleState place_particles(const StepDensity& density, int n_intervals) {
  ParticleState state;
  state.positions = place_particle_positions(density, n_intervals);
  state.interval_mass = density.total_mass() / n_intervals;
  state.time_index = 0;
  return state;
}

StepDensity parse_step_density(const std::string& text) {
  std::vector<double> edges, values;
  std::stringstream ss(text);
  std::string token;
  std::vector<std::string> tokens;
  while (std::getline(ss, token, ',')) tokens.push_back(token);
  if (tokens.size() < 2)
    throw std::invalid_argument("step data: need at least 'x:v,x_end'");
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto colon = tokens[i].find(':');
    if (i + 1 == tokens.size()) {
      if (colon != std::string::npos)
        throw std::invalid_argument("step data: last token is the right endpoint");
      edges.push_back(std::stod(tokens[i]));
    } else {
      if (colon == std::string::npos)
        throw std::invalid_argument("step data: expected 'x:value'");
      edges.push_back(std::stod(tokens[i].substr(0, colon)));
      values.push_back(std::stod(tokens[i].substr(colon + 1)));
    }
  }
  return StepDensity(std::move(edges), std::move(values));
}

StepDensity load_step_density(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open initial data file '" + path + "'");
  std::vector<double> edges, values;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    double x = 0.0, v = 0.0;
    if (ls >> x) {
      if (ls >> v) {
        edges.push_back(x);
        values.push_back(v);
      } else {
        edges.push_back(x);  // right endpoint
      }
    }
  }
  if (edges.size() != values.size() + 1)
    throw std::invalid_argument(
        "initial data file: last line must hold the right endpoint alone");
  return StepDensity(std::move(edges), std::move(values));
}

}  // namespace ftl
