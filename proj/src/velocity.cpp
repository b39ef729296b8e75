#include "ftl/velocity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace ftl {

namespace {

constexpr int kMonotonicitySamples = 10001;  // endpoints included
constexpr int kExtremaScanSamples = 4097;

double parse_number(const std::string& s) {
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("bad number: '" + s + "'");
  return v;
}

// "a=0.5,b=1" -> key/value pairs.
std::vector<std::pair<std::string, std::string>> parse_kv(
    const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("expected key=value, got '" + item + "'");
    out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
  }
  return out;
}

}  // namespace

VelocityModel::VelocityModel(double max_density,
                             std::function<double(double)> velocity,
                             std::function<double(double)> velocity_deriv,
                             double lipschitz, std::optional<AffineLaw> affine,
                             std::vector<double> flux_extrema_hints)
    : max_density_(max_density),
      velocity_(std::move(velocity)),
      velocity_deriv_(std::move(velocity_deriv)),
      lipschitz_(lipschitz),
      affine_(affine),
      flux_extrema_(std::move(flux_extrema_hints)) {
  if (!(max_density_ > 0.0) || !std::isfinite(max_density_))
    throw std::invalid_argument("max density must be positive and finite");
  if (!(lipschitz_ > 0.0) || !std::isfinite(lipschitz_))
    throw std::invalid_argument("Lipschitz bound must be positive and finite");

  double max_abs_deriv = 0.0;
  for (int i = 0; i < kMonotonicitySamples; ++i) {
    const double rho =
        max_density_ * static_cast<double>(i) / (kMonotonicitySamples - 1);
    const double d = velocity_deriv_(rho);
    if (!(d < 0.0))
      throw std::invalid_argument(
          "velocity law is not strictly decreasing (v' >= 0 at rho = " +
          std::to_string(rho) + ")");
    max_abs_deriv = std::max(max_abs_deriv, std::abs(d));
  }
  if (lipschitz_ < max_abs_deriv)
    throw std::invalid_argument(
        "Lipschitz bound smaller than a sampled |v'| value");

  velocity_at_zero_ = velocity_(0.0);
  velocity_at_max_ = velocity_(max_density_);
  if (!std::isfinite(velocity_at_zero_) || !std::isfinite(velocity_at_max_))
    throw std::invalid_argument("velocity must be finite at 0 and R");
  max_abs_velocity_ =
      std::max(std::abs(velocity_at_zero_), std::abs(velocity_at_max_));

  // Scan f' = v + rho v' for extremum candidates and the wave-speed bound.
  double prev = flux_deriv(0.0);
  double max_fd = std::abs(prev);
  for (int i = 1; i < kExtremaScanSamples; ++i) {
    const double rho =
        max_density_ * static_cast<double>(i) / (kExtremaScanSamples - 1);
    const double cur = flux_deriv(rho);
    max_fd = std::max(max_fd, std::abs(cur));
    if ((prev > 0.0 && cur < 0.0) || (prev < 0.0 && cur > 0.0)) {
      double lo = max_density_ * static_cast<double>(i - 1) /
                  (kExtremaScanSamples - 1);
      double hi = rho;
      double flo = prev;
      for (int it = 0; it < 80 && hi - lo > 1e-15 * max_density_; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = flux_deriv(mid);
        if ((flo > 0.0) == (fm > 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      flux_extrema_.push_back(0.5 * (lo + hi));
    }
    prev = cur;
  }
  max_abs_flux_deriv_ = max_fd;

  std::sort(flux_extrema_.begin(), flux_extrema_.end());
  flux_extrema_.erase(
      std::unique(flux_extrema_.begin(), flux_extrema_.end(),
                  [this](double x, double y) {
                    return std::abs(x - y) <= 1e-12 * max_density_;
                  }),
      flux_extrema_.end());
  std::erase_if(flux_extrema_, [this](double x) {
    return !(x > 0.0 && x < max_density_);
  });
}

double VelocityModel::flux(double rho) const {
  if (!(rho >= 0.0 && rho <= max_density_))
    throw std::domain_error("flux: density " + std::to_string(rho) +
                            " outside [0, " + std::to_string(max_density_) +
                            "]");
  return rho * velocity_(rho);
}

VelocityModel make_affine_model(double a, double b, double max_density) {
  const AffineLaw law{a, b};
  return VelocityModel(
      max_density, [a, b](double rho) { return a - b * rho; },
      [b](double) { return -b; }, std::abs(b), law,
      b != 0.0 ? std::vector<double>{a / (2.0 * b)} : std::vector<double>{});
}

VelocityModel make_greenshields_model(double vmax, double max_density,
                                      double exponent) {
  if (!(vmax > 0.0)) throw std::invalid_argument("greenshields: vmax must be > 0");
  if (!(exponent >= 1.0))
    throw std::invalid_argument("greenshields: exponent must be >= 1");
  if (exponent == 1.0) {
    // Classical Greenshields law; affine with slope vmax / R.
    return make_affine_model(vmax, vmax / max_density, max_density);
  }
  const double r = max_density;
  const double p = exponent;
  // v'(0) = 0 for p > 1, so the monotonicity gate rejects this below.
  return VelocityModel(
      r, [vmax, r, p](double rho) { return vmax * (1.0 - std::pow(rho / r, p)); },
      [vmax, r, p](double rho) {
        return -vmax * p * std::pow(rho / r, p - 1.0) / r;
      },
      vmax * p / r);
}

VelocityModel make_tabulated_model(std::vector<double> density_nodes,
                                   std::vector<double> velocity_nodes) {
  if (density_nodes.size() < 2 ||
      density_nodes.size() != velocity_nodes.size())
    throw std::invalid_argument("tabulated: need matching node lists, >= 2 nodes");
  if (density_nodes.front() != 0.0)
    throw std::invalid_argument("tabulated: first density node must be 0");
  for (std::size_t i = 0; i + 1 < density_nodes.size(); ++i) {
    if (!(density_nodes[i] < density_nodes[i + 1]))
      throw std::invalid_argument("tabulated: density nodes must increase");
    if (!(velocity_nodes[i + 1] < velocity_nodes[i]))
      throw std::invalid_argument("tabulated: velocities must strictly decrease");
  }
  const double max_density = density_nodes.back();

  auto rho_nodes = std::make_shared<std::vector<double>>(std::move(density_nodes));
  auto v_nodes = std::make_shared<std::vector<double>>(std::move(velocity_nodes));

  auto segment_of = [rho_nodes](double rho) -> std::size_t {
    auto it = std::upper_bound(rho_nodes->begin(), rho_nodes->end(), rho);
    std::size_t k = static_cast<std::size_t>(it - rho_nodes->begin());
    if (k == 0) return 0;
    if (k >= rho_nodes->size()) return rho_nodes->size() - 2;
    return k - 1;
  };

  double max_slope = 0.0;
  std::vector<double> extrema_hints;
  for (std::size_t k = 0; k + 1 < rho_nodes->size(); ++k) {
    const double slope = ((*v_nodes)[k + 1] - (*v_nodes)[k]) /
                         ((*rho_nodes)[k + 1] - (*rho_nodes)[k]);
    max_slope = std::max(max_slope, std::abs(slope));
    // Kinks of f sit at the interpolation nodes.
    if (k > 0) extrema_hints.push_back((*rho_nodes)[k]);
    // Interior root of the linear f' = v_k + s (rho - rho_k) + rho s.
    const double root =
        (slope * (*rho_nodes)[k] - (*v_nodes)[k]) / (2.0 * slope);
    if (root > (*rho_nodes)[k] && root < (*rho_nodes)[k + 1])
      extrema_hints.push_back(root);
  }

  auto velocity = [rho_nodes, v_nodes, segment_of](double rho) {
    const std::size_t k = segment_of(rho);
    const double slope = ((*v_nodes)[k + 1] - (*v_nodes)[k]) /
                         ((*rho_nodes)[k + 1] - (*rho_nodes)[k]);
    return (*v_nodes)[k] + slope * (rho - (*rho_nodes)[k]);
  };
  auto velocity_deriv = [rho_nodes, v_nodes, segment_of](double rho) {
    const std::size_t k = segment_of(rho);
    return ((*v_nodes)[k + 1] - (*v_nodes)[k]) /
           ((*rho_nodes)[k + 1] - (*rho_nodes)[k]);
  };

  return VelocityModel(max_density, velocity, velocity_deriv, max_slope,
                       std::nullopt, std::move(extrema_hints));
}

VelocityModel make_model(const std::string& description, double max_density) {
  const auto colon = description.find(':');
  const std::string family =
      colon == std::string::npos ? description : description.substr(0, colon);
  const std::string args =
      colon == std::string::npos ? "" : description.substr(colon + 1);

  if (family == "affine") {
    double a = 0.0, b = 0.0;
    bool got_a = false, got_b = false;
    for (const auto& [key, value] : parse_kv(args)) {
      if (key == "a") { a = parse_number(value); got_a = true; }
      else if (key == "b") { b = parse_number(value); got_b = true; }
      else throw std::invalid_argument("affine: unknown parameter '" + key + "'");
    }
    if (!got_a || !got_b)
      throw std::invalid_argument("affine: need a=... and b=...");
    return make_affine_model(a, b, max_density);
  }
  if (family == "greenshields") {
    double vmax = 0.0, p = 1.0;
    bool got_vmax = false;
    for (const auto& [key, value] : parse_kv(args)) {
      if (key == "vmax") { vmax = parse_number(value); got_vmax = true; }
      else if (key == "p") { p = parse_number(value); }
      else throw std::invalid_argument("greenshields: unknown parameter '" + key + "'");
    }
    if (!got_vmax) throw std::invalid_argument("greenshields: need vmax=...");
    return make_greenshields_model(vmax, max_density, p);
  }
  if (family == "tabulated") {
    std::string path;
    for (const auto& [key, value] : parse_kv(args)) {
      if (key == "file") path = value;
      else throw std::invalid_argument("tabulated: unknown parameter '" + key + "'");
    }
    if (path.empty()) throw std::invalid_argument("tabulated: need file=PATH");
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("tabulated: cannot open '" + path + "'");
    std::vector<double> rho, vel;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ls(line);
      double r = 0.0, v = 0.0;
      if (!(ls >> r >> v))
        throw std::invalid_argument("tabulated: bad line '" + line + "'");
      rho.push_back(r);
      vel.push_back(v);
    }
    if (!rho.empty() && std::abs(rho.back() - max_density) >
                            1e-12 * std::max(1.0, max_density))
      throw std::invalid_argument(
          "tabulated: last node must equal the maximal density");
    return make_tabulated_model(std::move(rho), std::move(vel));
  }
  throw std::invalid_argument("unknown velocity family '" + family + "'");
}

}  // namespace ftl
