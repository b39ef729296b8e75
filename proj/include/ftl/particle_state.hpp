#pragma once

#include <vector>

namespace ftl {

// Ordered particle positions at one time level. The gap between consecutive
// particles carries the fixed mass `interval_mass`, so local_density(i) is
// the discrete density on [positions[i], positions[i+1]).
struct ParticleState {
  std::vector<double> positions;  // strictly increasing, size N+1
  double interval_mass = 0.0;
  int time_index = 0;

  int interval_count() const { return static_cast<int>(positions.size()) - 1; }
  double gap(int i) const { return positions[i + 1] - positions[i]; }
  double local_density(int i) const { return interval_mass / gap(i); }
};

}  // namespace ftl
