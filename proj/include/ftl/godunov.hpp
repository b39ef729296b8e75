#pragma once

#include "ftl/step_density.hpp"
#include "ftl/velocity.hpp"

namespace ftl {

// Godunov numerical flux: min of f over [left, right] when left <= right,
// max over [right, left] otherwise. The extremum sits at an endpoint or an
// interior critical point of f.
double godunov_flux(const VelocityModel& model, double left, double right);

// First-order Godunov finite-volume reference on a uniform grid covering the
// maximal influence region of the data; the time step satisfies
// dt * max|f'| <= 0.9 dx. Requires cells >= 100.
StepDensity godunov_reference(const VelocityModel& model,
                              const StepDensity& data, double t, int cells);

}  // namespace ftl
