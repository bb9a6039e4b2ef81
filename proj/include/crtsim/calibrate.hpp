#pragma once
// Calibrates per-arm generators so the cumulative incidence of each cause
// hits its target at nu and half_fraction * target at nu/2. Damped Newton on
// the four log-parameters with the quadrature incidence as the oracle.

#include <array>
#include <stdexcept>

#include "crtsim/generators.hpp"

namespace crtsim {

struct CalibrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CalibrationResult {
  ArmGenerator gen;
  double residual = 0.0;  // max-norm of the four constraint residuals
  int iterations = 0;
};

// Targets cir[k] in [0,1) with cir[0]+cir[1] < 1. Throws CalibrationError on
// infeasible targets or non-convergence (residual reported in the message).
CalibrationResult calibrate_arm(const std::array<double, 2>& cir, double half_fraction,
                                Family family, double nu);

// Calibrates all four arms in place; error messages name the failing arm.
void calibrate_scenario(ScenarioSpec& scenario);

}  // namespace crtsim
