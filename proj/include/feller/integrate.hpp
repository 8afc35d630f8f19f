// Copyright 2026 The Feller Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "feller/lagrange.hpp"
#include "feller/params.hpp"

namespace feller::integrate {

// Step-size control for the embedded (4,5) pair. Unset step bounds resolve
// against the integration span T: dt_init = 1e-4 T, dt_min = 1e-12 T, dt_max = T.
struct StepControl {
  double abstol = 1e-5;
  double reltol = 1e-5;
  std::optional<double> dt_init;
  std::optional<double> dt_min;
  std::optional<double> dt_max;
  double safety = 0.9;
  double grow_max = 5.0;
  double shrink_min = 0.2;

  void validate() const;
  // Copy with every optional filled for a run of length span > 0; validates the result.
  StepControl resolved(double span) const;
};

struct TrajectoryRecord {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  // Subset of `rejected` caused by loss of node ordering.
  std::size_t ordering_rejections = 0;
  std::vector<lagrange::ParticleState> outputs;
  lagrange::ParticleState final_state;
};

// Called with the new state after every accepted step.
using StepObserver = std::function<void(const lagrange::ParticleState&)>;

// One forward-Euler update Y + dt dY/dt. Throws OrderingViolation if the
// result is not strictly increasing.
lagrange::ParticleState euler_step(const lagrange::ParticleState& state,
                                   const lagrange::MassGrid& grid, const FellerParams& params,
                                   double dt);

// Fixed-step Euler march to t_end, landing on output_times. A step that breaks
// ordering is retried with half the step, down to dt_min.
TrajectoryRecord euler_advance(const lagrange::ParticleState& state, const lagrange::MassGrid& grid,
                               const FellerParams& params, double t_end, double dt,
                               const std::vector<double>& output_times = {},
                               double dt_min = 0.0, const StepObserver& observer = {});

// Adaptive Dormand-Prince march to t_end. Output times must be sorted and lie
// in [state.t, t_end]; each one is hit exactly by truncating the step.
// Throws IntegrationFailure when the step falls below dt_min.
TrajectoryRecord rk45_advance(const lagrange::ParticleState& state, const lagrange::MassGrid& grid,
                              const FellerParams& params, double t_end, const StepControl& ctrl,
                              const std::vector<double>& output_times = {},
                              const StepObserver& observer = {});

// Explicit Eulerian stability bound dx_min^2 / (2 eta X_N) on the current nodes.
double cfl_reference_dt(const lagrange::MassGrid& grid, const lagrange::ParticleState& state,
                        const FellerParams& params);

}  // namespace feller::integrate
