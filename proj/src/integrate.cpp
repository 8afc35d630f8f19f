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

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "feller/errors.hpp"
#include "feller/integrate.hpp"
#include "feller/kernels.hpp"

namespace feller::integrate {

using lagrange::MassGrid;
using lagrange::ParticleState;

namespace {

// Dormand-Prince 5(4) tableau.
constexpr std::array<double, 7> kC{0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0};
constexpr std::array<std::array<double, 6>, 7> kA{{
    {0, 0, 0, 0, 0, 0},
    {1.0 / 5.0, 0, 0, 0, 0, 0},
    {3.0 / 40.0, 9.0 / 40.0, 0, 0, 0, 0},
    {44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0, 0, 0},
    {19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0, 0},
    {9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0},
    {35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0},
}};
// Fifth-order weights minus embedded fourth-order weights.
constexpr std::array<double, 7> kE{71.0 / 57600.0,      0.0,          -71.0 / 16695.0, 71.0 / 1920.0,
                                   -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0};

void check_sizes(const ParticleState& state, const MassGrid& grid) {
  if (state.y.size() != grid.n() + 1) throw DomainError("state and grid sizes differ");
}

std::vector<double> merged_targets(double t0, double t_end, const std::vector<double>& outputs) {
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    if (!(outputs[i] >= t0 && outputs[i] <= t_end)) {
      throw DomainError("output time " + std::to_string(outputs[i]) + " outside the run interval");
    }
    if (i > 0 && outputs[i] < outputs[i - 1]) throw DomainError("output times must be sorted");
  }
  std::vector<double> targets;
  for (double t : outputs) {
    if (t > t0 && (targets.empty() || t > targets.back())) targets.push_back(t);
  }
  if (targets.empty() || targets.back() < t_end) targets.push_back(t_end);
  return targets;
}

// Outputs equal to the start time are recorded before any step.
void record_initial(const ParticleState& state, const std::vector<double>& outputs,
                    TrajectoryRecord& rec) {
  for (double t : outputs) {
    if (t == state.t) rec.outputs.push_back(state);
  }
}

// Records every requested output equal to t (duplicates are kept).
void record_at(const ParticleState& state, const std::vector<double>& outputs, double t0,
               TrajectoryRecord& rec) {
  for (double t : outputs) {
    if (t > t0 && t == state.t) rec.outputs.push_back(state);
  }
}

}  // namespace

void StepControl::validate() const {
  if (!(abstol > 0.0)) throw ConfigError("step: abstol must be > 0");
  if (!(reltol > 0.0 && reltol < 1.0)) throw ConfigError("step: reltol must lie in (0, 1)");
  if (!(safety > 0.0 && safety <= 1.0)) throw ConfigError("step: safety must lie in (0, 1]");
  if (!(grow_max >= 1.0)) throw ConfigError("step: grow_max must be >= 1");
  if (!(shrink_min > 0.0 && shrink_min < 1.0)) throw ConfigError("step: shrink_min must lie in (0, 1)");
  for (const auto* v : {&dt_init, &dt_min, &dt_max}) {
    if (*v && !(**v > 0.0)) throw ConfigError("step: step bounds must be > 0");
  }
  if (dt_min && dt_init && *dt_min > *dt_init) throw ConfigError("step: dt_min exceeds dt_init");
  if (dt_init && dt_max && *dt_init > *dt_max) throw ConfigError("step: dt_init exceeds dt_max");
  if (dt_min && dt_max && *dt_min > *dt_max) throw ConfigError("step: dt_min exceeds dt_max");
}

StepControl StepControl::resolved(double span) const {
  if (!(span > 0.0)) throw ConfigError("step: span must be > 0");
  StepControl r = *this;
  if (!r.dt_max) r.dt_max = span;
  if (!r.dt_init) r.dt_init = std::min(1e-4 * span, *r.dt_max);
  if (!r.dt_min) r.dt_min = std::min(1e-12 * span, *r.dt_init);
  r.validate();
  return r;
}

ParticleState euler_step(const ParticleState& state, const MassGrid& grid,
                         const FellerParams& params, double dt) {
  check_sizes(state, grid);
  if (!(dt >= 0.0)) throw DomainError("euler_step: dt must be >= 0");
  if (dt == 0.0) return state;
  const auto rhs = lagrange::lagrangian_rhs(state, grid, params);
  ParticleState next{state.t + dt, std::vector<double>(state.y.size())};
  for (std::size_t k = 0; k < state.y.size(); ++k) next.y[k] = state.y[k] + dt * rhs[k];
  next.validate();
  return next;
}

TrajectoryRecord euler_advance(const ParticleState& state, const MassGrid& grid,
                               const FellerParams& params, double t_end, double dt,
                               const std::vector<double>& output_times, double dt_min,
                               const StepObserver& observer) {
  check_sizes(state, grid);
  state.validate();
  if (!(t_end >= state.t)) throw DomainError("euler_advance: t_end before the current time");
  if (!(dt > 0.0)) throw DomainError("euler_advance: dt must be > 0");
  TrajectoryRecord rec;
  rec.final_state = state;
  record_initial(state, output_times, rec);
  if (t_end == state.t) return rec;

  const auto targets = merged_targets(state.t, t_end, output_times);
  ParticleState cur = state;
  for (double target : targets) {
    while (cur.t < target) {
      double h = std::min(dt, target - cur.t);
      for (;;) {
        try {
          const bool landing = h >= target - cur.t;
          ParticleState next = euler_step(cur, grid, params, h);
          if (landing) next.t = target;
          cur = std::move(next);
          ++rec.accepted;
          break;
        } catch (const OrderingViolation&) {
          ++rec.rejected;
          ++rec.ordering_rejections;
          h *= 0.5;
          if (h < dt_min || h == 0.0) throw IntegrationFailure("euler_advance: step below dt_min", cur.t);
        }
      }
      if (observer) observer(cur);
    }
    record_at(cur, output_times, state.t, rec);
  }
  rec.final_state = std::move(cur);
  return rec;
}

TrajectoryRecord rk45_advance(const ParticleState& state, const MassGrid& grid,
                              const FellerParams& params, double t_end, const StepControl& ctrl,
                              const std::vector<double>& output_times,
                              const StepObserver& observer) {
  check_sizes(state, grid);
  state.validate();
  if (!(t_end >= state.t)) throw DomainError("rk45_advance: t_end before the current time");
  TrajectoryRecord rec;
  rec.final_state = state;
  record_initial(state, output_times, rec);
  if (t_end == state.t) {
    ctrl.validate();
    return rec;
  }
  const StepControl c = ctrl.resolved(t_end - state.t);
  const auto targets = merged_targets(state.t, t_end, output_times);

  const std::size_t n = state.y.size();
  const auto& dph = grid.dp_half();
  const auto& dpc = grid.dp_center();
  std::array<std::vector<double>, 7> k;
  for (auto& v : k) v.assign(n, 0.0);
  std::array<const double*, 7> kp{};
  for (std::size_t j = 0; j < 7; ++j) kp[j] = k[j].data();
  std::vector<double> stage(n), y_new(n);

  auto eval = [&](double t, const std::vector<double>& y, std::vector<double>& out) {
    return kernels::lagrangian_rhs(y, dph, dpc, params.eta * std::exp(params.gamma * t), out);
  };

  ParticleState cur = state;
  if (!eval(cur.t, cur.y, k[0])) throw OrderingViolation("initial state is not ordered", 0);
  double dt = *c.dt_init;

  for (double target : targets) {
    while (cur.t < target) {
      const double remaining = target - cur.t;
      const bool truncated = dt >= remaining;
      const double h = truncated ? remaining : dt;

      bool ordered = true;
      for (std::size_t s = 1; s < 7 && ordered; ++s) {
        std::vector<double>& dest = s < 6 ? stage : y_new;
        kernels::stage_combine(cur.y, h, std::span<const double* const>(kp.data(), s),
                               std::span<const double>(kA[s].data(), s), dest);
        ordered = eval(cur.t + kC[s] * h, dest, k[s]);
      }

      double err = std::numeric_limits<double>::infinity();
      if (ordered) {
        err = kernels::weighted_error(cur.y, y_new, h, kp, kE, c.abstol, c.reltol);
      }
      if (ordered && err <= 1.0) {
        cur.t = truncated ? target : cur.t + h;
        cur.y.swap(y_new);
        k[0].swap(k[6]);
        kp[0] = k[0].data();
        kp[6] = k[6].data();
        ++rec.accepted;
        if (observer) observer(cur);
        const double fac =
            err == 0.0 ? c.grow_max : std::clamp(c.safety * std::pow(err, -0.2), c.shrink_min, c.grow_max);
        dt = truncated ? std::max(dt, h * fac) : h * fac;
        dt = std::min(dt, *c.dt_max);
      } else {
        ++rec.rejected;
        if (!ordered) {
          ++rec.ordering_rejections;
          dt = h * c.shrink_min;
        } else {
          const double fac = std::isfinite(err)
                                 ? std::clamp(c.safety * std::pow(err, -0.2), c.shrink_min, c.grow_max)
                                 : c.shrink_min;
          dt = h * std::min(fac, 1.0);
        }
        if (dt < *c.dt_min) {
          rec.final_state = cur;
          throw IntegrationFailure("rk45_advance: step size fell below dt_min at t = " +
                                       std::to_string(cur.t),
                                   cur.t);
        }
      }
    }
    record_at(cur, output_times, state.t, rec);
  }
  rec.final_state = std::move(cur);
  return rec;
}

double cfl_reference_dt(const MassGrid& grid, const ParticleState& state,
                        const FellerParams& params) {
  check_sizes(state, grid);
  const double shrink = std::exp(-params.gamma * state.t);
  double dx_min = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < state.y.size(); ++k) {
    dx_min = std::min(dx_min, shrink * state.y[k] - shrink * state.y[k - 1]);
  }
  const double x_n = shrink * state.y.back();
  return dx_min * dx_min / (2.0 * params.eta * x_n);
}

}  // namespace feller::integrate
