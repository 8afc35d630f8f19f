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
#include <cmath>
#include <limits>
#include <string>

#include "feller/errors.hpp"
#include "feller/kernels.hpp"
#include "feller/lagrange.hpp"

namespace feller::lagrange {

MassGrid::MassGrid(std::vector<double> cumulative, MeanKind mean_kind)
    : p_(std::move(cumulative)), mean_kind_(mean_kind) {
  if (p_.size() < 3) throw DegenerateGrid("mass grid needs at least three nodes");
  const double eps = std::numeric_limits<double>::epsilon();
  const std::size_t n = p_.size() - 1;
  dp_half_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (!std::isfinite(p_[k]) || !std::isfinite(p_[k + 1])) {
      throw DegenerateGrid("mass grid has a non-finite node at " + std::to_string(k));
    }
    const double d = p_[k + 1] - p_[k];
    const double floor = 16.0 * eps * std::max(std::fabs(p_[k]), std::fabs(p_[k + 1]));
    if (!(d > floor)) {
      throw DegenerateGrid("mass spacing at the rounding floor between nodes " + std::to_string(k) +
                           " and " + std::to_string(k + 1));
    }
    dp_half_[k] = d;
  }
  dp_center_.resize(n + 1);
  dp_center_[0] = 0.5 * dp_half_[0];
  for (std::size_t k = 1; k < n; ++k) {
    dp_center_[k] = mean_kind_ == MeanKind::arithmetic
                        ? 0.5 * (dp_half_[k - 1] + dp_half_[k])
                        : std::sqrt(dp_half_[k - 1] * dp_half_[k]);
  }
  dp_center_[n] = 0.5 * (p_[n] - p_[n - 2]);
}

void ParticleState::validate() const {
  if (y.size() < 3) throw OrderingViolation("state needs at least three nodes", 0);
  if (y[0] != 0.0) throw OrderingViolation("left node is not pinned at 0", 0);
  for (std::size_t k = 1; k < y.size(); ++k) {
    if (!std::isfinite(y[k]) || !(y[k] > y[k - 1])) {
      throw OrderingViolation("nodes not strictly increasing at " + std::to_string(k), k);
    }
  }
}

void SamplingConfig::validate() const {
  if (n < 3) throw ConfigError("sampling: n must be >= 3");
  if (!(tail_tol > 0.0 && tail_tol < 1.0)) throw ConfigError("sampling: tail_tol must lie in (0, 1)");
  auto check_xmax = [](const std::optional<double>& x_max) {
    if (x_max && !(*x_max > 0.0 && std::isfinite(*x_max))) {
      throw ConfigError("sampling: x_max must be positive and finite");
    }
  };
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, LogSpaced>) {
          check_xmax(s.x_max);
          if (s.x_first && !(*s.x_first > 0.0 && std::isfinite(*s.x_first))) {
            throw ConfigError("sampling: x_first must be positive");
          }
          if (s.x_first && s.x_max && !(*s.x_first < *s.x_max)) {
            throw ConfigError("sampling: x_first must be below x_max");
          }
        } else if constexpr (std::is_same_v<T, Custom>) {
          if (s.positions.size() != n + 1) {
            throw ConfigError("sampling: custom positions must hold n + 1 values");
          }
          if (s.positions.front() != 0.0) throw ConfigError("sampling: custom positions must start at 0");
          for (std::size_t k = 1; k < s.positions.size(); ++k) {
            if (!std::isfinite(s.positions[k]) || !(s.positions[k] > s.positions[k - 1])) {
              throw ConfigError("sampling: custom positions not strictly increasing at " +
                                std::to_string(k));
            }
          }
        } else {
          check_xmax(s.x_max);
        }
      },
      strategy);
}

double choose_domain_l0(const InitialCondition& ic, double tail_tol) {
  if (!(tail_tol > 0.0 && tail_tol < 1.0)) throw DomainError("tail_tol must lie in (0, 1)");
  auto inside = [&](double x) { return ic.survival(x) < tail_tol; };

  double hi = 1.0;
  if (std::isfinite(ic.support_end())) hi = std::min(hi, ic.support_end());
  while (!inside(hi)) {
    hi *= 2.0;
    if (!std::isfinite(hi)) {
      throw ConvergenceError("choose_domain_l0: tail never drops below tail_tol");
    }
  }
  while (hi > std::numeric_limits<double>::min() && inside(0.5 * hi)) hi *= 0.5;
  double lo = 0.5 * hi;
  while (hi - lo > 1e-12 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (inside(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

std::vector<double> initial_positions(const SamplingConfig& cfg, double l0) {
  cfg.validate();
  if (!(l0 > 0.0 && std::isfinite(l0))) throw ConfigError("domain length must be positive");
  const std::size_t n = cfg.n;
  std::vector<double> x(n + 1, 0.0);
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, LogSpaced>) {
          const double x_max = s.x_max.value_or(l0);
          const double x_first = s.x_first.value_or(1e-3 * x_max);
          if (!(x_first < x_max)) throw ConfigError("sampling: x_first must be below x_max");
          const double a = std::log10(x_first);
          const double b = std::log10(x_max);
          for (std::size_t k = 1; k < n; ++k) {
            x[k] = std::pow(10.0, a + (b - a) * static_cast<double>(k - 1) / static_cast<double>(n - 1));
          }
          x[1] = x_first;
          x[n] = x_max;
        } else if constexpr (std::is_same_v<T, LogShifted>) {
          const double x_max = s.x_max.value_or(l0);
          const double b = std::log10(1.0 + x_max);
          for (std::size_t k = 1; k < n; ++k) {
            x[k] = std::pow(10.0, b * static_cast<double>(k) / static_cast<double>(n)) - 1.0;
          }
          x[n] = x_max;
        } else if constexpr (std::is_same_v<T, Uniform>) {
          const double x_max = s.x_max.value_or(l0);
          for (std::size_t k = 1; k < n; ++k) {
            x[k] = x_max * static_cast<double>(k) / static_cast<double>(n);
          }
          x[n] = x_max;
        } else {
          x = s.positions;
        }
      },
      cfg.strategy);
  for (std::size_t k = 1; k <= n; ++k) {
    if (!(x[k] > x[k - 1])) {
      throw ConfigError("sampling produced non-increasing positions at " + std::to_string(k));
    }
  }
  return x;
}

LagrangianSetup build_mass_grid(const InitialCondition& ic, const std::vector<double>& positions,
                                MeanKind mean_kind) {
  if (positions.size() < 3) throw DomainError("build_mass_grid: need at least three positions");
  if (positions.front() != 0.0) throw DomainError("build_mass_grid: positions must start at 0");
  std::vector<double> P(positions.size());
  for (std::size_t k = 0; k < positions.size(); ++k) {
    if (k > 0 && !(positions[k] > positions[k - 1])) {
      throw DomainError("build_mass_grid: positions not strictly increasing at " + std::to_string(k));
    }
    P[k] = ic.primitive(positions[k]);
  }
  LagrangianSetup setup{MassGrid(std::move(P), mean_kind), ParticleState{0.0, positions}};
  return setup;
}

std::vector<double> lagrangian_rhs(const ParticleState& state, const MassGrid& grid,
                                   const FellerParams& params) {
  if (state.y.size() != grid.n() + 1) throw DomainError("state and grid sizes differ");
  std::vector<double> out(state.y.size());
  const double factor = params.eta * std::exp(params.gamma * state.t);
  if (!kernels::lagrangian_rhs(state.y, grid.dp_half(), grid.dp_center(), factor, out)) {
    for (std::size_t k = 1; k < state.y.size(); ++k) {
      if (!(state.y[k] - state.y[k - 1] > 0.0)) {
        throw OrderingViolation("non-positive gap below node " + std::to_string(k), k);
      }
    }
  }
  return out;
}

double total_probability(const MassGrid& grid) { return grid.P().back() - grid.P().front(); }

double first_moment(const ParticleState& state, const MassGrid& grid, const FellerParams& params) {
  if (state.y.size() != grid.n() + 1) throw DomainError("state and grid sizes differ");
  const double shrink = std::exp(-params.gamma * state.t);
  const auto& w = grid.dp_center();
  double m = 0.0;
  for (std::size_t k = 0; k < state.y.size(); ++k) m += w[k] * (shrink * state.y[k]);
  return m;
}

double moment_ode_prediction(const FellerParams& params, double mass, double m1_0, double t) {
  if (params.gamma == 0.0) return m1_0 + params.eta * mass * t;
  const double decay = std::exp(-params.gamma * t);
  return m1_0 * decay - params.eta * mass * std::expm1(-params.gamma * t) / params.gamma;
}

}  // namespace feller::lagrange
