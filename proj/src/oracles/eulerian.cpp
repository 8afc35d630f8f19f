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
#include <string>

#include "feller/errors.hpp"
#include "feller/oracles.hpp"

namespace feller::oracles {

namespace {

constexpr double kTailFraction = 0.05;
constexpr double kTailMassLimit = 1e-3;

double tail_mass(const std::vector<double>& p, double dx, double L) {
  double m = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if ((static_cast<double>(j) + 0.5) * dx > (1.0 - kTailFraction) * L) m += p[j] * dx;
  }
  return m;
}

void check_tail(const std::vector<double>& p, double dx, double L, double t) {
  const double m = tail_mass(p, dx, L);
  if (m > kTailMassLimit) {
    throw TruncationError("eulerian: mass " + std::to_string(m) + " near x = L at t = " +
                          std::to_string(t) + "; enlarge L");
  }
}

double total(const std::vector<double>& p, double dx) {
  double m = 0.0;
  for (double v : p) m += v * dx;
  return m;
}

}  // namespace

void EulerianConfig::validate() const {
  if (!(L > 0.0) || !std::isfinite(L)) throw ConfigError("eulerian: L must be > 0");
  if (M < 16) throw ConfigError("eulerian: M must be >= 16");
  if (!(dt > 0.0)) throw ConfigError("eulerian: dt must be > 0");
  if (!(theta >= 0.5 && theta <= 1.0)) throw ConfigError("eulerian: theta must lie in [0.5, 1]");
}

EulerianResult eulerian_solve(const EulerianConfig& cfg, const FellerParams& params,
                              const lagrange::InitialCondition& ic, double t_end,
                              const std::vector<double>& output_times) {
  cfg.validate();
  const double dx = cfg.L / static_cast<double>(cfg.M);
  std::vector<double> p0(cfg.M);
  for (std::size_t j = 0; j < cfg.M; ++j) p0[j] = ic.density((static_cast<double>(j) + 0.5) * dx);
  return eulerian_solve(cfg, params, std::move(p0), t_end, output_times);
}

EulerianResult eulerian_solve(const EulerianConfig& cfg, const FellerParams& params,
                              std::vector<double> p, double t_end,
                              const std::vector<double>& output_times) {
  cfg.validate();
  params.validate();
  const std::size_t m = cfg.M;
  if (p.size() != m) throw DomainError("eulerian: initial data must have M values");
  if (!(t_end >= 0.0)) throw DomainError("eulerian: t_end must be >= 0");
  for (std::size_t i = 0; i < output_times.size(); ++i) {
    if (!(output_times[i] >= 0.0 && output_times[i] <= t_end)) {
      throw DomainError("eulerian: output time outside [0, t_end]");
    }
    if (i > 0 && output_times[i] < output_times[i - 1]) {
      throw DomainError("eulerian: output times must be sorted");
    }
  }
  const double dx = cfg.L / static_cast<double>(m);
  check_tail(p, dx, cfg.L, 0.0);

  // Interior face j + 1/2 (j = 0..m-2) at x = (j + 1) dx carries
  // F = a_j p_j + b_j p_{j+1}; the faces at 0 and L carry no flux.
  std::vector<double> a(m - 1), b(m - 1);
  for (std::size_t j = 0; j + 1 < m; ++j) {
    const double xf = static_cast<double>(j + 1) * dx;
    a[j] = -xf * (0.5 * params.gamma - params.eta / dx);
    b[j] = -xf * (0.5 * params.gamma + params.eta / dx);
  }

  std::vector<double> centers(m);
  for (std::size_t j = 0; j < m; ++j) centers[j] = (static_cast<double>(j) + 0.5) * dx;

  EulerianResult res;
  const double mass0 = total(p, dx);
  auto emit = [&](double t) {
    res.snapshots.push_back(DensitySnapshot{t, DensitySamples{centers, p}});
  };
  std::size_t next_out = 0;
  while (next_out < output_times.size() && output_times[next_out] == 0.0) {
    emit(0.0);
    ++next_out;
  }

  std::vector<double> lower(m), diag(m), upper(m), rhs(m), flux(m + 1, 0.0);
  std::vector<double> cprime(m), dprime(m);
  double t = 0.0;
  double mass = mass0;
  while (t < t_end) {
    double h = cfg.dt;
    double target = t_end;
    if (next_out < output_times.size()) target = output_times[next_out];
    const bool landing = t + h >= target;
    if (landing) h = target - t;
    const double r = h / dx;

    for (std::size_t j = 0; j + 1 < m; ++j) flux[j + 1] = a[j] * p[j] + b[j] * p[j + 1];
    for (std::size_t j = 0; j < m; ++j) {
      const double left_a = j > 0 ? a[j - 1] : 0.0;
      const double left_b = j > 0 ? b[j - 1] : 0.0;
      const double right_a = j + 1 < m ? a[j] : 0.0;
      const double right_b = j + 1 < m ? b[j] : 0.0;
      lower[j] = -cfg.theta * r * left_a;
      diag[j] = 1.0 + cfg.theta * r * (right_a - left_b);
      upper[j] = cfg.theta * r * right_b;
      rhs[j] = p[j] - (1.0 - cfg.theta) * r * (flux[j + 1] - flux[j]);
    }
    // Thomas algorithm.
    cprime[0] = upper[0] / diag[0];
    dprime[0] = rhs[0] / diag[0];
    for (std::size_t j = 1; j < m; ++j) {
      const double denom = diag[j] - lower[j] * cprime[j - 1];
      cprime[j] = upper[j] / denom;
      dprime[j] = (rhs[j] - lower[j] * dprime[j - 1]) / denom;
    }
    p[m - 1] = dprime[m - 1];
    for (std::size_t j = m - 1; j-- > 0;) p[j] = dprime[j] - cprime[j] * p[j + 1];

    t = landing ? target : t + h;
    ++res.steps;
    const double new_mass = total(p, dx);
    if (mass0 != 0.0) {
      res.max_step_mass_drift = std::max(res.max_step_mass_drift, std::fabs(new_mass - mass) / mass0);
    }
    mass = new_mass;
    while (next_out < output_times.size() && output_times[next_out] == t) {
      check_tail(p, dx, cfg.L, t);
      emit(t);
      ++next_out;
    }
  }
  check_tail(p, dx, cfg.L, t);
  return res;
}

}  // namespace feller::oracles
