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
#include <cstddef>

#include "feller/kernels.hpp"

namespace feller::kernels::scalar {

bool lagrangian_rhs(std::span<const double> y, std::span<const double> dp_half,
                    std::span<const double> dp_center, double factor, std::span<double> out) {
  const std::size_t n = y.size();
  const double neg = -factor;
  bool ordered = true;
  out[0] = 0.0;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double gr = y[k + 1] - y[k];
    const double gl = y[k] - y[k - 1];
    if (!(gr > 0.0) || !(gl > 0.0)) ordered = false;
    out[k] = neg * y[k] / dp_center[k] * (dp_half[k] / gr - dp_half[k - 1] / gl);
  }
  const double g = y[n - 1] - y[n - 2];
  if (!(g > 0.0)) ordered = false;
  out[n - 1] = factor * y[n - 1] / dp_center[n - 1] * (dp_half[n - 2] / g);
  return ordered;
}

void stage_combine(std::span<const double> y, double h, std::span<const double* const> stages,
                   std::span<const double> coeffs, std::span<double> out) {
  const std::size_t n = y.size();
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    bool first = true;
    for (std::size_t j = 0; j < stages.size(); ++j) {
      if (coeffs[j] == 0.0) continue;
      const double term = coeffs[j] * stages[j][i];
      acc = first ? term : acc + term;
      first = false;
    }
    out[i] = y[i] + h * acc;
  }
}

double weighted_error(std::span<const double> y_old, std::span<const double> y_new, double h,
                      std::span<const double* const> stages, std::span<const double> coeffs,
                      double abstol, double reltol) {
  double worst = 0.0;
  for (std::size_t i = 0; i < y_old.size(); ++i) {
    double acc = 0.0;
    bool first = true;
    for (std::size_t j = 0; j < stages.size(); ++j) {
      if (coeffs[j] == 0.0) continue;
      const double term = coeffs[j] * stages[j][i];
      acc = first ? term : acc + term;
      first = false;
    }
    const double err = std::fabs(h * acc);
    const double scale = abstol + reltol * std::max(std::fabs(y_old[i]), std::fabs(y_new[i]));
    const double r = err / scale;
    if (std::isnan(r)) return r;
    worst = std::max(worst, r);
  }
  return worst;
}

void feller_em_step(std::span<double> x, std::span<const double> normals, double drift0,
                    double gamma, double two_eta, double dt) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    const double xp = std::max(0.0, xi);
    const double diffusion = std::sqrt(two_eta * xp * dt);
    const double next = xi + (drift0 - gamma * xi) * dt + diffusion * normals[i];
    x[i] = std::max(0.0, next);
  }
}

}  // namespace feller::kernels::scalar
