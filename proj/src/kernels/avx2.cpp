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

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "feller/kernels.hpp"

namespace feller::kernels::avx2 {

namespace {

constexpr std::size_t kLanes = 4;
// Callers pass at most the seven Dormand-Prince stages.
constexpr std::size_t kMaxStages = 16;

inline __m256d abs_pd(__m256d v) {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

}  // namespace

bool lagrangian_rhs(std::span<const double> y, std::span<const double> dp_half,
                    std::span<const double> dp_center, double factor, std::span<double> out) {
  const std::size_t n = y.size();
  const double neg = -factor;
  const __m256d vneg = _mm256_set1_pd(neg);
  const __m256d zero = _mm256_setzero_pd();
  __m256d bad = _mm256_setzero_pd();
  out[0] = 0.0;
  std::size_t k = 1;
  for (; k + kLanes < n; k += kLanes) {
    const __m256d ym = _mm256_loadu_pd(&y[k - 1]);
    const __m256d y0 = _mm256_loadu_pd(&y[k]);
    const __m256d yp = _mm256_loadu_pd(&y[k + 1]);
    const __m256d gr = _mm256_sub_pd(yp, y0);
    const __m256d gl = _mm256_sub_pd(y0, ym);
    bad = _mm256_or_pd(bad, _mm256_cmp_pd(gr, zero, _CMP_NGT_UQ));
    bad = _mm256_or_pd(bad, _mm256_cmp_pd(gl, zero, _CMP_NGT_UQ));
    const __m256d bracket = _mm256_sub_pd(_mm256_div_pd(_mm256_loadu_pd(&dp_half[k]), gr),
                                          _mm256_div_pd(_mm256_loadu_pd(&dp_half[k - 1]), gl));
    const __m256d lead = _mm256_div_pd(_mm256_mul_pd(vneg, y0), _mm256_loadu_pd(&dp_center[k]));
    _mm256_storeu_pd(&out[k], _mm256_mul_pd(lead, bracket));
  }
  bool ordered = _mm256_movemask_pd(bad) == 0;
  for (; k + 1 < n; ++k) {
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
  const __m256d vh = _mm256_set1_pd(h);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    __m256d acc = _mm256_setzero_pd();
    bool first = true;
    for (std::size_t j = 0; j < stages.size(); ++j) {
      if (coeffs[j] == 0.0) continue;
      const __m256d term = _mm256_mul_pd(_mm256_set1_pd(coeffs[j]), _mm256_loadu_pd(stages[j] + i));
      acc = first ? term : _mm256_add_pd(acc, term);
      first = false;
    }
    _mm256_storeu_pd(&out[i], _mm256_add_pd(_mm256_loadu_pd(&y[i]), _mm256_mul_pd(vh, acc)));
  }
  if (i < n) {
    const double* tail[kMaxStages];
    for (std::size_t j = 0; j < stages.size(); ++j) tail[j] = stages[j] + i;
    scalar::stage_combine(y.subspan(i), h, std::span<const double* const>(tail, stages.size()),
                          coeffs, out.subspan(i));
  }
}

double weighted_error(std::span<const double> y_old, std::span<const double> y_new, double h,
                      std::span<const double* const> stages, std::span<const double> coeffs,
                      double abstol, double reltol) {
  const std::size_t n = y_old.size();
  const __m256d vh = _mm256_set1_pd(h);
  const __m256d vabs = _mm256_set1_pd(abstol);
  const __m256d vrel = _mm256_set1_pd(reltol);
  __m256d worst = _mm256_setzero_pd();
  __m256d nan_seen = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    __m256d acc = _mm256_setzero_pd();
    bool first = true;
    for (std::size_t j = 0; j < stages.size(); ++j) {
      if (coeffs[j] == 0.0) continue;
      const __m256d term = _mm256_mul_pd(_mm256_set1_pd(coeffs[j]), _mm256_loadu_pd(stages[j] + i));
      acc = first ? term : _mm256_add_pd(acc, term);
      first = false;
    }
    const __m256d err = abs_pd(_mm256_mul_pd(vh, acc));
    const __m256d big = _mm256_max_pd(abs_pd(_mm256_loadu_pd(&y_old[i])),
                                      abs_pd(_mm256_loadu_pd(&y_new[i])));
    const __m256d r = _mm256_div_pd(err, _mm256_add_pd(vabs, _mm256_mul_pd(vrel, big)));
    nan_seen = _mm256_or_pd(nan_seen, _mm256_cmp_pd(r, r, _CMP_UNORD_Q));
    worst = _mm256_max_pd(worst, r);
  }
  if (_mm256_movemask_pd(nan_seen) != 0) return std::nan("");
  alignas(32) double lanes[kLanes];
  _mm256_store_pd(lanes, worst);
  double result = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  if (i < n) {
    const double* tail[kMaxStages];
    for (std::size_t j = 0; j < stages.size(); ++j) tail[j] = stages[j] + i;
    const double tail_err = scalar::weighted_error(
        y_old.subspan(i), y_new.subspan(i), h, std::span<const double* const>(tail, stages.size()),
        coeffs, abstol, reltol);
    if (std::isnan(tail_err)) return tail_err;
    result = std::max(result, tail_err);
  }
  return result;
}

void feller_em_step(std::span<double> x, std::span<const double> normals, double drift0,
                    double gamma, double two_eta, double dt) {
  const std::size_t n = x.size();
  const __m256d zero = _mm256_setzero_pd();
  const __m256d vd0 = _mm256_set1_pd(drift0);
  const __m256d vg = _mm256_set1_pd(gamma);
  const __m256d v2e = _mm256_set1_pd(two_eta);
  const __m256d vdt = _mm256_set1_pd(dt);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d xi = _mm256_loadu_pd(&x[i]);
    const __m256d xp = _mm256_max_pd(xi, zero);
    const __m256d diffusion = _mm256_sqrt_pd(_mm256_mul_pd(_mm256_mul_pd(v2e, xp), vdt));
    const __m256d drift = _mm256_mul_pd(_mm256_sub_pd(vd0, _mm256_mul_pd(vg, xi)), vdt);
    const __m256d next = _mm256_add_pd(_mm256_add_pd(xi, drift),
                                       _mm256_mul_pd(diffusion, _mm256_loadu_pd(&normals[i])));
    _mm256_storeu_pd(&x[i], _mm256_max_pd(next, zero));
  }
  if (i < n) scalar::feller_em_step(x.subspan(i), normals.subspan(i), drift0, gamma, two_eta, dt);
}

}  // namespace feller::kernels::avx2
