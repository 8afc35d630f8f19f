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

#include "feller/specfun.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "feller/errors.hpp"

namespace feller::specfun {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kGamma = static_cast<double>(kEulerGamma);
constexpr int kMaxIter = 1000;

// E1(x) = -gamma - ln x - sum_{n>=1} (-x)^n / (n n!)
double e1_series(double x) {
  double term = x;
  double sum = x;
  for (int n = 2; n < kMaxIter; ++n) {
    term *= -x / n;
    const double contrib = term / n;
    sum += contrib;
    if (std::fabs(contrib) < kEps * std::fabs(sum)) {
      return -kGamma - std::log(x) + sum;
    }
  }
  throw ConvergenceError("exp_integral_e1: series did not converge");
}

// Modified Lentz evaluation of the continued fraction
// E1(x) = exp(-x) / (x + 1 - 1/(x + 3 - 4/(x + 5 - ...))).
double e1_continued_fraction(double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double del = c * d;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) {
      return h * std::exp(-x);
    }
  }
  throw ConvergenceError("exp_integral_e1: continued fraction did not converge");
}

// Ei(x) = gamma + ln x + sum_{n>=1} x^n / (n n!), all terms positive for x > 0.
double ei_series(double x) {
  double term = 1.0;
  double sum = 0.0;
  for (int n = 1; n < kMaxIter; ++n) {
    term *= x / n;
    const double contrib = term / n;
    sum += contrib;
    if (contrib < kEps * sum) {
      return kGamma + std::log(x) + sum;
    }
  }
  throw ConvergenceError("exp_integral_ei: series did not converge");
}

// Ei(x) ~ exp(x)/x * sum_k k!/x^k, truncated at the smallest term.
double ei_asymptotic(double x) {
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < kMaxIter; ++k) {
    const double next = term * k / x;
    if (next > term) break;
    term = next;
    sum += term;
    if (term < kEps * sum) break;
  }
  return std::exp(x) / x * sum;
}

constexpr double kSeriesSwitchE1 = 1.5;
constexpr double kSeriesSwitchEi = 40.0;

template <typename Real>
Real kummer_series(Real a, Real b, Real z, const SeriesControl& ctrl) {
  Real term = 1;
  Real sum = 1;
  const Real tol = static_cast<Real>(ctrl.tol);
  for (std::size_t n = 0; n < ctrl.max_terms; ++n) {
    const Real rn = static_cast<Real>(n);
    term *= (a + rn) * z / ((b + rn) * (rn + 1));
    sum += term;
    if (term == 0 || std::fabs(term) <= tol * std::fabs(sum)) {
      return sum;
    }
  }
  throw ConvergenceError("kummer_m: no convergence within " + std::to_string(ctrl.max_terms) +
                         " terms");
}

}  // namespace

void SeriesControl::validate() const {
  if (max_terms < 1) throw DomainError("SeriesControl: max_terms must be >= 1");
  if (!(tol > 0.0 && tol < 1.0)) throw DomainError("SeriesControl: tol must lie in (0, 1)");
}

double exp_integral_e1(double x) {
  if (!(x > 0.0)) {
    throw DomainError("exp_integral_e1: argument must be positive, got " + std::to_string(x));
  }
  if (std::isinf(x)) return 0.0;
  return x <= kSeriesSwitchE1 ? e1_series(x) : e1_continued_fraction(x);
}

double exp_integral_ei(double x) {
  if (x == 0.0 || std::isnan(x)) {
    throw DomainError("exp_integral_ei: logarithmic singularity at 0");
  }
  if (x < 0.0) return -exp_integral_e1(-x);
  if (x > 709.0) {
    const double v = ei_asymptotic(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  }
  return x <= kSeriesSwitchEi ? ei_series(x) : ei_asymptotic(x);
}

double e1_negative_principal(double x) {
  if (!(x < 0.0)) {
    throw DomainError("e1_negative_principal: argument must be negative");
  }
  return -exp_integral_ei(-x);
}

template <typename Real>
Real kummer_m(Real a, Real b, Real z, const SeriesControl& ctrl) {
  ctrl.validate();
  if (b <= 0 && std::nearbyint(b) == b) {
    throw DomainError("kummer_m: b must not be a non-positive integer");
  }
  if (!(std::fabs(z) <= static_cast<Real>(kKummerMaxAbsZ))) {
    throw ConvergenceError("kummer_m: |z| beyond the supported series range");
  }
  if (z < 0) {
    return std::exp(z) * kummer_series<Real>(b - a, b, -z, ctrl);
  }
  return kummer_series<Real>(a, b, z, ctrl);
}

template float kummer_m<float>(float, float, float, const SeriesControl&);
template double kummer_m<double>(double, double, double, const SeriesControl&);
template long double kummer_m<long double>(long double, long double, long double,
                                           const SeriesControl&);

}  // namespace feller::specfun
