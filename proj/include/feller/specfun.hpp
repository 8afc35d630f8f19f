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

namespace feller::specfun {

// Euler-Mascheroni constant to 20 significant digits.
inline constexpr long double kEulerGamma = 0.57721566490153286061L;

struct SeriesControl {
  std::size_t max_terms = 500;
  double tol = 1e-16;

  void validate() const;
};

// E1(x) = int_1^inf exp(-t x) / t dt for x > 0. Throws DomainError for x <= 0.
double exp_integral_e1(double x);

// Principal-value Ei(x) = -PV int_{-x}^inf exp(-t) / t dt, x != 0.
// Ei(x) = -E1(-x) for x < 0. Returns +inf once exp(x) overflows.
double exp_integral_ei(double x);

// Real part of the boundary value of E1 on the negative axis, -Ei(-x), for x < 0.
// The constant -/+ i*pi offset of the two-sided limit is not represented.
double e1_negative_principal(double x);

// Kummer's confluent hypergeometric function M(a, b, z) = 1F1(a; b; z).
//
// Power series for z >= 0; for z < 0 the Kummer transformation
// M(a, b, z) = exp(z) M(b - a, b, -z) keeps all terms of one sign.
// Supported for |z| <= 200; beyond that, or when ctrl.max_terms is exhausted,
// ConvergenceError is thrown. b must not be a non-positive integer.
template <typename Real>
Real kummer_m(Real a, Real b, Real z, const SeriesControl& ctrl = {});

extern template float kummer_m<float>(float, float, float, const SeriesControl&);
extern template double kummer_m<double>(double, double, double, const SeriesControl&);
extern template long double kummer_m<long double>(long double, long double, long double,
                                                  const SeriesControl&);

inline constexpr double kKummerMaxAbsZ = 200.0;

}  // namespace feller::specfun
