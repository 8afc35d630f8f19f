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

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/hypergeometric_1F1.hpp>

#include "doctest.h"
#include "feller/errors.hpp"
#include "feller/specfun.hpp"

using namespace feller;
using namespace feller::specfun;

namespace {

// E1(x) = int_1^inf exp(-t x)/t dt by double-exponential quadrature.
double e1_by_quadrature(double x) {
  boost::math::quadrature::exp_sinh<double> q;
  return q.integrate([x](double t) { return std::exp(-t * x) / t; }, 1.0,
                     std::numeric_limits<double>::infinity(), 1e-15);
}

// Ei(x) = gamma + ln x + int_0^x (e^t - 1)/t dt for x > 0 (regular integrand).
double ei_by_quadrature(double x) {
  auto f = [](double t) { return t == 0.0 ? 1.0 : std::expm1(t) / t; };
  const double integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, x, 15, 1e-15);
  return static_cast<double>(kEulerGamma) + std::log(x) + integral;
}

// High-precision series for E1 near 0: -gamma - ln x - sum (-x)^n / (n n!).
long double e1_series_reference(long double x) {
  long double sum = 0.0L, term = 1.0L;
  for (int n = 1; n < 200; ++n) {
    term *= -x / n;
    const long double add = term / n;
    sum += add;
    if (std::fabs(add) < 1e-22L * std::fabs(sum)) break;
  }
  return -kEulerGamma - std::log(x) - sum;
}

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

std::vector<double> logspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  return v;
}

}  // namespace

TEST_SUITE("specfun") {
  TEST_CASE("E1 at 1 matches quadrature") {
    const double oracle = e1_by_quadrature(1.0);
    CHECK(rel(exp_integral_e1(1.0), oracle) < 1e-13);
    CHECK(exp_integral_e1(1.0) == doctest::Approx(0.21938393439552).epsilon(1e-12));
  }

  TEST_CASE("E1 relative accuracy over [1e-8, 700]") {
    double worst = 0.0;
    for (double x : logspace(1e-8, 700.0, 400)) {
      const double ref = boost::math::expint(1, x);
      worst = std::max(worst, rel(exp_integral_e1(x), ref));
    }
    CHECK(worst < 1e-12);
    for (double x : {0.05, 0.7, 1.5, 1.6, 3.0, 12.0, 60.0}) {
      CHECK(rel(exp_integral_e1(x), e1_by_quadrature(x)) < 1e-12);
    }
  }

  TEST_CASE("E1 small-argument behaviour") {
    for (double x : {1e-8, 1e-5, 1e-3, 0.1}) {
      CHECK(rel(exp_integral_e1(x), static_cast<double>(e1_series_reference(x))) < 1e-14);
    }
    // E1(x) + ln x -> -gamma.
    CHECK(std::fabs(exp_integral_e1(1e-8) + std::log(1e-8) + static_cast<double>(kEulerGamma)) < 2e-8);
  }

  TEST_CASE("E1 bracket at 10") {
    const double v = exp_integral_e1(10.0);
    CHECK(v > 0.0);
    CHECK(v < std::exp(-10.0) / 10.0);
  }

  TEST_CASE("E1 positive and strictly decreasing on (0, 50]") {
    double prev = std::numeric_limits<double>::infinity();
    for (double x : logspace(1e-6, 50.0, 2000)) {
      const double v = exp_integral_e1(x);
      CHECK(v > 0.0);
      CHECK(v < prev);
      prev = v;
    }
  }

  TEST_CASE("E1 domain and underflow") {
    CHECK_THROWS_AS(exp_integral_e1(0.0), DomainError);
    CHECK_THROWS_AS(exp_integral_e1(-1.0), DomainError);
    CHECK(exp_integral_e1(800.0) == 0.0);
    CHECK(exp_integral_e1(std::numeric_limits<double>::infinity()) == 0.0);
  }

  TEST_CASE("Ei principal value") {
    CHECK(rel(exp_integral_ei(1.0), ei_by_quadrature(1.0)) < 1e-13);
    CHECK(exp_integral_ei(1.0) == doctest::Approx(1.89511781635594).epsilon(1e-12));
    CHECK(exp_integral_ei(-1.0) == doctest::Approx(-0.21938393439552).epsilon(1e-12));
    double worst = 0.0;
    for (double x : logspace(1e-6, 700.0, 400)) worst = std::max(worst, rel(exp_integral_ei(x), boost::math::expint(x)));
    CHECK(worst < 1e-12);
    for (double x : {0.3, 2.0, 6.0, 7.0, 25.0, 39.0, 41.0}) {
      CHECK(rel(exp_integral_ei(x), ei_by_quadrature(x)) < 1e-12);
    }
    CHECK_THROWS_AS(exp_integral_ei(0.0), DomainError);
    CHECK(std::isinf(exp_integral_ei(720.0)));
  }

  TEST_CASE("Ei(-x) = -E1(x)") {
    double worst = 0.0;
    for (double x : logspace(1e-6, 50.0, 1000)) {
      worst = std::max(worst, std::fabs(exp_integral_ei(-x) + exp_integral_e1(x)) / exp_integral_e1(x));
    }
    CHECK(worst <= 1e-12);
  }

  TEST_CASE("E1 on the negative axis") {
    CHECK(e1_negative_principal(-1.0) == doctest::Approx(-1.89511781635594).epsilon(1e-12));
    for (double x : {-1e-4, -0.5, -3.0, -20.0}) {
      CHECK(e1_negative_principal(x) == -exp_integral_ei(-x));
    }
    // Logarithmic singularity: -Ei(t) -> +inf as t -> 0+.
    CHECK(e1_negative_principal(-1e-12) > 25.0);
    CHECK_THROWS_AS(e1_negative_principal(0.0), DomainError);
    CHECK_THROWS_AS(e1_negative_principal(1.0), DomainError);
  }

  TEST_CASE("Kummer M special values") {
    CHECK(kummer_m(0.7, 1.3, 0.0) == 1.0);
    CHECK(std::fabs(kummer_m(1.0, 1.0, 1.0) - std::numbers::e) <= 1e-12 * std::numbers::e);
    CHECK(kummer_m(1.0, 1.0, 3.5) == doctest::Approx(std::exp(3.5)).epsilon(1e-13));
    CHECK(kummer_m(1.0, 2.0, 1.0) == doctest::Approx(std::numbers::e - 1.0).epsilon(1e-14));
    // M(1, 2, z) = (e^z - 1)/z also for negative z through the transformation.
    CHECK(kummer_m(1.0, 2.0, -4.0) == doctest::Approx(-std::expm1(-4.0) / 4.0).epsilon(1e-13));
  }

  TEST_CASE("Kummer M against Boost 1F1") {
    const double as[] = {-2.5, 0.5, 1.5, 3.0};
    const double bs[] = {0.5, 1.0, 2.5};
    const double zs[] = {-30.0, -5.0, -0.3, 0.2, 2.0, 10.0, 40.0};
    for (double a : as) {
      for (double b : bs) {
        for (double z : zs) {
          const double ref = boost::math::hypergeometric_1F1(a, b, z);
          const double got = kummer_m(a, b, z);
          CAPTURE(a);
          CAPTURE(b);
          CAPTURE(z);
          CHECK(std::fabs(got - ref) <= 1e-11 * std::max(1.0, std::fabs(ref)));
        }
      }
    }
  }

  TEST_CASE("Kummer ODE residual in extended precision") {
    // z y'' + (b - z) y' - a y = 0 with centered differences, h = 1e-4.
    const long double h = 1e-4L;
    for (auto [a, b] : {std::pair{1.5L, 1.0L}, std::pair{0.5L, 2.0L}, std::pair{-1.25L, 0.75L}}) {
      long double worst = 0.0L;
      for (int i = 0; i <= 19; ++i) {
        const long double z = 0.1L + 0.1L * i;
        const long double m0 = kummer_m(a, b, z, {500, 1e-19});
        const long double mp = kummer_m(a, b, z + h, {500, 1e-19});
        const long double mm = kummer_m(a, b, z - h, {500, 1e-19});
        const long double d1 = (mp - mm) / (2 * h);
        const long double d2 = (mp - 2 * m0 + mm) / (h * h);
        worst = std::max(worst, std::fabs(z * d2 + (b - z) * d1 - a * m0));
      }
      CAPTURE(static_cast<double>(a));
      CHECK(static_cast<double>(worst) <= 1e-8);
    }
  }

  TEST_CASE("Kummer ODE residual in double, relative to rounding") {
    const double h = 1e-3;
    const double a = 1.5, b = 1.0;
    for (double z : {0.5, 1.0, 2.0, 4.0}) {
      const double m0 = kummer_m(a, b, z), mp = kummer_m(a, b, z + h), mm = kummer_m(a, b, z - h);
      const double r = z * (mp - 2 * m0 + mm) / (h * h) + (b - z) * (mp - mm) / (2 * h) - a * m0;
      // Truncation O(h^2 M''') plus rounding O(eps M / h^2).
      CHECK(std::fabs(r) <= 1e-5 * std::fabs(m0));
    }
  }

  TEST_CASE("Kummer M errors") {
    CHECK_THROWS_AS(kummer_m(1.0, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(kummer_m(1.0, -3.0, 1.0), DomainError);
    CHECK_THROWS_AS(kummer_m(1.0, 1.0, 250.0), ConvergenceError);
    CHECK_THROWS_AS(kummer_m(1.0, 1.0, -250.0), ConvergenceError);
    CHECK_THROWS_AS(kummer_m(1.0, 1.0, 50.0, {3, 1e-16}), ConvergenceError);
    CHECK_THROWS(SeriesControl{0, 1e-16}.validate());
    CHECK_THROWS(SeriesControl{10, 1.0}.validate());
    CHECK_THROWS(SeriesControl{10, 0.0}.validate());
    // Terminating series for negative integer a.
    CHECK(kummer_m(-2.0, 1.0, 3.0) == doctest::Approx(1.0 - 2.0 * 3.0 + 9.0 / 2.0));
  }

  TEST_CASE("Kummer M float instantiation") {
    CHECK(kummer_m(1.0f, 1.0f, 1.0f) == doctest::Approx(std::numbers::e_v<float>).epsilon(1e-6));
  }

  TEST_CASE("deterministic") {
    for (double x : {0.37, 2.9, 31.0}) {
      CHECK(exp_integral_e1(x) == exp_integral_e1(x));
      CHECK(exp_integral_ei(x) == exp_integral_ei(x));
      CHECK(kummer_m(0.3, 1.7, x) == kummer_m(0.3, 1.7, x));
    }
  }
}
