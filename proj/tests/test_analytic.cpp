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
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "doctest.h"
#include "feller/analytic.hpp"
#include "feller/errors.hpp"
#include "feller/specfun.hpp"

using namespace feller;
using namespace feller::analytic;

namespace {

double flux_of(const Solution& s, const FellerParams& prm, double t, double x, double h = 1e-5) {
  const double px = (s(t, x + h) - s(t, x - h)) / (2 * h);
  return physical_flux(prm, x, s(t, x), px);
}

std::vector<DensitySnapshot> sample(const Solution& s, double t0, double dt, int nt, double x0, double x1,
                                    int nx) {
  std::vector<DensitySnapshot> out;
  for (int i = 0; i < nt; ++i) {
    DensitySnapshot snap{t0 + i * dt, {}};
    for (int j = 0; j <= nx; ++j) {
      const double x = x0 + (x1 - x0) * j / nx;
      snap.samples.x.push_back(x);
      snap.samples.p.push_back(s(snap.t, x));
    }
    out.push_back(std::move(snap));
  }
  return out;
}

}  // namespace

TEST_SUITE("analytic") {
  TEST_CASE("steady state values") {
    const FellerParams unit{1.0, 1.0};
    CHECK(steady_state_p(unit, {0.0, 1.0}, 0.0) == 1.0);
    for (double x : {0.1, 1.0, 7.5}) CHECK(steady_state_p(unit, {0.0, 1.0}, x) == doctest::Approx(std::exp(-x)));
    CHECK_THROWS_AS(steady_state_p(unit, {1.0, 1.0}, 0.0), DomainError);
    CHECK_THROWS_AS(steady_state_p({0.0, 1.0}, {1.0, 1.0}, 1.0), DomainError);
  }

  TEST_CASE("flux on steady states is c1 eta") {
    for (FellerParams prm : {FellerParams{1.0, 1.0}, FellerParams{0.7, 2.0}, FellerParams{-0.4, 1.5}}) {
      for (double c1 : {0.0, 0.3, -1.2}) {
        const SteadyStateParams ss{c1, 0.8};
        for (double x : {0.2, 1.0, 3.0}) {
          const double F = physical_flux(prm, x, steady_state_p(prm, ss, x), steady_state_dpdx(prm, ss, x));
          CHECK(F == doctest::Approx(c1 * prm.eta).epsilon(1e-12).scale(1.0));
          // Same through a finite-difference derivative.
          const Solution s = [=](double, double xx) { return steady_state_p(prm, ss, xx); };
          CHECK(flux_of(s, prm, 0.0, x) == doctest::Approx(c1 * prm.eta).epsilon(1e-7).scale(1.0));
        }
      }
    }
    CHECK(physical_flux({1.0, 1.0}, 0.0, 3.0, -7.0) == 0.0);
  }

  TEST_CASE("invariant families solve the equation") {
    const FellerParams prm{0.5, 1.0};
    const SteadyStateParams ss{0.3, 1.0};
    const ResidualGrid grid{0.0, 1.0, 5, 0.5, 2.0, 16};
    for (const Solution& s : {Solution([&](double t, double x) { return xi3_solution(prm, ss, t, x); }),
                              Solution([&](double t, double x) { return xi4_solution(prm, ss, t, x); })}) {
      const auto study = residual_convergence(s, prm, grid, 0.04, 0.04, 4);
      for (double order : study.orders) CHECK(order == doctest::Approx(2.0).epsilon(0.15));
      CHECK(study.reports.back().max_abs < 5e-4);
    }
    CHECK_THROWS_AS(xi3_solution({0.0, 1.0}, ss, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(xi4_solution(prm, ss, 0.0, -1.0), DomainError);
  }

  TEST_CASE("non-solutions are detected") {
    const FellerParams prm{0.5, 1.0};
    const Solution wrong = [](double t, double x) { return std::exp(-x) * (1.0 + t); };
    const ResidualGrid grid{0.0, 1.0, 5, 0.5, 2.0, 16};
    CHECK(pde_residual(wrong, prm, grid, 1e-3, 1e-3).max_abs > 0.1);
  }

  TEST_CASE("point symmetries form one-parameter groups") {
    const FellerParams prm{0.5, 1.3};
    using K = SymmetryKind;
    for (K k : {K::time_shift, K::scale_p, K::exp_scale_3, K::exp_scale_4, K::add_kummer_m}) {
      const SymmetryTransform tr{k, 0.1, 0.2};
      const SolutionSample s{0.4, 1.7, 0.9};
      const auto there = apply_point_symmetry(tr, prm, s);
      const auto back = apply_point_symmetry(inverse(tr), prm, there);
      CHECK(back.t == doctest::Approx(s.t).epsilon(1e-13));
      CHECK(back.x == doctest::Approx(s.x).epsilon(1e-13));
      CHECK(back.p == doctest::Approx(s.p).epsilon(1e-13));
      // Composition adds parameters.
      const auto twice = apply_point_symmetry(tr, prm, there);
      const auto once = apply_point_symmetry({k, 0.2, 0.2}, prm, s);
      CHECK(twice.t == doctest::Approx(once.t).epsilon(1e-13));
      CHECK(twice.x == doctest::Approx(once.x).epsilon(1e-13));
      CHECK(twice.p == doctest::Approx(once.p).epsilon(1e-13));
      const auto same = apply_point_symmetry({k, 0.0, 0.2}, prm, s);
      CHECK(same.t == s.t);
      CHECK(same.x == s.x);
      CHECK(same.p == s.p);
    }
  }

  TEST_CASE("symmetry domain conditions") {
    const FellerParams prm{1.0, 1.0};
    CHECK_THROWS_AS(apply_point_symmetry({SymmetryKind::exp_scale_3, -2.0, 0.0}, prm, {0.0, 1.0, 1.0}),
                    DomainError);
    CHECK_THROWS_AS(apply_point_symmetry({SymmetryKind::exp_scale_4, 1.0, 0.0}, prm, {0.0, 1.0, 1.0}),
                    DomainError);
    CHECK_THROWS_AS(apply_point_symmetry({SymmetryKind::add_kummer_m, 0.1, 0.0}, {0.0, 1.0}, {0.0, 1.0, 1.0}),
                    DomainError);
  }

  TEST_CASE("transformed solutions keep solving the equation") {
    const FellerParams prm{0.5, 1.0};
    const Solution base = [&](double t, double x) { return xi4_solution(prm, {0.3, 1.0}, t, x); };
    const ResidualGrid grid{0.2, 1.0, 5, 0.5, 2.0, 16};
    using K = SymmetryKind;
    for (K k : {K::time_shift, K::scale_p, K::exp_scale_3, K::exp_scale_4, K::add_kummer_m}) {
      const auto image = transformed_solution({k, 0.1, 0.25}, prm, base);
      const auto study = residual_convergence(image, prm, grid, 0.02, 0.02, 3);
      for (double order : study.orders) CHECK(order == doctest::Approx(2.0).epsilon(0.15));
    }
  }

  TEST_CASE("Kummer mode alone is a solution") {
    for (double c : {0.0, 0.25, -0.3}) {
      const FellerParams prm{0.5, 1.0};
      const Solution q = [=](double t, double x) {
        const double z = prm.gamma * x / prm.eta;
        return std::exp((prm.gamma + c) * t - z) * specfun::kummer_m(1.0 + c / prm.gamma, 1.0, z);
      };
      const auto study = residual_convergence(q, prm, {0.0, 1.0, 5, 0.3, 3.0, 12}, 0.02, 0.02, 3);
      for (double order : study.orders) CHECK(order == doctest::Approx(2.0).epsilon(0.15));
    }
  }

  TEST_CASE("conserved weight and flux") {
    CHECK_THROWS_AS(conserved_weight({0.0, 1.0}, 1.0), DomainError);
    CHECK_THROWS_AS(conserved_weight({1.0, 1.0}, 0.0), DomainError);
    CHECK(conserved_weight({-0.5, 1.0}, 2.0) == specfun::exp_integral_e1(1.0));
    CHECK(conserved_weight({0.5, 1.0}, 2.0) == -specfun::exp_integral_ei(1.0));
  }

  TEST_CASE("balance law holds for an exact time-dependent solution") {
    // d/dt int_a^b w p dx = G(a) - G(b), checked with quadrature and exact data.
    for (double g : {-0.5, 0.5}) {
      const FellerParams prm{g, 1.0};
      const Solution s = [&](double t, double x) { return xi4_solution(prm, {0.3, 1.0}, t, x); };
      const double a = 1.0, b = 4.0, t = 0.3, h = 1e-4;
      auto content = [&](double tt) {
        auto f = [&](double x) { return conserved_weight(prm, x) * s(tt, x); };
        return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 10, 1e-14);
      };
      const double rate = (content(t + h) - content(t - h)) / (2 * h);
      auto px = [&](double x) { return (s(t, x + 1e-5) - s(t, x - 1e-5)) / 2e-5; };
      const double net = conservation_flux(prm, a, s(t, a), px(a)) - conservation_flux(prm, b, s(t, b), px(b));
      CAPTURE(g);
      CHECK(rate == doctest::Approx(net).epsilon(1e-6));
    }
  }

  TEST_CASE("balance-law defect shrinks with sampling") {
    const FellerParams prm{-0.5, 1.0};
    const Solution s = [&](double t, double x) { return xi4_solution(prm, {0.3, 1.0}, t, x); };
    const auto coarse = sample(s, 0.0, 0.1, 6, 0.5, 5.0, 90);
    const auto fine = sample(s, 0.0, 0.05, 11, 0.5, 5.0, 180);
    const double d0 = conservation_law_check(coarse, prm, 1.0, 4.0);
    const double d1 = conservation_law_check(fine, prm, 1.0, 4.0);
    CHECK(d1 < d0);
    CHECK(d1 < 1e-3);
    CHECK_THROWS_AS(conservation_law_check(coarse, prm, 0.0, 4.0), DomainError);
    CHECK_THROWS_AS(conservation_law_check(coarse, prm, 1.0, 6.0), DomainError);
    CHECK_THROWS_AS(conservation_law_check(std::span(coarse).first(2), prm, 1.0, 4.0), DomainError);
  }
}
