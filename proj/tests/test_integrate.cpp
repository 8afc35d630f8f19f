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

#include "doctest.h"
#include "feller/errors.hpp"
#include "feller/integrate.hpp"

using namespace feller;
using namespace feller::lagrange;
using namespace feller::integrate;

namespace {

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

LagrangianSetup dexp_setup(std::size_t n, SamplingStrategy strategy) {
  const auto ic = InitialCondition::double_exp(2.0, 1.0, 3.0);
  SamplingConfig cfg;
  cfg.n = n;
  cfg.strategy = std::move(strategy);
  return build_mass_grid(ic, initial_positions(cfg, 20.0));
}

StepControl tol(double v) {
  StepControl c;
  c.abstol = v;
  c.reltol = v;
  return c;
}

}  // namespace

TEST_SUITE("integrate") {
  TEST_CASE("euler step on the three-node example") {
    const MassGrid g({0.0, 0.5, 1.0});
    const auto next = euler_step({0.0, {0.0, 1.0, 2.0}}, g, {0.0, 1.0}, 0.1);
    CHECK(next.t == doctest::Approx(0.1));
    CHECK(next.y[0] == 0.0);
    CHECK(next.y[1] == 1.0);
    CHECK(next.y[2] == doctest::Approx(2.2));
    const ParticleState s{0.3, {0.0, 1.0, 2.0}};
    CHECK(euler_step(s, g, {0.0, 1.0}, 0.0).y == s.y);
    // A step far too large collapses the ordering.
    CHECK_THROWS_AS(euler_step({0.0, {0.0, 0.01, 0.02, 5.0}}, MassGrid({0.0, 0.4, 0.5, 1.0}), {0.0, 1.0}, 10.0),
                    OrderingViolation);
  }

  TEST_CASE("zero-length advance is the identity") {
    const auto s = dexp_setup(30, LogSpaced{20.0, std::nullopt});
    const auto rec = rk45_advance(s.state, s.grid, {0.5, 1.0}, 0.0, {}, {0.0});
    CHECK(rec.accepted == 0);
    CHECK(rec.rejected == 0);
    CHECK(rec.final_state.y == s.state.y);
    REQUIRE(rec.outputs.size() == 1);
    CHECK(rec.outputs[0].y == s.state.y);
  }

  TEST_CASE("two-node system against its closed form") {
    // With P = [0, 1/2, 1] and Y = s(t) [0, 1, 3] both nodes move by the same factor:
    // s' = (eta/2) e^{gamma t}.
    const MassGrid g({0.0, 0.5, 1.0});
    for (FellerParams prm : {FellerParams{0.0, 1.0}, FellerParams{0.7, 1.5}, FellerParams{-0.4, 0.8}}) {
      const auto rec = rk45_advance({0.0, {0.0, 1.0, 3.0}}, g, prm, 1.0, tol(1e-8));
      const double lam = prm.eta / 2.0;
      const double s = prm.gamma == 0.0 ? 1.0 + lam : 1.0 + lam * std::expm1(prm.gamma) / prm.gamma;
      CHECK(std::fabs(rec.final_state.y[1] - s) <= 1e-8 * (1.0 + s));
      CHECK(std::fabs(rec.final_state.y[2] - 3.0 * s) <= 1e-8 * (1.0 + 3.0 * s));
      CHECK(rec.final_state.t == 1.0);
    }
    // Default tolerances.
    const auto rec = rk45_advance({0.0, {0.0, 1.0, 3.0}}, g, {0.0, 1.0}, 1.0, {});
    CHECK(std::fabs(rec.final_state.y[2] - 4.5) <= 1e-5);
  }

  TEST_CASE("output times are hit exactly") {
    const auto s = dexp_setup(40, LogSpaced{20.0, std::nullopt});
    const std::vector<double> ts{0.0, 0.25, 0.5, 0.5, 1.0, 1.5};
    const auto rec = rk45_advance(s.state, s.grid, {-0.1, 1.0}, 1.5, {}, ts);
    // One record per requested time, repeats included.
    REQUIRE(rec.outputs.size() == ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) CHECK(rec.outputs[i].t == ts[i]);
    CHECK(rec.outputs[2].y == rec.outputs[3].y);
    CHECK(rec.final_state.t == 1.5);
    CHECK_THROWS_AS(rk45_advance(s.state, s.grid, {-0.1, 1.0}, 1.0, {}, {0.5, 0.2}), DomainError);
    CHECK_THROWS_AS(rk45_advance(s.state, s.grid, {-0.1, 1.0}, 1.0, {}, {2.0}), DomainError);
    CHECK_THROWS_AS(rk45_advance(s.state, s.grid, {-0.1, 1.0}, -1.0, {}), DomainError);
  }

  TEST_CASE("every accepted state is ordered and pinned") {
    const auto s = dexp_setup(80, LogSpaced{20.0, std::nullopt});
    std::size_t seen = 0;
    double last_t = 0.0;
    const auto rec = rk45_advance(s.state, s.grid, {0.5, 1.0}, 3.0, {}, {}, [&](const ParticleState& st) {
      ++seen;
      CHECK(st.t > last_t);
      last_t = st.t;
      CHECK(st.y[0] == 0.0);
      CHECK_NOTHROW(st.validate());
    });
    CHECK(seen == rec.accepted);
    CHECK(last_t == 3.0);
  }

  TEST_CASE("ordering loss rejects the step") {
    const auto s = dexp_setup(40, Uniform{20.0});
    StepControl c;
    c.dt_init = 5.0;
    const auto rec = rk45_advance(s.state, s.grid, {0.5, 1.0}, 5.0, c);
    CHECK(rec.ordering_rejections > 0);
    CHECK(rec.rejected >= rec.ordering_rejections);
    CHECK_NOTHROW(rec.final_state.validate());

    c.dt_min = 5.0;
    c.dt_max = 5.0;
    try {
      rk45_advance(s.state, s.grid, {0.5, 1.0}, 5.0, c);
      FAIL("expected failure");
    } catch (const IntegrationFailure& e) {
      CHECK(e.t_reached() == 0.0);
    }
  }

  TEST_CASE("step control validation") {
    StepControl c;
    CHECK_NOTHROW(c.validate());
    c.reltol = 1.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.abstol = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.dt_min = 1.0;
    c.dt_init = 0.5;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    const auto r = StepControl{}.resolved(10.0);
    CHECK(*r.dt_init == doctest::Approx(1e-3));
    CHECK(*r.dt_min == doctest::Approx(1e-11));
    CHECK(*r.dt_max == 10.0);
  }

  TEST_CASE("determinism") {
    const auto s = dexp_setup(60, LogSpaced{20.0, std::nullopt});
    const auto a = rk45_advance(s.state, s.grid, {-0.1, 1.0}, 2.0, {}, {1.0});
    const auto b = rk45_advance(s.state, s.grid, {-0.1, 1.0}, 2.0, {}, {1.0});
    CHECK(a.accepted == b.accepted);
    CHECK(a.rejected == b.rejected);
    CHECK(a.final_state.y == b.final_state.y);
    CHECK(a.outputs[0].y == b.outputs[0].y);
  }

  TEST_CASE("tightening tolerances does not increase the defect") {
    const auto s = dexp_setup(50, LogSpaced{20.0, std::nullopt});
    const FellerParams prm{0.5, 1.0};
    const auto ref = rk45_advance(s.state, s.grid, prm, 2.0, tol(1e-9)).final_state.y;
    double prev = 1e300;
    for (double v : {1e-3, 1e-4, 1e-5, 1e-6, 1e-7}) {
      const double d = max_diff(rk45_advance(s.state, s.grid, prm, 2.0, tol(v)).final_state.y, ref);
      CAPTURE(v);
      CHECK(d <= prev);
      prev = d;
    }
    CHECK(prev < 1e-5);
  }

  TEST_CASE("explicit Euler converges at first order") {
    const auto s = dexp_setup(20, Uniform{20.0});
    const FellerParams prm{0.5, 1.0};
    const double T = 0.5;
    const auto ref = rk45_advance(s.state, s.grid, prm, T, tol(1e-11)).final_state.y;
    std::vector<double> err;
    for (double dt : {0.01, 0.005, 0.0025, 0.00125}) {
      err.push_back(max_diff(euler_advance(s.state, s.grid, prm, T, dt).final_state.y, ref));
    }
    for (std::size_t i = 0; i + 1 < err.size(); ++i) {
      CHECK(std::log2(err[i] / err[i + 1]) == doctest::Approx(1.0).epsilon(0.3));
    }
  }

  TEST_CASE("euler advance lands on outputs") {
    const auto s = dexp_setup(20, Uniform{20.0});
    const auto rec = euler_advance(s.state, s.grid, {0.5, 1.0}, 0.1, 0.03, {0.05, 0.1});
    REQUIRE(rec.outputs.size() == 2);
    CHECK(rec.outputs[0].t == 0.05);
    CHECK(rec.final_state.t == 0.1);
    CHECK(rec.accepted == 4);
  }

  TEST_CASE("CFL reference bound") {
    const MassGrid g({0.0, 0.5, 1.0});
    const ParticleState st{0.0, {0.0, 0.01, 20.0}};
    CHECK(cfl_reference_dt(g, st, {1.0, 1.0}) == doctest::Approx(2.5e-6));
    CHECK(cfl_reference_dt(g, st, {1.0, 2.0}) == doctest::Approx(1.25e-6));
    // Expanding run: the support grows, but the smallest gap near the origin
    // grows faster, so the bound itself increases on this sampling.
    const auto s = dexp_setup(100, LogSpaced{20.0, std::nullopt});
    const FellerParams prm{-0.1, 1.0};
    const auto end = rk45_advance(s.state, s.grid, prm, 3.0, {}).final_state;
    const double x_end = std::exp(-prm.gamma * end.t) * end.y.back();
    CHECK(x_end > 3.0 * s.state.y.back());
    CHECK(cfl_reference_dt(s.grid, end, prm) > cfl_reference_dt(s.grid, s.state, prm));
  }
}
