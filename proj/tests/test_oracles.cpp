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
#include <sstream>
#include <vector>

#include "doctest.h"
#include "feller/errors.hpp"
#include "feller/integrate.hpp"
#include "feller/oracles.hpp"
#include "feller/philox.hpp"
#include "feller/reconstruct.hpp"

using namespace feller;
using namespace feller::oracles;

namespace {

double linf_change(const DensitySnapshot& a, const DensitySnapshot& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.samples.p.size(); ++i) m = std::max(m, std::fabs(a.samples.p[i] - b.samples.p[i]));
  return m;
}

}  // namespace

TEST_SUITE("oracles") {
  TEST_CASE("philox known answers") {
    using rng::Counter;
    CHECK(rng::philox4x32_10({0, 0, 0, 0}, {0, 0}) == Counter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(rng::philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          Counter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(rng::philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          Counter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
  }

  TEST_CASE("uniform and normal conversions") {
    CHECK(rng::to_unit(0, 0) == 0.0);
    CHECK(rng::to_unit(0xffffffff, 0xffffffff) < 1.0);
    const rng::PathStream s(1, 2);
    double sum = 0.0, sq = 0.0;
    const int n = 20000;
    for (int j = 0; j < n; ++j) {
      const auto z = rng::normal_pair(s.block(j));
      sum += z[0] + z[1];
      sq += z[0] * z[0] + z[1] * z[1];
    }
    CHECK(std::fabs(sum / (2 * n)) < 4.0 / std::sqrt(2.0 * n));
    CHECK(sq / (2 * n) == doctest::Approx(1.0).epsilon(0.05));
  }

  TEST_CASE("eulerian config validation") {
    EulerianConfig c;
    CHECK_NOTHROW(c.validate());
    c.M = 8;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.theta = 0.3;
    CHECK_THROWS_AS(c.validate(), ConfigError);
  }

  TEST_CASE("eulerian steady state is nearly stationary") {
    const auto ic = lagrange::InitialCondition::steady({1.0, 1.0}, 0.0, 1.0);
    const auto res = eulerian_solve({30.0, 3000, 1e-3, 1.0}, {1.0, 1.0}, ic, 5.0, {0.0, 5.0});
    REQUIRE(res.snapshots.size() == 2);
    CHECK(linf_change(res.snapshots[0], res.snapshots[1]) <= 5e-3);
    CHECK(res.max_step_mass_drift <= 1e-12);
    CHECK(res.steps == 5000);
  }

  TEST_CASE("eulerian zero data stays zero") {
    const auto res = eulerian_solve({10.0, 100, 1e-2, 1.0}, {0.5, 1.0}, std::vector<double>(100, 0.0), 1.0, {1.0});
    for (double p : res.snapshots.back().samples.p) CHECK(p == 0.0);
  }

  TEST_CASE("eulerian mass is conserved step by step") {
    const auto ic = lagrange::InitialCondition::double_exp(2.0, 1.0, 3.0);
    for (double theta : {0.5, 1.0}) {
      const auto res = eulerian_solve({100.0, 2000, 1e-2, theta}, {-0.1, 1.0}, ic, 3.0, {3.0});
      CHECK(res.max_step_mass_drift <= 1e-12);
    }
  }

  TEST_CASE("eulerian truncation is detected") {
    const auto ic = lagrange::InitialCondition::double_exp(2.0, 1.0, 3.0);
    CHECK_THROWS_AS(eulerian_solve({8.0, 400, 1e-2, 1.0}, {-0.1, 1.0}, ic, 1.0, {}), TruncationError);
    CHECK_THROWS_AS(eulerian_solve({30.0, 300, 1e-2, 1.0}, {0.5, 1.0}, ic, 1.0, {2.0}), DomainError);
  }

  TEST_CASE("lagrangian and eulerian agree on the steady test") {
    const FellerParams prm{1.0, 1.0};
    const auto ic = lagrange::InitialCondition::steady(prm, 0.0, 1.0);
    lagrange::SamplingConfig cfg;
    cfg.n = 500;
    cfg.strategy = lagrange::LogShifted{};
    const auto s = lagrange::build_mass_grid(ic, lagrange::initial_positions(cfg, lagrange::choose_domain_l0(ic, 1e-5)));
    const auto rec = integrate::rk45_advance(s.state, s.grid, prm, 1.0, {});
    const auto snap = reconstruct::reconstruct_pdf(rec.final_state, s.grid, prm);
    const auto eul = eulerian_solve({30.0, 3000, 1e-3, 1.0}, prm, ic, 1.0, {1.0});
    CHECK(compare_pdf(reconstruct::midpoint_samples(snap), eul.snapshots[0].samples, Metric::linf) <= 0.01);
  }

  TEST_CASE("compare_pdf on simple data") {
    const DensitySamples a{{0.0, 1.0, 2.0, 3.0}, {1.0, 2.0, 3.0, 4.0}};
    CHECK(compare_pdf(a, a, Metric::linf) == 0.0);
    CHECK(compare_pdf(a, a, Metric::l1) == 0.0);
    const DensitySamples b{{0.5, 2.5}, {1.75, 3.75}};
    // b sits 0.25 above a on [0.5, 2.5].
    CHECK(compare_pdf(a, b, Metric::linf) == doctest::Approx(0.25));
    CHECK(compare_pdf(a, b, Metric::l1) == doctest::Approx(0.5));
    CHECK(compare_pdf(a, b, Metric::l1, 1.5) == doctest::Approx(0.25));
    CHECK_THROWS_AS(compare_pdf(a, b, Metric::l1, 5.0), DomainError);
    CHECK_THROWS_AS(compare_pdf(a, DensitySamples{{1.0, 0.5}, {1.0, 1.0}}, Metric::l1), DomainError);
  }

  TEST_CASE("mc without noise decays deterministically") {
    MCConfig c;
    c.paths = 1000;
    c.dt = 1e-3;
    c.x_init = PointStart{2.0};
    c.drift = DriftModel::langevin_printed;
    const auto r = mc_simulate(c, {0.5, 1e-12}, 1.0);
    CHECK(r.steps == 1000);
    CHECK(r.mean == doctest::Approx(2.0 * std::exp(-0.5)).epsilon(1e-3));
    CHECK(r.std_error < 1e-4);
    CHECK(r.histogram.absorbed_fraction == 0.0);
  }

  TEST_CASE("mc mean follows the moment law with gamma = 0") {
    MCConfig c;
    c.paths = 100000;
    c.dt = 1e-2;
    c.x_init = PointStart{5.0};
    const FellerParams prm{0.0, 0.5};
    const auto grow = mc_simulate(c, prm, 1.0);
    CHECK(std::fabs(grow.mean - (5.0 + prm.eta * 1.0)) <= 3.0 * grow.std_error);
    c.drift = DriftModel::langevin_printed;
    const auto flat = mc_simulate(c, prm, 1.0);
    CHECK(std::fabs(flat.mean - 5.0) <= 3.0 * flat.std_error);
  }

  TEST_CASE("mc reproducibility and thread independence") {
    MCConfig c;
    c.paths = 3000;
    c.dt = 1e-2;
    c.x_init = IcStart{lagrange::InitialCondition::double_exp(2.0, 1.0, 3.0)};
    c.threads = 1;
    const auto a = mc_simulate(c, {-0.1, 1.0}, 0.5);
    const auto b = mc_simulate(c, {-0.1, 1.0}, 0.5);
    c.threads = 3;
    const auto d = mc_simulate(c, {-0.1, 1.0}, 0.5);
    CHECK(a.histogram.density == b.histogram.density);
    CHECK(a.histogram.density == d.histogram.density);
    CHECK(a.mean == d.mean);
    c.seed += 1;
    CHECK(mc_simulate(c, {-0.1, 1.0}, 0.5).mean != a.mean);
  }

  TEST_CASE("mc histogram is normalized") {
    MCConfig c;
    c.paths = 20000;
    c.dt = 1e-2;
    c.x_init = PointStart{0.2};
    c.bins = 50;
    const auto r = mc_simulate(c, {1.0, 1.0}, 1.0);
    double total = r.histogram.absorbed_fraction;
    for (std::size_t i = 0; i < r.histogram.density.size(); ++i) {
      CHECK(r.histogram.density[i] >= 0.0);
      total += r.histogram.density[i] * (r.histogram.edges[i + 1] - r.histogram.edges[i]);
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.histogram.edges.size() == 51);
    CHECK(r.histogram.edges.front() == 0.0);
    std::ostringstream out;
    write_histogram_csv(r.histogram, out);
    CHECK(out.str().rfind("bin_left,bin_right,density\n", 0) == 0);
    CHECK(out.str().find("# absorbed=") != std::string::npos);
  }

  TEST_CASE("mc initial sampling reproduces the initial mean") {
    MCConfig c;
    c.paths = 50000;
    const auto ic = lagrange::InitialCondition::double_exp(2.0, 1.0, 3.0);
    c.x_init = IcStart{ic};
    const auto r = mc_simulate(c, {-0.1, 1.0}, 0.0);
    CHECK(r.steps == 0);
    CHECK(std::fabs(r.mean - lagrange::ic_first_moment(ic)) <= 4.0 * r.std_error);
  }

  TEST_CASE("mc weak convergence in dt") {
    MCConfig c;
    c.paths = 100000;
    c.x_init = IcStart{lagrange::InitialCondition::double_exp(2.0, 1.0, 3.0)};
    c.dt = 2e-2;
    const auto coarse = mc_simulate(c, {-0.1, 1.0}, 1.0);
    c.dt = 1e-2;
    const auto fine = mc_simulate(c, {-0.1, 1.0}, 1.0);
    const double se = std::hypot(coarse.std_error, fine.std_error);
    CHECK(std::fabs(coarse.mean - fine.mean) < 3.0 * se);
  }

  TEST_CASE("mc config validation") {
    MCConfig c;
    c.paths = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.dt = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.x_init = PointStart{-1.0};
    CHECK_THROWS_AS(c.validate(), ConfigError);
  }
}
