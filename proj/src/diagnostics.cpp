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
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

#include "feller/analytic.hpp"
#include "feller/diagnostics.hpp"
#include "feller/errors.hpp"

namespace feller::diagnostics {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Row below(std::string check, std::string item, std::string metric, double value, double threshold) {
  return {std::move(check), std::move(item), std::move(metric), value, threshold, value <= threshold};
}

DensitySamples final_midpoints(const experiment::RunResult& r) {
  return reconstruct::midpoint_samples(r.final_snapshot());
}

struct Family {
  const char* name;
  FellerParams params;
  analytic::Solution solution;
};

std::vector<Family> families() {
  const FellerParams unit{1.0, 1.0};
  const FellerParams expanding{-1.0, 1.0};
  const FellerParams mild{0.5, 1.0};
  const analytic::SteadyStateParams plain{0.0, 1.0};
  const analytic::SteadyStateParams general{0.5, 1.0};
  const analytic::SteadyStateParams mixed{0.3, 1.0};
  return {
      {"steady", unit, [=](double, double x) { return analytic::steady_state_p(unit, plain, x); }},
      {"steady_general", expanding,
       [=](double, double x) { return analytic::steady_state_p(expanding, general, x); }},
      {"xi3", mild, [=](double t, double x) { return analytic::xi3_solution(mild, mixed, t, x); }},
      {"xi4", mild, [=](double t, double x) { return analytic::xi4_solution(mild, mixed, t, x); }},
  };
}

const char* kind_name(analytic::SymmetryKind k) {
  switch (k) {
    case analytic::SymmetryKind::time_shift:
      return "time_shift";
    case analytic::SymmetryKind::scale_p:
      return "scale_p";
    case analytic::SymmetryKind::exp_scale_3:
      return "exp_scale_3";
    case analytic::SymmetryKind::exp_scale_4:
      return "exp_scale_4";
    case analytic::SymmetryKind::add_kummer_m:
      return "add_kummer_m";
  }
  return "?";
}

}  // namespace

bool Report::passed() const {
  for (const auto& r : rows) {
    if (!r.pass) return false;
  }
  return true;
}

void Report::append(const Report& other) { rows.insert(rows.end(), other.rows.begin(), other.rows.end()); }

void Report::write_csv(std::ostream& out) const {
  out << "check,item,metric,value,threshold,pass\n";
  char buf[64];
  for (const auto& r : rows) {
    out << r.check << ',' << r.item << ',' << r.metric << ',';
    std::snprintf(buf, sizeof buf, "%.9g,%.9g", r.value, r.threshold);
    out << buf << ',' << (r.pass ? "PASS" : "FAIL") << '\n';
  }
}

Report check_residual(const std::string& family) {
  Report rep;
  const analytic::ResidualGrid grid{0.0, 1.0, 5, 0.5, 2.0, 16};
  bool matched = false;
  for (const auto& f : families()) {
    if (family != "all" && family != f.name) continue;
    matched = true;
    const auto study = analytic::residual_convergence(f.solution, f.params, grid, 0.04, 0.04, 4);
    for (std::size_t k = 0; k < study.orders.size(); ++k) {
      const double order = study.orders[k];
      rep.rows.push_back({"residual", f.name, "order_h" + fmt(study.h[k + 1]), order, 2.0,
                          std::fabs(order - 2.0) <= 0.3});
    }
  }
  if (!matched) throw ConfigError("unknown residual family '" + family + "'");
  return rep;
}

Report check_symmetry(const std::string& kind) {
  Report rep;
  const FellerParams params{0.5, 1.0};
  const analytic::SteadyStateParams ss{0.3, 1.0};
  const analytic::Solution base = [=](double t, double x) {
    return analytic::xi4_solution(params, ss, t, x);
  };
  const analytic::ResidualGrid grid{0.2, 1.0, 5, 0.5, 2.0, 16};
  const double h = 1e-3;
  const double baseline = analytic::pde_residual(base, params, grid, h, h).max_abs;
  bool matched = false;
  using K = analytic::SymmetryKind;
  for (K k : {K::time_shift, K::scale_p, K::exp_scale_3, K::exp_scale_4, K::add_kummer_m}) {
    if (kind != "all" && kind != kind_name(k)) continue;
    matched = true;
    const std::vector<double> cs =
        k == K::add_kummer_m ? std::vector<double>{0.0, params.gamma / 2.0} : std::vector<double>{0.0};
    for (double eps : {0.1, -0.1}) {
      for (double c : cs) {
        const analytic::SymmetryTransform tr{k, eps, c};
        const auto image = analytic::transformed_solution(tr, params, base);
        const double r = analytic::pde_residual(image, params, grid, h, h).max_abs;
        std::string item = std::string(kind_name(k)) + " eps=" + fmt(eps);
        if (k == K::add_kummer_m) item += " c=" + fmt(c);
        rep.rows.push_back(below("symmetry", item, "residual_over_baseline", r / baseline, 10.0));
      }
    }
  }
  if (!matched) throw ConfigError("unknown symmetry kind '" + kind + "'");
  return rep;
}

Report check_conservation(const experiment::RunConfig& cfg) {
  Report rep;
  const double a = 1.0, b = 10.0;
  const std::size_t n0 = cfg.sampling.n;
  // Time refinement first: at the coarse spacing the time-difference error
  // dominates, at the fine one the spatial error does.
  const double spacing = cfg.T / 30.0;
  struct Level {
    std::size_t n;
    double spacing;
  };
  const Level levels[] = {{n0, spacing}, {n0, spacing / 4.0}, {2 * n0, spacing / 4.0}};
  std::vector<double> defects;
  for (const auto& lv : levels) {
    experiment::RunConfig c = cfg;
    c.sampling.n = lv.n;
    if (auto* custom = std::get_if<lagrange::Custom>(&c.sampling.strategy)) {
      (void)custom;
      throw ConfigError("conservation check needs a generated sampling strategy");
    }
    const auto count = static_cast<std::size_t>(std::llround(cfg.T / lv.spacing));
    c.output.times.clear();
    for (std::size_t i = 0; i <= count; ++i) c.output.times.push_back(cfg.T * static_cast<double>(i) / count);
    const auto res = experiment::solve(c);
    std::vector<DensitySnapshot> snaps;
    for (const auto& s : res.snapshots) snaps.push_back({s.t, reconstruct::midpoint_samples(s)});
    const double d = analytic::conservation_law_check(snaps, cfg.params, a, b);
    defects.push_back(d);
    rep.rows.push_back({"conservation", "N=" + std::to_string(lv.n) + " dt_snap=" + fmt(lv.spacing),
                        "max_defect", d, std::numeric_limits<double>::infinity(), std::isfinite(d)});
  }
  rep.rows.push_back({"conservation", "refine_time", "defect_ratio", defects[1] / defects[0], 1.0,
                      defects[1] < defects[0]});
  rep.rows.push_back({"conservation", "refine_grid", "defect_ratio", defects[2] / defects[1], 1.0,
                      defects[2] < defects[1]});
  return rep;
}

Report check_moments(const experiment::RunConfig& cfg, const experiment::RunResult& result) {
  (void)cfg;
  Report rep;
  for (const auto& m : result.moments) {
    rep.rows.push_back(below("moment", "t=" + fmt(m.t), "rel_err", m.rel_err, 0.02));
  }
  return rep;
}

Report check_oracle(const experiment::RunConfig& cfg, const experiment::RunResult& result,
                    const Options& opt) {
  Report rep;
  const auto ic = experiment::make_initial_condition(cfg);
  const double t = result.final_snapshot().t;
  const auto eul = oracles::eulerian_solve(opt.eulerian, cfg.params, ic, t, {t});
  const double dx = opt.eulerian.L / static_cast<double>(opt.eulerian.M);
  const auto lag = final_midpoints(result);
  const auto& ref = eul.snapshots.back().samples;
  rep.rows.push_back(below("oracle", "eulerian", "linf",
                           oracles::compare_pdf(lag, ref, oracles::Metric::linf, 5.0 * dx), 0.01));
  rep.rows.push_back(below("oracle", "eulerian", "l1",
                           oracles::compare_pdf(lag, ref, oracles::Metric::l1, 5.0 * dx), 0.02));
  rep.rows.push_back(below("oracle", "eulerian", "max_step_mass_drift", eul.max_step_mass_drift, 1e-12));
  return rep;
}

Report check_mc(const experiment::RunConfig& cfg, const experiment::RunResult& result,
                const Options& opt) {
  Report rep;
  oracles::MCConfig mc;
  mc.paths = opt.mc_paths;
  mc.dt = opt.mc_dt;
  mc.seed = opt.seed;
  mc.threads = opt.threads;
  mc.x_init = oracles::IcStart{experiment::make_initial_condition(cfg)};
  const double t = result.final_snapshot().t;
  const auto out = oracles::mc_simulate(mc, cfg.params, t);
  const auto& h = out.histogram;
  const double width = h.edges[1] - h.edges[0];
  const double l1 = oracles::compare_pdf(final_midpoints(result), h.centers(), oracles::Metric::l1, 5.0 * width);
  rep.rows.push_back(below("mc", "paths=" + std::to_string(mc.paths), "l1", l1, 0.05));
  const double predicted = lagrange::moment_ode_prediction(cfg.params, 1.0, result.m1_initial, t);
  const double z = std::fabs(out.mean - predicted) / out.std_error;
  rep.rows.push_back(below("mc", "mean", "z_score_vs_moment_ode", z, 4.0));
  rep.rows.push_back({"mc", "absorbed", "fraction", h.absorbed_fraction, 1.0, true});
  return rep;
}

Report run_diagnostics(const experiment::RunConfig& cfg, const Options& opt,
                       const experiment::RunResult* result) {
  Report rep;
  const auto& f = cfg.diagnostics;
  std::optional<experiment::RunResult> own;
  auto solved = [&]() -> const experiment::RunResult& {
    if (result) return *result;
    if (!own) own.emplace(experiment::solve(cfg));
    return *own;
  };
  if (f.residual) rep.append(check_residual(opt.family));
  if (f.moment_track) rep.append(check_moments(cfg, solved()));
  if (f.oracle_compare) rep.append(check_oracle(cfg, solved(), opt));
  if (f.mc_compare) rep.append(check_mc(cfg, solved(), opt));
  if (f.conservation_law) rep.append(check_conservation(cfg));
  return rep;
}

}  // namespace feller::diagnostics
