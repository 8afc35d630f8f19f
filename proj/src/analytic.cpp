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

#include "feller/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "feller/errors.hpp"
#include "feller/specfun.hpp"

namespace feller {

void FellerParams::validate() const {
  if (!std::isfinite(gamma)) throw DomainError("FellerParams: gamma must be finite");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw DomainError("FellerParams: eta must be > 0");
}

}  // namespace feller

namespace feller::analytic {
namespace {

void require_nonzero_gamma(const FellerParams& params, const char* who) {
  if (params.gamma == 0.0) throw DomainError(std::string(who) + ": requires gamma != 0");
}

// Value at x of the quadratic through the three samples nearest to x, and its slope.
std::pair<double, double> local_quadratic(const DensitySamples& s, double x) {
  const auto& xs = s.x;
  const std::size_t n = xs.size();
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  std::size_t i = static_cast<std::size_t>(std::distance(xs.begin(), it));
  // Centre the stencil on the sample closest to x.
  std::size_t c = (i == 0) ? 0 : i - 1;
  if (i < n && (c + 1 < n) && std::fabs(xs[c + 1] - x) < std::fabs(xs[c] - x)) c += 1;
  c = std::clamp<std::size_t>(c, 1, n - 2);
  const double x0 = xs[c - 1], x1 = xs[c], x2 = xs[c + 1];
  const double y0 = s.p[c - 1], y1 = s.p[c], y2 = s.p[c + 1];
  const double l0 = (x - x1) * (x - x2) / ((x0 - x1) * (x0 - x2));
  const double l1 = (x - x0) * (x - x2) / ((x1 - x0) * (x1 - x2));
  const double l2 = (x - x0) * (x - x1) / ((x2 - x0) * (x2 - x1));
  const double d0 = ((x - x1) + (x - x2)) / ((x0 - x1) * (x0 - x2));
  const double d1 = ((x - x0) + (x - x2)) / ((x1 - x0) * (x1 - x2));
  const double d2 = ((x - x0) + (x - x1)) / ((x2 - x0) * (x2 - x1));
  return {l0 * y0 + l1 * y1 + l2 * y2, d0 * y0 + d1 * y1 + d2 * y2};
}

double linear_interp(const DensitySamples& s, double x) {
  auto it = std::upper_bound(s.x.begin(), s.x.end(), x);
  if (it == s.x.begin()) return s.p.front();
  if (it == s.x.end()) return s.p.back();
  const std::size_t i = static_cast<std::size_t>(std::distance(s.x.begin(), it)) - 1;
  const double w = (x - s.x[i]) / (s.x[i + 1] - s.x[i]);
  return (1.0 - w) * s.p[i] + w * s.p[i + 1];
}

constexpr int kQuadratureIntervals = 2000;

}  // namespace

double steady_state_p(const FellerParams& params, const SteadyStateParams& ss, double x) {
  const double z = params.gamma * x / params.eta;
  if (ss.c1 == 0.0) return std::exp(-z) * ss.c2;
  require_nonzero_gamma(params, "steady_state_p");
  if (!(x > 0.0)) throw DomainError("steady_state_p: E1 branch needs x > 0");
  const double e1 = (z < 0.0) ? specfun::exp_integral_e1(-z) : specfun::e1_negative_principal(-z);
  return std::exp(-z) * (ss.c1 * e1 + ss.c2);
}

double steady_state_dpdx(const FellerParams& params, const SteadyStateParams& ss, double x) {
  // d/dx E1(-gamma x / eta) = -exp(gamma x / eta) / x on either branch.
  const double p = steady_state_p(params, ss, x);
  const double branch = (ss.c1 == 0.0) ? 0.0 : ss.c1 / x;
  return -params.gamma / params.eta * p - branch;
}

double physical_flux(const FellerParams& params, double x, double p, double p_x) {
  return -x * (params.gamma * p + params.eta * p_x);
}

double xi3_solution(const FellerParams& params, const SteadyStateParams& ss, double t, double x) {
  require_nonzero_gamma(params, "xi3_solution");
  if (!(x > 0.0)) throw DomainError("xi3_solution: x must be positive");
  return (ss.c2 - ss.c1 * t + ss.c1 / params.gamma * std::log(x)) *
         std::exp(-params.gamma * x / params.eta);
}

double xi4_solution(const FellerParams& params, const SteadyStateParams& ss, double t, double x) {
  require_nonzero_gamma(params, "xi4_solution");
  if (!(x > 0.0)) throw DomainError("xi4_solution: x must be positive");
  return (ss.c1 + ss.c2 * t + ss.c2 / params.gamma * std::log(x)) * std::exp(params.gamma * t);
}

SolutionSample apply_point_symmetry(const SymmetryTransform& tr, const FellerParams& params,
                                    const SolutionSample& s) {
  if (tr.epsilon == 0.0) return s;
  const double eps = tr.epsilon;
  const double g = params.gamma;
  switch (tr.kind) {
    case SymmetryKind::time_shift:
      return {s.t + eps, s.x, s.p};
    case SymmetryKind::scale_p:
      return {s.t, s.x, std::exp(eps) * s.p};
    case SymmetryKind::exp_scale_3: {
      require_nonzero_gamma(params, "exp_scale_3");
      const double egt = std::exp(g * s.t);
      const double q = eps * g + egt;
      if (!(q > 0.0)) throw DomainError("exp_scale_3: eps*gamma + exp(gamma t) must be positive");
      return {std::log(q) / g, egt / q * s.x, (1.0 + eps * g / egt) * s.p};
    }
    case SymmetryKind::exp_scale_4: {
      require_nonzero_gamma(params, "exp_scale_4");
      const double egt = std::exp(g * s.t);
      const double q = 1.0 - eps * g * egt;
      if (!(q > 0.0)) throw DomainError("exp_scale_4: 1 - eps*gamma*exp(gamma t) must be positive");
      const double factor = std::exp(-eps * g * g * s.x * egt / (params.eta * q));
      return {s.t - std::log(q) / g, s.x / q, factor * s.p};
    }
    case SymmetryKind::add_kummer_m: {
      require_nonzero_gamma(params, "add_kummer_m");
      const double z = g * s.x / params.eta;
      const double m = specfun::kummer_m(1.0 + tr.c / g, 1.0, z);
      return {s.t, s.x, s.p + eps * m * std::exp(-z + (g + tr.c) * s.t)};
    }
  }
  throw DomainError("apply_point_symmetry: unknown kind");
}

SymmetryTransform inverse(const SymmetryTransform& tr) {
  // Every implemented map is a one-parameter group additive in epsilon.
  return {tr.kind, -tr.epsilon, tr.c};
}

Solution transformed_solution(const SymmetryTransform& tr, const FellerParams& params,
                              Solution base) {
  return [tr, params, base = std::move(base)](double t, double x) {
    const SolutionSample src = apply_point_symmetry(inverse(tr), params, {t, x, 0.0});
    return apply_point_symmetry(tr, params, {src.t, src.x, base(src.t, src.x)}).p;
  };
}

ResidualReport pde_residual(const Solution& solution, const FellerParams& params,
                            const ResidualGrid& grid, double h_t, double h_x) {
  ResidualReport out;
  double sum_sq = 0.0;
  std::size_t count = 0;
  const double dt_grid = grid.nt > 1 ? (grid.t1 - grid.t0) / (grid.nt - 1) : 0.0;
  const double dx_grid = grid.nx > 1 ? (grid.x1 - grid.x0) / (grid.nx - 1) : 0.0;
  auto flux_at = [&](double t, double x) {
    const double p = solution(t, x);
    const double p_x = (solution(t, x + 0.5 * h_x) - solution(t, x - 0.5 * h_x)) / h_x;
    return physical_flux(params, x, p, p_x);
  };
  for (int i = 0; i < grid.nt; ++i) {
    const double t = grid.t0 + i * dt_grid;
    for (int j = 0; j < grid.nx; ++j) {
      const double x = grid.x0 + j * dx_grid;
      const double p_t = (solution(t + h_t, x) - solution(t - h_t, x)) / (2.0 * h_t);
      const double f_x = (flux_at(t, x + 0.5 * h_x) - flux_at(t, x - 0.5 * h_x)) / h_x;
      const double r = p_t + f_x;
      out.max_abs = std::max(out.max_abs, std::fabs(r));
      sum_sq += r * r;
      ++count;
    }
  }
  out.l2 = count ? std::sqrt(sum_sq / static_cast<double>(count)) : 0.0;
  return out;
}

ConvergenceStudy residual_convergence(const Solution& solution, const FellerParams& params,
                                      const ResidualGrid& grid, double h_t, double h_x,
                                      int levels) {
  ConvergenceStudy study;
  double scale = 1.0;
  for (int k = 0; k < levels; ++k) {
    study.h.push_back(h_x * scale);
    study.reports.push_back(pde_residual(solution, params, grid, h_t * scale, h_x * scale));
    scale *= 0.5;
  }
  for (std::size_t k = 0; k + 1 < study.reports.size(); ++k) {
    study.orders.push_back(std::log2(study.reports[k].max_abs / study.reports[k + 1].max_abs));
  }
  return study;
}

double conserved_weight(const FellerParams& params, double x) {
  require_nonzero_gamma(params, "conserved_weight");
  if (!(x > 0.0)) throw DomainError("conserved_weight: x must be positive");
  const double arg = -params.gamma * x / params.eta;
  return arg > 0.0 ? specfun::exp_integral_e1(arg) : specfun::e1_negative_principal(arg);
}

double conservation_flux(const FellerParams& params, double x, double p, double p_x) {
  const double w = conserved_weight(params, x);
  return -params.eta * std::exp(params.gamma * x / params.eta) * p -
         x * (params.gamma * w * p + params.eta * w * p_x);
}

double conservation_law_check(std::span<const DensitySnapshot> snapshots,
                              const FellerParams& params, double a, double b) {
  require_nonzero_gamma(params, "conservation_law_check");
  if (!(a > 0.0)) throw DomainError("conservation_law_check: interval must not touch x = 0");
  if (!(b > a)) throw DomainError("conservation_law_check: need b > a");
  if (snapshots.size() < 3) throw DomainError("conservation_law_check: need >= 3 snapshots");

  const int n = kQuadratureIntervals;
  const double dx = (b - a) / n;
  std::vector<double> w(n + 1);
  for (int i = 0; i <= n; ++i) w[i] = conserved_weight(params, a + i * dx);

  std::vector<double> content(snapshots.size());
  std::vector<double> net_flux(snapshots.size());
  for (std::size_t s = 0; s < snapshots.size(); ++s) {
    const DensitySamples& d = snapshots[s].samples;
    if (d.x.size() < 3 || d.x.size() != d.p.size()) {
      throw DomainError("conservation_law_check: snapshot needs >= 3 samples");
    }
    if (!(d.x.front() < a && b < d.x.back())) {
      throw DomainError("conservation_law_check: [a, b] must lie inside the sampled range");
    }
    double acc = 0.5 * (w[0] * linear_interp(d, a) + w[n] * linear_interp(d, b));
    for (int i = 1; i < n; ++i) acc += w[i] * linear_interp(d, a + i * dx);
    content[s] = acc * dx;
    const auto [pa, pxa] = local_quadratic(d, a);
    const auto [pb, pxb] = local_quadratic(d, b);
    net_flux[s] = conservation_flux(params, a, pa, pxa) - conservation_flux(params, b, pb, pxb);
  }

  double defect = 0.0;
  for (std::size_t s = 1; s + 1 < snapshots.size(); ++s) {
    const double hm = snapshots[s].t - snapshots[s - 1].t;
    const double hp = snapshots[s + 1].t - snapshots[s].t;
    const double rate = (hm * hm * (content[s + 1] - content[s]) +
                         hp * hp * (content[s] - content[s - 1])) /
                        (hm * hp * (hm + hp));
    defect = std::max(defect, std::fabs(rate - net_flux[s]));
  }
  return defect;
}

}  // namespace feller::analytic
