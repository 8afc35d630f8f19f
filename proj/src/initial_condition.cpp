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
#include <limits>
#include <string>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "feller/errors.hpp"
#include "feller/lagrange.hpp"

namespace feller::lagrange {

namespace {

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw DomainError(std::string(name) + " must be finite");
}

}  // namespace

InitialCondition InitialCondition::double_exp(double sigma1, double sigma2, double x0) {
  require_finite(sigma1, "sigma1");
  require_finite(sigma2, "sigma2");
  require_finite(x0, "x0");
  if (sigma1 <= 0.0 || sigma2 <= 0.0) throw DomainError("double_exp: sigma1, sigma2 must be > 0");
  if (x0 < 0.0) throw DomainError("double_exp: x0 must be >= 0");

  const double shift = std::exp(x0 / sigma2);
  const double norm = sigma1 + sigma2 * shift;
  if (!std::isfinite(norm)) throw DomainError("double_exp: x0/sigma2 too large");

  InitialCondition ic;
  ic.descriptor_ = DoubleExp{sigma1, sigma2, x0};
  ic.support_end_ = std::numeric_limits<double>::infinity();
  ic.density_ = [=](double x) {
    if (x < 0.0) return 0.0;
    return (std::exp(-x / sigma1) + std::exp(-(x - x0) / sigma2)) / norm;
  };
  ic.primitive_ = [=](double x) {
    if (x <= 0.0) return 0.0;
    return (-sigma1 * std::expm1(-x / sigma1) - sigma2 * shift * std::expm1(-x / sigma2)) / norm;
  };
  ic.survival_ = [=](double x) {
    if (x <= 0.0) return 1.0;
    return (sigma1 * std::exp(-x / sigma1) + sigma2 * std::exp(-(x - x0) / sigma2)) / norm;
  };
  return ic;
}

InitialCondition InitialCondition::steady(const FellerParams& params, double c1, double c2) {
  params.validate();
  if (c1 != 0.0) throw DomainError("steady initial condition requires c1 = 0 (not normalisable)");
  if (!(params.gamma > 0.0)) throw DomainError("steady initial condition requires gamma > 0");
  if (!(c2 > 0.0) || !std::isfinite(c2)) throw DomainError("steady initial condition requires c2 > 0");

  const double rate = params.gamma / params.eta;
  InitialCondition ic;
  ic.descriptor_ = Steady{c1, c2, params};
  ic.support_end_ = std::numeric_limits<double>::infinity();
  ic.density_ = [rate](double x) { return x < 0.0 ? 0.0 : rate * std::exp(-rate * x); };
  ic.primitive_ = [rate](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-rate * x); };
  ic.survival_ = [rate](double x) { return x <= 0.0 ? 1.0 : std::exp(-rate * x); };
  return ic;
}

InitialCondition InitialCondition::tabulated(std::vector<double> x, std::vector<double> p) {
  if (x.size() != p.size()) throw DomainError("tabulated: x and p differ in length");
  if (x.size() < 2) throw DomainError("tabulated: need at least two points");
  if (x.front() != 0.0) throw DomainError("tabulated: x must start at 0");
  for (std::size_t i = 0; i < x.size(); ++i) {
    require_finite(x[i], "tabulated x");
    require_finite(p[i], "tabulated p");
    if (p[i] < 0.0) throw DomainError("tabulated: negative density at index " + std::to_string(i));
    if (i > 0 && !(x[i] > x[i - 1])) {
      throw DomainError("tabulated: x not strictly increasing at index " + std::to_string(i));
    }
  }

  // Exact integral of the interpolant, cell by cell.
  std::vector<double> cum(x.size(), 0.0);
  for (std::size_t i = 1; i < x.size(); ++i) {
    cum[i] = cum[i - 1] + 0.5 * (p[i - 1] + p[i]) * (x[i] - x[i - 1]);
  }
  const double total = cum.back();
  if (!(total > 0.0)) throw DomainError("tabulated: density integrates to zero");
  for (auto& v : p) v /= total;
  for (auto& v : cum) v /= total;

  auto locate = [](const std::vector<double>& xs, double v) {
    auto it = std::upper_bound(xs.begin(), xs.end(), v);
    return static_cast<std::size_t>(it - xs.begin()) - 1;
  };
  // Mass of [x_i, v] under the linear piece on cell i.
  auto partial = [](const std::vector<double>& xs, const std::vector<double>& ps, std::size_t i,
                    double v) {
    const double h = xs[i + 1] - xs[i];
    const double s = v - xs[i];
    const double slope = (ps[i + 1] - ps[i]) / h;
    return s * (ps[i] + 0.5 * slope * s);
  };

  InitialCondition ic;
  ic.support_end_ = x.back();
  ic.density_ = [x, p, locate](double v) {
    if (v < 0.0 || v > x.back()) return 0.0;
    if (v == x.back()) return p.back();
    const std::size_t i = locate(x, v);
    const double w = (v - x[i]) / (x[i + 1] - x[i]);
    return (1.0 - w) * p[i] + w * p[i + 1];
  };
  ic.primitive_ = [x, p, cum, locate, partial](double v) {
    if (v <= 0.0) return 0.0;
    if (v >= x.back()) return 1.0;
    const std::size_t i = locate(x, v);
    return cum[i] + partial(x, p, i, v);
  };
  ic.survival_ = [x, p, cum, locate, partial](double v) {
    if (v <= 0.0) return 1.0;
    if (v >= x.back()) return 0.0;
    const std::size_t i = locate(x, v);
    return (1.0 - cum[i + 1]) + ((cum[i + 1] - cum[i]) - partial(x, p, i, v));
  };
  ic.descriptor_ = Tabulated{std::move(x), std::move(p)};
  return ic;
}

InitialCondition InitialCondition::from_descriptor(const IcDescriptor& d) {
  return std::visit(
      [](const auto& v) -> InitialCondition {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, DoubleExp>) {
          return double_exp(v.sigma1, v.sigma2, v.x0);
        } else if constexpr (std::is_same_v<T, Steady>) {
          return steady(v.params, v.c1, v.c2);
        } else {
          return tabulated(v.x, v.p);
        }
      },
      d);
}

double InitialCondition::quantile(double u) const {
  if (!(u >= 0.0 && u < 1.0)) throw DomainError("quantile: u must lie in [0, 1)");
  if (u == 0.0) return 0.0;
  // Residual measured on the side of the distribution that avoids cancellation.
  const bool upper = u > 0.5;
  const double target = upper ? 1.0 - u : u;
  auto below = [&](double x) { return upper ? survival(x) > target : primitive(x) < target; };

  double lo = 0.0;
  double hi = std::isfinite(support_end_) ? support_end_ : 1.0;
  while (below(hi)) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw ConvergenceError("quantile: bracket search overflowed");
  }
  for (int iter = 0; iter < 2200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi;
       ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (below(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

double ic_first_moment(const InitialCondition& ic) {
  if (const auto* tab = std::get_if<Tabulated>(&ic.descriptor())) {
    const auto& x = tab->x;
    // The descriptor holds the normalised samples.
    const auto& p = tab->p;
    double m = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
      const double h = x[i + 1] - x[i];
      m += h * (x[i] * 0.5 * (p[i] + p[i + 1]) + h * (p[i] / 6.0 + p[i + 1] / 3.0));
    }
    return m;
  }
  boost::math::quadrature::exp_sinh<double> integrator;
  auto f = [&ic](double x) { return x * ic.density(x); };
  double err = 0.0;
  const double m = integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-13,
                                        &err);
  return m;
}

}  // namespace feller::lagrange
