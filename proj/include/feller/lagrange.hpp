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

#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "feller/params.hpp"

namespace feller::lagrange {

// Two-exponential mixture used by the transient experiments:
// p0(x) = (exp(-x/s1) + exp(-(x - x0)/s2)) / (s1 + s2 exp(x0/s2)).
struct DoubleExp {
  double sigma1 = 2.0;
  double sigma2 = 1.0;
  double x0 = 3.0;
};

// Steady state exp(-gamma x/eta) (c1 E1(-gamma x/eta) + c2). Only c1 = 0 with
// gamma > 0 normalises to a probability density.
struct Steady {
  double c1 = 0.0;
  double c2 = 1.0;
  FellerParams params;
};

// Piecewise-linear density through (x_i, p_i), x_0 = 0, zero beyond x_back.
struct Tabulated {
  std::vector<double> x;
  std::vector<double> p;
};

using IcDescriptor = std::variant<DoubleExp, Steady, Tabulated>;

// A normalised initial density with its cumulative distribution and pseudo-inverse.
class InitialCondition {
 public:
  static InitialCondition double_exp(double sigma1, double sigma2, double x0);
  static InitialCondition steady(const FellerParams& params, double c1, double c2);
  static InitialCondition tabulated(std::vector<double> x, std::vector<double> p);
  static InitialCondition from_descriptor(const IcDescriptor& d);

  double density(double x) const { return density_(x); }
  double primitive(double x) const { return primitive_(x); }
  // 1 - primitive(x), evaluated without cancellation where a closed form exists.
  double survival(double x) const { return survival_(x); }
  // inf { x >= 0 : primitive(x) >= u } for u in [0, 1).
  double quantile(double u) const;
  // Right end of the support, +inf for unbounded densities.
  double support_end() const { return support_end_; }
  const IcDescriptor& descriptor() const { return descriptor_; }

 private:
  InitialCondition() = default;

  IcDescriptor descriptor_;
  std::function<double(double)> density_;
  std::function<double(double)> primitive_;
  std::function<double(double)> survival_;
  double support_end_ = 0.0;
};

// First moment int_0^inf x p0(x) dx by adaptive quadrature.
double ic_first_moment(const InitialCondition& ic);

enum class MeanKind { arithmetic, geometric };

// Cumulative-probability nodes P_0 < ... < P_N with their spacings. Immutable.
class MassGrid {
 public:
  MassGrid(std::vector<double> cumulative, MeanKind mean_kind = MeanKind::arithmetic);

  std::size_t n() const { return p_.size() - 1; }
  const std::vector<double>& P() const { return p_; }
  // dP_{k+1/2} = P_{k+1} - P_k, k = 0..N-1.
  const std::vector<double>& dp_half() const { return dp_half_; }
  // dP_k per mean_kind for k = 1..N-1; dP_0 = dP_{1/2}/2; dP_N = (P_N - P_{N-2})/2.
  const std::vector<double>& dp_center() const { return dp_center_; }
  double dp_right() const { return dp_center_.back(); }
  MeanKind mean_kind() const { return mean_kind_; }

 private:
  std::vector<double> p_;
  std::vector<double> dp_half_;
  std::vector<double> dp_center_;
  MeanKind mean_kind_;
};

// Time and node values Y_k = exp(gamma t) X_k; Y_0 = 0, strictly increasing.
struct ParticleState {
  double t = 0.0;
  std::vector<double> y;

  // Throws OrderingViolation when the invariants fail.
  void validate() const;
};

struct LogSpaced {
  std::optional<double> x_max;    // defaults to l0
  std::optional<double> x_first;  // defaults to 1e-3 * x_max
};
// Geometric spacing of 1 + x on [0, x_max].
struct LogShifted {
  std::optional<double> x_max;
};
struct Uniform {
  std::optional<double> x_max;
};
struct Custom {
  std::vector<double> positions;
};
using SamplingStrategy = std::variant<LogSpaced, LogShifted, Uniform, Custom>;

struct SamplingConfig {
  std::size_t n = 100;
  double tail_tol = 1e-5;
  SamplingStrategy strategy = LogSpaced{};

  void validate() const;
};

// Smallest l0 with 1 - P0(l0) < tail_tol, bracketed to relative width 1e-12.
double choose_domain_l0(const InitialCondition& ic, double tail_tol);

std::vector<double> initial_positions(const SamplingConfig& cfg, double l0);

struct LagrangianSetup {
  MassGrid grid;
  ParticleState state;
};

// P_k = P0(x_k) and Y_k(0) = x_k. Throws DegenerateGrid if any dP_{k+1/2}
// is at the rounding floor.
LagrangianSetup build_mass_grid(const InitialCondition& ic, const std::vector<double>& positions,
                                MeanKind mean_kind = MeanKind::arithmetic);

// Semi-discrete right-hand side dY/dt. Throws OrderingViolation on a
// non-positive gap.
std::vector<double> lagrangian_rhs(const ParticleState& state, const MassGrid& grid,
                                   const FellerParams& params);

double total_probability(const MassGrid& grid);

// sum_k dP_k X_k with X_k = exp(-gamma t) Y_k.
double first_moment(const ParticleState& state, const MassGrid& grid, const FellerParams& params);

// Solution of M' = eta m - gamma M, M(0) = m1_0.
double moment_ode_prediction(const FellerParams& params, double mass, double m1_0, double t);

}  // namespace feller::lagrange
