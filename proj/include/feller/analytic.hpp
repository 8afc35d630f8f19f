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
#include <span>
#include <vector>

#include "feller/params.hpp"

// Exact solution families of the Feller equation, its point symmetries and
// numerical verifiers of the equation and of its E1-weighted conservation law.
namespace feller::analytic {

struct SteadyStateParams {
  double c1 = 0.0;  // weight of the E1 branch (carries a constant flux c1 * eta)
  double c2 = 1.0;  // weight of the pure exponential branch
};

enum class SymmetryKind { time_shift, scale_p, exp_scale_3, exp_scale_4, add_kummer_m };

struct SymmetryTransform {
  SymmetryKind kind = SymmetryKind::time_shift;
  double epsilon = 0.0;
  double c = 0.0;  // spectral parameter, add_kummer_m only
};

struct SolutionSample {
  double t = 0.0;
  double x = 0.0;
  double p = 0.0;
};

// A solution p(t, x).
using Solution = std::function<double(double t, double x)>;

double steady_state_p(const FellerParams& params, const SteadyStateParams& ss, double x);
double steady_state_dpdx(const FellerParams& params, const SteadyStateParams& ss, double x);

// F = -x (gamma p + eta p_x).
double physical_flux(const FellerParams& params, double x, double p, double p_x);

double xi3_solution(const FellerParams& params, const SteadyStateParams& ss, double t, double x);
double xi4_solution(const FellerParams& params, const SteadyStateParams& ss, double t, double x);

// Maps a point (t, x, p) of a solution graph to a point of another solution.
SolutionSample apply_point_symmetry(const SymmetryTransform& tr, const FellerParams& params,
                                    const SolutionSample& s);

SymmetryTransform inverse(const SymmetryTransform& tr);

// The image of a whole solution under a point symmetry, evaluated pointwise by
// pulling (t, x) back through the inverse map.
Solution transformed_solution(const SymmetryTransform& tr, const FellerParams& params,
                              Solution base);

struct ResidualGrid {
  double t0 = 0.0;
  double t1 = 1.0;
  int nt = 5;
  double x0 = 0.5;
  double x1 = 2.0;
  int nx = 16;
};

struct ResidualReport {
  double max_abs = 0.0;
  double l2 = 0.0;
};

// R = p_t + F_x at the grid points with centered differences of width h_t and
// h_x; F_x is differenced in flux form from F at x +/- h_x/2.
ResidualReport pde_residual(const Solution& solution, const FellerParams& params,
                            const ResidualGrid& grid, double h_t, double h_x);

struct ConvergenceStudy {
  std::vector<double> h;                // h_x at each level (h_t scales alongside)
  std::vector<ResidualReport> reports;  // one per level
  std::vector<double> orders;           // log2 ratio of consecutive max norms
};

ConvergenceStudy residual_convergence(const Solution& solution, const FellerParams& params,
                                      const ResidualGrid& grid, double h_t, double h_x,
                                      int levels);

// E1(-gamma x / eta), principal value when the argument is negative.
double conserved_weight(const FellerParams& params, double x);

// G = -eta exp(gamma x / eta) p - x (gamma w p + eta w p_x), w = conserved_weight.
double conservation_flux(const FellerParams& params, double x, double p, double p_x);

// Max over interior snapshot times of |dD/dt - (G(a) - G(b))| with
// D(t) = int_a^b w p dx. Needs at least three snapshots.
double conservation_law_check(std::span<const DensitySnapshot> snapshots,
                              const FellerParams& params, double a, double b);

}  // namespace feller::analytic
