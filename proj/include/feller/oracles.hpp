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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <variant>
#include <vector>

#include "feller/lagrange.hpp"
#include "feller/params.hpp"

namespace feller::oracles {

// Implicit finite-volume solver on [0, L] with M uniform cells.
struct EulerianConfig {
  double L = 100.0;
  std::size_t M = 4000;
  double dt = 1e-3;
  double theta = 1.0;

  void validate() const;
};

struct EulerianResult {
  // Cell-centre samples at each requested output time.
  std::vector<DensitySnapshot> snapshots;
  // Largest |mass_{n+1} - mass_n| / mass_0 over all steps.
  double max_step_mass_drift = 0.0;
  std::size_t steps = 0;
};

// Throws TruncationError when more than 1e-3 of the mass sits in the last 5%
// of the domain at the start or at any output time.
EulerianResult eulerian_solve(const EulerianConfig& cfg, const FellerParams& params,
                              const lagrange::InitialCondition& ic, double t_end,
                              const std::vector<double>& output_times);
// Same solver from explicit cell-centre values (for degenerate data such as p0 = 0).
EulerianResult eulerian_solve(const EulerianConfig& cfg, const FellerParams& params,
                              std::vector<double> p0, double t_end,
                              const std::vector<double>& output_times);

// pde_consistent: dX = (eta - gamma X) dt + sqrt(2 eta X) dW, whose law solves
//   the Feller equation (the one with the matching moment law).
// langevin_printed: dX = -gamma X dt + sqrt(2 eta X) dW.
enum class DriftModel { pde_consistent, langevin_printed };

struct PointStart {
  double x0 = 1.0;
};
struct IcStart {
  lagrange::InitialCondition ic;
};
using MCStart = std::variant<PointStart, IcStart>;

struct MCConfig {
  std::size_t paths = 100000;
  double dt = 1e-3;
  std::uint64_t seed = 20240607;
  MCStart x_init = PointStart{};
  DriftModel drift = DriftModel::pde_consistent;
  std::size_t bins = 200;
  // 0 selects std::thread::hardware_concurrency().
  std::size_t threads = 0;

  void validate() const;
};

struct Histogram {
  std::vector<double> edges;
  std::vector<double> density;
  double absorbed_fraction = 0.0;

  DensitySamples centers() const;
};

struct MCResult {
  Histogram histogram;
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t steps = 0;
};

// Full-truncation Euler-Maruyama ensemble. Path i draws its normals from its own
// counter-based stream, so results do not depend on the thread count.
MCResult mc_simulate(const MCConfig& cfg, const FellerParams& params, double t_end);

void write_histogram_csv(const Histogram& h, std::ostream& out);
void write_histogram_csv(const Histogram& h, const std::filesystem::path& path);

enum class Metric { linf, l1 };

// Distance between two piecewise-linear densities on the union of their nodes,
// restricted to the overlap and to x >= exclude_below. L1 uses the trapezoid rule.
double compare_pdf(const DensitySamples& a, const DensitySamples& b, Metric metric,
                   double exclude_below = 0.0);

}  // namespace feller::oracles
