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
#include <iosfwd>
#include <string>
#include <vector>

#include "feller/experiment.hpp"
#include "feller/oracles.hpp"

namespace feller::diagnostics {

struct Row {
  std::string check;
  std::string item;
  std::string metric;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct Report {
  std::vector<Row> rows;

  bool passed() const;
  void append(const Report& other);
  // check,item,metric,value,threshold,pass
  void write_csv(std::ostream& out) const;
};

struct Options {
  std::string family = "all";  // residual: steady, steady_general, xi3, xi4, all
  std::string kind = "all";    // symmetry: time_shift, scale_p, exp_scale_3, exp_scale_4, add_kummer_m, all
  oracles::EulerianConfig eulerian{100.0, 4000, 1e-3, 1.0};
  std::size_t mc_paths = 1000000;
  double mc_dt = 1e-3;
  std::uint64_t seed = 20240607;
  std::size_t threads = 0;
};

// Convergence order 2.0 +/- 0.3 of the PDE residual of the exact families
// under three halvings of the difference widths.
Report check_residual(const std::string& family = "all");

// Residual of each transformed exact solution against 10x the untransformed one,
// eps in {+-0.1}, c in {0, gamma/2} for the Kummer map.
Report check_symmetry(const std::string& kind = "all");

// Defect of the E1-weighted balance law on [a, b] = [1, 10] for
// (N, snapshot spacing) = (N0, T/30), (N0, T/120), (2 N0, T/120); must decrease.
Report check_conservation(const experiment::RunConfig& cfg);

// First moment against the moment ODE at every snapshot, within 2%.
Report check_moments(const experiment::RunConfig& cfg, const experiment::RunResult& result);

// Final Lagrangian density against the implicit Eulerian solver:
// L-inf <= 0.01, L1 <= 0.02 outside [0, 5 dx).
Report check_oracle(const experiment::RunConfig& cfg, const experiment::RunResult& result,
                    const Options& opt = {});

// Final Lagrangian density against the Monte Carlo histogram: L1 <= 0.05.
Report check_mc(const experiment::RunConfig& cfg, const experiment::RunResult& result,
                const Options& opt = {});

// Runs the checks enabled in cfg.diagnostics. A result from a previous solve
// may be supplied to avoid solving again.
Report run_diagnostics(const experiment::RunConfig& cfg, const Options& opt = {},
                       const experiment::RunResult* result = nullptr);

}  // namespace feller::diagnostics
