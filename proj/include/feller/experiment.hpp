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

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "feller/integrate.hpp"
#include "feller/lagrange.hpp"
#include "feller/params.hpp"
#include "feller/reconstruct.hpp"

namespace feller::experiment {

struct OutputSpec {
  // Empty means 11 uniform times including 0 and T.
  std::vector<double> times;
  std::filesystem::path dir;
  bool trajectories = false;
};

struct DiagnosticFlags {
  bool residual = false;
  bool conservation_law = false;
  bool moment_track = true;
  bool oracle_compare = false;
  bool mc_compare = false;
};

struct RunConfig {
  std::string name = "custom";
  FellerParams params;
  double T = 1.0;
  lagrange::SamplingConfig sampling;
  lagrange::MeanKind mean = lagrange::MeanKind::arithmetic;
  integrate::StepControl step;
  lagrange::IcDescriptor ic = lagrange::DoubleExp{};
  OutputSpec output;
  DiagnosticFlags diagnostics;

  // Throws ConfigError.
  void validate() const;
  std::vector<double> snapshot_times() const;
};

// JSON document with the RunConfig field names; unknown keys are errors.
// Relative tabulated-IC paths resolve against base_dir. Throws ConfigError.
RunConfig parse_run_config(std::string_view json_text,
                           const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);
std::string to_json(const RunConfig& cfg);

// The run's initial density; the steady family takes the run's coefficients.
lagrange::InitialCondition make_initial_condition(const RunConfig& cfg);

// steady, expand, confine.
RunConfig preset(std::string_view name);
std::vector<std::string> preset_names();

struct MomentRow {
  double t = 0.0;
  double m1 = 0.0;
  double predicted = 0.0;
  double rel_err = 0.0;
};

struct RunResult {
  RunResult(lagrange::MassGrid g, lagrange::ParticleState s)
      : grid(std::move(g)), initial(std::move(s)) {}

  lagrange::MassGrid grid;
  lagrange::ParticleState initial;
  double l0 = 0.0;
  double m1_initial = 0.0;  // quadrature of the initial density
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t ordering_rejections = 0;
  std::vector<reconstruct::Snapshot> snapshots;
  std::vector<MomentRow> moments;
  // Every accepted step was checked for these.
  bool mass_bit_identical = true;
  bool ordered_every_step = true;
  double min_density = 0.0;
  double seconds = 0.0;

  const reconstruct::Snapshot& final_snapshot() const { return snapshots.back(); }
};

// Executes the run in memory. extra_observer sees the initial state and every
// accepted state.
RunResult solve(const RunConfig& cfg, const integrate::StepObserver& extra_observer = {});

// solve() plus snapshots.csv, summary.json and, if requested, trajectories.csv in out_dir.
RunResult run_experiment(const RunConfig& cfg, const std::filesystem::path& out_dir);

std::string summary_json(const RunConfig& cfg, const RunResult& result);

}  // namespace feller::experiment
