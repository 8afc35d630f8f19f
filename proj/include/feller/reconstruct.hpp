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
#include <vector>

#include "feller/lagrange.hpp"
#include "feller/params.hpp"

namespace feller::reconstruct {

// X_k = exp(-gamma t) Y_k.
std::vector<double> recover_x(const lagrange::ParticleState& state, const FellerParams& params);

// Physical picture of a Lagrangian state. p[k] = dP_{k+1/2} / (X_{k+1} - X_k)
// belongs to the left node X_k, so p has one entry fewer than x.
struct Snapshot {
  double t = 0.0;
  std::vector<double> x;
  std::vector<double> p;
  double mass = 0.0;
  double m1 = 0.0;
  std::vector<double> P;
  std::vector<double> y;
};

// Throws OrderingViolation on a non-positive gap.
Snapshot reconstruct_pdf(const lagrange::ParticleState& state, const lagrange::MassGrid& grid,
                         const FellerParams& params);

// Density at the left nodes, as written to CSV.
DensitySamples node_samples(const Snapshot& s);
// Density at cell midpoints (X_k + X_{k+1}) / 2, the second-order placement
// used when comparing against other solvers.
DensitySamples midpoint_samples(const Snapshot& s);

// CSV with header t,k,P,X,Y,p; N + 1 rows per snapshot, p empty on the last node.
void write_snapshot_csv(const std::vector<Snapshot>& snapshots, std::ostream& out);
void write_snapshot_csv(const std::vector<Snapshot>& snapshots, const std::filesystem::path& path);
// Inverse of write_snapshot_csv; mass and m1 are recomputed from the rows.
std::vector<Snapshot> read_snapshot_csv(std::istream& in);
std::vector<Snapshot> read_snapshot_csv(const std::filesystem::path& path);

// Tabulated initial density from a CSV with header x,p0.
lagrange::InitialCondition read_tabulated_ic(std::istream& in);
lagrange::InitialCondition read_tabulated_ic(const std::filesystem::path& path);

// Trajectory rows t,k,X for one state.
void write_trajectory_header(std::ostream& out);
void append_trajectory_rows(const lagrange::ParticleState& state, const FellerParams& params,
                            std::ostream& out);

}  // namespace feller::reconstruct
