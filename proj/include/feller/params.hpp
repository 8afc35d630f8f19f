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

#include <vector>

namespace feller {

// Coefficients of p_t = [x (gamma p + eta p_x)]_x on x > 0.
// gamma > 0 confines mass towards the origin, gamma < 0 expands it.
struct FellerParams {
  double gamma = 1.0;
  double eta = 1.0;

  void validate() const;
};

// Density values sampled on an increasing abscissa.
struct DensitySamples {
  std::vector<double> x;
  std::vector<double> p;
};

struct DensitySnapshot {
  double t = 0.0;
  DensitySamples samples;
};

}  // namespace feller
