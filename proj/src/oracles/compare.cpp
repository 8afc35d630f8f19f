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
#include <fstream>
#include <limits>
#include <ostream>

#include "feller/errors.hpp"
#include "feller/oracles.hpp"

namespace feller::oracles {

namespace {

double interp(const DensitySamples& s, double x) {
  const auto it = std::upper_bound(s.x.begin(), s.x.end(), x);
  if (it == s.x.begin()) return s.p.front();
  if (it == s.x.end()) return s.p.back();
  const std::size_t i = static_cast<std::size_t>(it - s.x.begin());
  const double w = (x - s.x[i - 1]) / (s.x[i] - s.x[i - 1]);
  return (1.0 - w) * s.p[i - 1] + w * s.p[i];
}

void check_samples(const DensitySamples& s, const char* name) {
  if (s.x.size() != s.p.size() || s.x.empty()) {
    throw DomainError(std::string("compare_pdf: malformed samples ") + name);
  }
  for (std::size_t i = 1; i < s.x.size(); ++i) {
    if (!(s.x[i] > s.x[i - 1])) throw DomainError(std::string("compare_pdf: unsorted samples ") + name);
  }
}

}  // namespace

double compare_pdf(const DensitySamples& a, const DensitySamples& b, Metric metric,
                   double exclude_below) {
  check_samples(a, "a");
  check_samples(b, "b");
  const double lo = std::max({a.x.front(), b.x.front(), exclude_below});
  const double hi = std::min(a.x.back(), b.x.back());
  if (!(hi > lo)) throw DomainError("compare_pdf: empty overlap");

  std::vector<double> grid{lo, hi};
  for (const auto* s : {&a, &b}) {
    for (double x : s->x) {
      if (x > lo && x < hi) grid.push_back(x);
    }
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::vector<double> diff(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) diff[i] = std::fabs(interp(a, grid[i]) - interp(b, grid[i]));
  if (metric == Metric::linf) return *std::max_element(diff.begin(), diff.end());
  // |a - b| is not linear where the difference changes sign; the trapezoid rule
  // on the union grid is the declared approximation.
  double l1 = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) l1 += 0.5 * (diff[i] + diff[i - 1]) * (grid[i] - grid[i - 1]);
  return l1;
}

DensitySamples Histogram::centers() const {
  DensitySamples s;
  s.x.resize(density.size());
  for (std::size_t i = 0; i < density.size(); ++i) s.x[i] = 0.5 * (edges[i] + edges[i + 1]);
  s.p = density;
  return s;
}

void write_histogram_csv(const Histogram& h, std::ostream& out) {
  char buf[128];
  out << "bin_left,bin_right,density\n";
  for (std::size_t i = 0; i < h.density.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", h.edges[i], h.edges[i + 1], h.density[i]);
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "# absorbed=%.17g\n", h.absorbed_fraction);
  out << buf;
  if (!out) throw IoError("histogram CSV write failed");
}

void write_histogram_csv(const Histogram& h, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  write_histogram_csv(h, f);
  f.close();
  if (!f) throw IoError("cannot finish writing " + path.string());
}

}  // namespace feller::oracles
