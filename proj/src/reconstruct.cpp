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

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>

#include "feller/errors.hpp"
#include "feller/reconstruct.hpp"

namespace feller::reconstruct {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view field, std::size_t line, const char* name) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw ParseError(std::string("cannot parse ") + name + " value '" + std::string(field) + "'",
                     line);
  }
  return v;
}

std::size_t parse_index(std::string_view field, std::size_t line) {
  field = trim(field);
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw ParseError("cannot parse node index '" + std::string(field) + "'", line);
  }
  return v;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  return f;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string() + " for reading");
  return f;
}

}  // namespace

std::vector<double> recover_x(const lagrange::ParticleState& state, const FellerParams& params) {
  const double shrink = std::exp(-params.gamma * state.t);
  std::vector<double> x(state.y.size());
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = shrink * state.y[k];
  return x;
}

Snapshot reconstruct_pdf(const lagrange::ParticleState& state, const lagrange::MassGrid& grid,
                         const FellerParams& params) {
  if (state.y.size() != grid.n() + 1) throw DomainError("state and grid sizes differ");
  Snapshot s;
  s.t = state.t;
  s.x = recover_x(state, params);
  const auto& dph = grid.dp_half();
  s.p.resize(grid.n());
  for (std::size_t k = 0; k < grid.n(); ++k) {
    const double gap = s.x[k + 1] - s.x[k];
    if (!(gap > 0.0)) throw OrderingViolation("non-positive gap at node " + std::to_string(k), k + 1);
    s.p[k] = dph[k] / gap;
  }
  s.mass = lagrange::total_probability(grid);
  s.m1 = lagrange::first_moment(state, grid, params);
  s.P = grid.P();
  s.y = state.y;
  return s;
}

DensitySamples node_samples(const Snapshot& s) {
  DensitySamples d;
  d.x.assign(s.x.begin(), s.x.begin() + static_cast<std::ptrdiff_t>(s.p.size()));
  d.p = s.p;
  return d;
}

DensitySamples midpoint_samples(const Snapshot& s) {
  DensitySamples d;
  d.x.resize(s.p.size());
  for (std::size_t k = 0; k < s.p.size(); ++k) d.x[k] = 0.5 * (s.x[k] + s.x[k + 1]);
  d.p = s.p;
  return d;
}

void write_snapshot_csv(const std::vector<Snapshot>& snapshots, std::ostream& out) {
  out << "t,k,P,X,Y,p\n";
  for (const auto& s : snapshots) {
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      out << fmt(s.t) << ',' << k << ',' << fmt(s.P[k]) << ',' << fmt(s.x[k]) << ',' << fmt(s.y[k])
          << ',';
      if (k < s.p.size()) out << fmt(s.p[k]);
      out << '\n';
    }
  }
  if (!out) throw IoError("snapshot CSV write failed");
}

void write_snapshot_csv(const std::vector<Snapshot>& snapshots, const std::filesystem::path& path) {
  auto f = open_out(path);
  write_snapshot_csv(snapshots, f);
  f.close();
  if (!f) throw IoError("cannot finish writing " + path.string());
}

std::vector<Snapshot> read_snapshot_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || trim(line) != "t,k,P,X,Y,p") {
    throw ParseError("expected header t,k,P,X,Y,p", line_no);
  }
  std::vector<Snapshot> out;
  auto finish = [&](std::size_t at) {
    if (out.empty()) return;
    Snapshot& s = out.back();
    if (s.x.size() < 2) throw ParseError("snapshot with fewer than two nodes", at);
    if (s.p.size() != s.x.size() - 1) throw ParseError("density missing on a non-final node", at);
    s.mass = s.P.back() - s.P.front();
    s.m1 = std::numeric_limits<double>::quiet_NaN();
  };
  bool last_had_p = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split(line);
    if (f.size() != 6) throw ParseError("expected 6 fields, found " + std::to_string(f.size()), line_no);
    const double t = parse_double(f[0], line_no, "t");
    const std::size_t k = parse_index(f[1], line_no);
    if (k == 0) {
      if (!out.empty() && last_had_p) throw ParseError("snapshot ends with a density value", line_no - 1);
      finish(line_no);
      out.emplace_back();
      out.back().t = t;
    } else if (out.empty() || k != out.back().x.size() || t != out.back().t) {
      throw ParseError("node index or time out of sequence", line_no);
    } else if (!last_had_p) {
      throw ParseError("density missing on a non-final node", line_no - 1);
    }
    Snapshot& s = out.back();
    s.P.push_back(parse_double(f[2], line_no, "P"));
    s.x.push_back(parse_double(f[3], line_no, "X"));
    s.y.push_back(parse_double(f[4], line_no, "Y"));
    last_had_p = !trim(f[5]).empty();
    if (last_had_p) s.p.push_back(parse_double(f[5], line_no, "p"));
  }
  if (!out.empty() && last_had_p) throw ParseError("snapshot ends with a density value", line_no);
  finish(line_no);
  return out;
}

std::vector<Snapshot> read_snapshot_csv(const std::filesystem::path& path) {
  auto f = open_in(path);
  return read_snapshot_csv(f);
}

lagrange::InitialCondition read_tabulated_ic(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || trim(line) != "x,p0") throw ParseError("expected header x,p0", line_no);
  std::vector<double> x, p;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split(line);
    if (f.size() != 2) throw ParseError("expected 2 fields, found " + std::to_string(f.size()), line_no);
    const double xv = parse_double(f[0], line_no, "x");
    const double pv = parse_double(f[1], line_no, "p0");
    if (x.empty() && xv != 0.0) throw ParseError("first x must be 0", line_no);
    if (!x.empty() && !(xv > x.back())) throw ParseError("x not strictly increasing", line_no);
    if (!(pv >= 0.0) || !std::isfinite(pv)) throw ParseError("p0 must be finite and >= 0", line_no);
    x.push_back(xv);
    p.push_back(pv);
  }
  if (x.size() < 2) throw ParseError("need at least two rows", line_no);
  try {
    return lagrange::InitialCondition::tabulated(std::move(x), std::move(p));
  } catch (const DomainError& e) {
    throw ParseError(e.what(), line_no);
  }
}

lagrange::InitialCondition read_tabulated_ic(const std::filesystem::path& path) {
  auto f = open_in(path);
  return read_tabulated_ic(f);
}

void write_trajectory_header(std::ostream& out) { out << "t,k,X\n"; }

void append_trajectory_rows(const lagrange::ParticleState& state, const FellerParams& params,
                            std::ostream& out) {
  const auto x = recover_x(state, params);
  const std::string t = fmt(state.t);
  for (std::size_t k = 0; k < x.size(); ++k) out << t << ',' << k << ',' << fmt(x[k]) << '\n';
}

}  // namespace feller::reconstruct
