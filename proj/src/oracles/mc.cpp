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
#include <thread>

#include "feller/errors.hpp"
#include "feller/kernels.hpp"
#include "feller/oracles.hpp"
#include "feller/philox.hpp"

namespace feller::oracles {

namespace {

constexpr std::size_t kBlock = 512;

// Block 0 of each path seeds the starting point; blocks 1, 2, ... feed the
// increments two at a time.
void run_block(const MCConfig& cfg, const FellerParams& params, std::size_t first,
               std::size_t count, std::size_t steps, double h, double* out) {
  std::vector<double> x(count), z0(count), z1(count);
  for (std::size_t i = 0; i < count; ++i) {
    const rng::PathStream stream(cfg.seed, first + i);
    if (const auto* pt = std::get_if<PointStart>(&cfg.x_init)) {
      x[i] = pt->x0;
    } else {
      const auto b = stream.block(0);
      x[i] = std::get<IcStart>(cfg.x_init).ic.quantile(rng::to_unit(b[0], b[1]));
    }
  }
  const double drift0 = cfg.drift == DriftModel::pde_consistent ? params.eta : 0.0;
  const double two_eta = 2.0 * params.eta;
  for (std::size_t n = 0; n < steps; ++n) {
    if (n % 2 == 0) {
      for (std::size_t i = 0; i < count; ++i) {
        const auto pair = rng::normal_pair(rng::PathStream(cfg.seed, first + i).block(1 + n / 2));
        z0[i] = pair[0];
        z1[i] = pair[1];
      }
    }
    kernels::feller_em_step(x, n % 2 == 0 ? z0 : z1, drift0, params.gamma, two_eta, h);
  }
  std::copy(x.begin(), x.end(), out);
}

}  // namespace

void MCConfig::validate() const {
  if (paths < 1) throw ConfigError("mc: paths must be >= 1");
  if (!(dt > 0.0)) throw ConfigError("mc: dt must be > 0");
  if (bins < 1) throw ConfigError("mc: bins must be >= 1");
  if (const auto* pt = std::get_if<PointStart>(&x_init)) {
    if (!(pt->x0 >= 0.0) || !std::isfinite(pt->x0)) throw ConfigError("mc: x0 must be finite and >= 0");
  }
}

MCResult mc_simulate(const MCConfig& cfg, const FellerParams& params, double t_end) {
  cfg.validate();
  params.validate();
  if (!(t_end >= 0.0)) throw DomainError("mc: t_end must be >= 0");
  const std::size_t steps =
      t_end == 0.0 ? 0 : static_cast<std::size_t>(std::ceil(t_end / cfg.dt * (1.0 - 1e-12)));
  const double h = steps == 0 ? 0.0 : t_end / static_cast<double>(steps);

  std::vector<double> final_x(cfg.paths);
  const std::size_t blocks = (cfg.paths + kBlock - 1) / kBlock;
  std::size_t threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, blocks);
  auto worker = [&](std::size_t tid) {
    for (std::size_t b = tid; b < blocks; b += threads) {
      const std::size_t first = b * kBlock;
      const std::size_t count = std::min(kBlock, cfg.paths - first);
      run_block(cfg, params, first, count, steps, h, final_x.data() + first);
    }
  };
  if (threads <= 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t tid = 0; tid < threads; ++tid) pool.emplace_back(worker, tid);
    for (auto& th : pool) th.join();
  }

  MCResult res;
  res.steps = steps;
  double sum = 0.0, sum_sq = 0.0, x_max = 0.0;
  std::size_t absorbed = 0;
  for (double v : final_x) {
    sum += v;
    sum_sq += v * v;
    x_max = std::max(x_max, v);
    if (v <= 0.0) ++absorbed;
  }
  const double n = static_cast<double>(cfg.paths);
  res.mean = sum / n;
  const double var = cfg.paths > 1 ? std::max(0.0, (sum_sq - n * res.mean * res.mean) / (n - 1.0)) : 0.0;
  res.std_error = std::sqrt(var / n);

  Histogram& hist = res.histogram;
  const double upper = x_max > 0.0 ? x_max : 1.0;
  const double width = upper / static_cast<double>(cfg.bins);
  hist.edges.resize(cfg.bins + 1);
  for (std::size_t i = 0; i <= cfg.bins; ++i) hist.edges[i] = width * static_cast<double>(i);
  hist.edges.back() = upper;
  std::vector<std::size_t> counts(cfg.bins, 0);
  for (double v : final_x) {
    if (v <= 0.0) continue;
    const auto bin = std::min(cfg.bins - 1, static_cast<std::size_t>(v / width));
    ++counts[bin];
  }
  hist.density.resize(cfg.bins);
  for (std::size_t i = 0; i < cfg.bins; ++i) {
    hist.density[i] = static_cast<double>(counts[i]) / (n * (hist.edges[i + 1] - hist.edges[i]));
  }
  hist.absorbed_fraction = static_cast<double>(absorbed) / n;
  return res;
}

}  // namespace feller::oracles
