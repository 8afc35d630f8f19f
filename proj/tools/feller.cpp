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

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "feller/diagnostics.hpp"
#include "feller/errors.hpp"
#include "feller/experiment.hpp"
#include "feller/kernels.hpp"

namespace {

enum Exit { kOk = 0, kThreshold = 1, kConfig = 2, kIntegration = 3, kIo = 4 };

using feller::experiment::RunConfig;

struct Common {
  std::string config;
  std::string preset;
  std::string out;
  std::string mean;
  std::optional<std::uint64_t> seed;
};

RunConfig load(const Common& c, const std::string& fallback_preset) {
  if (!c.config.empty() && !c.preset.empty()) throw feller::ConfigError("give either --config or --preset");
  RunConfig cfg;
  if (!c.config.empty()) {
    cfg = feller::experiment::load_run_config(c.config);
  } else {
    const std::string name = c.preset.empty() ? fallback_preset : c.preset;
    if (name.empty()) throw feller::ConfigError("one of --config or --preset is required");
    cfg = feller::experiment::preset(name);
  }
  if (!c.mean.empty()) {
    if (c.mean == "arithmetic") {
      cfg.mean = feller::lagrange::MeanKind::arithmetic;
    } else if (c.mean == "geometric") {
      cfg.mean = feller::lagrange::MeanKind::geometric;
    } else {
      throw feller::ConfigError("--mean must be arithmetic or geometric");
    }
  }
  return cfg;
}

std::filesystem::path out_dir(const Common& c, const RunConfig& cfg) {
  if (!c.out.empty()) return c.out;
  if (!cfg.output.dir.empty()) return cfg.output.dir;
  if (const char* env = std::getenv("FELLER_OUT"); env && *env) return std::filesystem::path(env) / cfg.name;
  return std::filesystem::path("out") / cfg.name;
}

void write_report(const feller::diagnostics::Report& rep, const std::filesystem::path& dir) {
  rep.write_csv(std::cout);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw feller::IoError("cannot create " + dir.string());
  std::ofstream f(dir / "diagnostics.csv", std::ios::binary);
  if (!f) throw feller::IoError("cannot open " + (dir / "diagnostics.csv").string());
  rep.write_csv(f);
  if (!f) throw feller::IoError("diagnostics write failed");
}

int cmd_run(const Common& c, bool trajectories) {
  RunConfig cfg = load(c, "");
  if (trajectories) cfg.output.trajectories = true;
  const auto dir = out_dir(c, cfg);
  const auto res = feller::experiment::run_experiment(cfg, dir);
  std::cout << "run " << cfg.name << ": " << res.accepted << " accepted, " << res.rejected
            << " rejected steps in " << res.seconds << " s ("
            << feller::kernels::to_string(feller::kernels::active()) << "); output in " << dir.string()
            << '\n';
  const auto& f = cfg.diagnostics;
  if (f.residual || f.conservation_law || f.oracle_compare || f.mc_compare) {
    feller::diagnostics::Options opt;
    if (c.seed) opt.seed = *c.seed;
    const auto rep = feller::diagnostics::run_diagnostics(cfg, opt, &res);
    write_report(rep, dir);
    return rep.passed() ? kOk : kThreshold;
  }
  return kOk;
}

int cmd_diag(const Common& c, const std::string& check, const std::string& family,
             const std::string& kind, std::size_t mc_paths) {
  namespace dg = feller::diagnostics;
  dg::Options opt;
  opt.family = family;
  opt.kind = kind;
  opt.mc_paths = mc_paths;
  if (c.seed) opt.seed = *c.seed;
  dg::Report rep;
  std::filesystem::path dir;
  if (check == "residual" || check == "symmetry") {
    if (!c.config.empty() || !c.preset.empty() || !c.mean.empty()) {
      throw feller::ConfigError("--check " + check + " uses built-in exact solutions; drop --preset/--config");
    }
    rep = check == "residual" ? dg::check_residual(family) : dg::check_symmetry(kind);
    dir = !c.out.empty() ? std::filesystem::path(c.out)
          : std::getenv("FELLER_OUT") ? std::filesystem::path(std::getenv("FELLER_OUT")) / ("diag-" + check)
                                      : std::filesystem::path("out") / ("diag-" + check);
  } else {
    RunConfig cfg = load(c, "expand");
    cfg.diagnostics = {};
    cfg.diagnostics.moment_track = check == "moments";
    cfg.diagnostics.conservation_law = check == "conservation";
    cfg.diagnostics.oracle_compare = check == "oracle";
    cfg.diagnostics.mc_compare = check == "mc";
    rep = dg::run_diagnostics(cfg, opt);
    dir = out_dir(c, cfg);
  }
  write_report(rep, dir);
  return rep.passed() ? kOk : kThreshold;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feller equation solver on a Lagrangian mass grid"};
  app.require_subcommand(1);

  Common common;
  bool trajectories = false;
  std::string check, family = "all", kind = "all";
  std::size_t mc_paths = 1000000;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--preset", common.preset, "Built-in experiment")
        ->check(CLI::IsMember({"steady", "expand", "confine"}));
    sub->add_option("--out", common.out, "Output directory (default $FELLER_OUT/<name> or out/<name>)");
    sub->add_option("--mean", common.mean, "Cell mass mean")->check(CLI::IsMember({"arithmetic", "geometric"}));
    sub->add_option("--seed", common.seed, "Monte Carlo seed");
  };

  auto* run = app.add_subcommand("run", "Run an experiment and write CSV output");
  add_common(run);
  run->add_flag("--trajectories", trajectories, "Write node positions at every accepted step");

  auto* diag = app.add_subcommand("diag", "Run a diagnostic check and report CSV");
  add_common(diag);
  diag->add_option("--check", check, "Check to run")
      ->required()
      ->check(CLI::IsMember({"residual", "symmetry", "conservation", "oracle", "mc", "moments"}));
  diag->add_option("--family", family, "Exact family for --check residual")
      ->check(CLI::IsMember({"all", "steady", "steady_general", "xi3", "xi4"}));
  diag->add_option("--kind", kind, "Symmetry for --check symmetry")
      ->check(CLI::IsMember({"all", "time_shift", "scale_p", "exp_scale_3", "exp_scale_4", "add_kummer_m"}));
  diag->add_option("--mc-paths", mc_paths, "Monte Carlo path count")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*run) return cmd_run(common, trajectories);
    return cmd_diag(common, check, family, kind, mc_paths);
  } catch (const feller::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const feller::DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const feller::DegenerateGrid& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const feller::IntegrationFailure& e) {
    std::cerr << "integration failure at t = " << e.t_reached() << ": " << e.what() << '\n';
    return kIntegration;
  } catch (const feller::OrderingViolation& e) {
    std::cerr << "integration failure: " << e.what() << '\n';
    return kIntegration;
  } catch (const feller::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kThreshold;
  }
}
