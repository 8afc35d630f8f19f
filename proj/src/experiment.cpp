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

#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "feller/errors.hpp"
#include "feller/experiment.hpp"
#include "feller/kernels.hpp"

namespace feller::experiment {

using nlohmann::json;

namespace {

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!ok.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

double num(const json& obj, const char* key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
  return v.get<double>();
}

template <class T>
void maybe(const json& obj, const char* key, T& dest, const std::string& where) {
  if (!obj.contains(key)) return;
  const auto& v = obj.at(key);
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) throw ConfigError(where + "." + key + ": expected a boolean");
    dest = v.get<bool>();
  } else if constexpr (std::is_same_v<T, std::size_t>) {
    if (!v.is_number_unsigned()) throw ConfigError(where + "." + key + ": expected a non-negative integer");
    dest = v.get<std::size_t>();
  } else if constexpr (std::is_same_v<T, std::optional<double>>) {
    dest = num(obj, key, where);
  } else {
    dest = num(obj, key, where);
  }
}

std::vector<double> number_list(const json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError(where + ": expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError(where + ": expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

lagrange::MeanKind parse_mean(const std::string& s) {
  if (s == "arithmetic") return lagrange::MeanKind::arithmetic;
  if (s == "geometric") return lagrange::MeanKind::geometric;
  throw ConfigError("unknown mean kind '" + s + "'");
}

const char* mean_name(lagrange::MeanKind m) {
  return m == lagrange::MeanKind::arithmetic ? "arithmetic" : "geometric";
}

void parse_sampling(const json& j, RunConfig& cfg) {
  const std::string where = "sampling";
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  const std::string strategy = j.value("strategy", std::string("log_spaced"));
  if (strategy == "log_spaced") {
    check_keys(j, {"n", "tail_tol", "strategy", "x_max", "x_first", "mean"}, where);
    lagrange::LogSpaced s;
    maybe(j, "x_max", s.x_max, where);
    maybe(j, "x_first", s.x_first, where);
    cfg.sampling.strategy = s;
  } else if (strategy == "log_shifted" || strategy == "uniform") {
    check_keys(j, {"n", "tail_tol", "strategy", "x_max", "mean"}, where);
    std::optional<double> x_max;
    maybe(j, "x_max", x_max, where);
    if (strategy == "uniform") {
      cfg.sampling.strategy = lagrange::Uniform{x_max};
    } else {
      cfg.sampling.strategy = lagrange::LogShifted{x_max};
    }
  } else if (strategy == "custom") {
    check_keys(j, {"n", "tail_tol", "strategy", "positions", "mean"}, where);
    if (!j.contains("positions")) throw ConfigError(where + ": custom strategy needs positions");
    lagrange::Custom c{number_list(j.at("positions"), where + ".positions")};
    if (!j.contains("n") && !c.positions.empty()) cfg.sampling.n = c.positions.size() - 1;
    cfg.sampling.strategy = std::move(c);
  } else {
    throw ConfigError(where + ": unknown strategy '" + strategy + "'");
  }
  maybe(j, "n", cfg.sampling.n, where);
  maybe(j, "tail_tol", cfg.sampling.tail_tol, where);
  if (j.contains("mean")) {
    if (!j.at("mean").is_string()) throw ConfigError(where + ".mean: expected a string");
    cfg.mean = parse_mean(j.at("mean").get<std::string>());
  }
}

void parse_ic(const json& j, RunConfig& cfg, const std::filesystem::path& base_dir) {
  const std::string where = "ic";
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
    throw ConfigError(where + ": expected an object with a string 'type'");
  }
  const std::string type = j.at("type").get<std::string>();
  if (type == "double_exp") {
    check_keys(j, {"type", "sigma1", "sigma2", "x0"}, where);
    lagrange::DoubleExp d;
    maybe(j, "sigma1", d.sigma1, where);
    maybe(j, "sigma2", d.sigma2, where);
    maybe(j, "x0", d.x0, where);
    cfg.ic = d;
  } else if (type == "steady") {
    check_keys(j, {"type", "c1", "c2"}, where);
    lagrange::Steady s;
    maybe(j, "c1", s.c1, where);
    maybe(j, "c2", s.c2, where);
    cfg.ic = s;
  } else if (type == "tabulated") {
    check_keys(j, {"type", "file", "x", "p"}, where);
    if (j.contains("file")) {
      if (j.contains("x") || j.contains("p")) throw ConfigError(where + ": give either file or x/p");
      std::filesystem::path file = j.at("file").get<std::string>();
      if (file.is_relative()) file = base_dir / file;
      try {
        cfg.ic = std::get<lagrange::Tabulated>(reconstruct::read_tabulated_ic(file).descriptor());
      } catch (const ParseError& e) {
        throw ConfigError(file.string() + ": " + e.what());
      } catch (const IoError& e) {
        throw ConfigError(e.what());
      }
    } else {
      if (!j.contains("x") || !j.contains("p")) throw ConfigError(where + ": tabulated needs file or x and p");
      cfg.ic = lagrange::Tabulated{number_list(j.at("x"), where + ".x"), number_list(j.at("p"), where + ".p")};
    }
  } else {
    throw ConfigError(where + ": unknown type '" + type + "'");
  }
}

json ic_to_json(const lagrange::IcDescriptor& ic) {
  return std::visit(
      [](const auto& d) -> json {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, lagrange::DoubleExp>) {
          return {{"type", "double_exp"}, {"sigma1", d.sigma1}, {"sigma2", d.sigma2}, {"x0", d.x0}};
        } else if constexpr (std::is_same_v<T, lagrange::Steady>) {
          return {{"type", "steady"}, {"c1", d.c1}, {"c2", d.c2}};
        } else {
          return {{"type", "tabulated"}, {"x", d.x}, {"p", d.p}};
        }
      },
      ic);
}

json sampling_to_json(const RunConfig& cfg) {
  json j{{"n", cfg.sampling.n}, {"tail_tol", cfg.sampling.tail_tol}, {"mean", mean_name(cfg.mean)}};
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, lagrange::LogSpaced>) {
          j["strategy"] = "log_spaced";
          if (s.x_max) j["x_max"] = *s.x_max;
          if (s.x_first) j["x_first"] = *s.x_first;
        } else if constexpr (std::is_same_v<T, lagrange::LogShifted>) {
          j["strategy"] = "log_shifted";
          if (s.x_max) j["x_max"] = *s.x_max;
        } else if constexpr (std::is_same_v<T, lagrange::Uniform>) {
          j["strategy"] = "uniform";
          if (s.x_max) j["x_max"] = *s.x_max;
        } else {
          j["strategy"] = "custom";
          j["positions"] = s.positions;
        }
      },
      cfg.sampling.strategy);
  return j;
}

json config_to_json(const RunConfig& cfg) {
  json step{{"abstol", cfg.step.abstol},     {"reltol", cfg.step.reltol},
            {"safety", cfg.step.safety},     {"grow_max", cfg.step.grow_max},
            {"shrink_min", cfg.step.shrink_min}};
  if (cfg.step.dt_init) step["dt_init"] = *cfg.step.dt_init;
  if (cfg.step.dt_min) step["dt_min"] = *cfg.step.dt_min;
  if (cfg.step.dt_max) step["dt_max"] = *cfg.step.dt_max;
  json out{{"trajectories", cfg.output.trajectories}};
  if (!cfg.output.times.empty()) out["times"] = cfg.output.times;
  if (!cfg.output.dir.empty()) out["dir"] = cfg.output.dir.string();
  return {{"name", cfg.name},
          {"params", {{"gamma", cfg.params.gamma}, {"eta", cfg.params.eta}}},
          {"T", cfg.T},
          {"sampling", sampling_to_json(cfg)},
          {"step", step},
          {"ic", ic_to_json(cfg.ic)},
          {"output", out},
          {"diagnostics",
           {{"residual", cfg.diagnostics.residual},
            {"conservation_law", cfg.diagnostics.conservation_law},
            {"moment_track", cfg.diagnostics.moment_track},
            {"oracle_compare", cfg.diagnostics.oracle_compare},
            {"mc_compare", cfg.diagnostics.mc_compare}}}};
}

}  // namespace

lagrange::InitialCondition make_initial_condition(const RunConfig& cfg) {
  lagrange::IcDescriptor d = cfg.ic;
  if (auto* s = std::get_if<lagrange::Steady>(&d)) s->params = cfg.params;
  return lagrange::InitialCondition::from_descriptor(d);
}

void RunConfig::validate() const {
  try {
    params.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("T must be positive and finite");
  sampling.validate();
  step.resolved(T);
  for (std::size_t i = 0; i < output.times.size(); ++i) {
    const double t = output.times[i];
    if (!(t >= 0.0 && t <= T)) throw ConfigError("output.times must lie in [0, T]");
    if (i > 0 && !(t > output.times[i - 1])) throw ConfigError("output.times must be strictly increasing");
  }
  try {
    make_initial_condition(*this);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("ic: ") + e.what());
  }
}

std::vector<double> RunConfig::snapshot_times() const {
  if (!output.times.empty()) return output.times;
  std::vector<double> t(11);
  for (int i = 0; i <= 10; ++i) t[static_cast<std::size_t>(i)] = T * i / 10.0;
  t.back() = T;
  return t;
}

RunConfig parse_run_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig cfg;
  try {
    check_keys(j, {"name", "params", "T", "sampling", "step", "ic", "output", "diagnostics"}, "config");
    if (j.contains("name")) cfg.name = j.at("name").get<std::string>();
    if (j.contains("params")) {
      const auto& p = j.at("params");
      check_keys(p, {"gamma", "eta"}, "params");
      maybe(p, "gamma", cfg.params.gamma, "params");
      maybe(p, "eta", cfg.params.eta, "params");
    }
    if (!j.contains("T")) throw ConfigError("config: missing T");
    cfg.T = num(j, "T", "config");
    if (j.contains("sampling")) parse_sampling(j.at("sampling"), cfg);
    if (j.contains("step")) {
      const auto& s = j.at("step");
      check_keys(s, {"abstol", "reltol", "dt_init", "dt_min", "dt_max", "safety", "grow_max", "shrink_min"},
                 "step");
      maybe(s, "abstol", cfg.step.abstol, "step");
      maybe(s, "reltol", cfg.step.reltol, "step");
      maybe(s, "dt_init", cfg.step.dt_init, "step");
      maybe(s, "dt_min", cfg.step.dt_min, "step");
      maybe(s, "dt_max", cfg.step.dt_max, "step");
      maybe(s, "safety", cfg.step.safety, "step");
      maybe(s, "grow_max", cfg.step.grow_max, "step");
      maybe(s, "shrink_min", cfg.step.shrink_min, "step");
    }
    if (!j.contains("ic")) throw ConfigError("config: missing ic");
    parse_ic(j.at("ic"), cfg, base_dir);
    if (j.contains("output")) {
      const auto& o = j.at("output");
      check_keys(o, {"times", "dir", "trajectories"}, "output");
      if (o.contains("times")) cfg.output.times = number_list(o.at("times"), "output.times");
      if (o.contains("dir")) cfg.output.dir = o.at("dir").get<std::string>();
      maybe(o, "trajectories", cfg.output.trajectories, "output");
    }
    if (j.contains("diagnostics")) {
      const auto& d = j.at("diagnostics");
      check_keys(d, {"residual", "conservation_law", "moment_track", "oracle_compare", "mc_compare"},
                 "diagnostics");
      maybe(d, "residual", cfg.diagnostics.residual, "diagnostics");
      maybe(d, "conservation_law", cfg.diagnostics.conservation_law, "diagnostics");
      maybe(d, "moment_track", cfg.diagnostics.moment_track, "diagnostics");
      maybe(d, "oracle_compare", cfg.diagnostics.oracle_compare, "diagnostics");
      maybe(d, "mc_compare", cfg.diagnostics.mc_compare, "diagnostics");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_run_config(ss.str(), path.parent_path());
}

std::string to_json(const RunConfig& cfg) { return config_to_json(cfg).dump(2); }

RunConfig preset(std::string_view name) {
  RunConfig cfg;
  cfg.name = std::string(name);
  cfg.step.abstol = 1e-5;
  cfg.step.reltol = 1e-5;
  cfg.sampling.tail_tol = 1e-5;
  if (name == "steady") {
    cfg.params = {1.0, 1.0};
    cfg.T = 10.0;
    cfg.sampling.n = 500;
    cfg.sampling.strategy = lagrange::LogShifted{};
    cfg.ic = lagrange::Steady{0.0, 1.0, cfg.params};
  } else if (name == "expand" || name == "confine") {
    const bool expand = name == "expand";
    cfg.params = {expand ? -0.1 : 0.5, 1.0};
    cfg.T = expand ? 3.0 : 12.0;
    cfg.sampling.n = 100;
    cfg.sampling.strategy = lagrange::LogSpaced{20.0, std::nullopt};
    cfg.ic = lagrange::DoubleExp{2.0, 1.0, 3.0};
  } else {
    throw ConfigError("unknown preset '" + std::string(name) + "'");
  }
  return cfg;
}

std::vector<std::string> preset_names() { return {"steady", "expand", "confine"}; }

RunResult solve(const RunConfig& cfg, const integrate::StepObserver& extra_observer) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto ic = make_initial_condition(cfg);
  const double l0 = lagrange::choose_domain_l0(ic, cfg.sampling.tail_tol);
  const auto positions = lagrange::initial_positions(cfg.sampling, l0);
  auto setup = lagrange::build_mass_grid(ic, positions, cfg.mean);

  RunResult res{setup.grid, setup.state};
  res.l0 = l0;
  res.m1_initial = lagrange::ic_first_moment(ic);
  const double mass = lagrange::total_probability(res.grid);

  auto observer = [&](const lagrange::ParticleState& s) {
    const double m = lagrange::total_probability(res.grid);
    if (std::memcmp(&m, &mass, sizeof m) != 0) res.mass_bit_identical = false;
    try {
      s.validate();
    } catch (const OrderingViolation&) {
      res.ordered_every_step = false;
    }
    if (extra_observer) extra_observer(s);
  };
  if (extra_observer) extra_observer(setup.state);
  const auto times = cfg.snapshot_times();
  const auto rec = integrate::rk45_advance(setup.state, res.grid, cfg.params, cfg.T, cfg.step, times,
                                           observer);
  res.accepted = rec.accepted;
  res.rejected = rec.rejected;
  res.ordering_rejections = rec.ordering_rejections;
  res.min_density = std::numeric_limits<double>::infinity();
  for (const auto& st : rec.outputs) {
    auto snap = reconstruct::reconstruct_pdf(st, res.grid, cfg.params);
    for (double p : snap.p) res.min_density = std::min(res.min_density, p);
    const double pred = lagrange::moment_ode_prediction(cfg.params, mass, res.m1_initial, st.t);
    res.moments.push_back({st.t, snap.m1, pred, std::fabs(snap.m1 - pred) / std::fabs(pred)});
    res.snapshots.push_back(std::move(snap));
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

RunResult run_experiment(const RunConfig& cfg, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  std::ofstream traj;
  if (cfg.output.trajectories) {
    traj.open(out_dir / "trajectories.csv", std::ios::binary);
    if (!traj) throw IoError("cannot open " + (out_dir / "trajectories.csv").string());
    reconstruct::write_trajectory_header(traj);
  }
  RunResult res = [&] {
    if (!cfg.output.trajectories) return solve(cfg);
    return solve(cfg, [&](const lagrange::ParticleState& s) {
      reconstruct::append_trajectory_rows(s, cfg.params, traj);
    });
  }();
  if (cfg.output.trajectories) {
    traj.close();
    if (!traj) throw IoError("trajectory CSV write failed");
  }
  reconstruct::write_snapshot_csv(res.snapshots, out_dir / "snapshots.csv");
  std::ofstream summary(out_dir / "summary.json", std::ios::binary);
  if (!summary) throw IoError("cannot open " + (out_dir / "summary.json").string());
  summary << summary_json(cfg, res) << '\n';
  summary.close();
  if (!summary) throw IoError("summary write failed");
  return res;
}

std::string summary_json(const RunConfig& cfg, const RunResult& res) {
  json moments = json::array();
  for (const auto& m : res.moments) {
    moments.push_back({{"t", m.t}, {"m1", m.m1}, {"predicted", m.predicted}, {"rel_err", m.rel_err}});
  }
  json j{{"config", config_to_json(cfg)},
         {"backend", std::string(kernels::to_string(kernels::active()))},
         {"l0", res.l0},
         {"mass", lagrange::total_probability(res.grid)},
         {"m1_initial_quadrature", res.m1_initial},
         {"accepted_steps", res.accepted},
         {"rejected_steps", res.rejected},
         {"ordering_rejections", res.ordering_rejections},
         {"mass_bit_identical", res.mass_bit_identical},
         {"ordered_every_step", res.ordered_every_step},
         {"min_density", res.min_density},
         {"seconds", res.seconds},
         {"moments", moments}};
  if (!res.snapshots.empty()) {
    const auto& a = res.snapshots.front();
    const auto& b = res.snapshots.back();
    j["x_n_initial"] = a.x.back();
    j["x_n_final"] = b.x.back();
    double dx = 0.0, dp = 0.0;
    for (std::size_t k = 0; k < a.x.size(); ++k) dx = std::max(dx, std::fabs(b.x[k] - a.x[k]));
    for (std::size_t k = 0; k < a.p.size(); ++k) dp = std::max(dp, std::fabs(b.p[k] - a.p[k]));
    j["x_change_inf"] = dx;
    j["p_change_inf"] = dp;
  }
  return j.dump(2);
}

}  // namespace feller::experiment
