// Copyright 2026 The eucaug Authors
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

// Command implementations behind the eucaug CLI: run configuration, the
// train / audit / plot / list-tasks commands and multi-process seed sweeps.

#include <nlohmann/json.hpp>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "eucaug/audit.hpp"
#include "eucaug/build_info.hpp"
#include "eucaug/curve.hpp"
#include "eucaug/plot.hpp"
#include "eucaug/trainer.hpp"

extern char** environ;

namespace eucaug {

namespace fs = std::filesystem;

enum ExitCode : int { kExitOk = 0, kExitAuditFailed = 1, kExitConfig = 2, kExitIo = 3, kExitInternal = 4 };

struct RunConfig {
  std::string task = "reacher_hard";
  Representation repr = Representation::limb;
  AugmentConfig augment;
  std::uint64_t total_steps = 200000;
  std::uint64_t seed = 0;
  std::string output_dir;
  int eval_every = 10000;
  int eval_episodes = 10;
  std::uint64_t checkpoint_every = 50000;  // 0: only the final checkpoint
  bool root_velocity_world = true;
  bool wall_clock = false;
  Hyperparams hyper;

  bool operator==(const RunConfig& o) const {
    const auto& a = augment;
    const auto& b = o.augment;
    return task == o.task && repr == o.repr && a.kind == b.kind && a.rho_aug == b.rho_aug &&
           a.gn_sigma == b.gn_sigma && a.ras_lo == b.ras_lo && a.ras_hi == b.ras_hi &&
           a.independent_next == b.independent_next && a.seed == b.seed && total_steps == o.total_steps &&
           seed == o.seed && output_dir == o.output_dir && eval_every == o.eval_every &&
           eval_episodes == o.eval_episodes && checkpoint_every == o.checkpoint_every &&
           root_velocity_world == o.root_velocity_world && wall_clock == o.wall_clock && hyper == o.hyper;
  }

  void check() const {
    builtin_task(task);
    augment.check();
    hyper.check();
    if (eval_every <= 0 || eval_episodes <= 0) throw ConfigError("eval_every and eval_episodes must be > 0");
  }

  TrainOptions train_options() const {
    TrainOptions t;
    t.repr = repr;
    t.features.root_velocity_world = root_velocity_world;
    t.augment = augment;
    t.hyper = hyper;
    t.total_steps = total_steps;
    t.seed = seed;
    t.eval_every = eval_every;
    t.eval_episodes = eval_episodes;
    t.wall_clock = wall_clock;
    return t;
  }
};

inline nlohmann::json to_json(const RunConfig& c) {
  return {{"task", c.task},
          {"repr", to_string(c.repr)},
          {"augment",
           {{"kind", to_string(c.augment.kind)},
            {"rho_aug", c.augment.rho_aug},
            {"gn_sigma", c.augment.gn_sigma},
            {"ras_lo", c.augment.ras_lo},
            {"ras_hi", c.augment.ras_hi},
            {"independent_next", c.augment.independent_next},
            {"seed", c.augment.seed}}},
          {"total_steps", c.total_steps},
          {"seed", c.seed},
          {"output_dir", c.output_dir},
          {"eval_every", c.eval_every},
          {"eval_episodes", c.eval_episodes},
          {"checkpoint_every", c.checkpoint_every},
          {"root_velocity_world", c.root_velocity_world},
          {"wall_clock", c.wall_clock},
          {"hyper", to_json(c.hyper)}};
}

inline RunConfig run_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("run config must be a JSON object");
  RunConfig c;
  const nlohmann::json known = to_json(c);
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ConfigError("unknown run config key '" + key + "'");
  }
  try {
    if (j.contains("task")) c.task = j.at("task").get<std::string>();
    if (j.contains("repr")) c.repr = parse_representation(j.at("repr").get<std::string>());
    if (j.contains("augment")) {
      const auto& a = j.at("augment");
      for (const auto& [key, value] : a.items()) {
        if (!known.at("augment").contains(key)) throw ConfigError("unknown augment key '" + key + "'");
      }
      if (a.contains("kind")) c.augment.kind = parse_augment_kind(a.at("kind").get<std::string>());
      if (a.contains("rho_aug")) c.augment.rho_aug = a.at("rho_aug").get<double>();
      if (a.contains("gn_sigma")) c.augment.gn_sigma = a.at("gn_sigma").get<double>();
      if (a.contains("ras_lo")) c.augment.ras_lo = a.at("ras_lo").get<double>();
      if (a.contains("ras_hi")) c.augment.ras_hi = a.at("ras_hi").get<double>();
      if (a.contains("independent_next")) c.augment.independent_next = a.at("independent_next").get<bool>();
      if (a.contains("seed")) c.augment.seed = a.at("seed").get<std::uint64_t>();
    }
    if (j.contains("total_steps")) c.total_steps = j.at("total_steps").get<std::uint64_t>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("eval_every")) c.eval_every = j.at("eval_every").get<int>();
    if (j.contains("eval_episodes")) c.eval_episodes = j.at("eval_episodes").get<int>();
    if (j.contains("checkpoint_every")) c.checkpoint_every = j.at("checkpoint_every").get<std::uint64_t>();
    if (j.contains("root_velocity_world")) c.root_velocity_world = j.at("root_velocity_world").get<bool>();
    if (j.contains("wall_clock")) c.wall_clock = j.at("wall_clock").get<bool>();
    if (j.contains("hyper")) c.hyper = hyperparams_from_json(j.at("hyper"));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("run config: ") + e.what());
  }
  c.check();
  return c;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return run_config_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

inline std::string output_root() {
  const char* env = std::getenv("EUCAUG_OUTPUT_ROOT");
  return env && *env ? env : "runs";
}

// Default run directory: <root>/<task>/<repr>-<aug>-rho<rho>/seed<seed>.
inline std::string default_run_name(const RunConfig& c) {
  return c.task + "/" + to_string(c.repr) + "-" + to_string(c.augment.kind) + "-rho" +
         format_number(c.augment.rho_aug) + "/seed" + std::to_string(c.seed);
}

// Makes output_dir absolute; empty means the default name under the output root.
inline RunConfig resolve_output(RunConfig c) {
  const fs::path p = c.output_dir.empty() ? fs::path(output_root()) / default_run_name(c) : fs::path(c.output_dir);
  c.output_dir = fs::absolute(p).lexically_normal().string();
  return c;
}

inline void write_text_atomic(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << text;
    if (!out.flush()) throw IoError("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

inline void write_checkpoint(const Trainer& trainer, const fs::path& path) {
  std::ostringstream blob;
  trainer.save_checkpoint(blob);
  write_text_atomic(path, blob.str());
}

// Trains one run into cfg.output_dir (already resolved). Writes config.json,
// curve.csv (flushed after every evaluation), checkpoint.bin and, when the
// run completes, status.json.
inline int cmd_train(const RunConfig& cfg, std::ostream& log = std::cout, std::ostream& err = std::cerr) {
  try {
    cfg.check();
    const fs::path dir(cfg.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    write_text_atomic(dir / "config.json", to_json(cfg).dump(2) + "\n");
    fs::remove(dir / "status.json", ec);
    std::ofstream curve(dir / "curve.csv", std::ios::trunc);
    if (!curve) throw IoError("cannot write " + (dir / "curve.csv").string());
    curve << kCurveHeader << "\n" << std::flush;

    Trainer trainer(builtin_task(cfg.task), cfg.train_options());
    log << "train " << cfg.task << " repr=" << to_string(cfg.repr) << " aug=" << to_string(cfg.augment.kind)
        << " rho=" << format_number(cfg.augment.rho_aug) << " seed=" << cfg.seed << " steps=" << cfg.total_steps
        << " dim=" << trainer.builder().dimension() << " -> " << dir.string() << "\n"
        << std::flush;
    const auto start = std::chrono::steady_clock::now();
    trainer.run(
        [&](const CurveRecord& r) {
          curve << format_curve_row(r) << "\n" << std::flush;
          if (!curve) throw IoError("write to curve.csv failed");
          const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
          log << "  step " << r.step << " return " << std::fixed << std::setprecision(1) << r.mean_return << " +- "
              << r.std_return << std::defaultfloat << " (" << std::setprecision(4) << secs << " s)\n"
              << std::flush;
        },
        [&](const Trainer& t) { write_checkpoint(t, dir / "checkpoint.bin"); }, cfg.checkpoint_every);
    write_checkpoint(trainer, dir / "checkpoint.bin");
    const TrainStats& s = trainer.stats();
    const nlohmann::json status = {{"complete", true},
                                   {"fingerprint", kBuildFingerprint},
                                   {"wall_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()},
                                   {"env_steps", s.env_steps},
                                   {"updates", s.updates},
                                   {"episodes", s.episodes},
                                   {"blowups", s.blowups},
                                   {"augmented", s.augmented}};
    write_text_atomic(dir / "status.json", status.dump(2) + "\n");
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const LayoutMismatch& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "io error: " << e.what() << "\n";
    return kExitIo;
  }
}

// True when dir holds a finished run of exactly `cfg` made by this build.
inline bool run_is_complete(const RunConfig& cfg) {
  const fs::path dir(cfg.output_dir);
  try {
    if (!(load_run_config((dir / "config.json").string()) == cfg)) return false;
    std::ifstream in(dir / "status.json");
    if (!in) return false;
    const auto status = nlohmann::json::parse(in);
    return status.value("complete", false) && status.value("fingerprint", "") == kBuildFingerprint;
  } catch (const std::exception&) {
    return false;
  }
}

// Runs every config as a separate `<exe> train --config <dir>/config.json`
// process, at most `jobs` at a time. Returns the worst child exit status.
inline int run_processes(const std::string& exe, const std::vector<RunConfig>& configs, int jobs,
                         std::ostream& log = std::cout) {
  jobs = std::max(jobs, 1);
  std::map<pid_t, std::string> running;
  int worst = kExitOk;
  auto reap = [&] {
    int status = 0;
    const pid_t pid = ::wait(&status);
    if (pid <= 0) return;
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : kExitInternal;
    log << "finished " << running[pid] << " (exit " << code << ")\n" << std::flush;
    worst = std::max(worst, code);
    running.erase(pid);
  };
  for (const RunConfig& c : configs) {
    while (static_cast<int>(running.size()) >= jobs) reap();
    const fs::path dir(c.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string());
    const std::string config_path = (dir / "config.json").string();
    write_text_atomic(config_path, to_json(c).dump(2) + "\n");
    std::vector<std::string> args = {exe, "train", "--config", config_path};
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    argv.push_back(nullptr);
    pid_t pid = 0;
    if (posix_spawn(&pid, exe.c_str(), nullptr, nullptr, argv.data(), environ) != 0) {
      throw IoError("cannot launch " + exe);
    }
    running[pid] = c.output_dir;
  }
  while (!running.empty()) reap();
  return worst;
}

inline std::string self_executable() {
  std::error_code ec;
  const fs::path p = fs::read_symlink("/proc/self/exe", ec);
  if (ec) throw IoError("cannot locate the running executable");
  return p.string();
}

// Layout mutator that retags the slice called `name`; the negative control
// for the audit.
inline std::function<void(FeatureLayout&)> retag_mutator(const std::string& name, FeatureTag tag) {
  return [name, tag](FeatureLayout& layout) {
    const auto& slices = layout.slices();
    for (std::size_t i = 0; i < slices.size(); ++i) {
      if (slices[i].name == name) {
        try {
          layout.retag(i, tag);
        } catch (const std::invalid_argument& e) {
          throw ConfigError("cannot retag '" + name + "': " + e.what());
        }
        return;
      }
    }
    throw ConfigError("layout has no slice named '" + name + "'");
  };
}

// Applies KEY=VALUE hyperparameter overrides; VALUE is parsed as JSON.
inline Hyperparams apply_overrides(const Hyperparams& base, const std::vector<std::string>& overrides) {
  nlohmann::json j = nlohmann::json::object();
  for (const std::string& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + o + "' is not KEY=VALUE");
    const std::string value = o.substr(eq + 1);
    try {
      j[o.substr(0, eq)] = nlohmann::json::parse(value);
    } catch (const nlohmann::json::parse_error&) {
      j[o.substr(0, eq)] = value;
    }
  }
  return hyperparams_from_json(j, base);
}

inline int cmd_audit(const std::vector<std::string>& tasks, const std::vector<Representation>& reprs,
                     const AuditOptions& opt, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  try {
    bool ok = true;
    const auto start = std::chrono::steady_clock::now();
    out << std::left << std::setw(16) << "task" << std::setw(7) << "repr" << std::setw(20) << "step_equivariance"
        << std::setw(20) << "schema_soundness" << std::setw(22) << "augment_consistency"
        << "verdict\n";
    for (const std::string& name : tasks) {
      for (Representation r : reprs) {
        const AuditReport rep = run_audit(builtin_task(name), r, opt);
        ok = ok && rep.passed();
        out << std::left << std::setw(16) << name << std::setw(7) << to_string(r) << std::scientific
            << std::setprecision(3) << std::setw(20) << rep.step_equivariance << std::setw(20)
            << rep.schema_soundness << std::setw(22) << rep.augment_consistency << std::defaultfloat
            << (rep.passed() ? "PASS" : "FAIL") << "\n"
            << std::flush;
      }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out << (ok ? "audit PASS" : "audit FAIL") << ": " << opt.samples << " samples per check, threshold "
        << opt.threshold << ", " << std::fixed << std::setprecision(1) << secs << " s\n"
        << std::defaultfloat;
    return ok ? kExitOk : kExitAuditFailed;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
}

// Groups curves by their sibling config.json with seed and output directory
// removed; a curve without one forms its own group.
inline std::vector<CurveSeries> group_curves(const std::vector<std::string>& files) {
  std::vector<CurveSeries> series;
  std::map<std::string, std::size_t> index;
  for (const std::string& f : files) {
    std::string key = f;
    std::string label = f;
    const fs::path cfg_path = fs::path(f).parent_path() / "config.json";
    if (fs::exists(cfg_path)) {
      const RunConfig c = load_run_config(cfg_path.string());
      nlohmann::json j = to_json(c);
      j.erase("seed");
      j.erase("output_dir");
      key = j.dump();
      label = c.task + " " + to_string(c.repr) + " " + to_string(c.augment.kind);
      if (c.augment.kind != AugmentKind::none) label += " rho=" + format_number(c.augment.rho_aug);
    }
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, series.size()).first;
      series.push_back(CurveSeries{label, {}});
    }
    series[it->second].seeds.push_back(read_curve_file(f));
  }
  return series;
}

inline int cmd_plot(const std::vector<std::string>& files, const std::string& output, const std::string& title,
                    std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  try {
    if (files.empty()) throw ConfigError("plot needs at least one curve.csv");
    std::vector<CurveBand> bands;
    for (const auto& s : group_curves(files)) bands.push_back(aggregate(s));
    write_text_atomic(output, render_svg(bands, title));
    out << "wrote " << output << " (" << bands.size() << " series)\n";
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ParseError& e) {
    err << "schema error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "io error: " << e.what() << "\n";
    return kExitIo;
  }
}

inline int cmd_list_tasks(std::ostream& out = std::cout) {
  const auto& core = core_task_names();
  out << std::left << std::setw(16) << "task" << std::setw(10) << "set" << std::setw(5) << "d1" << std::setw(5)
      << "n" << std::setw(5) << "m" << std::setw(5) << "d" << std::setw(10) << "limb_dim"
      << "joint_dim\n";
  for (const auto& [name, spec] : builtin_tasks()) {
    const DofCounts c = spec.morphology.counts();
    const bool is_core = std::find(core.begin(), core.end(), name) != core.end();
    out << std::left << std::setw(16) << name << std::setw(10) << (is_core ? "core" : "optional") << std::setw(5)
        << c.d1 << std::setw(5) << c.n << std::setw(5) << c.m << std::setw(5) << c.d << std::setw(10)
        << feature_dimension(spec, Representation::limb) << feature_dimension(spec, Representation::joint) << "\n";
  }
  return kExitOk;
}

}  // namespace eucaug
