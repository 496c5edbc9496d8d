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


// eucaug command-line interface: train, audit, plot, list-tasks.

#include "CLI11.hpp"

#include <iostream>
#include <string>
#include <vector>

#include "eucaug/harness.hpp"

namespace {

using namespace eucaug;

struct TrainArgs {
  std::string config;
  std::string task;
  std::string repr;
  std::string aug;
  double rho = -1.0;
  double gn_sigma = -1.0;
  double ras_lo = -1.0;
  double ras_hi = -1.0;
  std::int64_t aug_seed = -1;
  std::string root_velocity;
  std::int64_t steps = -1;
  std::vector<std::uint64_t> seeds;
  std::string output;
  int eval_every = 0;
  int eval_episodes = 0;
  std::int64_t checkpoint_every = -1;
  bool wall_clock = false;
  std::vector<std::string> hyper;
  int jobs = 1;
};

// Starts from --config (or defaults) and applies every flag that was given.
RunConfig build_config(const TrainArgs& a, std::uint64_t seed, bool has_seed) {
  RunConfig c = a.config.empty() ? RunConfig{} : load_run_config(a.config);
  if (!a.task.empty()) c.task = a.task;
  if (!a.repr.empty()) c.repr = parse_representation(a.repr);
  if (!a.aug.empty()) c.augment.kind = parse_augment_kind(a.aug);
  if (a.rho >= 0.0) c.augment.rho_aug = a.rho;
  if (a.gn_sigma >= 0.0) c.augment.gn_sigma = a.gn_sigma;
  if (a.ras_lo >= 0.0) c.augment.ras_lo = a.ras_lo;
  if (a.ras_hi >= 0.0) c.augment.ras_hi = a.ras_hi;
  if (a.aug_seed >= 0) c.augment.seed = static_cast<std::uint64_t>(a.aug_seed);
  if (!a.root_velocity.empty()) {
    if (a.root_velocity != "world" && a.root_velocity != "body") {
      throw ConfigError("--root-velocity must be 'world' or 'body'");
    }
    c.root_velocity_world = a.root_velocity == "world";
  }
  if (a.steps >= 0) c.total_steps = static_cast<std::uint64_t>(a.steps);
  if (has_seed) c.seed = seed;
  if (a.eval_every > 0) c.eval_every = a.eval_every;
  if (a.eval_episodes > 0) c.eval_episodes = a.eval_episodes;
  if (a.checkpoint_every >= 0) c.checkpoint_every = static_cast<std::uint64_t>(a.checkpoint_every);
  if (a.wall_clock) c.wall_clock = true;
  c.hyper = apply_overrides(c.hyper, a.hyper);
  c.check();
  return c;
}

int run_train(const TrainArgs& a) {
  std::vector<RunConfig> configs;
  if (a.seeds.empty()) {
    configs.push_back(build_config(a, 0, false));
  } else {
    for (std::uint64_t s : a.seeds) configs.push_back(build_config(a, s, true));
  }
  if (configs.size() > 1 && !a.output.empty()) {
    // One directory per seed below the given output directory.
    for (auto& c : configs) c.output_dir = (fs::path(a.output) / ("seed" + std::to_string(c.seed))).string();
  } else if (!a.output.empty()) {
    configs.front().output_dir = a.output;
  } else if (!a.config.empty() && configs.size() == 1) {
    // Keep the directory recorded in the config file.
  } else {
    for (auto& c : configs) c.output_dir.clear();
  }
  for (auto& c : configs) c = resolve_output(c);
  if (configs.size() == 1) return cmd_train(configs.front());
  return run_processes(self_executable(), configs, a.jobs);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Yaw-symmetric continuous-control toolkit with Euclidean replay augmentation"};
  app.require_subcommand(1);

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "Train a DDPG agent and write curve.csv, config.json, checkpoint.bin");
  train->add_option("--config", ta.config, "Start from a config.json written by a previous run");
  train->add_option("--task", ta.task, "Registry task name (see list-tasks)");
  train->add_option("--repr", ta.repr, "State representation: limb or joint");
  train->add_option("--aug", ta.aug, "Augmentation: none, euclidean, gaussian_noise, ras, joint_euclidean");
  train->add_option("--rho", ta.rho, "Fraction of each replay batch that is augmented");
  train->add_option("--gn-sigma", ta.gn_sigma, "Standard deviation for gaussian_noise");
  train->add_option("--ras-lo", ta.ras_lo, "Lower bound of the ras scale");
  train->add_option("--ras-hi", ta.ras_hi, "Upper bound of the ras scale");
  train->add_option("--aug-seed", ta.aug_seed, "Salt for the augmentation random stream");
  train->add_option("--root-velocity", ta.root_velocity, "Joint repr root velocity frame: world or body");
  train->add_option("--steps", ta.steps, "Total environment steps");
  train->add_option("--seed", ta.seeds, "Seed; several values run one process per seed")->delimiter(',');
  train->add_option("--output", ta.output, "Run directory (default $EUCAUG_OUTPUT_ROOT or ./runs, by config)");
  train->add_option("--eval-every", ta.eval_every, "Environment steps between evaluations");
  train->add_option("--eval-episodes", ta.eval_episodes, "Episodes per evaluation");
  train->add_option("--checkpoint-every", ta.checkpoint_every, "Steps between checkpoints (0: final only)");
  train->add_flag("--wall-clock", ta.wall_clock, "Record elapsed seconds in curve.csv (breaks byte identity)");
  train->add_option("--hyper", ta.hyper, "Hyperparameter override KEY=VALUE, repeatable");
  train->add_option("--jobs", ta.jobs, "Concurrent processes when several seeds are given")->check(CLI::PositiveNumber);

  std::vector<std::string> audit_tasks;
  std::string audit_repr = "both";
  AuditOptions audit_opt;
  std::string retag;
  auto* audit = app.add_subcommand("audit", "Check step equivariance, schema soundness and augmentation consistency");
  audit->add_option("--task", audit_tasks, "Tasks to audit (default: the seven core tasks)");
  audit->add_option("--repr", audit_repr, "limb, joint or both")->check(CLI::IsMember({"limb", "joint", "both"}));
  audit->add_option("--samples", audit_opt.samples, "Random samples per check")->check(CLI::PositiveNumber);
  audit->add_option("--seed", audit_opt.seed, "Sampling seed");
  audit->add_option("--threshold", audit_opt.threshold, "Fail when a residual reaches this value");
  audit->add_option("--retag", retag, "NAME=TAG: retag one feature slice (negative control)");

  std::vector<std::string> plot_files;
  std::string plot_output = "curves.svg";
  std::string plot_title;
  auto* plot = app.add_subcommand("plot", "Plot mean return with a 95% confidence band per configuration");
  plot->add_option("curves", plot_files, "curve.csv files; runs sharing a config are averaged over seeds");
  plot->add_option("-o,--output", plot_output, "SVG file to write");
  plot->add_option("--title", plot_title, "Chart title");

  app.add_subcommand("list-tasks", "List registry tasks with DoF counts and feature sizes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*train) return run_train(ta);
    if (*audit) {
      if (audit_tasks.empty()) audit_tasks = core_task_names();
      std::vector<Representation> reprs;
      if (audit_repr != "joint") reprs.push_back(Representation::limb);
      if (audit_repr != "limb") reprs.push_back(Representation::joint);
      if (!retag.empty()) {
        const auto eq = retag.find('=');
        if (eq == std::string::npos) throw ConfigError("--retag expects NAME=TAG");
        try {
          audit_opt.layout_mutator = retag_mutator(retag.substr(0, eq), parse_feature_tag(retag.substr(eq + 1)));
        } catch (const ParseError& e) {
          throw ConfigError(e.what());
        }
      }
      return cmd_audit(audit_tasks, reprs, audit_opt);
    }
    if (*plot) return cmd_plot(plot_files, plot_output, plot_title);
    return cmd_list_tasks();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
}
