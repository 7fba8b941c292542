// Copyright 2026 The EvoRobogami Authors
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

// Command-line front end: run, simulate, analyze, gen-seeds, serve.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "evorobogami/error.h"
#include "evorobogami/http_api.h"
#include "evorobogami/io.h"
#include "evorobogami/runner.h"
#include "evorobogami/service.h"

namespace fs = std::filesystem;
namespace er = evorobogami;

namespace {

struct SimOptions {
  std::string terrain_config;
  std::string gait_config;
};

void add_sim_options(CLI::App* app, SimOptions& o) {
  app->add_option("--terrain-config", o.terrain_config,
                  "JSON terrain overrides {kind, amplitude, wavelength, floor_width, bounds}")
      ->check(CLI::ExistingFile);
  app->add_option("--gait-config", o.gait_config,
                  "JSON gait table {two_link, three_link}")
      ->check(CLI::ExistingFile);
}

er::Terrain make_terrain(const std::string& env, const SimOptions& o) {
  er::Terrain t(er::parse_terrain_kind(env));
  if (!o.terrain_config.empty()) t = er::io::terrain_from_json(er::io::read_json(o.terrain_config), t);
  return t;
}

er::SimConfig make_sim(const SimOptions& o) {
  er::SimConfig sim;
  if (!o.gait_config.empty()) sim.gait = er::io::gait_from_json(er::io::read_json(o.gait_config));
  return sim;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    er::io::write_text(path, text);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Legged-robot design workbench: MAP-Elites with human seeding"};
  app.require_subcommand(1);

  // run
  auto* run_cmd = app.add_subcommand("run", "Run an experiment matrix");
  std::vector<std::string> run_envs{"ground"};
  std::vector<std::string> run_conditions{"h0"};
  int repeats = 10;
  int iterations = 2000;
  std::uint64_t run_seed = 0;
  std::string seeds_file;
  std::string run_out = "runs";
  int jobs = 1;
  SimOptions run_sim;
  run_cmd->add_option("--env", run_envs, "ground|sine|valley (repeatable, comma list)")
      ->delimiter(',');
  run_cmd->add_option("--condition", run_conditions,
                      "h0|h5|h15|h25|h30 or h<n>:<cap> (repeatable, comma list)")
      ->delimiter(',');
  run_cmd->add_option("--repeats", repeats, "Repeats per condition")->check(CLI::PositiveNumber);
  run_cmd->add_option("--iterations", iterations, "Iterations per run")
      ->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--rng-seed", run_seed, "Base seed; repeat k uses seed + k");
  run_cmd->add_option("--seeds-file", seeds_file, "Design file with human seeds")
      ->check(CLI::ExistingFile);
  run_cmd->add_option("--out", run_out, "Output directory");
  run_cmd->add_option("--jobs", jobs, "Runs executed in parallel")->check(CLI::PositiveNumber);
  add_sim_options(run_cmd, run_sim);

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Simulate one design");
  std::string genome_file;
  std::string sim_env = "ground";
  std::string frames_out;
  SimOptions sim_sim;
  sim_cmd->add_option("--genome", genome_file, "Design file (first record is used)")
      ->required()
      ->check(CLI::ExistingFile);
  sim_cmd->add_option("--env", sim_env, "ground|sine|valley");
  sim_cmd->add_option("--frames-out", frames_out, "Write trajectory frames as JSON here");
  add_sim_options(sim_cmd, sim_sim);

  // analyze
  auto* an_cmd = app.add_subcommand("analyze", "Milestone tables and pairwise tests");
  std::string runs_dir;
  std::string milestone_mode;
  bool pairwise = false;
  std::string an_out;
  an_cmd->add_option("--runs", runs_dir, "Directory produced by run")
      ->required()
      ->check(CLI::ExistingDirectory);
  an_cmd->add_option("--milestones", milestone_mode,
                     "Emit milestone tables; fitness series is mean (default) or elite")
      ->expected(0, 1)
      ->default_str("mean");
  an_cmd->add_flag("--pairwise", pairwise, "Emit condition-by-condition comparison matrices");
  an_cmd->add_option("--out", an_out, "Write CSV files here instead of stdout");

  // gen-seeds
  auto* gen_cmd = app.add_subcommand("gen-seeds", "Generate a synthetic seed pool");
  std::string mode = "clustered_high";
  int n = 30;
  std::string gen_env = "ground";
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  SimOptions gen_sim;
  gen_cmd->add_option("--mode", mode, "clustered_high|clustered_low|scattered");
  gen_cmd->add_option("--n", n, "Number of designs")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--env", gen_env, "ground|sine|valley");
  gen_cmd->add_option("--rng-seed", gen_seed, "Seed");
  gen_cmd->add_option("--out", gen_out, "Design file to write (stdout by default)");
  add_sim_options(gen_cmd, gen_sim);

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "Start the wire API");
  int port = 8080;
  std::string host = "127.0.0.1";
  std::string data_dir;
  std::uint64_t serve_seed = 0;
  serve_cmd->add_option("--port", port, "TCP port");
  serve_cmd->add_option("--host", host, "Bind address");
  serve_cmd->add_option("--data-dir", data_dir, "Session logs and pool files");
  serve_cmd->add_option("--seed", serve_seed, "Service RNG seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      er::ExperimentPlan plan;
      plan.environments.clear();
      for (const auto& e : run_envs) plan.environments.push_back(make_terrain(e, run_sim));
      plan.conditions.clear();
      for (const auto& c : run_conditions) plan.conditions.push_back(er::parse_condition(c));
      plan.repeats = repeats;
      plan.iterations = iterations;
      plan.base_seed = run_seed;
      plan.out = run_out;
      plan.jobs = jobs;
      plan.sim = make_sim(run_sim);
      const er::SeedPool pool = seeds_file.empty() ? er::SeedPool{} : er::io::read_design_file(seeds_file);
      er::run_experiment(plan, pool, [](const er::RunSpec& s) {
        std::cerr << "done " << s.dir.string() << "\n";
      });
      return 0;
    }

    if (*sim_cmd) {
      const er::SeedPool pool = er::io::read_design_file(genome_file);
      if (pool.records.empty()) throw er::ConfigError(genome_file + " holds no design");
      const er::Genome& g = pool.records.front().genome;
      er::require_valid(g);
      er::SimConfig sim = make_sim(sim_sim);
      sim.record_frames = !frames_out.empty();
      const er::SimResult r = er::simulate(g, make_terrain(sim_env, sim_sim), sim);
      if (!frames_out.empty()) {
        er::io::Json frames = er::io::Json::array();
        for (const auto& f : r.frames) frames.push_back(er::io::to_json(f));
        er::io::write_text(frames_out, frames.dump() + "\n");
      }
      std::cout << er::io::to_json(r, false).dump(2) << "\n";
      return 0;
    }

    if (*an_cmd) {
      const auto runs = er::load_runs(runs_dir);
      bool problems = false;
      for (const auto& r : runs) {
        for (const auto& p : r.problems) {
          std::cerr << "manifest check failed for " << r.dir.string() << ": " << p << "\n";
          problems = true;
        }
      }
      const bool milestones = an_cmd->count("--milestones") > 0;
      if (!milestones && !pairwise) {
        throw er::ConfigError("nothing to do: pass --milestones and/or --pairwise");
      }
      auto target = [&](const std::string& name) {
        return an_out.empty() ? std::string() : (fs::path(an_out) / name).string();
      };
      if (milestones) {
        if (milestone_mode.empty()) milestone_mode = "mean";
        er::MilestoneMode fmode = er::MilestoneMode::kMean;
        if (milestone_mode == "elite") {
          fmode = er::MilestoneMode::kElite;
        } else if (!milestone_mode.empty() && milestone_mode != "mean") {
          throw er::ConfigError("--milestones takes mean or elite");
        }
        if (an_out.empty()) std::cout << "# fitness milestones (" << milestone_mode << ")\n";
        emit(er::fitness_milestone_csv(runs, fmode), target("fitness_milestones.csv"));
        if (an_out.empty()) std::cout << "# coverage milestones\n";
        emit(er::coverage_milestone_csv(runs), target("coverage_milestones.csv"));
      }
      if (pairwise) {
        if (an_out.empty()) std::cout << "# pairwise comparisons\n";
        emit(er::pairwise_csv(runs), target("pairwise.csv"));
      }
      return problems ? 3 : 0;
    }

    if (*gen_cmd) {
      er::Rng rng(gen_seed);
      const er::SeedPool pool = er::generate_synthetic_seeds(
          make_terrain(gen_env, gen_sim), er::parse_seed_mode(mode), n, rng, make_sim(gen_sim),
          er::worker_cap());
      emit(er::io::design_file_text(pool), gen_out);
      return 0;
    }

    if (*serve_cmd) {
      er::ServiceOptions opts;
      opts.seed = serve_seed;
      if (!data_dir.empty()) opts.data_dir = data_dir;
      opts.run_threads = er::worker_cap();
      er::StudyService service(opts);
      std::cerr << "listening on " << host << ":" << port << "\n";
      if (!er::serve(service, host, port)) {
        std::cerr << "error: cannot bind " << host << ":" << port << "\n";
        return 1;
      }
      return 0;
    }
  } catch (const er::ValidationError& e) {
    std::cerr << "error: invalid design\n";
    for (const auto& v : e.violations()) std::cerr << "  " << v << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
