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

#include "evorobogami/runner.h"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

#include "evorobogami/error.h"
#include "evorobogami/io.h"

namespace evorobogami {

namespace {

namespace fs = std::filesystem;
using io::Json;

constexpr int kPopulation = 30;

// Calls fn(i) for i in [0, n) on up to `workers` threads; rethrows the
// first failure after all workers finish.
void parallel_for(std::size_t n, int workers,
                  const std::function<void(std::size_t)>& fn) {
  const auto count = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
  if (count == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < count; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::optional<int> parse_nonneg(std::string_view s) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || v < 0) {
    return std::nullopt;
  }
  return v;
}

Json sim_json(const SimConfig& c) {
  return {{"dt", c.dt},
          {"duration", c.duration},
          {"start_clearance", c.start_clearance},
          {"contact_threshold", c.contact_threshold},
          {"drag", c.drag},
          {"gravity", c.gravity},
          {"kill_depth", c.kill_depth},
          {"gait", io::to_json(c.gait)},
          {"gains",
           {{"kp_position", c.gains.kp_position},
            {"ki_position", c.gains.ki_position},
            {"kp_velocity", c.gains.kp_velocity},
            {"ki_velocity", c.gains.ki_velocity},
            {"max_velocity", c.gains.max_velocity},
            {"integrator_limit", c.gains.integrator_limit},
            {"reach_tolerance", c.gains.reach_tolerance},
            {"switch_timeout", c.gains.switch_timeout}}}};
}

Json config_json(const RunSpec& spec, const ExperimentPlan& plan) {
  return {{"run", io::to_json(run_config_for(spec, plan.iterations))},
          {"terrain", io::to_json(spec.terrain)},
          {"simulation", sim_json(plan.sim)}};
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

// Runs grouped by environment, then by condition, in a stable display order.
using Grouped = std::map<std::string, std::map<std::string, std::vector<const LoadedRun*>>>;

int env_rank(const std::string& env) {
  if (env == "ground") return 0;
  if (env == "sine") return 1;
  if (env == "valley") return 2;
  return 3;
}

std::vector<std::string> ordered_envs(const Grouped& g) {
  std::vector<std::string> out;
  for (const auto& [env, _] : g) out.push_back(env);
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return env_rank(a) < env_rank(b);
  });
  return out;
}

std::vector<std::string> ordered_conditions(std::span<const LoadedRun> runs) {
  std::set<std::string> names;
  for (const auto& r : runs) names.insert(r.condition);
  std::vector<std::string> out(names.begin(), names.end());
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    Condition ca, cb;
    try {
      ca = parse_condition(a);
      cb = parse_condition(b);
    } catch (const ConfigError&) {
      return a < b;
    }
    return std::tie(ca.n_human, ca.per_user_cap) < std::tie(cb.n_human, cb.per_user_cap);
  });
  return out;
}

Grouped group_runs(std::span<const LoadedRun> runs) {
  Grouped g;
  for (const auto& r : runs) g[r.environment][r.condition].push_back(&r);
  return g;
}

std::string milestone_table(
    std::span<const LoadedRun> runs,
    const std::function<std::vector<std::optional<int>>(const LoadedRun&)>& milestones) {
  const auto grouped = group_runs(runs);
  const auto conditions = ordered_conditions(runs);
  std::string out = "environment,progress";
  for (const auto& c : conditions) out += "," + c;
  for (const auto& c : conditions) out += "," + c + "_reached";
  out += '\n';
  for (const auto& env : ordered_envs(grouped)) {
    const auto& by_cond = grouped.at(env);
    std::map<std::string, std::vector<std::vector<std::optional<int>>>> per_cond;
    for (const auto& c : conditions) {
      auto it = by_cond.find(c);
      if (it == by_cond.end()) continue;
      for (const LoadedRun* r : it->second) per_cond[c].push_back(milestones(*r));
    }
    for (std::size_t k = 0; k < kMilestonePercents.size(); ++k) {
      out += env + "," + io::format_double(kMilestonePercents[k]);
      std::string counts;
      for (const auto& c : conditions) {
        std::vector<double> reached;
        std::size_t total = 0;
        if (auto it = per_cond.find(c); it != per_cond.end()) {
          total = it->second.size();
          for (const auto& m : it->second) {
            if (m[k]) reached.push_back(*m[k]);
          }
        }
        out += ",";
        if (!reached.empty()) out += io::format_double(mean_of(reached));
        counts += "," + std::to_string(reached.size()) + "/" + std::to_string(total);
      }
      out += counts + "\n";
    }
  }
  return out;
}

}  // namespace

Condition parse_condition(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s.size() < 2 || s[0] != 'h') {
    throw ConfigError("bad condition '" + std::string(text) + "'");
  }
  const auto colon = s.find(':');
  if (colon == std::string::npos) {
    for (const auto& c : standard_conditions()) {
      if (c.name == s) return c;
    }
    throw ConfigError("unknown condition '" + std::string(text) +
                      "' (use h0, h5, h15, h25, h30 or h<n>:<cap>)");
  }
  const auto n = parse_nonneg(std::string_view(s).substr(1, colon - 1));
  const auto cap = parse_nonneg(std::string_view(s).substr(colon + 1));
  if (!n || !cap || *n > kPopulation || (*n > 0 && *cap < 1)) {
    throw ConfigError("bad condition '" + std::string(text) + "'");
  }
  return {s, *n, *cap};
}

const std::vector<Condition>& standard_conditions() {
  static const std::vector<Condition> kStandard{
      {"h0", 0, 0}, {"h5", 5, 1}, {"h15", 15, 2}, {"h25", 25, 3}, {"h30", 30, 3}};
  return kStandard;
}

std::uint64_t repeat_seed(std::uint64_t base, int repeat) {
  return base + static_cast<std::uint64_t>(repeat);
}

std::string condition_dir_name(const Condition& c) {
  std::string out = c.name;
  std::replace(out.begin(), out.end(), ':', '-');
  return out;
}

std::vector<RunSpec> expand_plan(const ExperimentPlan& plan) {
  if (plan.repeats < 1) throw ConfigError("repeats must be >= 1");
  if (plan.iterations < 0) throw ConfigError("iterations must be >= 0");
  std::vector<RunSpec> out;
  for (const auto& env : plan.environments) {
    for (const auto& cond : plan.conditions) {
      for (int k = 0; k < plan.repeats; ++k) {
        RunSpec s;
        s.terrain = env;
        s.condition = cond;
        s.repeat = k;
        s.seed = repeat_seed(plan.base_seed, k);
        s.dir = plan.out / std::string(to_string(env.kind())) /
                condition_dir_name(cond) / ("run" + std::to_string(k));
        out.push_back(std::move(s));
      }
    }
  }
  return out;
}

std::vector<Individual> seeds_for(const SeedPool& pool, TerrainKind env,
                                  const Condition& c) {
  if (c.n_human == 0) return {};
  SeedPool matching;
  for (const auto& r : pool.records) {
    if (r.environment.empty() || parse_terrain_kind(r.environment) == env) {
      matching.records.push_back(r);
    }
  }
  std::vector<Individual> out;
  for (auto& r : select_seeds(deduplicate(matching), c.n_human, c.per_user_cap)) {
    require_valid(r.genome);
    Provenance p;
    p.kind = Provenance::Kind::kHuman;
    p.user_id = r.user_id;
    out.push_back(make_individual(std::move(r.genome), r.recorded_fitness, std::move(p)));
  }
  return out;
}

RunConfig run_config_for(const RunSpec& spec, int iterations) {
  RunConfig cfg;
  cfg.environment = spec.terrain.kind();
  cfg.iterations = iterations;
  cfg.rng_seed = spec.seed;
  cfg.n_human = spec.condition.n_human;
  cfg.n_random = cfg.initial_population - spec.condition.n_human;
  return cfg;
}

RunLog execute_run(const RunSpec& spec, const ExperimentPlan& plan,
                   const SeedPool& pool, int threads, const RunObserver& observer) {
  const auto seeds = seeds_for(pool, spec.terrain.kind(), spec.condition);
  SimConfig sim = plan.sim;
  sim.record_frames = false;
  return run(run_config_for(spec, plan.iterations), seeds,
             simulation_evaluator(spec.terrain, sim, threads), observer);
}

void write_run(const RunSpec& spec, const ExperimentPlan& plan,
               std::span<const Individual> seeds, const RunLog& log) {
  const std::string log_text = io::log_csv(log.records);
  const std::string archive_text = io::archive_csv(log.archive);
  const Json config = config_json(spec, plan);
  Json seed_list = Json::array();
  for (const auto& s : seeds) {
    seed_list.push_back({{"user_id", s.provenance.user_id}, {"genome", io::to_json(s.genome)}});
  }
  const Json manifest = {
      {"environment", std::string(to_string(spec.terrain.kind()))},
      {"condition", spec.condition.name},
      {"n_human", spec.condition.n_human},
      {"per_user_cap", spec.condition.per_user_cap},
      {"repeat", spec.repeat},
      {"base_seed", plan.base_seed},
      {"seed", spec.seed},
      {"config", config},
      {"config_hash", fnv1a_hex(config.dump())},
      {"seeds", std::move(seed_list)},
      {"files",
       {{"log.csv", fnv1a_hex(log_text)}, {"archive.csv", fnv1a_hex(archive_text)}}}};
  io::write_text(spec.dir / "log.csv", log_text);
  io::write_text(spec.dir / "archive.csv", archive_text);
  io::write_text(spec.dir / "manifest.json", manifest.dump(2) + "\n");
}

std::vector<fs::path> run_experiment(const ExperimentPlan& plan, const SeedPool& pool,
                                     const std::function<void(const RunSpec&)>& on_done) {
  const auto specs = expand_plan(plan);
  std::vector<std::vector<Individual>> seeds;
  seeds.reserve(specs.size());
  for (const auto& s : specs) seeds.push_back(seeds_for(pool, s.terrain.kind(), s.condition));

  std::error_code ec;
  fs::create_directories(plan.out, ec);
  if (ec) throw ConfigError("cannot create " + plan.out.string() + ": " + ec.message());

  const int cap = worker_cap();
  const int jobs = std::clamp(plan.jobs, 1, cap);
  const int threads = std::max(1, cap / jobs);
  std::mutex done_mutex;
  parallel_for(specs.size(), jobs, [&](std::size_t i) {
    SimConfig sim = plan.sim;
    sim.record_frames = false;
    const RunLog log = run(run_config_for(specs[i], plan.iterations), seeds[i],
                           simulation_evaluator(specs[i].terrain, sim, threads));
    write_run(specs[i], plan, seeds[i], log);
    if (on_done) {
      std::lock_guard lock(done_mutex);
      on_done(specs[i]);
    }
  });

  std::vector<fs::path> dirs;
  for (const auto& s : specs) dirs.push_back(s.dir);
  return dirs;
}

int worker_cap() {
  if (const char* env = std::getenv("EVOROBOGAMI_THREADS")) {
    if (const auto v = parse_nonneg(env); v && *v >= 1) return *v;
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

LoadedRun load_run(const fs::path& dir) {
  LoadedRun r;
  r.dir = dir;
  const Json manifest = io::read_json(dir / "manifest.json");
  r.environment = manifest.value("environment", "");
  r.condition = manifest.value("condition", "");
  r.repeat = manifest.value("repeat", 0);
  r.seed = manifest.value("seed", std::uint64_t{0});
  if (manifest.contains("config") &&
      manifest.value("config_hash", "") != fnv1a_hex(manifest.at("config").dump())) {
    r.problems.push_back("config hash mismatch");
  }
  const Json files = manifest.value("files", Json::object());
  for (const char* name : {"log.csv", "archive.csv"}) {
    const fs::path path = dir / name;
    if (!fs::exists(path)) {
      r.problems.push_back(std::string(name) + " missing");
      continue;
    }
    const std::string text = io::read_text(path);
    if (files.value(name, "") != fnv1a_hex(text)) {
      r.problems.push_back(std::string(name) + " hash mismatch");
    }
    if (std::string_view(name) == "log.csv") {
      r.log = io::parse_log_csv(text);
    } else {
      r.archive = io::parse_archive_csv(text);
    }
  }
  return r;
}

std::vector<LoadedRun> load_runs(const fs::path& root) {
  if (!fs::is_directory(root)) throw ConfigError(root.string() + " is not a directory");
  std::vector<fs::path> dirs;
  if (fs::exists(root / "manifest.json")) dirs.push_back(root);
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_directory() && fs::exists(entry.path() / "manifest.json")) {
      dirs.push_back(entry.path());
    }
  }
  std::sort(dirs.begin(), dirs.end());
  std::vector<LoadedRun> out;
  for (const auto& d : dirs) out.push_back(load_run(d));
  return out;
}

SeedMode parse_seed_mode(std::string_view text) {
  if (text == "clustered_high") return SeedMode::kClusteredHigh;
  if (text == "clustered_low") return SeedMode::kClusteredLow;
  if (text == "scattered") return SeedMode::kScattered;
  throw ConfigError("unknown seed mode '" + std::string(text) +
                    "' (use clustered_high, clustered_low or scattered)");
}

std::string_view to_string(SeedMode mode) {
  switch (mode) {
    case SeedMode::kClusteredHigh:
      return "clustered_high";
    case SeedMode::kClusteredLow:
      return "clustered_low";
    case SeedMode::kScattered:
      return "scattered";
  }
  return "scattered";
}

SeedPool generate_synthetic_seeds(const Terrain& env, SeedMode mode, int n, Rng& rng,
                                  const SimConfig& sim_in, int threads) {
  if (n < 1) throw ConfigError("n must be >= 1");
  SimConfig sim = sim_in;
  sim.record_frames = false;
  std::vector<Genome> genomes(n);
  std::vector<double> fitness(n);

  if (mode == SeedMode::kClusteredHigh) {
    std::vector<Rng> streams;
    for (int i = 0; i < n; ++i) streams.push_back(rng.split());
    parallel_for(n, threads, [&](std::size_t i) {
      Rng& r = streams[i];
      Genome best = neutral_genome();
      double best_f = simulate(best, env, sim).fitness;
      for (int evals = 1; evals < kHillClimbBudget; ++evals) {
        Genome cand = mutate(best, 0.1, r);
        while (cand == best) cand = mutate(best, 0.1, r);
        const double f = simulate(cand, env, sim).fitness;
        if (f >= best_f) {
          best = std::move(cand);
          best_f = f;
        }
      }
      genomes[i] = std::move(best);
      fitness[i] = best_f;
    });
  } else {
    const double mid_x = (kMinBodyLengthX + kMaxBodyLengthX) / 2.0;
    const double mid_std = (kMinLegLengthStd + kMaxLegLengthStd) / 2.0;
    for (int i = 0; i < n; ++i) {
      Genome g = random_genome(rng);
      while (mode == SeedMode::kClusteredLow) {
        const auto f = features(g);
        if (f.body_length_x < mid_x && f.leg_length_std < mid_std) break;
        g = random_genome(rng);
      }
      genomes[i] = std::move(g);
    }
    parallel_for(n, threads, [&](std::size_t i) {
      fitness[i] = simulate(genomes[i], env, sim).fitness;
    });
  }

  const int users = (n + 2) / 3;
  SeedPool pool;
  for (int i = 0; i < n; ++i) {
    SeedRecord r;
    r.user_id = "u" + std::to_string(i % users + 1);
    r.environment = std::string(to_string(env.kind()));
    r.iteration = i / users;
    r.genome = std::move(genomes[i]);
    r.recorded_fitness = fitness[i];
    pool.records.push_back(std::move(r));
  }
  return pool;
}

std::string fitness_milestone_csv(std::span<const LoadedRun> runs, MilestoneMode mode) {
  return milestone_table(runs, [mode](const LoadedRun& r) {
    return fitness_milestones(r.log, kMilestonePercents, mode);
  });
}

std::string coverage_milestone_csv(std::span<const LoadedRun> runs) {
  return milestone_table(runs, [](const LoadedRun& r) {
    return coverage_milestones(r.log, kMilestonePercents);
  });
}

std::string pairwise_csv(std::span<const LoadedRun> runs) {
  const auto grouped = group_runs(runs);
  const auto conditions = ordered_conditions(runs);
  std::string out = "environment,metric,condition";
  for (const auto& c : conditions) out += "," + c;
  out += '\n';

  static const std::vector<std::string> kMetrics{
      "qd_score",    "global_performance", "reliability", "precision",
      "coverage",    "mean_fitness",       "iters_to_50_coverage",
      "iters_to_90_coverage"};

  for (const auto& env : ordered_envs(grouped)) {
    const auto& by_cond = grouped.at(env);
    // Best-known per cell is pooled over every run of this environment.
    std::vector<const LoadedRun*> env_runs;
    std::vector<Archive> archives;
    for (const auto& c : conditions) {
      if (auto it = by_cond.find(c); it != by_cond.end()) {
        for (const LoadedRun* r : it->second) {
          env_runs.push_back(r);
          archives.push_back(r->archive);
        }
      }
    }
    const auto rp = reliability_precision(archives);
    std::map<std::string, std::map<std::string, std::vector<double>>> samples;
    for (std::size_t i = 0; i < env_runs.size(); ++i) {
      const LoadedRun& r = *env_runs[i];
      if (r.log.empty()) continue;
      const IterationStats& last = r.log.back();
      // Runs that never reach a coverage level are censored at one past
      // their last iteration.
      const auto cov = coverage_milestones(r.log, std::vector<double>{50, 90});
      const double censored = last.iteration + 1.0;
      auto& s = samples[r.condition];
      s["qd_score"].push_back(last.qd_score);
      s["global_performance"].push_back(last.best_fitness);
      s["reliability"].push_back(rp[i].reliability);
      s["precision"].push_back(rp[i].precision);
      s["coverage"].push_back(last.coverage);
      s["mean_fitness"].push_back(last.mean_fitness);
      s["iters_to_50_coverage"].push_back(cov[0] ? *cov[0] : censored);
      s["iters_to_90_coverage"].push_back(cov[1] ? *cov[1] : censored);
    }
    for (const auto& metric : kMetrics) {
      for (const auto& row : conditions) {
        out += env + "," + metric + "," + row;
        for (const auto& col : conditions) {
          out += ",";
          const auto& rs = samples[row][metric];
          const auto& cs = samples[col][metric];
          if (rs.empty() || cs.empty()) continue;
          const Comparison c = compare_samples(rs, cs);
          out += c.sign;
          if (c.significant) out += '*';
        }
        out += '\n';
      }
    }
  }
  return out;
}

}  // namespace evorobogami
