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

#include "evorobogami/service.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "evorobogami/error.h"
#include "evorobogami/io.h"

namespace evorobogami {

namespace {

namespace fs = std::filesystem;
using io::Json;

constexpr std::array<TerrainKind, 3> kTaskEnvironments{
    TerrainKind::kGround, TerrainKind::kSine, TerrainKind::kValley};

struct Cancelled {};

}  // namespace

std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::kTutorial:
      return "tutorial";
    case Phase::kTraining:
      return "training";
    case Phase::kTasks:
      return "tasks";
    case Phase::kDone:
      return "done";
  }
  return "done";
}

std::string_view to_string(RunState s) {
  switch (s) {
    case RunState::kQueued:
      return "queued";
    case RunState::kRunning:
      return "running";
    case RunState::kDone:
      return "done";
    case RunState::kFailed:
      return "failed";
  }
  return "failed";
}

std::optional<TerrainKind> Session::current_environment() const {
  if (phase != Phase::kTasks) return std::nullopt;
  return order[task_index];
}

int Session::remaining(TerrainKind env) const {
  auto it = environments.find(env);
  const int used = it == environments.end() ? 0 : it->second.simulate_count;
  return kSimulationQuota - used;
}

StudyService::StudyService(ServiceOptions options)
    : options_(std::move(options)), rng_(options_.seed) {
  options_.sim.record_frames = true;
  if (options_.data_dir) {
    const fs::path dir = *options_.data_dir / "sessions";
    if (fs::is_directory(dir)) {
      std::vector<fs::path> files;
      for (const auto& e : fs::directory_iterator(dir)) {
        if (e.path().extension() == ".jsonl") files.push_back(e.path());
      }
      // Numeric order (s2 before s10) so the order draws replay as issued.
      std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
        const auto sa = a.stem().string();
        const auto sb = b.stem().string();
        return std::make_pair(sa.size(), sa) < std::make_pair(sb.size(), sb);
      });
      for (const auto& f : files) replay(f);
    }
  }
  for (int i = 0; i < std::max(1, options_.run_workers); ++i) {
    workers_.emplace_back([this] { run_worker(); });
  }
}

StudyService::~StudyService() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
  }
  queue_cv_.notify_all();
  for (auto& t : workers_) t.join();
}

const Terrain& StudyService::terrain(TerrainKind env) const {
  auto it = options_.terrains.find(env);
  if (it == options_.terrains.end()) throw NotFoundError("no terrain configured");
  return it->second;
}

StudyService::SessionSlot& StudyService::slot(const std::string& id) {
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw NotFoundError("unknown session '" + id + "'");
  return it->second;
}

const StudyService::SessionSlot& StudyService::slot(const std::string& id) const {
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw NotFoundError("unknown session '" + id + "'");
  return it->second;
}

std::array<TerrainKind, 3> StudyService::draw_order() {
  auto order = kTaskEnvironments;
  for (int i = 2; i > 0; --i) std::swap(order[i], order[rng_.uniform_int(0, i)]);
  return order;
}

double StudyService::neutral_fitness(TerrainKind env) {
  auto it = neutral_fitness_.find(env);
  if (it != neutral_fitness_.end()) return it->second;
  SimConfig sim = options_.sim;
  sim.record_frames = false;
  const double f = simulate(neutral_genome(), terrain(env), sim).fitness;
  neutral_fitness_[env] = f;
  return f;
}

void StudyService::enter_environment(Session& s) {
  const TerrainKind env = s.order[s.task_index];
  EnvironmentSession& es = s.environments[env];
  es.current = neutral_genome();
  if (!es.records.empty()) return;
  SeedRecord r;
  r.user_id = s.participant_id;
  r.environment = std::string(to_string(env));
  r.iteration = 0;
  r.genome = es.current;
  r.recorded_fitness = neutral_fitness(env);
  es.records.push_back(std::move(r));
}

void StudyService::advance_locked(Session& s) {
  switch (s.phase) {
    case Phase::kTutorial:
      s.phase = Phase::kTraining;
      return;
    case Phase::kTraining:
      s.phase = Phase::kTasks;
      s.task_index = 0;
      enter_environment(s);
      return;
    case Phase::kTasks:
      if (s.task_index + 1 < static_cast<int>(s.order.size())) {
        ++s.task_index;
        enter_environment(s);
      } else {
        s.phase = Phase::kDone;
      }
      return;
    case Phase::kDone:
      throw SequenceError("session is already done");
  }
}

Session StudyService::create_session(const std::string& participant_id) {
  std::lock_guard lock(mutex_);
  SessionSlot sl;
  Session& s = sl.session;
  s.id = "s" + std::to_string(next_session_++);
  s.participant_id = participant_id.empty() ? s.id : participant_id;
  s.order = draw_order();
  for (TerrainKind env : kTaskEnvironments) s.environments[env].current = neutral_genome();
  Json order = Json::array();
  for (TerrainKind env : s.order) order.push_back(std::string(to_string(env)));
  append_log(s.id, Json{{"type", "create"},
                        {"id", s.id},
                        {"participant_id", s.participant_id},
                        {"order", order}}
                       .dump());
  const std::string id = s.id;
  sessions_.emplace(id, std::move(sl));
  return sessions_.at(id).session;
}

Session StudyService::session(const std::string& id) const {
  std::lock_guard lock(mutex_);
  return slot(id).session;
}

std::vector<std::string> StudyService::session_ids() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [id, _] : sessions_) out.push_back(id);
  return out;
}

Session StudyService::advance(const std::string& id) {
  std::lock_guard lock(mutex_);
  SessionSlot& sl = slot(id);
  if (sl.busy) throw BusyError("a simulation is in flight for this session");
  advance_locked(sl.session);
  append_log(id, Json{{"type", "advance"}}.dump());
  if (const auto env = sl.session.current_environment()) write_pool(*env);
  return sl.session;
}

Submission StudyService::submit(const std::string& id, const std::string& env_name,
                                const Genome& genome, const std::string& nonce) {
  Terrain terrain;
  bool counted = false;
  {
    std::lock_guard lock(mutex_);
    SessionSlot& sl = slot(id);
    if (!nonce.empty()) {
      if (auto it = sl.nonces.find(nonce); it != sl.nonces.end()) return it->second;
    }
    if (sl.busy) throw BusyError("a simulation is already running for this session");
    require_valid(genome);
    const Session& s = sl.session;
    if (s.phase == Phase::kTraining) {
      if (env_name != kTrainingEnvironment) {
        throw SequenceError("the training phase only simulates on the training terrain");
      }
      terrain = options_.training;
    } else if (s.phase == Phase::kTasks) {
      const TerrainKind current = *s.current_environment();
      if (env_name != to_string(current)) {
        throw SequenceError("current environment is " + std::string(to_string(current)) +
                            ", not " + env_name);
      }
      if (s.remaining(current) <= 0) {
        throw QuotaError("all " + std::to_string(kSimulationQuota) +
                         " simulations used for " + env_name);
      }
      terrain = this->terrain(current);
      counted = true;
    } else {
      throw SequenceError("cannot simulate during the " +
                          std::string(to_string(s.phase)) + " phase");
    }
    sl.busy = true;
  }

  SimResult result;
  try {
    result = simulate(genome, terrain, options_.sim);
  } catch (...) {
    std::lock_guard lock(mutex_);
    slot(id).busy = false;
    throw;
  }

  std::lock_guard lock(mutex_);
  SessionSlot& sl = slot(id);
  sl.busy = false;
  Submission out;
  out.result = std::move(result);
  out.environment = env_name;
  if (counted) {
    Session& s = sl.session;
    const TerrainKind env = *s.current_environment();
    EnvironmentSession& es = s.environments[env];
    ++es.simulate_count;
    SeedRecord r;
    r.user_id = s.participant_id;
    r.environment = env_name;
    r.iteration = es.simulate_count;
    r.genome = genome;
    r.recorded_fitness = out.result.fitness;
    r.duplicate = !es.records.empty() && es.records.back().genome == genome;
    es.records.push_back(r);
    es.current = genome;
    out.iteration = r.iteration;
    out.duplicate = r.duplicate;
    out.recorded = true;
    out.remaining = s.remaining(env);
    append_log(id, Json{{"type", "submit"},
                        {"env", env_name},
                        {"nonce", nonce},
                        {"genome", io::to_json(genome)},
                        {"result", io::to_json(out.result, false)}}
                       .dump());
    write_pool(env);
  }
  if (!nonce.empty()) sl.nonces[nonce] = out;
  return out;
}

SeedPool StudyService::export_pool_locked(TerrainKind env) const {
  // Numeric session order, matching creation order.
  std::vector<const Session*> ordered;
  for (const auto& [id, sl] : sessions_) ordered.push_back(&sl.session);
  std::sort(ordered.begin(), ordered.end(), [](const Session* a, const Session* b) {
    return std::make_pair(a->id.size(), a->id) < std::make_pair(b->id.size(), b->id);
  });
  SeedPool all;
  for (const Session* s : ordered) {
    auto it = s->environments.find(env);
    if (it == s->environments.end()) continue;
    for (const auto& r : it->second.records) all.records.push_back(r);
  }
  return deduplicate(all);
}

SeedPool StudyService::export_pool(TerrainKind env) const {
  std::lock_guard lock(mutex_);
  return export_pool_locked(env);
}

void StudyService::append_log(const std::string& id, const std::string& line) {
  if (!options_.data_dir) return;
  const fs::path dir = *options_.data_dir / "sessions";
  fs::create_directories(dir);
  std::ofstream out(dir / (id + ".jsonl"), std::ios::app);
  if (!out) throw ConfigError("cannot append to the session log of " + id);
  out << line << '\n';
}

void StudyService::write_pool(TerrainKind env) {
  if (!options_.data_dir) return;
  io::write_design_file(*options_.data_dir / "pool" / (std::string(to_string(env)) + ".json"),
                        export_pool_locked(env));
}

void StudyService::replay(const fs::path& file) {
  std::ifstream in(file);
  std::string line;
  SessionSlot* sl = nullptr;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const Json j = Json::parse(line);
    const std::string type = j.at("type").get<std::string>();
    if (type == "create") {
      SessionSlot fresh;
      Session& s = fresh.session;
      s.id = j.at("id").get<std::string>();
      s.participant_id = j.at("participant_id").get<std::string>();
      const auto order = j.at("order").get<std::vector<std::string>>();
      for (std::size_t i = 0; i < 3 && i < order.size(); ++i) {
        s.order[i] = parse_terrain_kind(order[i]);
      }
      for (TerrainKind env : kTaskEnvironments) s.environments[env].current = neutral_genome();
      draw_order();  // keep the service RNG where it was
      const int number = std::stoi(s.id.substr(1));
      next_session_ = std::max(next_session_, number + 1);
      sl = &sessions_.emplace(s.id, std::move(fresh)).first->second;
    } else if (sl == nullptr) {
      throw ConfigError(file.string() + " does not start with a create record");
    } else if (type == "advance") {
      advance_locked(sl->session);
    } else if (type == "submit") {
      Session& s = sl->session;
      const TerrainKind env = *s.current_environment();
      EnvironmentSession& es = s.environments[env];
      const Json& res = j.at("result");
      Submission sub;
      sub.environment = j.at("env").get<std::string>();
      sub.result.fitness = res.at("fitness").get<double>();
      sub.result.dx = res.at("dx").get<double>();
      sub.result.dy = res.at("dy").get<double>();
      sub.result.fell_off = res.at("fell_off").get<bool>();
      sub.result.steps = res.at("steps").get<int>();
      ++es.simulate_count;
      SeedRecord r;
      r.user_id = s.participant_id;
      r.environment = sub.environment;
      r.iteration = es.simulate_count;
      r.genome = io::genome_from_json(j.at("genome"));
      r.recorded_fitness = sub.result.fitness;
      r.duplicate = !es.records.empty() && es.records.back().genome == r.genome;
      es.current = r.genome;
      es.records.push_back(r);
      sub.iteration = r.iteration;
      sub.duplicate = r.duplicate;
      sub.recorded = true;
      sub.remaining = s.remaining(env);
      const std::string nonce = j.value("nonce", "");
      if (!nonce.empty()) sl->nonces[nonce] = sub;
    }
  }
}

std::string StudyService::start_run(RunRequest request) {
  if (request.iterations < 0) throw ConfigError("iterations must be >= 0");
  if (!request.seeds && request.condition.n_human > 0) {
    request.seeds = export_pool(request.environment);
  }
  // Fail fast on infeasible seed selection.
  seeds_for(request.seeds ? *request.seeds : SeedPool{}, request.environment,
            request.condition);
  std::lock_guard lock(mutex_);
  const std::string id = "r" + std::to_string(next_run_++);
  auto slot = std::make_unique<RunSlot>();
  slot->status.id = id;
  slot->status.request = std::move(request);
  runs_.emplace(id, std::move(slot));
  queue_.push_back(id);
  queue_cv_.notify_one();
  return id;
}

RunStatus StudyService::run_status(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = runs_.find(id);
  if (it == runs_.end()) throw NotFoundError("unknown run '" + id + "'");
  return it->second->status;
}

std::vector<RunEvent> StudyService::run_events(const std::string& id, std::size_t from,
                                               std::chrono::milliseconds wait,
                                               bool* finished) const {
  std::unique_lock lock(mutex_);
  auto it = runs_.find(id);
  if (it == runs_.end()) throw NotFoundError("unknown run '" + id + "'");
  const RunSlot& r = *it->second;
  auto over = [&] {
    return r.status.state == RunState::kDone || r.status.state == RunState::kFailed;
  };
  r.cv.wait_for(lock, wait, [&] { return r.events.size() > from || over(); });
  std::vector<RunEvent> out;
  for (std::size_t i = from; i < r.events.size(); ++i) out.push_back(r.events[i]);
  if (finished) *finished = over();
  return out;
}

RunStatus StudyService::wait_run(const std::string& id) const {
  std::unique_lock lock(mutex_);
  auto it = runs_.find(id);
  if (it == runs_.end()) throw NotFoundError("unknown run '" + id + "'");
  const RunSlot& r = *it->second;
  r.cv.wait(lock, [&] {
    return r.status.state == RunState::kDone || r.status.state == RunState::kFailed;
  });
  return r.status;
}

void StudyService::run_worker() {
  while (true) {
    std::string id;
    {
      std::unique_lock lock(mutex_);
      queue_cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
      if (stopping_) return;
      id = queue_.front();
      queue_.pop_front();
    }
    execute(id);
  }
}

void StudyService::execute(const std::string& id) {
  RunSlot* slot = nullptr;
  RunRequest req;
  {
    std::lock_guard lock(mutex_);
    slot = runs_.at(id).get();
    slot->status.state = RunState::kRunning;
    req = slot->status.request;
  }
  RunSpec spec;
  spec.terrain = terrain(req.environment);
  spec.condition = req.condition;
  spec.seed = req.rng_seed;
  ExperimentPlan plan;
  plan.iterations = req.iterations;
  plan.sim = options_.sim;
  const SeedPool pool = req.seeds ? *req.seeds : SeedPool{};

  auto observer = [&](const IterationStats& stats, std::span<const Cell> changed,
                      const Archive& archive) {
    RunEvent ev;
    ev.stats = stats;
    for (const Cell& c : changed) ev.changed.emplace_back(c, *archive.at(c));
    std::lock_guard lock(mutex_);
    if (stopping_) throw Cancelled{};
    slot->events.push_back(std::move(ev));
    slot->status.records.push_back(stats);
    slot->cv.notify_all();
  };

  try {
    const RunLog log = execute_run(spec, plan, pool, options_.run_threads, observer);
    if (options_.data_dir) {
      spec.dir = *options_.data_dir / "runs" / id;
      write_run(spec, plan, seeds_for(pool, spec.terrain.kind(), spec.condition), log);
    }
    std::lock_guard lock(mutex_);
    slot->status.state = RunState::kDone;
  } catch (const Cancelled&) {
    std::lock_guard lock(mutex_);
    slot->status.state = RunState::kFailed;
    slot->status.error = "service shutting down";
  } catch (const std::exception& e) {
    std::lock_guard lock(mutex_);
    slot->status.state = RunState::kFailed;
    slot->status.error = e.what();
  }
  slot->cv.notify_all();
}

}  // namespace evorobogami
