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

#ifndef EVOROBOGAMI_SERVICE_H_
#define EVOROBOGAMI_SERVICE_H_

#include <array>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "evorobogami/analysis.h"
#include "evorobogami/evolution.h"
#include "evorobogami/rng.h"
#include "evorobogami/runner.h"
#include "evorobogami/simulator.h"
#include "evorobogami/terrain.h"

namespace evorobogami {

class QuotaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class SequenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class BusyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class NotFoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Phase { kTutorial, kTraining, kTasks, kDone };
std::string_view to_string(Phase p);

inline constexpr int kSimulationQuota = 10;
inline constexpr std::string_view kTrainingEnvironment = "training";

struct EnvironmentSession {
  Genome current;  // last submitted design, neutral at the start
  int simulate_count = 0;
  std::vector<SeedRecord> records;  // iteration 0 is the neutral design
};

struct Session {
  std::string id;
  std::string participant_id;
  std::array<TerrainKind, 3> order{};
  Phase phase = Phase::kTutorial;
  int task_index = 0;  // into `order`, meaningful in the tasks phase
  std::map<TerrainKind, EnvironmentSession> environments;

  std::optional<TerrainKind> current_environment() const;
  int remaining(TerrainKind env) const;
};

struct Submission {
  SimResult result;
  std::string environment;
  int iteration = 0;  // 0 for uncounted training submissions
  int remaining = 0;
  bool duplicate = false;
  bool recorded = false;
};

struct ServiceOptions {
  std::uint64_t seed = 0;
  // Session logs and pool files go here when set; existing session logs are
  // replayed on construction.
  std::optional<std::filesystem::path> data_dir;
  SimConfig sim;
  std::map<TerrainKind, Terrain> terrains{{TerrainKind::kGround, Terrain::ground()},
                                          {TerrainKind::kSine, Terrain::sine()},
                                          {TerrainKind::kValley, Terrain::valley()}};
  // A gentler sine, distinct from the three task environments.
  Terrain training = [] {
    Terrain t = Terrain::sine();
    t.amplitude = 1.0;
    t.wavelength = 50.0;
    return t;
  }();
  int run_workers = 1;
  int run_threads = 1;  // evaluation workers inside one run
};

struct RunRequest {
  TerrainKind environment = TerrainKind::kGround;
  Condition condition;
  int iterations = 50;
  std::uint64_t rng_seed = 0;
  // Seeds for conditions with human designs; defaults to the service pool.
  std::optional<SeedPool> seeds;
};

// One event per logged iteration: its stats and the cells it changed.
struct RunEvent {
  IterationStats stats;
  std::vector<std::pair<Cell, Individual>> changed;
};

enum class RunState { kQueued, kRunning, kDone, kFailed };
std::string_view to_string(RunState s);

struct RunStatus {
  std::string id;
  RunRequest request;
  RunState state = RunState::kQueued;
  std::string error;
  std::vector<IterationStats> records;
};

class StudyService {
 public:
  explicit StudyService(ServiceOptions options = {});
  ~StudyService();
  StudyService(const StudyService&) = delete;
  StudyService& operator=(const StudyService&) = delete;

  const ServiceOptions& options() const { return options_; }
  const Terrain& terrain(TerrainKind env) const;

  // Environment order is a permutation of ground/sine/valley drawn from the
  // service RNG; every environment starts at the neutral design.
  Session create_session(const std::string& participant_id = "");
  Session session(const std::string& id) const;
  std::vector<std::string> session_ids() const;

  // tutorial -> training -> each task environment in order -> done. Entering
  // a task environment records the neutral design as its iteration 0.
  Session advance(const std::string& id);

  // `env` is "training" or a task environment name. Task submissions must
  // target the current environment (SequenceError) and are limited to
  // kSimulationQuota (QuotaError). A repeated non-empty nonce returns the
  // first answer without simulating again. A second submission while one is
  // in flight throws BusyError.
  Submission submit(const std::string& id, const std::string& env,
                    const Genome& genome, const std::string& nonce = "");

  // Every recorded design for env over all sessions, deduplicated.
  SeedPool export_pool(TerrainKind env) const;

  std::string start_run(RunRequest request);
  RunStatus run_status(const std::string& id) const;
  // Events from index `from`; blocks up to `wait` for new ones while the
  // run is live. `finished` is set once no further events will arrive.
  std::vector<RunEvent> run_events(const std::string& id, std::size_t from,
                                   std::chrono::milliseconds wait,
                                   bool* finished) const;
  // Blocks until the run finishes.
  RunStatus wait_run(const std::string& id) const;

 private:
  struct SessionSlot {
    Session session;
    bool busy = false;
    std::map<std::string, Submission> nonces;
  };
  struct RunSlot {
    RunStatus status;
    std::vector<RunEvent> events;
    mutable std::condition_variable cv;
  };

  SessionSlot& slot(const std::string& id);
  const SessionSlot& slot(const std::string& id) const;
  std::array<TerrainKind, 3> draw_order();
  void advance_locked(Session& s);
  void enter_environment(Session& s);
  SeedPool export_pool_locked(TerrainKind env) const;
  double neutral_fitness(TerrainKind env);
  void append_log(const std::string& id, const std::string& line);
  void write_pool(TerrainKind env);
  void replay(const std::filesystem::path& file);
  void run_worker();
  void execute(const std::string& id);

  ServiceOptions options_;
  mutable std::mutex mutex_;
  Rng rng_;
  int next_session_ = 1;
  std::map<std::string, SessionSlot> sessions_;
  std::map<TerrainKind, double> neutral_fitness_;

  int next_run_ = 1;
  std::map<std::string, std::unique_ptr<RunSlot>> runs_;
  std::deque<std::string> queue_;
  std::condition_variable queue_cv_;
  bool stopping_ = false;
  std::vector<std::thread> workers_;
};

}  // namespace evorobogami

#endif  // EVOROBOGAMI_SERVICE_H_
