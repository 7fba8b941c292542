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

// Python bindings. Values cross the boundary as plain dicts and lists in the
// same field layout as the JSON design files and wire API.

#include "evorobogami/analysis.h"
#include "evorobogami/error.h"
#include "evorobogami/evolution.h"
#include "evorobogami/http_api.h"
#include "evorobogami/io.h"
#include "evorobogami/morphology.h"
#include "evorobogami/runner.h"
#include "evorobogami/service.h"
#include "evorobogami/simulator.h"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <chrono>
#include <optional>
#include <string>
#include <vector>

namespace py = pybind11;
namespace er = evorobogami;
using er::io::Json;

namespace {

py::object to_py(const Json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

Json from_py(const py::handle& o) {
  return Json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

er::Genome genome_of(const py::handle& o) { return er::io::genome_from_json(from_py(o)); }

er::SeedPool pool_of(const py::handle& o) {
  return er::io::parse_design_file(from_py(o).dump());
}

py::object pool_to_py(const er::SeedPool& pool) {
  return to_py(Json::parse(er::io::design_file_text(pool)));
}

er::Terrain terrain_of(const std::string& env, const py::object& overrides) {
  er::Terrain t(er::parse_terrain_kind(env));
  if (!overrides.is_none()) t = er::io::terrain_from_json(from_py(overrides), t);
  return t;
}

er::SimConfig sim_of(const py::object& gait) {
  er::SimConfig cfg;
  if (!gait.is_none()) cfg.gait = er::io::gait_from_json(from_py(gait));
  return cfg;
}

Json features_json(const er::Genome& g) {
  const auto f = er::features(g);
  const er::Cell c = er::bin_of(f);
  return {{"body_length_x", f.body_length_x},
          {"leg_length_std", f.leg_length_std},
          {"cell", {c.row, c.col}}};
}

Json archive_json(const er::Archive& a) {
  Json cells = Json::array();
  for (const er::Cell& c : a.occupied_cells()) {
    const er::Individual& ind = *a.at(c);
    cells.push_back({{"row", c.row},
                     {"col", c.col},
                     {"fitness", ind.fitness},
                     {"provenance", er::to_string(ind.provenance)},
                     {"genome", er::io::to_json(ind.genome)}});
  }
  return cells;
}

Json stats_json(const er::Archive& a) {
  const auto s = er::archive_stats(a);
  if (!s) return nullptr;
  return {{"coverage", s->coverage},
          {"mean_fitness", s->mean_fitness},
          {"best_fitness", s->best_fitness},
          {"qd_score", s->qd_score},
          {"elite_mean", s->elite_mean}};
}

py::object run_py(const std::string& env, const std::string& condition, int iterations,
                  std::uint64_t rng_seed, const py::object& seeds, int threads) {
  er::RunSpec spec;
  spec.terrain = er::Terrain(er::parse_terrain_kind(env));
  spec.condition = er::parse_condition(condition);
  spec.seed = rng_seed;
  er::ExperimentPlan plan;
  plan.iterations = iterations;
  const er::SeedPool pool = seeds.is_none() ? er::SeedPool{} : pool_of(seeds);
  er::RunLog log;
  {
    py::gil_scoped_release release;
    log = er::execute_run(spec, plan, pool, threads);
  }
  Json records = Json::array();
  for (const auto& r : log.records) records.push_back(er::io::to_json(r));
  return to_py({{"config", er::io::to_json(log.config)},
                {"records", records},
                {"archive", archive_json(log.archive)},
                {"stats", stats_json(log.archive)},
                {"log_csv", er::io::log_csv(log.records)},
                {"archive_csv", er::io::archive_csv(log.archive)}});
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Legged-robot design workbench: genomes, simulation, MAP-Elites, analysis";

  py::register_exception<er::ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<er::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<er::QuotaError>(m, "QuotaError");
  py::register_exception<er::SequenceError>(m, "SequenceError");
  py::register_exception<er::BusyError>(m, "BusyError");
  py::register_exception<er::NotFoundError>(m, "NotFoundError", PyExc_KeyError);

  m.def("neutral_genome", [] { return to_py(er::io::to_json(er::neutral_genome())); });
  m.def("random_genome", [](std::uint64_t seed) {
    er::Rng rng(seed);
    return to_py(er::io::to_json(er::random_genome(rng)));
  }, py::arg("seed"));
  m.def("validate", [](const py::object& g) { return er::validate(genome_of(g)); },
        py::arg("genome"));
  m.def("mutate", [](const py::object& g, double rate, std::uint64_t seed) {
    er::Rng rng(seed);
    return to_py(er::io::to_json(er::mutate(genome_of(g), rate, rng)));
  }, py::arg("genome"), py::arg("rate"), py::arg("seed"));
  m.def("crossover", [](const py::object& a, const py::object& b, std::uint64_t seed) {
    er::Rng rng(seed);
    return to_py(er::io::to_json(er::crossover(genome_of(a), genome_of(b), rng)));
  }, py::arg("a"), py::arg("b"), py::arg("seed"));
  m.def("mirror", [](const py::object& g) {
    return to_py(er::io::to_json(er::mirror(genome_of(g))));
  }, py::arg("genome"));
  m.def("features", [](const py::object& g) {
    const er::Genome genome = genome_of(g);
    er::require_valid(genome);
    return to_py(features_json(genome));
  }, py::arg("genome"));
  m.def("build_phenotype", [](const py::object& g) {
    return to_py(er::io::to_json(er::build_phenotype(genome_of(g))));
  }, py::arg("genome"));
  m.def("fitness", &er::fitness, py::arg("dx"), py::arg("dy"));

  m.def("terrain", [](const std::string& env, const py::object& overrides) {
    return to_py(er::io::to_json(terrain_of(env, overrides)));
  }, py::arg("env") = "ground", py::arg("overrides") = py::none());
  m.def("height_at", [](const std::string& env, double x, double y, const py::object& overrides) {
    return terrain_of(env, overrides).height_at(x, y);
  }, py::arg("env"), py::arg("x"), py::arg("y"), py::arg("overrides") = py::none());

  m.def("simulate", [](const py::object& g, const std::string& env, bool frames,
                       const py::object& terrain, const py::object& gait) {
    const er::Genome genome = genome_of(g);
    const er::Terrain t = terrain_of(env, terrain);
    er::SimConfig cfg = sim_of(gait);
    cfg.record_frames = frames;
    er::SimResult r;
    {
      py::gil_scoped_release release;
      r = er::simulate(genome, t, cfg);
    }
    return to_py(er::io::to_json(r, frames));
  }, py::arg("genome"), py::arg("env") = "ground", py::arg("frames") = false,
     py::arg("terrain") = py::none(), py::arg("gait") = py::none());

  m.def("run", &run_py, py::arg("env") = "ground", py::arg("condition") = "h0",
        py::arg("iterations") = 50, py::arg("rng_seed") = 0, py::arg("seeds") = py::none(),
        py::arg("threads") = 1);

  m.def("select_seeds", [](const py::object& pool, int n, int cap) {
    er::SeedPool out;
    out.records = er::select_seeds(pool_of(pool), n, cap);
    return pool_to_py(out);
  }, py::arg("pool"), py::arg("n"), py::arg("per_user_cap"));
  m.def("deduplicate", [](const py::object& pool) {
    return pool_to_py(er::deduplicate(pool_of(pool)));
  }, py::arg("pool"));
  m.def("generate_synthetic_seeds", [](const std::string& env, const std::string& mode, int n,
                                       std::uint64_t seed, int threads) {
    const er::Terrain t(er::parse_terrain_kind(env));
    const er::SeedMode sm = er::parse_seed_mode(mode);
    er::Rng rng(seed);
    er::SeedPool pool;
    {
      py::gil_scoped_release release;
      pool = er::generate_synthetic_seeds(t, sm, n, rng, {}, threads);
    }
    return pool_to_py(pool);
  }, py::arg("env") = "ground", py::arg("mode") = "scattered", py::arg("n") = 30,
     py::arg("seed") = 0, py::arg("threads") = 1);

  m.def("mann_whitney_u", [](const std::vector<double>& x, const std::vector<double>& y) {
    const auto r = er::mann_whitney_u(x, y);
    py::dict d;
    d["u"] = r.u;
    d["p"] = r.p_two_sided;
    d["exact"] = r.exact;
    return d;
  }, py::arg("x"), py::arg("y"));
  m.def("fitness_milestones", [](const std::vector<double>& series,
                                 const std::vector<double>& percents) {
    std::vector<er::IterationStats> log(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
      log[i].iteration = static_cast<int>(i);
      log[i].mean_fitness = series[i];
    }
    return er::fitness_milestones(log, percents, er::MilestoneMode::kMean);
  }, py::arg("series"), py::arg("percents"));
  m.def("coverage_milestones", [](const std::vector<double>& series,
                                  const std::vector<double>& percents) {
    std::vector<er::IterationStats> log(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
      log[i].iteration = static_cast<int>(i);
      log[i].coverage = series[i];
    }
    return er::coverage_milestones(log, percents);
  }, py::arg("series"), py::arg("percents"));
  m.def("analyze", [](const std::string& runs_dir, const std::string& milestones) {
    const auto runs = er::load_runs(runs_dir);
    const er::MilestoneMode mode =
        milestones == "elite" ? er::MilestoneMode::kElite : er::MilestoneMode::kMean;
    py::list problems;
    for (const auto& r : runs) {
      for (const auto& p : r.problems) problems.append(r.dir.string() + ": " + p);
    }
    py::dict d;
    d["fitness_milestones"] = er::fitness_milestone_csv(runs, mode);
    d["coverage_milestones"] = er::coverage_milestone_csv(runs);
    d["pairwise"] = er::pairwise_csv(runs);
    d["problems"] = problems;
    return d;
  }, py::arg("runs_dir"), py::arg("milestones") = "mean");

  py::class_<er::StudyService>(m, "StudyService")
      .def(py::init([](std::uint64_t seed, const std::optional<std::string>& data_dir) {
             er::ServiceOptions opts;
             opts.seed = seed;
             if (data_dir) opts.data_dir = *data_dir;
             return std::make_unique<er::StudyService>(opts);
           }),
           py::arg("seed") = 0, py::arg("data_dir") = py::none())
      .def("create_session", [](er::StudyService& s, const std::string& participant) {
        return to_py(er::session_json(s.create_session(participant)));
      }, py::arg("participant_id") = "")
      .def("session", [](const er::StudyService& s, const std::string& id) {
        return to_py(er::session_json(s.session(id)));
      }, py::arg("id"))
      .def("advance", [](er::StudyService& s, const std::string& id) {
        return to_py(er::session_json(s.advance(id)));
      }, py::arg("id"))
      .def("submit", [](er::StudyService& s, const std::string& id, const std::string& env,
                        const py::object& g, const std::string& nonce, bool frames) {
        const er::Genome genome = genome_of(g);
        er::Submission sub;
        {
          py::gil_scoped_release release;
          sub = s.submit(id, env, genome, nonce);
        }
        return to_py(er::submission_json(sub, frames));
      }, py::arg("id"), py::arg("env"), py::arg("genome"), py::arg("nonce") = "",
         py::arg("frames") = false)
      .def("export_pool", [](const er::StudyService& s, const std::string& env) {
        return pool_to_py(s.export_pool(er::parse_terrain_kind(env)));
      }, py::arg("env"))
      .def("start_run", [](er::StudyService& s, const std::string& env,
                           const std::string& condition, int iterations, std::uint64_t rng_seed,
                           const py::object& seeds) {
        er::RunRequest r;
        r.environment = er::parse_terrain_kind(env);
        r.condition = er::parse_condition(condition);
        r.iterations = iterations;
        r.rng_seed = rng_seed;
        if (!seeds.is_none()) r.seeds = pool_of(seeds);
        return s.start_run(std::move(r));
      }, py::arg("env") = "ground", py::arg("condition") = "h0", py::arg("iterations") = 50,
         py::arg("rng_seed") = 0, py::arg("seeds") = py::none())
      .def("run_status", [](const er::StudyService& s, const std::string& id) {
        return to_py(er::run_status_json(s.run_status(id)));
      }, py::arg("id"))
      .def("wait_run", [](const er::StudyService& s, const std::string& id) {
        er::RunStatus st;
        {
          py::gil_scoped_release release;
          st = s.wait_run(id);
        }
        return to_py(er::run_status_json(st));
      }, py::arg("id"))
      .def("run_events", [](const er::StudyService& s, const std::string& id, std::size_t start,
                            double wait_seconds) {
        bool finished = false;
        std::vector<er::RunEvent> events;
        {
          py::gil_scoped_release release;
          events = s.run_events(id, start,
                                std::chrono::milliseconds(static_cast<long>(wait_seconds * 1000)),
                                &finished);
        }
        Json list = Json::array();
        for (const auto& e : events) list.push_back(er::run_event_json(e));
        py::dict d;
        d["events"] = to_py(list);
        d["finished"] = finished;
        return d;
      }, py::arg("id"), py::arg("start") = 0, py::arg("wait_seconds") = 0.0);
}
