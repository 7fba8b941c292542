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

#include "evorobogami/http_api.h"

#include <httplib.h>

#include <chrono>
#include <functional>
#include <memory>

#include "evorobogami/error.h"
#include "evorobogami/io.h"
#include "evorobogami/morphology.h"

namespace evorobogami {

namespace {

using io::Json;
using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

constexpr char kJson[] = "application/json";

void reply(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void fail(httplib::Response& res, int status, const std::string& kind,
          const std::string& message, Json extra = Json::object()) {
  extra["error"] = kind;
  extra["message"] = message;
  reply(res, status, extra);
}

// Maps the library's exceptions onto status codes.
Handler guarded(Handler h) {
  return [h = std::move(h)](const httplib::Request& req, httplib::Response& res) {
    try {
      h(req, res);
    } catch (const ValidationError& e) {
      fail(res, 422, "invalid_design", e.what(), {{"violations", e.violations()}});
    } catch (const QuotaError& e) {
      fail(res, 429, "quota", e.what());
    } catch (const SequenceError& e) {
      fail(res, 409, "sequence", e.what());
    } catch (const BusyError& e) {
      res.set_header("Retry-After", "1");
      fail(res, 503, "busy", e.what());
    } catch (const NotFoundError& e) {
      fail(res, 404, "not_found", e.what());
    } catch (const ConfigError& e) {
      fail(res, 400, "bad_request", e.what());
    } catch (const Json::exception& e) {
      fail(res, 400, "bad_request", e.what());
    } catch (const std::exception& e) {
      fail(res, 500, "internal", e.what());
    }
  };
}

Json body_of(const httplib::Request& req) {
  if (req.body.empty()) return Json::object();
  try {
    return Json::parse(req.body);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("request body is not valid JSON: ") + e.what());
  }
}

Json cell_json(const Cell& c) { return {{"row", c.row}, {"col", c.col}}; }

Json environments_json(const StudyService& service) {
  Json envs = Json::array();
  for (const auto& [kind, terrain] : service.options().terrains) {
    envs.push_back({{"name", std::string(to_string(kind))}, {"terrain", io::to_json(terrain)}});
  }
  return {{"environments", envs},
          {"training",
           {{"name", std::string(kTrainingEnvironment)},
            {"terrain", io::to_json(service.options().training)}}},
          {"quota", kSimulationQuota}};
}

Json validate_json(const Json& body) {
  const Json& g = body.contains("genome") ? body.at("genome") : body;
  Genome genome = io::genome_from_json(g);
  const auto violations = validate(genome);
  Json out = {{"valid", violations.empty()}, {"violations", violations}};
  if (violations.empty()) {
    const auto f = features(genome);
    out["features"] = {{"body_length_x", f.body_length_x},
                       {"leg_length_std", f.leg_length_std}};
    out["cell"] = cell_json(bin_of(f));
    out["phenotype"] = io::to_json(build_phenotype(genome));
  }
  return out;
}

}  // namespace

Json session_json(const Session& s) {
  Json order = Json::array();
  for (TerrainKind env : s.order) order.push_back(std::string(to_string(env)));
  Json envs = Json::object();
  for (const auto& [kind, es] : s.environments) {
    envs[std::string(to_string(kind))] = {{"current_design", io::to_json(es.current)},
                                          {"simulate_count", es.simulate_count},
                                          {"remaining", s.remaining(kind)},
                                          {"records", es.records.size()}};
  }
  Json out = {{"id", s.id},
              {"participant_id", s.participant_id},
              {"phase", std::string(to_string(s.phase))},
              {"order", order},
              {"environments", envs},
              {"current_environment", nullptr}};
  if (const auto env = s.current_environment()) {
    out["current_environment"] = std::string(to_string(*env));
  } else if (s.phase == Phase::kTraining) {
    out["current_environment"] = std::string(kTrainingEnvironment);
  }
  return out;
}

Json submission_json(const Submission& s, bool include_frames) {
  Json out = io::to_json(s.result, include_frames);
  out["environment"] = s.environment;
  out["iteration"] = s.iteration;
  out["remaining"] = s.remaining;
  out["duplicate"] = s.duplicate;
  out["recorded"] = s.recorded;
  return out;
}

Json run_status_json(const RunStatus& s) {
  Json records = Json::array();
  for (const auto& r : s.records) records.push_back(io::to_json(r));
  return {{"id", s.id},
          {"environment", std::string(to_string(s.request.environment))},
          {"condition", s.request.condition.name},
          {"iterations", s.request.iterations},
          {"rng_seed", s.request.rng_seed},
          {"state", std::string(to_string(s.state))},
          {"error", s.error},
          {"records", records}};
}

Json run_event_json(const RunEvent& e) {
  Json changed = Json::array();
  for (const auto& [cell, ind] : e.changed) {
    changed.push_back({{"row", cell.row},
                       {"col", cell.col},
                       {"fitness", ind.fitness},
                       {"provenance", to_string(ind.provenance)},
                       {"genome", io::to_json(ind.genome)}});
  }
  return {{"iteration", e.stats.iteration}, {"stats", io::to_json(e.stats)}, {"changed", changed}};
}

void install_routes(httplib::Server& server, StudyService& service) {
  server.Post("/sessions", guarded([&](const httplib::Request& req, httplib::Response& res) {
                const Json body = body_of(req);
                reply(res, 201,
                      session_json(service.create_session(body.value("participant_id", ""))));
              }));
  server.Get("/sessions/([^/]+)",
             guarded([&](const httplib::Request& req, httplib::Response& res) {
               reply(res, 200, session_json(service.session(req.matches[1])));
             }));
  server.Get("/environments", guarded([&](const httplib::Request&, httplib::Response& res) {
               reply(res, 200, environments_json(service));
             }));
  server.Post("/designs/validate",
              guarded([&](const httplib::Request& req, httplib::Response& res) {
                reply(res, 200, validate_json(body_of(req)));
              }));
  server.Post("/sessions/([^/]+)/simulate",
              guarded([&](const httplib::Request& req, httplib::Response& res) {
                const Json body = body_of(req);
                if (!body.contains("env") || !body.contains("genome")) {
                  throw ConfigError("simulate needs env and genome");
                }
                const Submission sub = service.submit(
                    req.matches[1], body.at("env").get<std::string>(),
                    io::genome_from_json(body.at("genome")), body.value("nonce", ""));
                reply(res, 200, submission_json(sub, body.value("frames", true)));
              }));
  server.Post("/sessions/([^/]+)/advance",
              guarded([&](const httplib::Request& req, httplib::Response& res) {
                reply(res, 200, session_json(service.advance(req.matches[1])));
              }));
  server.Get("/pool/([^/]+)", guarded([&](const httplib::Request& req, httplib::Response& res) {
               const SeedPool pool = service.export_pool(parse_terrain_kind(req.matches[1].str()));
               res.status = 200;
               res.set_content(io::design_file_text(pool), kJson);
             }));
  server.Post("/runs", guarded([&](const httplib::Request& req, httplib::Response& res) {
                const Json body = body_of(req);
                RunRequest r;
                r.environment = parse_terrain_kind(body.value("env", "ground"));
                r.condition = parse_condition(body.value("condition", "h0"));
                r.iterations = body.value("iterations", r.iterations);
                r.rng_seed = body.value("rng_seed", r.rng_seed);
                if (body.contains("seeds")) r.seeds = io::parse_design_file(body.at("seeds").dump());
                reply(res, 202, {{"id", service.start_run(std::move(r))}});
              }));
  server.Get("/runs/([^/]+)", guarded([&](const httplib::Request& req, httplib::Response& res) {
               reply(res, 200, run_status_json(service.run_status(req.matches[1])));
             }));
  server.Get("/runs/([^/]+)/stream",
             guarded([&](const httplib::Request& req, httplib::Response& res) {
               const std::string id = req.matches[1];
               service.run_status(id);  // 404 before the stream starts
               auto next = std::make_shared<std::size_t>(0);
               res.set_chunked_content_provider(
                   "text/event-stream", [&service, id, next](std::size_t, httplib::DataSink& sink) {
                     bool finished = false;
                     const auto events =
                         service.run_events(id, *next, std::chrono::milliseconds(500), &finished);
                     for (const auto& e : events) {
                       const std::string chunk =
                           "event: iteration\ndata: " + run_event_json(e).dump() + "\n\n";
                       if (!sink.write(chunk.data(), chunk.size())) return false;
                     }
                     *next += events.size();
                     if (finished && events.empty()) {
                       const RunStatus st = service.run_status(id);
                       const std::string chunk = "event: end\ndata: " +
                                                 Json{{"state", std::string(to_string(st.state))},
                                                      {"error", st.error}}
                                                     .dump() +
                                                 "\n\n";
                       sink.write(chunk.data(), chunk.size());
                       sink.done();
                     }
                     return true;
                   });
             }));
}

bool serve(StudyService& service, const std::string& host, int port) {
  httplib::Server server;
  install_routes(server, service);
  return server.listen(host, port);
}

}  // namespace evorobogami
