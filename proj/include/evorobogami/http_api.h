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

#ifndef EVOROBOGAMI_HTTP_API_H_
#define EVOROBOGAMI_HTTP_API_H_

#include <string>

#include <nlohmann/json.hpp>

#include "evorobogami/service.h"

namespace httplib {
class Server;
}

namespace evorobogami {

// Wire encodings shared by the HTTP routes and the Python bindings.
nlohmann::json session_json(const Session& s);
nlohmann::json submission_json(const Submission& s, bool include_frames = true);
nlohmann::json run_status_json(const RunStatus& s);
nlohmann::json run_event_json(const RunEvent& e);

// Routes:
//   POST /sessions                 {participant_id?} -> session
//   GET  /sessions/{id}            -> session
//   GET  /environments             -> task and training terrains
//   POST /designs/validate         genome -> {valid, violations, ...}
//   POST /sessions/{id}/simulate   {env, genome, nonce?, frames?} -> result
//   POST /sessions/{id}/advance    -> session
//   GET  /pool/{env}               -> design file
//   POST /runs                     {env, condition, iterations?, rng_seed?, seeds?}
//   GET  /runs/{id}                -> status with the stats log
//   GET  /runs/{id}/stream         -> text/event-stream of iteration events
// Errors come back as {"error": kind, "message": ...} with 400 (bad
// request), 404 (unknown id), 409 (sequence), 422 (invalid design), 429
// (quota) or 503 (busy).
void install_routes(httplib::Server& server, StudyService& service);

// Serves until the process is stopped. Returns false if binding failed.
bool serve(StudyService& service, const std::string& host, int port);

}  // namespace evorobogami

#endif  // EVOROBOGAMI_HTTP_API_H_
