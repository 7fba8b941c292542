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

#ifndef EVOROBOGAMI_IO_H_
#define EVOROBOGAMI_IO_H_

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "evorobogami/analysis.h"
#include "evorobogami/controller.h"
#include "evorobogami/evolution.h"
#include "evorobogami/genome.h"
#include "evorobogami/morphology.h"
#include "evorobogami/simulator.h"
#include "evorobogami/terrain.h"

// Structured-text (JSON) and CSV encodings of the project's data types.
namespace evorobogami::io {

using Json = nlohmann::json;

// Design records carry exactly body_shape_id, body_scale, num_legs,
// layout_mirror and legs (a list of legs, each a list of
// {shape_id, length_scale}); seed records add user_id, environment,
// iteration and recorded_fitness. Parse errors throw ConfigError; range
// checks are left to validate().
Json to_json(const Genome& g);
Genome genome_from_json(const Json& j);

Json to_json(const SeedRecord& r);
SeedRecord seed_record_from_json(const Json& j);

// A design file is a JSON array of records. A single record object, or an
// object with a "designs" array, is also accepted on input.
std::string design_file_text(const SeedPool& pool);
SeedPool parse_design_file(std::string_view text);
SeedPool read_design_file(const std::filesystem::path& path);
void write_design_file(const std::filesystem::path& path, const SeedPool& pool);

// {kind, amplitude, wavelength, floor_width, bounds: {x_min, ...}}; every
// field optional and applied over `base`.
Terrain terrain_from_json(const Json& j, Terrain base);
Json to_json(const Terrain& t);

// {"two_link": [[h, k] x3], "three_link": [[h, k, a] x3]}; missing tables
// keep the defaults.
GaitTable gait_from_json(const Json& j);
Json to_json(const GaitTable& g);

Json to_json(const Morphology& m);
Json to_json(const Frame& f);
Json to_json(const SimResult& r, bool include_frames = true);
Json to_json(const IterationStats& s);
Json to_json(const RunConfig& c);

// Shortest round-trip decimal form of a double.
std::string format_double(double v);

// iter,coverage,mean_fitness,best_fitness,qd_score,elite_mean
std::string log_csv(std::span<const IterationStats> records);
std::vector<IterationStats> parse_log_csv(std::string_view text);

// row,col,fitness,provenance,genome (genome as quoted compact JSON)
std::string archive_csv(const Archive& a);
Archive parse_archive_csv(std::string_view text);

std::string read_text(const std::filesystem::path& path);
// Writes atomically enough for our purposes: a temp file then rename.
void write_text(const std::filesystem::path& path, std::string_view text);

Json read_json(const std::filesystem::path& path);

}  // namespace evorobogami::io

#endif  // EVOROBOGAMI_IO_H_
