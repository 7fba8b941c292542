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

#include "evorobogami/io.h"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "evorobogami/error.h"

namespace evorobogami::io {

namespace {

constexpr std::string_view kLogHeader =
    "iter,coverage,mean_fitness,best_fitness,qd_score,elite_mean";
constexpr std::string_view kArchiveHeader = "row,col,fitness,provenance,genome";

template <typename T>
T field(const Json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) {
    throw ConfigError(std::string("missing field '") + name + "'");
  }
  try {
    return j.at(name).get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("bad field '") + name + "': " + e.what());
  }
}

double parse_double(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("bad number '" + std::string(s) + "'");
  }
  return v;
}

int parse_int(std::string_view s) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError("bad integer '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) out.push_back(line);
    start = end + 1;
  }
  return out;
}

// Splits one CSV line, honouring double-quoted fields with "" escapes.
std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

std::string quote_csv(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

Json pose_json(const Pose& p) {
  return {{"x", p.x}, {"y", p.y}, {"z", p.z}, {"yaw", p.yaw}};
}

Json vec_json(const Eigen::Vector3d& v) { return Json::array({v.x(), v.y(), v.z()}); }

}  // namespace

Json to_json(const Genome& g) {
  Json legs = Json::array();
  for (const auto& leg : g.legs) {
    Json links = Json::array();
    for (const auto& l : leg.links) {
      links.push_back({{"shape_id", l.shape_id}, {"length_scale", l.length_scale}});
    }
    legs.push_back(std::move(links));
  }
  return {{"body_shape_id", g.body_shape_id},
          {"body_scale", g.body_scale},
          {"num_legs", g.num_legs},
          {"layout_mirror", g.layout_mirror},
          {"legs", std::move(legs)}};
}

Genome genome_from_json(const Json& j) {
  Genome g;
  g.body_shape_id = field<int>(j, "body_shape_id");
  const auto scale = field<std::vector<double>>(j, "body_scale");
  if (scale.size() != 3) throw ConfigError("body_scale must have 3 entries");
  for (int i = 0; i < 3; ++i) g.body_scale[i] = scale[i];
  g.num_legs = field<int>(j, "num_legs");
  g.layout_mirror = field<bool>(j, "layout_mirror");
  const Json& legs = j.at("legs");
  if (!legs.is_array()) throw ConfigError("legs must be a list");
  for (const auto& leg_json : legs) {
    if (!leg_json.is_array()) throw ConfigError("each leg must be a list of links");
    LegGenome leg;
    for (const auto& link_json : leg_json) {
      leg.links.push_back({field<int>(link_json, "shape_id"),
                           field<double>(link_json, "length_scale")});
    }
    g.legs.push_back(std::move(leg));
  }
  return g;
}

Json to_json(const SeedRecord& r) {
  Json j = to_json(r.genome);
  j["user_id"] = r.user_id;
  j["environment"] = r.environment;
  j["iteration"] = r.iteration;
  j["recorded_fitness"] = r.recorded_fitness;
  if (r.duplicate) j["duplicate"] = true;
  return j;
}

SeedRecord seed_record_from_json(const Json& j) {
  SeedRecord r;
  r.genome = genome_from_json(j);
  if (j.contains("user_id")) r.user_id = field<std::string>(j, "user_id");
  if (j.contains("environment")) r.environment = field<std::string>(j, "environment");
  if (j.contains("iteration")) r.iteration = field<int>(j, "iteration");
  if (j.contains("recorded_fitness")) {
    r.recorded_fitness = field<double>(j, "recorded_fitness");
  }
  if (j.contains("duplicate")) r.duplicate = field<bool>(j, "duplicate");
  return r;
}

std::string design_file_text(const SeedPool& pool) {
  Json arr = Json::array();
  for (const auto& r : pool.records) arr.push_back(to_json(r));
  return arr.dump(2) + "\n";
}

SeedPool parse_design_file(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("design file is not valid JSON: ") + e.what());
  }
  if (j.is_object() && j.contains("designs")) j = j.at("designs");
  if (j.is_object()) j = Json::array({j});
  if (!j.is_array()) throw ConfigError("design file must hold a list of records");
  SeedPool pool;
  for (const auto& rec : j) pool.records.push_back(seed_record_from_json(rec));
  return pool;
}

SeedPool read_design_file(const std::filesystem::path& path) {
  return parse_design_file(read_text(path));
}

void write_design_file(const std::filesystem::path& path, const SeedPool& pool) {
  write_text(path, design_file_text(pool));
}

Terrain terrain_from_json(const Json& j, Terrain base) {
  if (!j.is_object()) throw ConfigError("terrain config must be an object");
  Terrain t = j.contains("kind")
                  ? Terrain(parse_terrain_kind(field<std::string>(j, "kind")))
                  : Terrain(base.kind());
  t.amplitude = j.value("amplitude", base.amplitude);
  t.wavelength = j.value("wavelength", base.wavelength);
  t.floor_width = j.value("floor_width", base.floor_width);
  t.bounds = base.bounds;
  if (j.contains("bounds")) {
    const Json& b = j.at("bounds");
    t.bounds.x_min = b.value("x_min", t.bounds.x_min);
    t.bounds.x_max = b.value("x_max", t.bounds.x_max);
    t.bounds.y_min = b.value("y_min", t.bounds.y_min);
    t.bounds.y_max = b.value("y_max", t.bounds.y_max);
  }
  if (!(t.wavelength > 0.0) || !(t.floor_width > 0.0) ||
      !(t.bounds.x_min < t.bounds.x_max) || !(t.bounds.y_min < t.bounds.y_max)) {
    throw ConfigError("terrain config has non-positive sizes or empty bounds");
  }
  return t;
}

Json to_json(const Terrain& t) {
  return {{"kind", std::string(to_string(t.kind()))},
          {"amplitude", t.amplitude},
          {"wavelength", t.wavelength},
          {"floor_width", t.floor_width},
          {"bounds",
           {{"x_min", t.bounds.x_min},
            {"x_max", t.bounds.x_max},
            {"y_min", t.bounds.y_min},
            {"y_max", t.bounds.y_max}}}};
}

GaitTable gait_from_json(const Json& j) {
  GaitTable g = GaitTable::defaults();
  try {
    if (j.contains("two_link")) {
      g.two_link = j.at("two_link").get<decltype(g.two_link)>();
    }
    if (j.contains("three_link")) {
      g.three_link = j.at("three_link").get<decltype(g.three_link)>();
    }
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("bad gait table: ") + e.what());
  }
  return g;
}

Json to_json(const GaitTable& g) {
  return {{"two_link", g.two_link}, {"three_link", g.three_link}};
}

Json to_json(const Morphology& m) {
  Json legs = Json::array();
  for (const auto& leg : m.legs) {
    Json links = Json::array();
    Json joints = Json::array();
    double drop = 0.0;
    for (const auto& l : leg.links) {
      joints.push_back(vec_json(leg.attachment - Eigen::Vector3d(0, 0, drop)));
      drop += l.length();
      links.push_back({{"dims", vec_json(l.dims)}, {"mass", l.mass}});
    }
    legs.push_back({{"side", leg.slot.side == Side::kLeft ? "left" : "right"},
                    {"rank", leg.slot.rank},
                    {"group", leg.group},
                    {"attachment", vec_json(leg.attachment)},
                    {"joint_positions", std::move(joints)},
                    {"joint_axis", Json::array({0.0, 1.0, 0.0})},
                    {"links", std::move(links)},
                    {"length", leg.length()}});
  }
  return {{"body_dims", vec_json(m.body_dims)},
          {"body_mass", m.body_mass},
          {"total_mass", m.total_mass()},
          {"legs", std::move(legs)}};
}

Json to_json(const Frame& f) {
  return {{"t", f.t}, {"pose", pose_json(f.pose)}, {"joint_angles", f.joint_angles}};
}

Json to_json(const SimResult& r, bool include_frames) {
  Json j = {{"fitness", r.fitness},
            {"dx", r.dx},
            {"dy", r.dy},
            {"fell_off", r.fell_off},
            {"steps", r.steps}};
  if (include_frames) {
    Json frames = Json::array();
    for (const auto& f : r.frames) frames.push_back(to_json(f));
    j["frames"] = std::move(frames);
  }
  return j;
}

Json to_json(const IterationStats& s) {
  return {{"iteration", s.iteration},     {"coverage", s.coverage},
          {"mean_fitness", s.mean_fitness}, {"best_fitness", s.best_fitness},
          {"qd_score", s.qd_score},       {"elite_mean", s.elite_mean}};
}

Json to_json(const RunConfig& c) {
  return {{"environment", std::string(to_string(c.environment))},
          {"iterations", c.iterations},
          {"batch_size", c.batch_size},
          {"initial_population", c.initial_population},
          {"mutation_rate", c.variation.mutation_rate},
          {"crossover_rate", c.variation.crossover_rate},
          {"rng_seed", c.rng_seed},
          {"n_human", c.n_human},
          {"n_random", c.n_random}};
}

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string log_csv(std::span<const IterationStats> records) {
  std::string out(kLogHeader);
  out += '\n';
  for (const auto& r : records) {
    out += std::to_string(r.iteration);
    for (double v : {r.coverage, r.mean_fitness, r.best_fitness, r.qd_score,
                     r.elite_mean}) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

std::vector<IterationStats> parse_log_csv(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty() || lines[0] != kLogHeader) throw ConfigError("not a run log CSV");
  std::vector<IterationStats> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split_csv(lines[i]);
    if (f.size() != 6) throw ConfigError("run log row " + std::to_string(i) + " malformed");
    IterationStats s;
    s.iteration = parse_int(f[0]);
    s.coverage = parse_double(f[1]);
    s.mean_fitness = parse_double(f[2]);
    s.best_fitness = parse_double(f[3]);
    s.qd_score = parse_double(f[4]);
    s.elite_mean = parse_double(f[5]);
    out.push_back(s);
  }
  return out;
}

std::string archive_csv(const Archive& a) {
  std::string out(kArchiveHeader);
  out += '\n';
  for (const auto& c : a.occupied_cells()) {
    const Individual& ind = *a.at(c);
    out += std::to_string(c.row) + "," + std::to_string(c.col) + "," +
           format_double(ind.fitness) + "," + to_string(ind.provenance) + "," +
           quote_csv(to_json(ind.genome).dump()) + "\n";
  }
  return out;
}

Archive parse_archive_csv(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty() || lines[0] != kArchiveHeader) throw ConfigError("not an archive CSV");
  Archive a;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto f = split_csv(lines[i]);
    if (f.size() != 5) throw ConfigError("archive row " + std::to_string(i) + " malformed");
    Genome g = genome_from_json(Json::parse(f[4]));
    Individual ind = make_individual(std::move(g), parse_double(f[2]),
                                     parse_provenance(f[3]));
    const Cell c{parse_int(f[0]), parse_int(f[1])};
    if (!(bin_of(ind.features) == c)) {
      throw ConfigError("archive row " + std::to_string(i) +
                        " genome does not map to its cell");
    }
    a.insert(ind);
  }
  return a;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw ConfigError("failed writing " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

Json read_json(const std::filesystem::path& path) {
  try {
    return Json::parse(read_text(path));
  } catch (const Json::parse_error& e) {
    throw ConfigError(path.string() + " is not valid JSON: " + e.what());
  }
}

}  // namespace evorobogami::io
