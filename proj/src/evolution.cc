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

#include "evorobogami/evolution.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <utility>

#include "evorobogami/analysis.h"
#include "evorobogami/error.h"

namespace evorobogami {

namespace {

int bin(double v, double lo, double hi) {
  const int b = static_cast<int>(std::floor((v - lo) * kMapSize / (hi - lo)));
  return std::clamp(b, 0, kMapSize - 1);
}

IterationStats make_stats(int iteration, const Archive& a) {
  IterationStats s;
  s.iteration = iteration;
  if (const auto st = archive_stats(a)) {
    s.coverage = st->coverage;
    s.mean_fitness = st->mean_fitness;
    s.best_fitness = st->best_fitness;
    s.qd_score = st->qd_score;
    s.elite_mean = st->elite_mean;
  }
  return s;
}

Cell parse_cell(const std::string& text) {
  const auto dot = text.find('.');
  if (dot == std::string::npos) throw ConfigError("bad cell '" + text + "'");
  return {std::stoi(text.substr(0, dot)), std::stoi(text.substr(dot + 1))};
}

}  // namespace

std::string to_string(const Provenance& p) {
  switch (p.kind) {
    case Provenance::Kind::kRandom:
      return "random";
    case Provenance::Kind::kHuman:
      return "human:" + p.user_id;
    case Provenance::Kind::kEvolved: {
      std::string out = "evolved:" + std::to_string(p.iteration) + ":";
      for (std::size_t i = 0; i < p.parents.size(); ++i) {
        if (i > 0) out += "+";
        out += std::to_string(p.parents[i].row) + "." +
               std::to_string(p.parents[i].col);
      }
      return out;
    }
  }
  return "random";
}

Provenance parse_provenance(const std::string& text) {
  Provenance p;
  if (text == "random") return p;
  if (text.rfind("human:", 0) == 0) {
    p.kind = Provenance::Kind::kHuman;
    p.user_id = text.substr(6);
    return p;
  }
  if (text.rfind("evolved:", 0) == 0) {
    p.kind = Provenance::Kind::kEvolved;
    const std::string rest = text.substr(8);
    const auto colon = rest.find(':');
    if (colon == std::string::npos) throw ConfigError("bad provenance '" + text + "'");
    p.iteration = std::stoi(rest.substr(0, colon));
    std::stringstream parents(rest.substr(colon + 1));
    std::string item;
    while (std::getline(parents, item, '+')) {
      if (!item.empty()) p.parents.push_back(parse_cell(item));
    }
    return p;
  }
  throw ConfigError("bad provenance '" + text + "'");
}

Cell bin_of(const FeatureDescriptor& f) {
  return {bin(f.body_length_x, kMinBodyLengthX, kMaxBodyLengthX),
          bin(f.leg_length_std, kMinLegLengthStd, kMaxLegLengthStd)};
}

InsertOutcome Archive::insert(const Individual& ind) {
  auto& slot = cells_[bin_of(ind.features).index()];
  if (!slot) {
    slot = ind;
    ++occupied_;
    return InsertOutcome::kPlacedNew;
  }
  if (ind.fitness > slot->fitness) {
    slot = ind;
    return InsertOutcome::kReplaced;
  }
  return InsertOutcome::kRejected;
}

std::vector<Cell> Archive::occupied_cells() const {
  std::vector<Cell> out;
  out.reserve(occupied_);
  for (int i = 0; i < kNumCells; ++i) {
    if (cells_[i]) out.push_back({i / kMapSize, i % kMapSize});
  }
  return out;
}

std::vector<Individual> select_parents(const Archive& a, int n, Rng& rng) {
  if (a.empty()) throw std::logic_error("cannot select parents from an empty archive");
  const auto cells = a.occupied_cells();
  const int last = static_cast<int>(cells.size()) - 1;
  std::vector<Individual> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back(*a.at(cells[rng.uniform_int(0, last)]));
  return out;
}

std::vector<Child> make_batch(std::span<const Individual> parents,
                              const VariationConfig& cfg, int iteration,
                              Rng& rng) {
  const std::size_t n = parents.size();
  std::vector<Child> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Individual& a = parents[i];
    const Individual& b = parents[(i + 1) % n];
    Child child;
    child.provenance.kind = Provenance::Kind::kEvolved;
    child.provenance.iteration = iteration;
    child.provenance.parents.push_back(bin_of(a.features));
    child.crossed = rng.bernoulli(cfg.crossover_rate);
    if (child.crossed) {
      child.genome = crossover(a.genome, b.genome, rng);
      child.provenance.parents.push_back(bin_of(b.features));
    } else {
      child.genome = a.genome;
    }
    child.genome = mutate(child.genome, cfg.mutation_rate, rng);
    out.push_back(std::move(child));
  }
  return out;
}

Evaluator simulation_evaluator(const Terrain& terrain, const SimConfig& cfg,
                               int threads) {
  return [terrain, cfg, threads](std::span<const Genome> genomes) {
    std::vector<double> out(genomes.size());
    auto work = [&](std::size_t begin, std::size_t stride) {
      for (std::size_t i = begin; i < genomes.size(); i += stride) {
        out[i] = simulate(genomes[i], terrain, cfg).fitness;
      }
    };
    const auto workers = static_cast<std::size_t>(
        std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(genomes.size(), 1)));
    if (workers <= 1) {
      work(0, 1);
      return out;
    }
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          work(w, workers);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return out;
  };
}

Individual make_individual(Genome genome, double fitness, Provenance provenance) {
  if (!std::isfinite(fitness)) throw SimulationFault("non-finite fitness");
  Individual ind;
  ind.features = features(genome);
  ind.genome = std::move(genome);
  ind.fitness = fitness;
  ind.provenance = std::move(provenance);
  return ind;
}

std::vector<Individual> init_population(std::span<const Individual> seeds,
                                        int n_random, int population,
                                        const Evaluator& evaluate, Rng& rng) {
  if (n_random < 0 || static_cast<int>(seeds.size()) + n_random != population) {
    throw ConfigError("initial population needs " + std::to_string(population) +
                      " designs, got " + std::to_string(seeds.size()) +
                      " seeds + " + std::to_string(n_random) + " random");
  }
  std::vector<Genome> genomes;
  std::vector<Provenance> origins;
  for (const auto& s : seeds) {
    require_valid(s.genome);
    genomes.push_back(s.genome);
    origins.push_back(s.provenance);
  }
  for (int i = 0; i < n_random; ++i) {
    genomes.push_back(random_genome(rng));
    origins.emplace_back();
  }
  const auto fitness = evaluate(genomes);
  std::vector<Individual> out;
  out.reserve(genomes.size());
  for (std::size_t i = 0; i < genomes.size(); ++i) {
    out.push_back(make_individual(genomes[i], fitness[i], origins[i]));
  }
  return out;
}

RunLog run(const RunConfig& cfg, std::span<const Individual> seeds,
           const Evaluator& evaluate, const RunObserver& observer) {
  if (static_cast<int>(seeds.size()) != cfg.n_human) {
    throw ConfigError("condition expects " + std::to_string(cfg.n_human) +
                      " seeds, got " + std::to_string(seeds.size()));
  }
  if (cfg.iterations < 0 || cfg.batch_size < 1) {
    throw ConfigError("iterations must be >= 0 and batch size >= 1");
  }
  Rng rng(cfg.rng_seed);
  RunLog log;
  log.config = cfg;
  log.records.reserve(cfg.iterations + 1);

  std::vector<Cell> changed;
  auto insert_all = [&](const std::vector<Individual>& inds) {
    changed.clear();
    for (const auto& ind : inds) {
      if (log.archive.insert(ind) != InsertOutcome::kRejected) {
        const Cell c = bin_of(ind.features);
        if (std::find(changed.begin(), changed.end(), c) == changed.end()) {
          changed.push_back(c);
        }
      }
    }
    std::sort(changed.begin(), changed.end(), [](const Cell& a, const Cell& b) {
      return a.index() < b.index();
    });
  };
  auto record = [&](int iteration) {
    log.records.push_back(make_stats(iteration, log.archive));
    if (observer) observer(log.records.back(), changed, log.archive);
  };

  insert_all(init_population(seeds, cfg.n_random, cfg.initial_population,
                             evaluate, rng));
  record(0);

  for (int it = 1; it <= cfg.iterations; ++it) {
    const auto parents = select_parents(log.archive, cfg.batch_size, rng);
    auto children = make_batch(parents, cfg.variation, it, rng);
    std::vector<Genome> genomes;
    genomes.reserve(children.size());
    for (const auto& c : children) genomes.push_back(c.genome);
    const auto fitness = evaluate(genomes);
    std::vector<Individual> batch;
    batch.reserve(children.size());
    for (std::size_t i = 0; i < children.size(); ++i) {
      batch.push_back(make_individual(std::move(children[i].genome), fitness[i],
                                      std::move(children[i].provenance)));
    }
    insert_all(batch);
    record(it);
  }
  return log;
}

}  // namespace evorobogami
