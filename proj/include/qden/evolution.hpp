#pragma once

// The generational loop. A trial first bootstraps a single random gene until
// it reaches the target score, then runs a fixed number of neutral-phase
// generations with gene gain and loss under either negative selection (CNE)
// or no selection at all (ZFEL).

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qden/arena.hpp"
#include "qden/contribution.hpp"
#include "qden/errors.hpp"
#include "qden/genome.hpp"
#include "qden/rng.hpp"

namespace qden {

enum class Regime : std::uint8_t { cne, zfel };

inline constexpr std::string_view to_string(Regime r) { return r == Regime::cne ? "cne" : "zfel"; }

struct TrialConfig {
  GameConditions game;
  GeneOrigin origin = GeneOrigin::duplication;
  Regime regime = Regime::cne;
  double point_rate = 0.01;
  double gene_event_rate = 0.01;
  int population_size = 1;
  int neutral_generations = 4096;
  double viability_threshold = 1.0;
  std::optional<int> fixed_gene_count;
  std::uint64_t seed = 0;
  Arena arena;
  int gene_length = kDefaultGeneLength;
  /// LotB and essential counts are recorded every `metric_stride`
  /// generations (plus the last); 0 disables them.
  int metric_stride = 1;
  long attempt_cap = 100'000;
  long bootstrap_generation_cap = 100'000;
  int max_restarts = 16;

  void validate() const {
    arena.validate();
    auto rate_ok = [](double r) { return r >= 0.0 && r <= 1.0; };
    if (!rate_ok(point_rate) || !rate_ok(gene_event_rate)) throw ConfigError("rates must lie in [0,1]");
    if (population_size < 1) throw ConfigError("population size must be positive");
    if (neutral_generations < 0) throw ConfigError("neutral generations must be non-negative");
    if (!(viability_threshold > 0.0 && viability_threshold <= 1.0)) {
      throw ConfigError("viability threshold must lie in (0,1]");
    }
    if (fixed_gene_count && *fixed_gene_count < 1) throw ConfigError("fixed gene count must be positive");
    if (gene_length < 2) throw ConfigError("gene length must be at least 2");
    if (metric_stride < 0) throw ConfigError("metric stride must be non-negative");
    if (attempt_cap < 1) throw ConfigError("attempt cap must be positive");
    if (bootstrap_generation_cap < 0) throw ConfigError("bootstrap generation cap must be non-negative");
    if (max_restarts < 0) throw ConfigError("max restarts must be non-negative");
  }

  /// Lowest score a neutral-phase offspring may have under CNE.
  int viability_floor() const {
    return static_cast<int>(std::ceil(viability_threshold * arena.max_score() - 1e-9));
  }
};

struct Individual {
  Genome genome;
  int score = 0;
};

using Population = std::vector<Individual>;

enum class Phase : std::uint8_t { bootstrap, neutral };

/// CNE keeps an offspring iff its score reaches min(parent score, floor);
/// with threshold 1.0 this is "at least as high as the parent". ZFEL keeps
/// everything in the neutral phase. Bootstrap always uses CNE acceptance.
inline bool offspring_viable(int offspring_score, int parent_score, const TrialConfig& config,
                             Phase phase) {
  if (phase == Phase::neutral && config.regime == Regime::zfel) return true;
  return offspring_score >= std::min(parent_score, config.viability_floor());
}

inline Individual make_offspring(const Individual& parent, const TrialConfig& config, Phase phase,
                                 Rng& rng) {
  Individual child;
  child.genome.genes.reserve(parent.genome.size() + 1);
  for (const auto& g : parent.genome.genes) {
    child.genome.genes.push_back({point_mutate(g.sequence, config.point_rate, rng), g.start});
  }
  if (phase == Phase::neutral && !config.fixed_gene_count) {
    const GeneEventParams events{config.gene_event_rate, config.gene_event_rate, config.origin,
                                 config.game.start_scheme, config.gene_length};
    apply_gene_events(child.genome, events, config.arena.starts, rng);
  }
  // Only ZFEL keeps every offspring; otherwise a rejected child's score is
  // never looked at, so its session may stop once the bound is out of reach.
  if (phase == Phase::neutral && config.regime == Regime::zfel) {
    child.score = score_genome(child.genome, config.game, config.arena);
  } else {
    child.score = score_genome_at_least(child.genome, config.game, config.arena,
                                        std::min(parent.score, config.viability_floor()));
  }
  return child;
}

/// Fills a new population by drawing uniform parents and keeping viable
/// offspring. Throws StuckTrial when attempts exceed the cap.
inline Population next_generation(const Population& population, const TrialConfig& config,
                                  Phase phase, Rng& rng) {
  if (population.empty()) throw ConfigError("population must be non-empty");
  Population next;
  next.reserve(static_cast<std::size_t>(config.population_size));
  long attempts = 0;
  while (static_cast<int>(next.size()) < config.population_size) {
    if (++attempts > config.attempt_cap) {
      throw StuckTrial("no viable offspring within " + std::to_string(config.attempt_cap) +
                       " attempts");
    }
    const Individual& parent = population[rng.pick(population.size())];
    Individual child = make_offspring(parent, config, phase, rng);
    if (offspring_viable(child.score, parent.score, config, phase)) next.push_back(std::move(child));
  }
  return next;
}

struct BootstrapResult {
  Individual solution;
  long generations_used = 0;
};

/// Target score of the bootstrap phase: the viability floor (the maximum
/// score at threshold 1.0).
inline int bootstrap_target(const TrialConfig& config) { return config.viability_floor(); }

/// Evolves `initial` without gene events until some individual reaches the
/// bootstrap target.
inline BootstrapResult bootstrap_from(Population initial, const TrialConfig& config, Rng& rng) {
  const int target = bootstrap_target(config);
  Population pop = std::move(initial);
  for (long gen = 0;; ++gen) {
    for (auto& ind : pop) {
      if (ind.score >= target) return {std::move(ind), gen};
    }
    if (gen >= config.bootstrap_generation_cap) {
      throw StuckTrial("bootstrap did not reach the target score within " +
                       std::to_string(config.bootstrap_generation_cap) + " generations");
    }
    pop = next_generation(pop, config, Phase::bootstrap, rng);
  }
}

/// Bootstraps from random single-gene genomes.
inline BootstrapResult bootstrap(const TrialConfig& config, Rng& rng) {
  Population pop;
  for (int i = 0; i < config.population_size; ++i) {
    Individual ind;
    ind.genome.genes.push_back(
        random_gene(config.gene_length, config.game.start_scheme, 0, config.arena.starts, rng));
    ind.score = score_genome(ind.genome, config.game, config.arena);
    pop.push_back(std::move(ind));
  }
  return bootstrap_from(std::move(pop), config, rng);
}

/// Grows a bootstrapped solution to `target_genes` genes by repeated
/// additions, each kept only if it is viable under the trial's regime.
inline Individual grow_to_gene_count(Individual ind, int target_genes, const TrialConfig& config,
                                     Rng& rng) {
  while (static_cast<int>(ind.genome.size()) < target_genes) {
    long attempts = 0;
    for (;;) {
      if (++attempts > config.attempt_cap) throw StuckTrial("could not add a viable gene");
      Individual grown = ind;
      add_gene(grown.genome, config.origin, config.game.start_scheme, config.arena.starts,
               config.gene_length, rng);
      grown.score = score_genome(grown.genome, config.game, config.arena);
      if (offspring_viable(grown.score, ind.score, config, Phase::neutral)) {
        ind = std::move(grown);
        break;
      }
    }
  }
  return ind;
}

struct TrialRow {
  int generation = 0;
  int score = 0;
  int gene_count = 0;
  std::optional<int> essential_count;
  std::optional<double> mean_lotb;

  friend bool operator==(const TrialRow&, const TrialRow&) = default;
};

struct TrialRecord {
  long bootstrap_generations = 0;
  std::vector<TrialRow> rows;
  /// Genome of individual 0 at generation 0, each power of two, and the end.
  std::vector<std::pair<int, Genome>> checkpoints;
  int restarts = 0;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

inline bool is_checkpoint_generation(int generation, int last) {
  return generation == 0 || generation == last || (generation & (generation - 1)) == 0;
}

inline bool is_metric_generation(int generation, int last, int stride) {
  return stride > 0 && (generation % stride == 0 || generation == last);
}

/// One attempt at a trial from `seed`. Throws StuckTrial.
inline TrialRecord run_trial_once(const TrialConfig& config, std::uint64_t seed) {
  Rng rng(seed);
  TrialRecord record;
  BootstrapResult boot = bootstrap(config, rng);
  record.bootstrap_generations = boot.generations_used;

  Individual start = std::move(boot.solution);
  if (config.fixed_gene_count) start = grow_to_gene_count(std::move(start), *config.fixed_gene_count, config, rng);

  Population pop(static_cast<std::size_t>(config.population_size), start);
  const int last = config.neutral_generations;
  record.rows.reserve(static_cast<std::size_t>(last) + 1);
  for (int gen = 0;; ++gen) {
    const Individual& focal = pop.front();
    TrialRow row;
    row.generation = gen;
    row.score = focal.score;
    row.gene_count = static_cast<int>(focal.genome.size());
    if (is_metric_generation(gen, last, config.metric_stride)) {
      const auto summary = summarize(gene_contributions(focal.genome, config.game, config.arena));
      row.essential_count = summary.essential_count;
      row.mean_lotb = summary.mean_lotb;
    }
    record.rows.push_back(row);
    if (is_checkpoint_generation(gen, last)) record.checkpoints.emplace_back(gen, focal.genome);
    if (gen == last) break;
    pop = next_generation(pop, config, Phase::neutral, rng);
  }
  return record;
}

using RestartLogger = std::function<void(int restart, const std::string& reason)>;

/// Runs a full trial, restarting from a derived seed whenever it gets stuck.
/// Deterministic given config.seed. Throws StuckBudgetExceeded after
/// config.max_restarts restarts.
inline TrialRecord run_trial(const TrialConfig& config, const RestartLogger& log = {}) {
  config.validate();
  std::uint64_t seed = config.seed;
  for (int restarts = 0;; ++restarts) {
    try {
      TrialRecord record = run_trial_once(config, seed);
      record.restarts = restarts;
      return record;
    } catch (const StuckTrial& stuck) {
      if (log) log(restarts + 1, stuck.what());
      if (restarts + 1 > config.max_restarts) {
        throw StuckBudgetExceeded("trial exceeded " + std::to_string(config.max_restarts) +
                                  " restarts: " + stuck.what());
      }
      seed = derive_seed(config.seed, "restart", static_cast<std::uint64_t>(restarts + 1));
    }
  }
}

// Parameter sweeps.

enum class SweepKind : std::uint8_t { gene_event_rate, point_rate };

inline constexpr std::string_view to_string(SweepKind k) {
  return k == SweepKind::gene_event_rate ? "gene_event_rate" : "point_rate";
}

struct SweepCellSpec {
  double rate = 0.0;
  int generations = 0;
};

/// Gene-event rates paired with horizons so rate x horizon stays at 1.
inline std::vector<SweepCellSpec> gene_event_sweep_grid() {
  return {{0.01, 100}, {0.005, 200}, {0.001, 1000}, {0.0005, 2000}, {0.0001, 10000}};
}

/// Point mutation rates, all compared after 1,024 generations.
inline std::vector<SweepCellSpec> point_rate_sweep_grid() {
  return {{0.05, 1024}, {0.01, 1024}, {0.005, 1024}, {0.001, 1024}, {0.0005, 1024}};
}

inline std::vector<SweepCellSpec> sweep_grid(SweepKind kind) {
  return kind == SweepKind::gene_event_rate ? gene_event_sweep_grid() : point_rate_sweep_grid();
}

struct SweepCell {
  SweepCellSpec spec;
  std::vector<int> gene_counts;  // final gene count per trial
  std::vector<int> restarts;
};

/// Trial config for one sweep cell; LotB recording is switched off.
inline TrialConfig sweep_trial_config(SweepKind kind, const TrialConfig& base,
                                      const SweepCellSpec& cell, std::uint64_t master_seed,
                                      std::size_t cell_index, int trial) {
  TrialConfig c = base;
  if (kind == SweepKind::gene_event_rate) {
    c.gene_event_rate = cell.rate;
  } else {
    c.point_rate = cell.rate;
  }
  c.neutral_generations = cell.generations;
  c.metric_stride = 0;
  c.seed = derive_seed(master_seed,
                       std::string("sweep/") + std::string(to_string(kind)) + "/" +
                           std::to_string(cell_index),
                       static_cast<std::uint64_t>(trial));
  return c;
}

/// Runs `trials_per_cell` trials per grid cell and returns the final gene
/// counts per cell, ready for a one-way ANOVA across cells.
inline std::vector<SweepCell> run_parameter_sweep(SweepKind kind, const TrialConfig& base,
                                                  int trials_per_cell, std::uint64_t master_seed) {
  std::vector<SweepCell> cells;
  const auto grid = sweep_grid(kind);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    SweepCell cell{grid[i], {}, {}};
    for (int t = 0; t < trials_per_cell; ++t) {
      const TrialRecord rec = run_trial(sweep_trial_config(kind, base, grid[i], master_seed, i, t));
      cell.gene_counts.push_back(rec.rows.back().gene_count);
      cell.restarts.push_back(rec.restarts);
    }
    cells.push_back(std::move(cell));
  }
  return cells;
}

}  // namespace qden
