#pragma once

// Capability measurements on evolved genomes: robustness to point mutation,
// plasticity across opponent layouts, and evolvability.

#include <algorithm>
#include <span>
#include <vector>

#include "qden/arena.hpp"
#include "qden/contribution.hpp"
#include "qden/errors.hpp"
#include "qden/evolution.hpp"
#include "qden/rng.hpp"

namespace qden {

inline constexpr int kRobustnessReps = 64;
inline constexpr int kPlasticityConfigs = 32;
inline constexpr int kEvolvabilityRounds = 32;
inline constexpr int kEvolvabilityHorizon = 64;

/// Draws `count` opponents with uniform positions (never on a numbered player
/// start), uniform fire directions and the given health. Positions may repeat.
inline OpponentConfig random_opponents(int count, const GridConfig& grid,
                                       std::span<const Position> excluded, int health, Rng& rng) {
  if (count < 1) throw ConfigError("opponent count must be positive");
  const int n = grid.size_n;
  std::vector<Position> free;
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const Position p{x, y};
      if (std::find(excluded.begin(), excluded.end(), p) == excluded.end()) free.push_back(p);
    }
  }
  if (count > static_cast<int>(free.size())) {
    throw ConfigError("opponent count exceeds the free squares of the grid");
  }
  OpponentConfig config;
  for (int i = 0; i < count; ++i) {
    Position p;
    do {
      p = {rng.below(n), rng.below(n)};
    } while (std::find(excluded.begin(), excluded.end(), p) != excluded.end());
    config.opponents.push_back({p, static_cast<Direction>(rng.below(4)), health});
  }
  return config;
}

/// A batch of random layouts shaped like `arena` (same opponent count and
/// health), generated once and shared across all genomes in an analysis.
inline std::vector<OpponentConfig> plasticity_configs(const Arena& arena, int count, Rng& rng) {
  const int opponents = std::max<int>(1, static_cast<int>(arena.opponents.opponents.size()));
  const int health = arena.opponents.opponents.empty() ? 3 : arena.opponents.opponents.front().initial_health;
  std::vector<OpponentConfig> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    out.push_back(random_opponents(opponents, arena.grid, arena.starts.numbered, health, rng));
  }
  return out;
}

/// Mean score of `reps` independently point-mutated copies (no gene events).
inline double robustness(const Genome& genome, const TrialConfig& config, int reps, Rng& rng) {
  if (reps < 1) throw ConfigError("robustness needs at least one repetition");
  long total = 0;
  for (int r = 0; r < reps; ++r) {
    Genome mutant;
    mutant.genes.reserve(genome.size());
    for (const auto& g : genome.genes) {
      mutant.genes.push_back({point_mutate(g.sequence, config.point_rate, rng), g.start});
    }
    total += score_genome(mutant, config.game, config.arena);
  }
  return static_cast<double>(total) / reps;
}

/// Mean score across the given opponent layouts.
inline double plasticity(const Genome& genome, std::span<const OpponentConfig> configs,
                         const GameConditions& cond, const Arena& arena) {
  if (configs.empty()) throw ConfigError("plasticity needs at least one opponent layout");
  const auto team = express_team(genome, cond, arena);
  long total = 0;
  for (const auto& c : configs) total += score_team(team, cond, arena, c);
  return static_cast<double>(total) / static_cast<double>(configs.size());
}

/// Mean plasticity after `rounds` independent lineages of `horizon`
/// neutral-phase generations under the trial's own regime. A lineage that
/// gets stuck under CNE keeps the last genome it reached.
inline double evolvability(const Genome& genome, const TrialConfig& config,
                           std::span<const OpponentConfig> configs, int rounds, int horizon,
                           Rng& rng) {
  if (rounds < 1 || horizon < 0) throw ConfigError("evolvability needs rounds >= 1 and horizon >= 0");
  const Individual start{genome, score_genome(genome, config.game, config.arena)};
  double total = 0.0;
  for (int r = 0; r < rounds; ++r) {
    Population pop{start};
    for (int g = 0; g < horizon; ++g) {
      try {
        pop = next_generation(pop, config, Phase::neutral, rng);
      } catch (const StuckTrial&) {
        break;
      }
    }
    total += plasticity(pop.front().genome, configs, config.game, config.arena);
  }
  return total / rounds;
}

}  // namespace qden
