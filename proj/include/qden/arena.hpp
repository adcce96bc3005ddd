#pragma once

// Game conditions and the arena, and the genome -> team -> score path.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qden/genome.hpp"
#include "qden/grid_engine.hpp"

namespace qden {

/// The per-trial game condition axes.
struct GameConditions {
  AttackKind attack_kind = AttackKind::ranged;
  StartScheme start_scheme = StartScheme::same;
  bool friendly_fire = false;

  friend bool operator==(const GameConditions&, const GameConditions&) = default;
};

struct Arena {
  GridConfig grid;
  OpponentConfig opponents = default_opponents();
  StartLayout starts;
  TokenTable tokens;
  int player_health = 5;

  int max_score() const { return compute_max_score(opponents); }

  Rules rules(bool friendly_fire) const { return {grid, friendly_fire, player_health}; }

  void validate() const {
    grid.validate();
    tokens.validate();
    if (starts.size_n != grid.size_n) throw ConfigError("start layout grid size mismatch");
    for (const auto& p : starts.numbered) {
      if (!grid.contains(p)) throw ConfigError("numbered start position off the grid");
    }
    for (const auto& o : opponents.opponents) {
      if (!grid.contains(o.position)) throw ConfigError("opponent position off the grid");
    }
  }
};

/// The arena used when nothing else is configured.
inline Arena default_arena() { return Arena{}; }

/// Decodes each gene into a player; gene index is priority.
inline std::vector<PlayerSpec> express_team(const Genome& genome, const GameConditions& cond,
                                            const Arena& arena) {
  std::vector<PlayerSpec> team;
  team.reserve(genome.size());
  for (std::size_t i = 0; i < genome.size(); ++i) {
    const Gene& g = genome.genes[i];
    team.push_back({decode_gene(g.sequence, arena.tokens),
                    effective_start(g, cond.start_scheme, i, arena.starts), cond.attack_kind});
  }
  return team;
}

/// Score of a team; an empty team scores 0. With `needed`, a score that
/// cannot reach it may be returned early as some value below `needed`.
inline int score_team(std::span<const PlayerSpec> team, const GameConditions& cond,
                      const Arena& arena, const OpponentConfig& opponents,
                      std::optional<int> needed = std::nullopt) {
  if (team.empty()) return 0;
  return run_session(team, opponents, arena.rules(cond.friendly_fire), nullptr, needed).score;
}

inline int score_genome(const Genome& genome, const GameConditions& cond, const Arena& arena) {
  const auto team = express_team(genome, cond, arena);
  return score_team(team, cond, arena, arena.opponents);
}

/// Exact score if it reaches `needed`, otherwise some value below it.
inline int score_genome_at_least(const Genome& genome, const GameConditions& cond, const Arena& arena,
                                 int needed) {
  const auto team = express_team(genome, cond, arena);
  return score_team(team, cond, arena, arena.opponents, needed);
}

inline int score_genome(const Genome& genome, const GameConditions& cond, const Arena& arena,
                        const OpponentConfig& opponents) {
  const auto team = express_team(genome, cond, arena);
  return score_team(team, cond, arena, opponents);
}

inline SessionOutcome play_genome(const Genome& genome, const GameConditions& cond,
                                  const Arena& arena, std::ostream* trace = nullptr) {
  const auto team = express_team(genome, cond, arena);
  return run_session(team, arena.opponents, arena.rules(cond.friendly_fire), trace);
}

}  // namespace qden
