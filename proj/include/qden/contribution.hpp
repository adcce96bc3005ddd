#pragma once

// Last-on-the-Bus (LotB) contribution: full-team score minus the score of the
// team without one character. Remaining characters keep their start
// positions and relative priorities; the reduced session is replayed from
// scratch.

#include <numeric>
#include <stdexcept>
#include <vector>

#include "qden/arena.hpp"

namespace qden {

struct GeneContribution {
  std::size_t gene_index = 0;
  int lotb = 0;
  bool essential = false;  // lotb > 0
};

inline int reduced_team_score(const std::vector<PlayerSpec>& team, std::size_t removed,
                              const GameConditions& cond, const Arena& arena) {
  std::vector<PlayerSpec> reduced;
  reduced.reserve(team.size() - 1);
  for (std::size_t i = 0; i < team.size(); ++i) {
    if (i != removed) reduced.push_back(team[i]);
  }
  return score_team(reduced, cond, arena, arena.opponents);
}

inline int lotb(const Genome& genome, std::size_t gene_index, const GameConditions& cond,
                const Arena& arena) {
  if (gene_index >= genome.size()) throw std::out_of_range("gene index out of range");
  const auto team = express_team(genome, cond, arena);
  const int full = score_team(team, cond, arena, arena.opponents);
  return full - reduced_team_score(team, gene_index, cond, arena);
}

inline std::vector<GeneContribution> gene_contributions(const Genome& genome,
                                                        const GameConditions& cond,
                                                        const Arena& arena) {
  const auto team = express_team(genome, cond, arena);
  const int full = score_team(team, cond, arena, arena.opponents);
  std::vector<GeneContribution> out;
  out.reserve(genome.size());
  for (std::size_t i = 0; i < genome.size(); ++i) {
    const int value = full - reduced_team_score(team, i, cond, arena);
    out.push_back({i, value, value > 0});
  }
  return out;
}

struct ContributionSummary {
  int essential_count = 0;
  double mean_lotb = 0.0;
};

inline ContributionSummary summarize(const std::vector<GeneContribution>& contributions) {
  ContributionSummary s;
  if (contributions.empty()) return s;
  long total = 0;
  for (const auto& c : contributions) {
    total += c.lotb;
    if (c.essential) ++s.essential_count;
  }
  s.mean_lotb = static_cast<double>(total) / static_cast<double>(contributions.size());
  return s;
}

inline int essential_count(const Genome& genome, const GameConditions& cond, const Arena& arena) {
  return summarize(gene_contributions(genome, cond, arena)).essential_count;
}

inline double mean_lotb(const Genome& genome, const GameConditions& cond, const Arena& arena) {
  return summarize(gene_contributions(genome, cond, arena)).mean_lotb;
}

}  // namespace qden
