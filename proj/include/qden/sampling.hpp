#pragma once

// Random sampling of genome space: how many random k-gene genomes reach a
// score threshold. This is the baseline the evolved gene-count distribution
// is compared against.

#include <cmath>
#include <string>
#include <vector>

#include "qden/arena.hpp"
#include "qden/errors.hpp"
#include "qden/evolution.hpp"
#include "qden/rng.hpp"
#include "qden/stats.hpp"

namespace qden {

inline constexpr int kPaperSamplesPerCount = 65536;

struct SampleCondition {
  GameConditions game;
  GeneOrigin origin = GeneOrigin::duplication;
};

struct SampleCell {
  int gene_count = 0;
  long samples = 0;
  long qualifying = 0;
  double threshold = 1.0;

  stats::Proportion rate() const { return stats::wilson_interval(qualifying, samples); }
  friend bool operator==(const SampleCell&, const SampleCell&) = default;
};

/// One random genome with `k` genes. Duplication conditions copy a single
/// random gene k times (start included); otherwise every gene is drawn
/// independently, with a fresh start under the random scheme.
inline Genome sample_genome(const SampleCondition& cond, int k, const Arena& arena, int gene_length,
                            Rng& rng) {
  Genome g;
  g.genes.reserve(static_cast<std::size_t>(k));
  if (cond.origin == GeneOrigin::duplication) {
    const Gene first = random_gene(gene_length, cond.game.start_scheme, 0, arena.starts, rng);
    g.genes.assign(static_cast<std::size_t>(k), first);
  } else {
    for (int i = 0; i < k; ++i) {
      g.genes.push_back(random_gene(gene_length, cond.game.start_scheme, static_cast<std::size_t>(i),
                                    arena.starts, rng));
    }
  }
  return g;
}

/// Scores of `samples` random genomes with `k` genes, from a stream derived
/// from (seed, k) so cells are independent of evaluation order.
inline std::vector<int> sample_scores(const SampleCondition& cond, int k, long samples,
                                      const Arena& arena, int gene_length, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "sample", static_cast<std::uint64_t>(k)));
  std::vector<int> scores;
  scores.reserve(static_cast<std::size_t>(samples));
  for (long s = 0; s < samples; ++s) {
    scores.push_back(score_genome(sample_genome(cond, k, arena, gene_length, rng), cond.game, arena));
  }
  return scores;
}

inline int threshold_score(double threshold, int max_score) {
  return static_cast<int>(std::ceil(threshold * max_score - 1e-9));
}

inline long count_qualifying(const std::vector<int>& scores, double threshold, int max_score) {
  const int floor = threshold_score(threshold, max_score);
  long n = 0;
  for (int s : scores) n += s >= floor;
  return n;
}

/// For each k, the number of random k-gene genomes scoring at least
/// threshold * max score.
inline std::vector<SampleCell> sample_solution_counts(const SampleCondition& cond,
                                                      const std::vector<int>& gene_counts,
                                                      long samples_per_count, double threshold,
                                                      const Arena& arena, std::uint64_t seed,
                                                      int gene_length = kDefaultGeneLength) {
  if (gene_counts.empty()) throw ConfigError("gene_counts must be non-empty");
  if (samples_per_count < 1) throw ConfigError("samples_per_count must be positive");
  if (!(threshold > 0.0 && threshold <= 1.0)) throw ConfigError("threshold must lie in (0,1]");
  std::vector<SampleCell> cells;
  for (int k : gene_counts) {
    if (k < 1) throw ConfigError("gene counts must be positive");
    const auto scores = sample_scores(cond, k, samples_per_count, arena, gene_length, seed);
    cells.push_back({k, samples_per_count, count_qualifying(scores, threshold, arena.max_score()), threshold});
  }
  return cells;
}

/// The sampled histogram as a raw sample of gene counts (one value per
/// qualifying genome).
inline std::vector<double> expand_histogram(const std::vector<SampleCell>& cells) {
  std::vector<double> out;
  for (const auto& c : cells) out.insert(out.end(), static_cast<std::size_t>(c.qualifying), c.gene_count);
  return out;
}

/// Two-sided K-S between sampled qualifying gene counts and evolved gene
/// counts, on the raw (unrescaled) samples.
inline stats::StatResult compare_distributions(const std::vector<SampleCell>& sampled,
                                               const std::vector<int>& evolved) {
  const auto a = expand_histogram(sampled);
  const auto b = stats::to_doubles(evolved);
  if (a.empty() || b.empty()) throw InputError("compare_distributions needs non-empty samples");
  return stats::ks_two_sample(a, b);
}

}  // namespace qden
