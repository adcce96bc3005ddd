#pragma once

// Genes, the two-letter action grammar, and the mutation operators.

#include <array>
#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qden/errors.hpp"
#include "qden/grid_engine.hpp"
#include "qden/rng.hpp"

namespace qden {

inline constexpr std::array<char, 4> kAlphabet = {'A', 'C', 'G', 'T'};
inline constexpr int kDefaultGeneLength = 512;

/// A -> 0, C -> 1, G -> 2, T -> 3; anything else is an input error.
inline int letter_index(char c) {
  switch (c) {
    case 'A': return 0;
    case 'C': return 1;
    case 'G': return 2;
    case 'T': return 3;
    default: throw InputError(std::string("invalid nucleotide '") + c + "'");
  }
}

/// Maps each letter to a direction (bijectively) and to a verb (two letters
/// per verb). A gene is read as (direction letter, verb letter) pairs.
struct TokenTable {
  std::array<Direction, 4> direction_of{Direction::up, Direction::right, Direction::down,
                                        Direction::left};
  std::array<Verb, 4> verb_of{Verb::move, Verb::move, Verb::attack, Verb::attack};

  /// A->up, C->right, G->down, T->left; A,C move; G,T attack.
  static TokenTable standard() { return {}; }

  void validate() const {
    std::array<int, 4> dir_seen{};
    int moves = 0;
    for (int i = 0; i < 4; ++i) {
      ++dir_seen[static_cast<int>(direction_of[i])];
      if (verb_of[i] == Verb::move) ++moves;
    }
    for (int n : dir_seen) {
      if (n != 1) throw ConfigError("token table direction map must be a bijection");
    }
    if (moves != 2) throw ConfigError("token table must map exactly two letters to each verb");
  }
};

/// Decodes floor(len/2) actions; a trailing unpaired letter is ignored.
inline std::vector<Action> decode_gene(std::string_view sequence, const TokenTable& table) {
  std::vector<Action> actions;
  actions.reserve(sequence.size() / 2);
  for (std::size_t i = 0; i + 1 < sequence.size(); i += 2) {
    actions.push_back({table.direction_of[letter_index(sequence[i])],
                       table.verb_of[letter_index(sequence[i + 1])]});
  }
  if (sequence.size() % 2 == 1) letter_index(sequence.back());
  return actions;
}

/// Replaces each site independently with probability `rate` by one of the
/// three other letters, chosen uniformly. Mutated sites are found by drawing
/// geometric gaps, which is the same distribution as one coin per site.
inline std::string point_mutate(std::string_view sequence, double rate, Rng& rng) {
  std::string out(sequence);
  if (rate <= 0.0) return out;
  const double log_keep = rate < 1.0 ? std::log1p(-rate) : 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (rate < 1.0) {
      const double gap = std::floor(std::log1p(-rng.uniform01()) / log_keep);
      if (gap >= static_cast<double>(out.size() - i)) break;
      i += static_cast<std::size_t>(gap);
    }
    const int shift = 1 + rng.below(3);
    out[i] = kAlphabet[(letter_index(out[i]) + shift) % 4];
  }
  return out;
}

inline std::string random_sequence(int length, Rng& rng) {
  std::string s(static_cast<std::size_t>(length), 'A');
  for (char& c : s) c = kAlphabet[rng.below(4)];
  return s;
}

enum class StartScheme : std::uint8_t { same, corners, random };
enum class GeneOrigin : std::uint8_t { duplication, de_novo };

inline constexpr std::string_view to_string(StartScheme s) {
  switch (s) {
    case StartScheme::same: return "same";
    case StartScheme::corners: return "corners";
    case StartScheme::random: return "random";
  }
  return "?";
}

inline constexpr std::string_view to_string(GeneOrigin o) {
  return o == GeneOrigin::duplication ? "duplication" : "de_novo";
}

struct Gene {
  std::string sequence;
  /// Fixed at creation under the random scheme. Empty means the position is
  /// resolved from the gene's index by the same/corners scheme.
  std::optional<Position> start;

  friend bool operator==(const Gene&, const Gene&) = default;
};

/// Ordered genes; index is character priority (0 resolves first).
struct Genome {
  std::vector<Gene> genes;

  std::size_t size() const { return genes.size(); }
  friend bool operator==(const Genome&, const Genome&) = default;
};

/// Where players start. `numbered` holds positions 1, 2, ... in order.
struct StartLayout {
  int size_n = 8;
  std::vector<Position> numbered = default_start_positions(8);
};

/// same: position 1 for every gene. corners: numbered positions cycled by
/// gene index. random: a uniform on-grid draw.
inline Position resolve_start(StartScheme scheme, std::size_t gene_index, const StartLayout& layout,
                              Rng& rng) {
  if (layout.numbered.empty()) throw ConfigError("start layout has no numbered positions");
  switch (scheme) {
    case StartScheme::same: return layout.numbered.front();
    case StartScheme::corners: return layout.numbered[gene_index % layout.numbered.size()];
    case StartScheme::random: return {rng.below(layout.size_n), rng.below(layout.size_n)};
  }
  return layout.numbered.front();
}

/// Start position attached to a gene created at `gene_index`: a concrete
/// draw under the random scheme, otherwise left to index resolution.
inline std::optional<Position> start_for_new_gene(StartScheme scheme, std::size_t gene_index,
                                                  const StartLayout& layout, Rng& rng) {
  if (scheme != StartScheme::random) return std::nullopt;
  return resolve_start(scheme, gene_index, layout, rng);
}

/// Effective start of gene `index` within its genome.
inline Position effective_start(const Gene& gene, StartScheme scheme, std::size_t index,
                                const StartLayout& layout) {
  if (gene.start) return *gene.start;
  if (scheme == StartScheme::random) throw ConfigError("random-scheme gene has no start position");
  Rng unused(0);
  return resolve_start(scheme, index, layout, unused);
}

inline Gene random_gene(int length, StartScheme scheme, std::size_t gene_index,
                        const StartLayout& layout, Rng& rng) {
  Gene g;
  g.sequence = random_sequence(length, rng);
  g.start = start_for_new_gene(scheme, gene_index, layout, rng);
  return g;
}

struct GeneEventParams {
  double p_add = 0.0;
  double p_remove = 0.0;
  GeneOrigin origin = GeneOrigin::duplication;
  StartScheme scheme = StartScheme::same;
  int de_novo_length = kDefaultGeneLength;
};

/// Appends one gene: a copy of a uniformly chosen gene (inheriting its start)
/// or a fresh random sequence.
inline void add_gene(Genome& genome, GeneOrigin origin, StartScheme scheme,
                     const StartLayout& layout, int de_novo_length, Rng& rng) {
  if (origin == GeneOrigin::duplication) {
    const std::size_t src = rng.pick(genome.size());
    genome.genes.push_back(genome.genes[src]);
  } else {
    genome.genes.push_back(random_gene(de_novo_length, scheme, genome.size(), layout, rng));
  }
}

/// Independent removal then addition. Removal is a no-op on a one-gene genome.
inline void apply_gene_events(Genome& genome, const GeneEventParams& params,
                              const StartLayout& layout, Rng& rng) {
  if (rng.bernoulli(params.p_remove) && genome.size() > 1) {
    genome.genes.erase(genome.genes.begin() +
                       static_cast<std::ptrdiff_t>(rng.pick(genome.size())));
  }
  if (rng.bernoulli(params.p_add)) {
    add_gene(genome, params.origin, params.scheme, layout, params.de_novo_length, rng);
  }
}

// Text format: one gene per line, `start_x,start_y,SEQUENCE`. Genes whose
// start is resolved by index are written with -1,-1.

inline void write_genome(std::ostream& out, const Genome& genome) {
  for (const auto& g : genome.genes) {
    if (g.start) {
      out << g.start->x << ',' << g.start->y << ',';
    } else {
      out << "-1,-1,";
    }
    out << g.sequence << '\n';
  }
}

inline Gene parse_gene_line(std::string_view line) {
  const auto c1 = line.find(',');
  const auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
  if (c2 == std::string_view::npos) throw InputError("malformed gene line: " + std::string(line));
  Gene g;
  try {
    const int x = std::stoi(std::string(line.substr(0, c1)));
    const int y = std::stoi(std::string(line.substr(c1 + 1, c2 - c1 - 1)));
    if (x >= 0 && y >= 0) {
      g.start = Position{x, y};
    } else if (x != -1 || y != -1) {
      throw InputError("negative start position");
    }
  } catch (const std::logic_error&) {
    throw InputError("malformed gene start: " + std::string(line));
  }
  g.sequence = std::string(line.substr(c2 + 1));
  for (char c : g.sequence) letter_index(c);
  return g;
}

/// Reads genes until end of stream or a blank line.
inline Genome read_genome(std::istream& in) {
  Genome genome;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) break;
    genome.genes.push_back(parse_gene_line(line));
  }
  if (genome.genes.empty()) throw InputError("genome has no genes");
  return genome;
}

inline std::string genome_to_string(const Genome& genome) {
  std::ostringstream os;
  write_genome(os, genome);
  return os.str();
}

}  // namespace qden
