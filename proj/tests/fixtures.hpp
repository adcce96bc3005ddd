#pragma once

// Hand-built genes for the default arena (start (0,0), opponents on the
// (2,2)/(5,2)/(5,5)/(2,5) ring). Codons: direction letter, then verb letter;
// A up, C right, G down, T left; A/C move, G/T attack.

#include <string>
#include <utility>
#include <vector>

#include "qden/qden.hpp"

namespace fixtures {

inline std::string codons(std::initializer_list<std::pair<const char*, int>> parts) {
  std::string s;
  for (const auto& [codon, n] : parts) {
    for (int i = 0; i < n; ++i) s += codon;
  }
  return s;
}

/// Ranged from (0,0): clears all four opponents by tick 20 without taking
/// a hit. Scores 12 on the default arena.
inline std::string winner() {
  return codons({{"AA", 2}, {"CG", 6}, {"AA", 1}, {"CA", 2}, {"AG", 3}, {"CA", 3}, {"AG", 3}});
}

/// Stays at (0,0) by walking into the left edge.
inline std::string idler(int n) { return codons({{"TA", n}}); }

/// Waits 20 ticks at (0,0), then fires right along row 0 ten times.
inline std::string late_shooter() { return codons({{"TA", 20}, {"CG", 10}}); }

/// Steps right to (1,0) and waits there.
inline std::string bystander() { return codons({{"CA", 1}, {"GA", 40}}); }

inline qden::Genome genome_of(std::initializer_list<std::string> seqs) {
  qden::Genome g;
  for (const auto& s : seqs) g.genes.push_back({s, std::nullopt});
  return g;
}

inline qden::GameConditions ranged_same(bool ff) {
  return {qden::AttackKind::ranged, qden::StartScheme::same, ff};
}

}  // namespace fixtures
