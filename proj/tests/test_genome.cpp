#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "qden/genome.hpp"

using namespace qden;

TEST(DecodeGene, EmptySequence) { EXPECT_TRUE(decode_gene("", TokenTable::standard()).empty()); }

TEST(DecodeGene, DefaultTable) {
  const auto actions = decode_gene("ACTG", TokenTable::standard());
  ASSERT_EQ(actions.size(), 2u);
  EXPECT_EQ(actions[0], (Action{Direction::up, Verb::move}));
  EXPECT_EQ(actions[1], (Action{Direction::left, Verb::attack}));
}

TEST(DecodeGene, LengthIsHalfAndTrailingLetterIgnored) {
  Rng rng(1);
  EXPECT_EQ(decode_gene(random_sequence(512, rng), TokenTable::standard()).size(), 256u);
  EXPECT_EQ(decode_gene("ACG", TokenTable::standard()).size(), 1u);
}

TEST(DecodeGene, AllSixteenPairsDecode) {
  const auto& t = TokenTable::standard();
  for (char a : kAlphabet) {
    for (char b : kAlphabet) {
      const auto act = decode_gene(std::string{a, b}, t);
      ASSERT_EQ(act.size(), 1u);
      EXPECT_EQ(act[0].direction, t.direction_of[static_cast<std::size_t>(letter_index(a))]);
      EXPECT_EQ(act[0].verb, t.verb_of[static_cast<std::size_t>(letter_index(b))]);
    }
  }
}

TEST(DecodeGene, RejectsForeignLetters) {
  EXPECT_THROW(decode_gene("ACGN", TokenTable::standard()), InputError);
  EXPECT_THROW(decode_gene("acgt", TokenTable::standard()), InputError);
}

TEST(TokenTable, ValidationCatchesBadMaps) {
  TokenTable t = TokenTable::standard();
  EXPECT_NO_THROW(t.validate());
  t.direction_of[1] = t.direction_of[0];
  EXPECT_THROW(t.validate(), ConfigError);
  t = TokenTable::standard();
  t.verb_of = {Verb::move, Verb::move, Verb::move, Verb::attack};
  EXPECT_THROW(t.validate(), ConfigError);
}

TEST(PointMutate, RateZeroIsIdentity) {
  Rng rng(2);
  const auto s = random_sequence(512, rng);
  EXPECT_EQ(point_mutate(s, 0.0, rng), s);
}

TEST(PointMutate, RateOneChangesEverySite) {
  Rng rng(3);
  const auto s = random_sequence(512, rng);
  const auto m = point_mutate(s, 1.0, rng);
  ASSERT_EQ(m.size(), s.size());
  for (std::size_t i = 0; i < s.size(); ++i) ASSERT_NE(m[i], s[i]);
}

TEST(PointMutate, HammingDistanceMatchesBinomial) {
  // Mean of 10,000 Binomial(512, 0.01) draws has sd sqrt(512*0.01*0.99/10000).
  Rng rng(4);
  const auto s = random_sequence(512, rng);
  double total = 0;
  for (int r = 0; r < 10000; ++r) {
    const auto m = point_mutate(s, 0.01, rng);
    int d = 0;
    for (std::size_t i = 0; i < s.size(); ++i) d += m[i] != s[i];
    total += d;
  }
  const double sigma = std::sqrt(512 * 0.01 * 0.99 / 10000.0);
  EXPECT_NEAR(total / 10000, 5.12, 3 * sigma);
}

TEST(PointMutate, EverySiteMutatesAtTheRate) {
  // Per-site counts ~ Binomial(20000, 0.05): mean 1000, sd about 31.
  Rng rng(6);
  const std::string s(64, 'A');
  std::vector<int> hits(s.size(), 0);
  double sum = 0, sum_sq = 0;
  for (int r = 0; r < 20000; ++r) {
    const auto m = point_mutate(s, 0.05, rng);
    int d = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      hits[i] += m[i] != 'A';
      d += m[i] != 'A';
    }
    sum += d;
    sum_sq += static_cast<double>(d) * d;
  }
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_NEAR(hits[i], 1000, 155) << "site " << i;
  // Independent sites give the binomial variance 64 * 0.05 * 0.95 = 3.04.
  const double mean = sum / 20000;
  EXPECT_NEAR(sum_sq / 20000 - mean * mean, 3.04, 0.2);
}

TEST(PointMutate, ReplacementLettersAreUniform) {
  Rng rng(5);
  const std::string s(30000, 'A');
  const auto m = point_mutate(s, 1.0, rng);
  int c = 0, g = 0, t = 0;
  for (char x : m) {
    c += x == 'C';
    g += x == 'G';
    t += x == 'T';
  }
  for (int n : {c, g, t}) EXPECT_NEAR(n, 10000, 300);
}

namespace {

Genome two_genes(Rng& rng) {
  Genome g;
  g.genes.push_back({random_sequence(16, rng), std::nullopt});
  g.genes.push_back({random_sequence(16, rng), std::nullopt});
  return g;
}

}  // namespace

TEST(GeneEvents, ZeroRatesLeaveGenomeUnchanged) {
  Rng rng(6);
  Genome g = two_genes(rng);
  const Genome before = g;
  apply_gene_events(g, {0.0, 0.0, GeneOrigin::duplication, StartScheme::same, 16}, StartLayout{}, rng);
  EXPECT_EQ(g, before);
}

TEST(GeneEvents, RemovalOnSingleGeneIsNoOp) {
  Rng rng(7);
  Genome g;
  g.genes.push_back({random_sequence(16, rng), std::nullopt});
  const Genome before = g;
  apply_gene_events(g, {0.0, 1.0, GeneOrigin::duplication, StartScheme::same, 16}, StartLayout{}, rng);
  EXPECT_EQ(g, before);
}

TEST(GeneEvents, DuplicationAppendsCopyAtLowestPriority) {
  Rng rng(8);
  const Genome base = two_genes(rng);
  bool saw[2] = {false, false};
  for (int r = 0; r < 200; ++r) {
    Genome g = base;
    apply_gene_events(g, {1.0, 0.0, GeneOrigin::duplication, StartScheme::same, 16}, StartLayout{}, rng);
    ASSERT_EQ(g.size(), 3u);
    EXPECT_EQ(g.genes[0], base.genes[0]);
    EXPECT_EQ(g.genes[1], base.genes[1]);
    if (g.genes[2] == base.genes[0]) saw[0] = true;
    if (g.genes[2] == base.genes[1]) saw[1] = true;
  }
  EXPECT_TRUE(saw[0] && saw[1]);
}

TEST(GeneEvents, DeNovoAppendsFreshGeneWithOwnStart) {
  Rng rng(9);
  Genome g;
  g.genes.push_back(random_gene(512, StartScheme::random, 0, StartLayout{}, rng));
  apply_gene_events(g, {1.0, 0.0, GeneOrigin::de_novo, StartScheme::random, 512}, StartLayout{}, rng);
  ASSERT_EQ(g.size(), 2u);
  EXPECT_EQ(g.genes[1].sequence.size(), 512u);
  EXPECT_NE(g.genes[1].sequence, g.genes[0].sequence);
  EXPECT_TRUE(g.genes[1].start.has_value());
}

TEST(GeneEvents, DuplicateInheritsRandomStart) {
  Rng rng(10);
  Genome g;
  g.genes.push_back(random_gene(32, StartScheme::random, 0, StartLayout{}, rng));
  apply_gene_events(g, {1.0, 0.0, GeneOrigin::duplication, StartScheme::random, 32}, StartLayout{}, rng);
  ASSERT_EQ(g.size(), 2u);
  EXPECT_EQ(g.genes[1], g.genes[0]);
}

TEST(GeneEvents, NeverEmptiesGenome) {
  Rng rng(11);
  Genome g = two_genes(rng);
  for (int i = 0; i < 5000; ++i) {
    apply_gene_events(g, {0.3, 0.7, GeneOrigin::duplication, StartScheme::same, 16}, StartLayout{}, rng);
    ASSERT_GE(g.size(), 1u);
  }
}

TEST(ResolveStart, SameIsPositionOne) {
  Rng rng(12);
  for (std::size_t i = 0; i < 9; ++i) {
    EXPECT_EQ(resolve_start(StartScheme::same, i, StartLayout{}, rng), (Position{0, 0}));
  }
}

TEST(ResolveStart, CornersCycleInOrder) {
  Rng rng(13);
  const StartLayout layout;
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(resolve_start(StartScheme::corners, i, layout, rng), layout.numbered[i]);
  }
  EXPECT_EQ(resolve_start(StartScheme::corners, 4, layout, rng), layout.numbered[0]);
  EXPECT_EQ(layout.numbered, (std::vector<Position>{{0, 0}, {7, 7}, {0, 7}, {7, 0}}));
}

TEST(ResolveStart, RandomIsSeededAndOnGrid) {
  Rng a(14), b(14);
  for (int i = 0; i < 100; ++i) {
    const Position p = resolve_start(StartScheme::random, 0, StartLayout{}, a);
    EXPECT_EQ(p, resolve_start(StartScheme::random, 0, StartLayout{}, b));
    EXPECT_TRUE(p.x >= 0 && p.x < 8 && p.y >= 0 && p.y < 8);
  }
}

TEST(GenomeText, RoundTrip) {
  Rng rng(15);
  Genome g;
  g.genes.push_back(random_gene(20, StartScheme::random, 0, StartLayout{}, rng));
  g.genes.push_back({random_sequence(20, rng), std::nullopt});
  const std::string text = genome_to_string(g);
  EXPECT_EQ(text.substr(text.find('\n') + 1, 6), "-1,-1,");
  std::istringstream in(text);
  EXPECT_EQ(read_genome(in), g);
}

TEST(GenomeText, RejectsMalformedLines) {
  EXPECT_THROW(parse_gene_line("ACGT"), InputError);
  EXPECT_THROW(parse_gene_line("x,1,ACGT"), InputError);
  EXPECT_THROW(parse_gene_line("1,1,ACGX"), InputError);
  EXPECT_THROW(parse_gene_line("-2,1,ACGT"), InputError);
  std::istringstream empty("");
  EXPECT_THROW(read_genome(empty), InputError);
}
