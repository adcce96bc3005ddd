#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "fixtures.hpp"

using namespace qden;

namespace {

ExperimentPlan parse(const std::string& text) {
  std::istringstream in(text);
  return parse_plan(in);
}

}  // namespace

TEST(Plan, DefaultMatrixHas48UniqueConditions) {
  const auto plan = desk_profile();
  const auto conds = plan.conditions();
  ASSERT_EQ(conds.size(), 48u);
  std::set<std::string> ids;
  for (const auto& c : conds) ids.insert(c.id());
  EXPECT_EQ(ids.size(), 48u);
  EXPECT_EQ(conds.front().id(), "melee-same-safe-duplication-cne");
  EXPECT_EQ(plan_facets(plan).size(), 24u);
  EXPECT_EQ(plan.find_condition("ranged-random-ff-de_novo-zfel")->game.start_scheme, StartScheme::random);
  EXPECT_FALSE(plan.find_condition("ranged-random-ff-de_novo").has_value());
}

TEST(Plan, Profiles) {
  const auto desk = desk_profile();
  EXPECT_EQ(desk.trials_per_condition, 16);
  EXPECT_EQ(desk.neutral_generations, 1024);
  EXPECT_EQ(desk.metric_stride, 8);
  const auto paper = paper_profile();
  EXPECT_EQ(paper.trials_per_condition, 64);
  EXPECT_EQ(paper.neutral_generations, 4096);
}

TEST(Plan, WriteParseRoundTrip) {
  ExperimentPlan p = desk_profile();
  p.name = "custom";
  p.master_seed = 123456789012345ULL;
  p.attack_kinds = {AttackKind::ranged};
  p.friendly_fire = {true};
  p.point_rate = 0.005;
  p.fixed_gene_count = 8;
  p.random_arena = true;
  std::ostringstream os;
  write_plan(os, p);
  const auto q = parse(os.str());
  std::ostringstream again;
  write_plan(again, q);
  EXPECT_EQ(os.str(), again.str());
  EXPECT_EQ(q.conditions().size(), 12u);
  EXPECT_EQ(q.fixed_gene_count, 8);
}

TEST(Plan, CommentsAndPartialKeys) {
  const auto p = parse("# a comment\nqden-plan 1\n\nname = tiny\nregimes = zfel\ntrials_per_condition = 2\n");
  EXPECT_EQ(p.name, "tiny");
  EXPECT_EQ(p.regimes, std::vector<Regime>{Regime::zfel});
  EXPECT_EQ(p.neutral_generations, 1024);
}

TEST(Plan, Errors) {
  EXPECT_THROW(parse(""), ConfigError);
  EXPECT_THROW(parse("qden-plan 2\n"), ConfigError);
  EXPECT_THROW(parse("qden-plan 1\nbogus = 1\n"), ConfigError);
  EXPECT_THROW(parse("qden-plan 1\nname = a\nname = b\n"), ConfigError);
  EXPECT_THROW(parse("qden-plan 1\ntrials_per_condition = many\n"), ConfigError);
  EXPECT_THROW(parse("qden-plan 1\ntrials_per_condition = 0\n"), ConfigError);
  EXPECT_THROW(parse("qden-plan 1\nmaster_seed = -4\n"), ConfigError);
  EXPECT_THROW(parse("qden-plan 1\nattack_kinds = laser\n"), ConfigError);
  EXPECT_THROW(parse("qden-plan 1\nregimes =\n"), ConfigError);
  EXPECT_THROW(parse("qden-plan 1\npoint_rate = 2\n"), ConfigError);
  EXPECT_THROW(parse("qden-plan 1\nname\n"), ConfigError);
  EXPECT_THROW(parse("qden-plan 1\narena = moving\n"), ConfigError);
  EXPECT_THROW(load_plan("/nonexistent/plan.txt"), ConfigError);
}

TEST(Plan, TrialSeedsAndArenas) {
  ExperimentPlan p = desk_profile();
  const auto c = p.conditions()[3];
  EXPECT_NE(p.trial_seed(c, 0), p.trial_seed(c, 1));
  EXPECT_NE(p.trial_seed(c, 0), p.trial_seed(p.conditions()[4], 0));
  EXPECT_EQ(p.arena_for_trial(0).opponents, default_opponents());
  p.random_arena = true;
  EXPECT_EQ(p.arena_for_trial(5).opponents, p.arena_for_trial(5).opponents);
  EXPECT_NE(p.arena_for_trial(5).opponents, p.arena_for_trial(6).opponents);
  EXPECT_EQ(p.trial_config(c, 2).arena.grid.max_ticks, 256);
}

TEST(Results, FormatReal) {
  EXPECT_EQ(format_real(0.1), "0.1");
  EXPECT_EQ(format_real(12.0), "12");
  EXPECT_EQ(format_real(17.0 / 3.0), "5.66666667");
  EXPECT_EQ(format_real(std::nan("")), "NA");
}

TEST(Results, TrialCsvRoundTrip) {
  TrialRecord rec;
  rec.restarts = 2;
  rec.rows = {{0, 12, 1, 1, 12.0}, {1, 12, 2, std::nullopt, std::nullopt}, {2, 12, 2, 0, 0.5}};
  const Condition c{{AttackKind::ranged, StartScheme::corners, true}, GeneOrigin::de_novo, Regime::zfel};
  std::ostringstream os;
  write_trial_csv(os, c, 7, rec);
  EXPECT_EQ(os.str(),
            std::string(kTrialCsvHeader) + "\n" +
                "ranged-corners-ff-de_novo-zfel,ranged,corners,on,de_novo,zfel,7,0,12,1,1,12,2\n"
                "ranged-corners-ff-de_novo-zfel,ranged,corners,on,de_novo,zfel,7,1,12,2,NA,NA,2\n"
                "ranged-corners-ff-de_novo-zfel,ranged,corners,on,de_novo,zfel,7,2,12,2,0,0.5,2\n");
  std::istringstream in(os.str());
  const auto rows = read_trial_csv(in, "mem");
  ASSERT_EQ(rows.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(rows[i].row, rec.rows[i]);
    EXPECT_EQ(rows[i].restarts, 2);
    EXPECT_EQ(rows[i].trial, 7);
  }
}

TEST(Results, TrialCsvErrors) {
  std::istringstream bad_header("x,y\n");
  EXPECT_THROW(read_trial_csv(bad_header, "mem"), InputError);
  std::istringstream short_row(std::string(kTrialCsvHeader) + "\na,b,c\n");
  EXPECT_THROW(read_trial_csv(short_row, "mem"), InputError);
  std::istringstream bad_value(std::string(kTrialCsvHeader) + "\na,b,c,d,e,f,g,h,i,j,k,l,m\n");
  EXPECT_THROW(read_trial_csv(bad_value, "mem"), InputError);
}

TEST(Results, CheckpointsRoundTrip) {
  TrialRecord rec;
  rec.bootstrap_generations = 40;
  rec.checkpoints = {{0, fixtures::genome_of({"ACGT"})}, {4, fixtures::genome_of({"ACGT", "TTGG"})}};
  std::ostringstream os;
  write_checkpoints(os, rec);
  std::istringstream in(os.str());
  EXPECT_EQ(read_checkpoints(in, "mem"), rec.checkpoints);
  std::istringstream junk("# bootstrap_generations 1\nhello\n");
  EXPECT_THROW(read_checkpoints(junk, "mem"), InputError);
}

TEST(Manifest, RoundTripAndCorruption) {
  Manifest m;
  m.plan_name = "desk";
  m.master_seed = 9;
  m.cells = {{"ranged-same-ff-duplication-cne", 0, 42, 0}, {"ranged-same-ff-duplication-cne", 1, 43, 3}};
  const std::string text = render_manifest(m);
  std::istringstream in(text);
  const auto back = parse_manifest(in, "mem");
  EXPECT_EQ(back.cells, m.cells);
  EXPECT_EQ(back.plan_name, "desk");
  EXPECT_EQ(back.version, kVersion);

  for (const std::string& bad : {std::string("garbage\n"), std::string(kManifestHeader) + "\nversion 1\n",
                                text + "cell x 1 seed\n", text + "cell x 1 seed 2 restarts 0 extra\n"}) {
    std::istringstream b(bad);
    EXPECT_THROW(parse_manifest(b, "mem"), InputError) << bad;
  }
}
