#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "tmpdir.hpp"

using namespace qden;
namespace fs = std::filesystem;

namespace {

ExperimentPlan zfel_plan() {
  ExperimentPlan p;
  p.name = "zfel-only";
  p.attack_kinds = {AttackKind::ranged};
  p.start_schemes = {StartScheme::same, StartScheme::corners};
  p.friendly_fire = {false};
  p.origins = {GeneOrigin::duplication};
  p.regimes = {Regime::zfel};
  p.trials_per_condition = 12;
  p.neutral_generations = 64;
  p.gene_event_rate = 0.05;
  p.metric_stride = 16;
  return p;
}

ExperimentPlan both_plan() {
  ExperimentPlan p = zfel_plan();
  p.name = "both";
  p.start_schemes = {StartScheme::same};
  p.friendly_fire = {true};
  p.regimes = {Regime::cne, Regime::zfel};
  p.trials_per_condition = 4;
  p.neutral_generations = 16;
  p.metric_stride = 4;
  return p;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::istringstream in(read_file(path));
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) rows.push_back(split_csv_line(line));
  return rows;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(QDEN_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Analyze, EmptyResultSetIsAnError) {
  const auto dir = scratch_dir();
  EXPECT_THROW(analyze(dir, AnalysisKind::genes_over_time), InputError);
  write_atomically(ResultLayout{dir}.plan_file(), plan_text(zfel_plan()));
  EXPECT_THROW(analyze(dir, AnalysisKind::genes_over_time), InputError);
}

TEST(Analyze, ZfelOnlyGenesOverTimeNotSignificant) {
  const auto dir = scratch_dir();
  run_experiment(zfel_plan(), dir);
  const auto files = analyze(dir, AnalysisKind::genes_over_time);
  ASSERT_EQ(files.size(), 2u);
  const auto values = read_csv(files[0]);
  EXPECT_EQ(values[0].size(), 11u);
  EXPECT_EQ(values.size(), 1u + 2u * 65u);
  const auto tests = read_csv(files[1]);
  ASSERT_EQ(tests.size(), 3u);
  EXPECT_EQ(tests[0].back(), "significant");
  for (std::size_t i = 1; i < tests.size(); ++i) EXPECT_EQ(tests[i].back(), "false");
}

TEST(Analyze, SeriesKindsAndMeasures) {
  const auto dir = scratch_dir();
  run_experiment(both_plan(), dir);
  for (auto kind : {AnalysisKind::lotb_over_time, AnalysisKind::essential_over_time}) {
    const auto values = read_csv(analyze(dir, kind)[0]);
    // Metric rows only at the stride: generations 0, 4, 8, 12, 16.
    EXPECT_EQ(values.size(), 1u + 2u * 5u);
  }
  const auto tests = read_csv(analyze(dir, AnalysisKind::genes_over_time)[1]);
  ASSERT_EQ(tests.size(), 2u);
  EXPECT_EQ(tests[1][1], "cne_vs_zfel");

  AnalysisOptions opt;
  opt.robustness_reps = 4;
  opt.plasticity_layouts = 4;
  opt.evolvability_rounds = 2;
  opt.evolvability_horizon = 4;
  for (auto kind : {AnalysisKind::robustness_by_genes, AnalysisKind::plasticity_by_genes,
                    AnalysisKind::evolvability_by_genes}) {
    const auto files = analyze(dir, kind, opt);
    const auto values = read_csv(files[0]);
    EXPECT_GT(values.size(), 8u);
    EXPECT_EQ(values[0].back(), "value");
    EXPECT_EQ(read_csv(files[1]).size(), 3u);
  }
}

TEST(Analyze, GeneCountDistributionNeedsSamples) {
  const auto dir = scratch_dir();
  const auto plan = both_plan();
  run_experiment(plan, dir);
  EXPECT_THROW(analyze(dir, AnalysisKind::gene_count_dist), InputError);
  std::ostringstream csv;
  write_sample_csv(csv, run_sampler(plan, {1, 2, 3}, 200, {1.0, 0.5}));
  write_atomically(sample_file(dir), csv.str());
  AnalysisOptions opt;
  opt.threshold = 0.5;
  const auto files = analyze(dir, AnalysisKind::gene_count_dist, opt);
  const auto values = read_csv(files[0]);
  EXPECT_EQ(values[0], (std::vector<std::string>{"facet_id", "source", "gene_count", "count", "rate", "rescaled"}));
  const auto tests = read_csv(files[1]);
  ASSERT_EQ(tests.size(), 2u);
  EXPECT_EQ(tests[1][2], "ks");
}

TEST(Analyze, SweepsNeedSweepFiles) {
  const auto dir = scratch_dir();
  EXPECT_THROW(analyze(dir, AnalysisKind::sweeps), InputError);
  ExperimentPlan plan = zfel_plan();
  const auto cells = run_sweep(plan, SweepKind::gene_event_rate, 3, 1);
  std::ostringstream csv;
  write_sweep_csv(csv, SweepKind::gene_event_rate, plan.conditions().front(), cells);
  write_atomically(sweep_file(dir, SweepKind::gene_event_rate), csv.str());
  const auto files = analyze(dir, AnalysisKind::sweeps);
  EXPECT_EQ(read_csv(files[0]).size(), 6u);
  const auto tests = read_csv(files[1]);
  ASSERT_EQ(tests.size(), 2u);
  EXPECT_EQ(tests[1][2], "anova");
  EXPECT_EQ(tests[1][4], "4");
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch_dir();
  EXPECT_EQ(run_cli(""), 1);
  EXPECT_EQ(run_cli("frobnicate"), 1);
  EXPECT_EQ(run_cli("plan --profile desk"), 0);

  const auto bad_plan = dir / "bad.plan";
  { std::ofstream(bad_plan) << "qden-plan 1\nnot_a_key = 1\n"; }
  EXPECT_EQ(run_cli("run --plan " + bad_plan.string() + " --out " + (dir / "r").string()), 1);

  const auto plan_path = dir / "tiny.plan";
  ExperimentPlan tiny = both_plan();
  tiny.trials_per_condition = 1;
  tiny.neutral_generations = 4;
  { std::ofstream(plan_path) << plan_text(tiny); }
  const auto out = dir / "out";
  EXPECT_EQ(run_cli("run --quiet --plan " + plan_path.string() + " --out " + out.string()), 0);
  EXPECT_TRUE(fs::exists(ResultLayout{out}.manifest_file()));
  EXPECT_EQ(run_cli("analyze --out " + out.string() + " --analysis genes_over_time"), 0);
  EXPECT_EQ(run_cli("analyze --out " + out.string() + " --analysis gene_count_dist"), 2);
  EXPECT_EQ(run_cli("replay --plan " + plan_path.string() + " --condition " + tiny.conditions()[0].id() +
                    " --trial 0 --trace"),
            0);
  EXPECT_EQ(run_cli("replay --plan " + plan_path.string() + " --condition nope --trial 0"), 1);

  { std::ofstream(ResultLayout{out}.manifest_file(), std::ios::trunc) << "junk\n"; }
  EXPECT_EQ(run_cli("run --quiet --plan " + plan_path.string() + " --out " + out.string()), 2);

  const auto stuck_path = dir / "stuck.plan";
  ExperimentPlan stuck = tiny;
  stuck.attack_kinds = {AttackKind::melee};
  stuck.bootstrap_generation_cap = 0;
  stuck.max_restarts = 0;
  { std::ofstream(stuck_path) << plan_text(stuck); }
  EXPECT_EQ(run_cli("run --quiet --plan " + stuck_path.string() + " --out " + (dir / "stuck").string()), 3);
}

TEST(Cli, ReplayCsvMatchesShard) {
  const auto dir = scratch_dir();
  const auto plan_path = dir / "tiny.plan";
  ExperimentPlan tiny = both_plan();
  tiny.trials_per_condition = 2;
  { std::ofstream(plan_path) << plan_text(tiny); }
  ASSERT_EQ(run_cli("run --quiet --workers 2 --plan " + plan_path.string() + " --out " + (dir / "out").string()), 0);
  const auto cond = tiny.conditions()[1];
  const auto csv = dir / "replayed.csv";
  ASSERT_EQ(run_cli("replay --plan " + plan_path.string() + " --condition " + cond.id() + " --trial 1 --csv " +
                    csv.string()),
            0);
  EXPECT_EQ(read_file(csv), read_file(ResultLayout{dir / "out"}.shard(cond, 1)));
}
