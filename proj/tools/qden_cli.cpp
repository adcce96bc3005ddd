// qden: command-line driver for Quandary Den experiments.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 data error,
// 3 a trial exceeded its stuck-restart budget.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qden/qden.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitStuck = 3;

struct PlanSource {
  std::string plan_path;
  std::string profile = "desk";

  void attach(CLI::App* cmd) {
    cmd->add_option("--plan", plan_path, "Plan file (qden-plan 1 format)");
    cmd->add_option("--profile", profile, "Built-in profile when no plan file is given")
        ->check(CLI::IsMember({"desk", "paper"}));
  }

  qden::ExperimentPlan load() const {
    if (!plan_path.empty()) return qden::load_plan(plan_path);
    return profile == "paper" ? qden::paper_profile() : qden::desk_profile();
  }
};

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  for (const auto& piece : qden::plan_detail::split_list(s)) out.push_back(std::stoi(piece));
  return out;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& piece : qden::plan_detail::split_list(s)) out.push_back(std::stod(piece));
  return out;
}

void log_restart(int restart, const std::string& reason) {
  std::cerr << "restart " << restart << ": " << reason << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quandary Den constructive neutral evolution experiments"};
  app.require_subcommand(1);

  int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  // run
  auto* run_cmd = app.add_subcommand("run", "Run (or resume) every cell of a plan");
  PlanSource run_plan;
  run_plan.attach(run_cmd);
  std::string run_out;
  std::optional<std::size_t> run_limit;
  bool quiet = false;
  run_cmd->add_option("--out", run_out, "Result directory")->required();
  run_cmd->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  run_cmd->add_option("--limit", run_limit, "Execute at most this many pending cells");
  run_cmd->add_flag("--quiet", quiet, "Do not report finished cells");

  // analyze
  auto* analyze_cmd = app.add_subcommand("analyze", "Build analysis tables from a result set");
  std::string analyze_out;
  std::vector<std::string> analyses;
  std::optional<double> analyze_threshold;
  analyze_cmd->add_option("--out", analyze_out, "Result directory")->required();
  analyze_cmd->add_option("--analysis", analyses,
                          "genes_over_time | lotb_over_time | essential_over_time | gene_count_dist | "
                          "robustness_by_genes | plasticity_by_genes | evolvability_by_genes | sweeps")
      ->required();
  analyze_cmd->add_option("--threshold", analyze_threshold, "Score threshold for gene_count_dist");
  analyze_cmd->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);

  // replay
  auto* replay_cmd = app.add_subcommand("replay", "Regenerate one trial from its derived seed");
  PlanSource replay_plan;
  replay_plan.attach(replay_cmd);
  std::string replay_condition;
  int replay_trial = 0;
  bool replay_trace = false;
  std::string replay_csv;
  replay_cmd->add_option("--condition", replay_condition, "Condition id, e.g. ranged-same-ff-duplication-cne")->required();
  replay_cmd->add_option("--trial", replay_trial, "Trial index")->required();
  replay_cmd->add_flag("--trace", replay_trace, "Print the engine trace of the final genome's session");
  replay_cmd->add_option("--csv", replay_csv, "Write the trial CSV here instead of stdout");

  // sample
  auto* sample_cmd = app.add_subcommand("sample", "Count threshold-meeting random genomes per gene count");
  PlanSource sample_plan;
  sample_plan.attach(sample_cmd);
  std::string sample_out;
  std::string sample_counts = "1,2,3,4,5,6,7,8";
  long sample_n = qden::kPaperSamplesPerCount;
  std::string sample_thresholds = "1.0,0.5";
  sample_cmd->add_option("--out", sample_out, "Result directory (writes samples.csv)")->required();
  sample_cmd->add_option("--gene-counts", sample_counts, "Comma separated gene counts");
  sample_cmd->add_option("--samples", sample_n, "Samples per gene count")->check(CLI::PositiveNumber);
  sample_cmd->add_option("--thresholds", sample_thresholds, "Comma separated score fractions");
  sample_cmd->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Gene-event or point-rate parameter sweep");
  PlanSource sweep_plan;
  sweep_plan.attach(sweep_cmd);
  std::string sweep_out;
  std::string sweep_kind = "gene_event_rate";
  int sweep_trials = 64;
  sweep_cmd->add_option("--out", sweep_out, "Result directory (writes sweep_<kind>.csv)")->required();
  sweep_cmd->add_option("--kind", sweep_kind, "gene_event_rate | point_rate")
      ->check(CLI::IsMember({"gene_event_rate", "point_rate"}));
  sweep_cmd->add_option("--trials", sweep_trials, "Trials per sweep cell")->check(CLI::Range(2, 1 << 20));
  sweep_cmd->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);

  // plan
  auto* plan_cmd = app.add_subcommand("plan", "Print a plan file for a built-in profile");
  PlanSource print_plan;
  print_plan.attach(plan_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*run_cmd) {
      qden::RunOptions options;
      options.workers = workers;
      options.cell_limit = run_limit;
      options.on_restart = log_restart;
      if (!quiet) options.on_cell_done = [](const std::string& cell) { std::cerr << "done " << cell << '\n'; };
      const auto summary = qden::run_experiment(run_plan.load(), run_out, options);
      std::cout << "executed " << summary.executed << " skipped " << summary.skipped << " pending "
                << summary.pending << '\n';
    } else if (*analyze_cmd) {
      qden::AnalysisOptions options;
      options.workers = workers;
      options.threshold = analyze_threshold;
      for (const auto& a : analyses) {
        for (const auto& path : qden::analyze(analyze_out, qden::parse_analysis_kind(a), options)) {
          std::cout << path.string() << '\n';
        }
      }
    } else if (*replay_cmd) {
      const auto plan = replay_plan.load();
      const auto cond = plan.find_condition(replay_condition);
      const auto rec = qden::replay(plan, replay_condition, replay_trial, replay_trace ? &std::cout : nullptr);
      if (replay_csv.empty()) {
        qden::write_trial_csv(std::cout, *cond, replay_trial, rec);
      } else {
        std::ofstream out(replay_csv, std::ios::binary);
        if (!out) throw qden::InputError("cannot write " + replay_csv);
        qden::write_trial_csv(out, *cond, replay_trial, rec);
      }
    } else if (*sample_cmd) {
      const auto plan = sample_plan.load();
      const auto rows =
          qden::run_sampler(plan, parse_int_list(sample_counts), sample_n, parse_double_list(sample_thresholds), workers);
      std::ostringstream csv;
      qden::write_sample_csv(csv, rows);
      std::filesystem::create_directories(sample_out);
      qden::write_atomically(qden::sample_file(sample_out), csv.str());
      std::cout << qden::sample_file(sample_out).string() << '\n';
    } else if (*sweep_cmd) {
      const auto plan = sweep_plan.load();
      const auto kind = sweep_kind == "point_rate" ? qden::SweepKind::point_rate : qden::SweepKind::gene_event_rate;
      const auto cells = qden::run_sweep(plan, kind, sweep_trials, workers);
      std::ostringstream csv;
      qden::write_sweep_csv(csv, kind, plan.conditions().front(), cells);
      std::filesystem::create_directories(sweep_out);
      qden::write_atomically(qden::sweep_file(sweep_out, kind), csv.str());
      const auto anova = qden::sweep_anova(cells);
      std::cout << "anova F = " << qden::format_real(anova.statistic) << " df = (" << anova.df << ", " << anova.df2
                << ") p = " << qden::format_real(anova.p_value) << '\n';
    } else if (*plan_cmd) {
      qden::write_plan(std::cout, print_plan.load());
    }
  } catch (const qden::StuckBudgetExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitStuck;
  } catch (const qden::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const qden::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return 0;
}
