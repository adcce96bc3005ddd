#pragma once

// Experiment orchestration: running a plan's (condition, trial) cells with a
// bounded worker pool, resuming partially completed result sets, replaying
// single cells, and the solution-space sampler and parameter sweep drivers.

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qden/errors.hpp"
#include "qden/evolution.hpp"
#include "qden/plan.hpp"
#include "qden/results.hpp"
#include "qden/sampling.hpp"
#include "qden/stats.hpp"

namespace qden {

/// Runs fn(i) for i in [0, n) on up to `workers` threads. The first exception
/// thrown by any task is rethrown after all workers finish; remaining tasks
/// are abandoned once one fails.
inline void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  const int threads = std::max(1, std::min<int>(workers, static_cast<int>(n)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n || failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          failed.store(true);
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

struct RunOptions {
  int workers = 1;
  /// Stop after executing this many pending cells (the rest stay pending).
  std::optional<std::size_t> cell_limit;
  RestartLogger on_restart;
  std::function<void(const std::string&)> on_cell_done;
};

struct RunSummary {
  std::size_t executed = 0;
  std::size_t skipped = 0;
  std::size_t stuck = 0;
  std::size_t pending = 0;
};

struct Cell {
  Condition condition;
  int trial = 0;
};

inline std::vector<Cell> plan_cells(const ExperimentPlan& plan) {
  std::vector<Cell> cells;
  for (const auto& c : plan.conditions()) {
    for (int t = 0; t < plan.trials_per_condition; ++t) cells.push_back({c, t});
  }
  return cells;
}

inline std::string plan_text(const ExperimentPlan& plan) {
  std::ostringstream os;
  write_plan(os, plan);
  return os.str();
}

/// Checks (or initialises) the result directory for `plan`. Refuses a
/// directory that holds a different plan or a corrupt manifest.
inline void prepare_result_dir(const ExperimentPlan& plan, const ResultLayout& layout) {
  std::error_code ec;
  fs::create_directories(layout.root, ec);
  if (ec || !fs::is_directory(layout.root)) {
    throw InputError("cannot create output directory " + layout.root.string());
  }
  const std::string text = plan_text(plan);
  if (fs::exists(layout.plan_file())) {
    if (read_file(layout.plan_file()) != text) {
      throw InputError(layout.root.string() + " holds results of a different plan");
    }
  } else {
    write_atomically(layout.plan_file(), text);
  }
  if (fs::exists(layout.manifest_file())) {
    std::istringstream in(read_file(layout.manifest_file()));
    const Manifest m = parse_manifest(in, layout.manifest_file().string());
    if (m.plan_name != plan.name || m.master_seed != plan.master_seed) {
      throw InputError(layout.manifest_file().string() + ": manifest does not match the plan");
    }
    // Trials are only reproducible within one version of the random streams.
    if (m.version != kVersion) {
      throw InputError(layout.manifest_file().string() + ": written by qden " + m.version + ", this is " +
                       std::string(kVersion));
    }
  }
}

inline void write_cell(const ResultLayout& layout, const Cell& cell, const TrialRecord& rec) {
  std::ostringstream genomes;
  write_checkpoints(genomes, rec);
  write_atomically(layout.checkpoints(cell.condition, cell.trial), genomes.str());
  std::ostringstream csv;
  write_trial_csv(csv, cell.condition, cell.trial, rec);
  write_atomically(layout.shard(cell.condition, cell.trial), csv.str());
}

/// Executes every pending cell of `plan` into `out`. Cells whose shard is
/// already on disk are skipped, so an interrupted run resumes where it
/// stopped. The manifest is rebuilt from the shards at the end. Throws
/// StuckBudgetExceeded (after writing everything else) if any cell ran out
/// of restarts.
inline RunSummary run_experiment(const ExperimentPlan& plan, const fs::path& out,
                                 const RunOptions& options = {}) {
  plan.validate();
  const ResultLayout layout{out};
  prepare_result_dir(plan, layout);

  std::vector<Cell> pending;
  RunSummary summary;
  for (const auto& cell : plan_cells(plan)) {
    if (fs::exists(layout.shard(cell.condition, cell.trial))) {
      ++summary.skipped;
    } else {
      pending.push_back(cell);
    }
  }
  const std::size_t todo = std::min(pending.size(), options.cell_limit.value_or(pending.size()));
  summary.pending = pending.size() - todo;

  std::atomic<std::size_t> stuck{0};
  std::mutex report_mutex;
  std::string first_stuck;
  parallel_for(todo, options.workers, [&](std::size_t i) {
    const Cell& cell = pending[i];
    const TrialConfig config = plan.trial_config(cell.condition, cell.trial);
    try {
      const TrialRecord rec = run_trial(config, options.on_restart);
      write_cell(layout, cell, rec);
    } catch (const StuckBudgetExceeded& e) {
      ++stuck;
      std::lock_guard lock(report_mutex);
      if (first_stuck.empty()) first_stuck = cell.condition.id() + " trial " + std::to_string(cell.trial) + ": " + e.what();
      return;
    }
    if (options.on_cell_done) {
      std::lock_guard lock(report_mutex);
      options.on_cell_done(cell.condition.id() + " trial " + std::to_string(cell.trial));
    }
  });
  summary.executed = todo - stuck.load();
  summary.stuck = stuck.load();

  write_atomically(layout.manifest_file(), render_manifest(manifest_from_disk(layout, plan)));
  if (summary.stuck > 0) {
    throw StuckBudgetExceeded(std::to_string(summary.stuck) + " cell(s) exceeded the restart budget; first: " + first_stuck);
  }
  return summary;
}

/// Regenerates one cell bit-identically from the plan.
inline TrialRecord replay(const ExperimentPlan& plan, const std::string& condition_id, int trial,
                          std::ostream* trace = nullptr) {
  const auto cond = plan.find_condition(condition_id);
  if (!cond || trial < 0 || trial >= plan.trials_per_condition) {
    throw ConfigError("unknown cell " + condition_id + " trial " + std::to_string(trial));
  }
  const TrialConfig config = plan.trial_config(*cond, trial);
  TrialRecord rec = run_trial(config);
  if (trace && !rec.checkpoints.empty()) {
    *trace << "# session of the final genome, " << condition_id << " trial " << trial << '\n';
    play_genome(rec.checkpoints.back().second, config.game, config.arena, trace);
  }
  return rec;
}

/// Conditions with the regime axis dropped, in plan order.
inline std::vector<Condition> plan_facets(const ExperimentPlan& plan) {
  std::vector<Condition> out;
  for (auto c : plan.conditions()) {
    c.regime = Regime::cne;
    if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
  }
  return out;
}

inline constexpr std::string_view kSampleCsvHeader =
    "condition_id,attack_kind,start_scheme,friendly_fire,origin,gene_count,samples,qualifying,"
    "threshold,rate,rate_low,rate_high";

struct SampleRow {
  Condition facet;
  SampleCell cell;
  friend bool operator==(const SampleRow&, const SampleRow&) = default;
};

/// Samples every facet of the plan at each gene count, counting qualifying
/// genomes for every threshold from the same samples.
inline std::vector<SampleRow> run_sampler(const ExperimentPlan& plan, const std::vector<int>& gene_counts,
                                          long samples_per_count, const std::vector<double>& thresholds,
                                          int workers = 1) {
  if (gene_counts.empty() || thresholds.empty()) throw ConfigError("sampler needs gene counts and thresholds");
  const auto facets = plan_facets(plan);
  const Arena arena = plan.base_arena();
  const std::size_t n = facets.size() * gene_counts.size();
  std::vector<std::vector<SampleRow>> results(n);
  parallel_for(n, workers, [&](std::size_t i) {
    const Condition& f = facets[i / gene_counts.size()];
    const int k = gene_counts[i % gene_counts.size()];
    const SampleCondition sc{f.game, f.origin};
    const auto scores = sample_scores(sc, k, samples_per_count, arena, plan.gene_length,
                                      derive_seed(plan.master_seed, "sample/" + f.facet_id(), 0));
    for (double th : thresholds) {
      results[i].push_back({f, {k, samples_per_count, count_qualifying(scores, th, arena.max_score()), th}});
    }
  });
  std::vector<SampleRow> out;
  for (auto& r : results) out.insert(out.end(), r.begin(), r.end());
  return out;
}

inline void write_sample_csv(std::ostream& out, const std::vector<SampleRow>& rows) {
  out << kSampleCsvHeader << '\n';
  for (const auto& r : rows) {
    const auto rate = r.cell.rate();
    out << r.facet.facet_id() << ',' << to_string(r.facet.game.attack_kind) << ','
        << to_string(r.facet.game.start_scheme) << ',' << (r.facet.game.friendly_fire ? "on" : "off") << ','
        << to_string(r.facet.origin) << ',' << r.cell.gene_count << ',' << r.cell.samples << ','
        << r.cell.qualifying << ',' << format_real(r.cell.threshold) << ',' << format_real(rate.estimate) << ','
        << format_real(rate.low) << ',' << format_real(rate.high) << '\n';
  }
}

inline constexpr std::string_view kSweepCsvHeader = "kind,condition_id,rate,generations,trial,gene_count,restarts";

/// Parameter sweep over the first condition of the plan.
inline std::vector<SweepCell> run_sweep(const ExperimentPlan& plan, SweepKind kind, int trials_per_cell,
                                        int workers = 1) {
  if (trials_per_cell < 2) throw ConfigError("sweeps need at least two trials per cell");
  const Condition cond = plan.conditions().front();
  const TrialConfig base = plan.trial_config(cond, 0);
  const auto grid = sweep_grid(kind);
  std::vector<SweepCell> cells;
  for (const auto& spec : grid) {
    cells.push_back({spec, std::vector<int>(static_cast<std::size_t>(trials_per_cell)),
                     std::vector<int>(static_cast<std::size_t>(trials_per_cell))});
  }
  const auto per = static_cast<std::size_t>(trials_per_cell);
  parallel_for(grid.size() * per, workers, [&](std::size_t i) {
    const std::size_t cell = i / per;
    const int trial = static_cast<int>(i % per);
    const TrialRecord rec = run_trial(sweep_trial_config(kind, base, grid[cell], plan.master_seed, cell, trial));
    cells[cell].gene_counts[static_cast<std::size_t>(trial)] = rec.rows.back().gene_count;
    cells[cell].restarts[static_cast<std::size_t>(trial)] = rec.restarts;
  });
  return cells;
}

inline void write_sweep_csv(std::ostream& out, SweepKind kind, const Condition& cond,
                            const std::vector<SweepCell>& cells) {
  out << kSweepCsvHeader << '\n';
  for (const auto& c : cells) {
    for (std::size_t t = 0; t < c.gene_counts.size(); ++t) {
      out << to_string(kind) << ',' << cond.id() << ',' << format_real(c.spec.rate) << ',' << c.spec.generations
          << ',' << t << ',' << c.gene_counts[t] << ',' << c.restarts[t] << '\n';
    }
  }
}

inline stats::StatResult sweep_anova(const std::vector<SweepCell>& cells) {
  std::vector<std::vector<double>> groups;
  for (const auto& c : cells) groups.push_back(stats::to_doubles(c.gene_counts));
  return stats::anova_oneway(groups);
}

}  // namespace qden
