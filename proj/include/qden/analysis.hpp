#pragma once

// Analysis tables computed from a result set. Every analysis writes
// <result>/analysis/<kind>.csv (the plotted values) and
// <result>/analysis/<kind>_tests.csv (test statistics with raw and
// Bonferroni-adjusted p-values and a `significant` flag at adjusted 0.05).

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qden/errors.hpp"
#include "qden/experiment.hpp"
#include "qden/metrics.hpp"
#include "qden/plan.hpp"
#include "qden/results.hpp"
#include "qden/sampling.hpp"
#include "qden/stats.hpp"

namespace qden {

enum class AnalysisKind {
  genes_over_time,
  lotb_over_time,
  essential_over_time,
  gene_count_dist,
  robustness_by_genes,
  plasticity_by_genes,
  evolvability_by_genes,
  sweeps,
};

inline constexpr std::string_view to_string(AnalysisKind k) {
  switch (k) {
    case AnalysisKind::genes_over_time: return "genes_over_time";
    case AnalysisKind::lotb_over_time: return "lotb_over_time";
    case AnalysisKind::essential_over_time: return "essential_over_time";
    case AnalysisKind::gene_count_dist: return "gene_count_dist";
    case AnalysisKind::robustness_by_genes: return "robustness_by_genes";
    case AnalysisKind::plasticity_by_genes: return "plasticity_by_genes";
    case AnalysisKind::evolvability_by_genes: return "evolvability_by_genes";
    case AnalysisKind::sweeps: return "sweeps";
  }
  return "?";
}

inline AnalysisKind parse_analysis_kind(const std::string& s) {
  for (auto k : {AnalysisKind::genes_over_time, AnalysisKind::lotb_over_time, AnalysisKind::essential_over_time,
                 AnalysisKind::gene_count_dist, AnalysisKind::robustness_by_genes, AnalysisKind::plasticity_by_genes,
                 AnalysisKind::evolvability_by_genes, AnalysisKind::sweeps}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError("unknown analysis '" + s + "'");
}

struct TrialSeries {
  Condition condition;
  int trial = 0;
  std::vector<TrialRow> rows;
  int restarts = 0;
};

struct ResultSet {
  fs::path root;
  ExperimentPlan plan;
  std::vector<TrialSeries> trials;
};

/// Loads the plan copy and every shard on disk. Missing plan or an empty
/// result set are data errors.
inline ResultSet load_results(const fs::path& root) {
  const ResultLayout layout{root};
  if (!fs::exists(layout.plan_file())) throw InputError("missing input: " + layout.plan_file().string());
  ResultSet rs;
  rs.root = root;
  rs.plan = load_plan(layout.plan_file().string());
  for (const auto& c : rs.plan.conditions()) {
    for (int t = 0; t < rs.plan.trials_per_condition; ++t) {
      const auto path = layout.shard(c, t);
      if (!fs::exists(path)) continue;
      std::ifstream in(path);
      TrialSeries ts{c, t, {}, 0};
      for (auto& r : read_trial_csv(in, path.string())) {
        ts.restarts = r.restarts;
        ts.rows.push_back(r.row);
      }
      rs.trials.push_back(std::move(ts));
    }
  }
  if (rs.trials.empty()) throw InputError("empty result set: no trial shards under " + root.string());
  return rs;
}

enum class SeriesMetric { gene_count, mean_lotb, essential_count };

inline std::optional<double> metric_value(const TrialRow& row, SeriesMetric m) {
  switch (m) {
    case SeriesMetric::gene_count: return row.gene_count;
    case SeriesMetric::mean_lotb: return row.mean_lotb;
    case SeriesMetric::essential_count:
      if (row.essential_count) return *row.essential_count;
      return std::nullopt;
  }
  return std::nullopt;
}

struct SeriesPoint {
  Condition condition;
  int generation = 0;
  std::size_t n = 0;
  double mean = 0.0;
  double ci_low = std::nan("");
  double ci_high = std::nan("");
};

inline std::vector<SeriesPoint> summarize_series(const ResultSet& rs, SeriesMetric metric) {
  std::vector<SeriesPoint> out;
  for (const auto& c : rs.plan.conditions()) {
    std::map<int, std::vector<double>> by_gen;
    for (const auto& t : rs.trials) {
      if (!(t.condition == c)) continue;
      for (const auto& row : t.rows) {
        if (auto v = metric_value(row, metric)) by_gen[row.generation].push_back(*v);
      }
    }
    for (const auto& [gen, values] : by_gen) {
      SeriesPoint p{c, gen, values.size(), stats::mean(values)};
      if (values.size() >= 2) {
        const auto ci = stats::mean_ci95(values);
        p.ci_low = ci.low;
        p.ci_high = ci.high;
      }
      out.push_back(p);
    }
  }
  return out;
}

/// Values of `metric` at the final generation, per trial, for one condition.
inline std::vector<double> final_values(const ResultSet& rs, const Condition& c, SeriesMetric metric) {
  std::vector<double> out;
  for (const auto& t : rs.trials) {
    if (!(t.condition == c) || t.rows.empty()) continue;
    if (auto v = metric_value(t.rows.back(), metric)) out.push_back(*v);
  }
  return out;
}

struct TestRow {
  std::string facet_id;
  std::string comparison;
  stats::StatResult result;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  double p_adjusted = std::nan("");
  bool significant = false;
};

inline void adjust(std::vector<TestRow>& tests, double alpha = 0.05) {
  const std::size_t m = tests.size();
  for (auto& t : tests) {
    if (std::isnan(t.result.p_value)) continue;
    const double p = t.result.p_value;
    t.p_adjusted = stats::bonferroni(std::span<const double>(&p, 1), std::max<std::size_t>(m, 1)).front();
    t.significant = t.p_adjusted < alpha;
  }
}

inline TestRow welch_row(std::string facet, std::string comparison, const std::vector<double>& a,
                         const std::vector<double>& b) {
  TestRow row{std::move(facet), std::move(comparison), {}, a.size(), b.size()};
  if (a.size() >= 2 && b.size() >= 2) {
    row.result = stats::welch_t(a, b);
  } else {
    row.result.degenerate = true;
  }
  return row;
}

/// CNE vs ZFEL at the final generation for every facet holding both regimes.
/// A result set with a single regime instead compares each condition with
/// all other conditions pooled.
inline std::vector<TestRow> compare_final(const ResultSet& rs, SeriesMetric metric) {
  std::vector<TestRow> tests;
  const auto facets = plan_facets(rs.plan);
  const bool both = rs.plan.regimes.size() >= 2;
  if (both) {
    for (auto f : facets) {
      Condition cne = f;
      cne.regime = Regime::cne;
      Condition zfel = f;
      zfel.regime = Regime::zfel;
      tests.push_back(welch_row(f.facet_id(), "cne_vs_zfel", final_values(rs, cne, metric),
                                final_values(rs, zfel, metric)));
    }
  } else {
    for (const auto& c : rs.plan.conditions()) {
      std::vector<double> rest;
      for (const auto& other : rs.plan.conditions()) {
        if (other == c) continue;
        const auto v = final_values(rs, other, metric);
        rest.insert(rest.end(), v.begin(), v.end());
      }
      tests.push_back(welch_row(c.facet_id(), c.id() + "_vs_rest", final_values(rs, c, metric), rest));
    }
  }
  adjust(tests);
  return tests;
}

inline std::string condition_columns(const Condition& c) {
  return c.id() + "," + std::string(to_string(c.game.attack_kind)) + "," + std::string(to_string(c.game.start_scheme)) +
         "," + (c.game.friendly_fire ? "on" : "off") + "," + std::string(to_string(c.origin)) + "," +
         std::string(to_string(c.regime));
}

inline constexpr std::string_view kConditionColumns = "condition_id,attack_kind,start_scheme,friendly_fire,origin,regime";
inline constexpr std::string_view kTestColumns = "facet_id,comparison,test,statistic,df,df2,n_a,n_b,p,p_adjusted,significant";

inline void write_tests(std::ostream& out, const std::vector<TestRow>& tests) {
  out << kTestColumns << '\n';
  for (const auto& t : tests) {
    out << t.facet_id << ',' << t.comparison << ',' << to_string(t.result.test) << ','
        << format_real(t.result.statistic) << ',' << format_real(t.result.df) << ',' << format_real(t.result.df2)
        << ',' << t.n_a << ',' << t.n_b << ',' << format_real(t.result.p_value) << ',' << format_real(t.p_adjusted)
        << ',' << (t.significant ? "true" : "false") << '\n';
  }
}

// Gene-count distributions: sampled vs evolved.

struct SampleTableRow {
  std::string facet_id;
  int gene_count = 0;
  long samples = 0;
  long qualifying = 0;
  double threshold = 1.0;
};

inline std::vector<SampleTableRow> read_sample_csv(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line) || line != kSampleCsvHeader) throw InputError(source + ": unexpected sample CSV header");
  std::vector<SampleTableRow> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 12) throw InputError(source + ": expected 12 columns");
    try {
      out.push_back({f[0], std::stoi(f[5]), std::stol(f[6]), std::stol(f[7]), std::stod(f[8])});
    } catch (const std::logic_error&) {
      throw InputError(source + ": malformed value");
    }
  }
  return out;
}

struct DistributionRow {
  std::string facet_id;
  std::string source;  // sampled | evolved
  int gene_count = 0;
  long count = 0;
  double rate = 0.0;
  double rescaled = 0.0;
};

inline constexpr double kCommonScale = 1000.0;

struct GeneCountDistribution {
  std::vector<DistributionRow> rows;
  std::vector<TestRow> tests;
};

/// K-S between the sampled qualifying gene counts and the final gene counts
/// of CNE trials, per facet, on the raw samples. Rates are rescaled to a
/// common total for plotting only.
inline GeneCountDistribution gene_count_distribution(const ResultSet& rs, const std::vector<SampleTableRow>& samples,
                                                     double threshold) {
  GeneCountDistribution out;
  for (auto f : plan_facets(rs.plan)) {
    Condition cne = f;
    cne.regime = Regime::cne;
    std::vector<SampleCell> cells;
    for (const auto& s : samples) {
      if (s.facet_id == f.facet_id() && std::abs(s.threshold - threshold) < 1e-12) {
        cells.push_back({s.gene_count, s.samples, s.qualifying, s.threshold});
      }
    }
    const auto evolved_d = final_values(rs, cne, SeriesMetric::gene_count);
    if (cells.empty() || evolved_d.empty()) continue;
    std::vector<int> evolved(evolved_d.begin(), evolved_d.end());

    std::map<int, long> sampled_hist;
    long sampled_total = 0;
    for (const auto& c : cells) {
      sampled_hist[c.gene_count] += c.qualifying;
      sampled_total += c.qualifying;
    }
    std::map<int, long> evolved_hist;
    for (int g : evolved) ++evolved_hist[g];
    auto emit = [&](const std::string& source, const std::map<int, long>& hist, long total) {
      for (const auto& [k, n] : hist) {
        const double rate = total > 0 ? static_cast<double>(n) / static_cast<double>(total) : 0.0;
        out.rows.push_back({f.facet_id(), source, k, n, rate, rate * kCommonScale});
      }
    };
    emit("sampled", sampled_hist, sampled_total);
    emit("evolved", evolved_hist, static_cast<long>(evolved.size()));

    TestRow t{f.facet_id(), "sampled_vs_evolved", {}, static_cast<std::size_t>(sampled_total), evolved.size()};
    t.result.test = stats::TestName::ks_two_sample;
    if (sampled_total > 0) {
      t.result = compare_distributions(cells, evolved);
    } else {
      t.result.degenerate = true;
    }
    out.tests.push_back(t);
  }
  adjust(out.tests);
  return out;
}

// Capability measures over checkpoint genomes.

enum class GenomeMeasure { robustness, plasticity, evolvability };

struct AnalysisOptions {
  int workers = 1;
  int robustness_reps = kRobustnessReps;
  int plasticity_layouts = kPlasticityConfigs;
  int evolvability_rounds = kEvolvabilityRounds;
  int evolvability_horizon = kEvolvabilityHorizon;
  /// Score threshold for gene_count_dist; defaults to the plan's.
  std::optional<double> threshold;
};

struct GenePoint {
  Condition condition;
  int trial = 0;
  int generation = 0;
  int gene_count = 0;
  double value = 0.0;
};

inline std::vector<GenePoint> measure_by_genes(const ResultSet& rs, GenomeMeasure measure, const AnalysisOptions& opt) {
  const ResultLayout layout{rs.root};
  Rng layout_rng(derive_seed(rs.plan.master_seed, "plasticity", 0));
  const auto layouts = plasticity_configs(rs.plan.base_arena(), opt.plasticity_layouts, layout_rng);

  std::vector<std::vector<GenePoint>> per_trial(rs.trials.size());
  parallel_for(rs.trials.size(), opt.workers, [&](std::size_t i) {
    const auto& ts = rs.trials[i];
    const auto path = layout.checkpoints(ts.condition, ts.trial);
    if (!fs::exists(path)) throw InputError("missing input: " + path.string());
    std::ifstream in(path);
    const auto checkpoints = read_checkpoints(in, path.string());
    const TrialConfig config = rs.plan.trial_config(ts.condition, ts.trial);
    for (const auto& [gen, genome] : checkpoints) {
      Rng rng(derive_seed(rs.plan.master_seed,
                          std::string(measure == GenomeMeasure::robustness ? "robustness/" : "evolvability/") +
                              ts.condition.id() + "/" + std::to_string(ts.trial),
                          static_cast<std::uint64_t>(gen)));
      double value = 0.0;
      switch (measure) {
        case GenomeMeasure::robustness: value = robustness(genome, config, opt.robustness_reps, rng); break;
        case GenomeMeasure::plasticity: value = plasticity(genome, layouts, config.game, config.arena); break;
        case GenomeMeasure::evolvability:
          value = evolvability(genome, config, layouts, opt.evolvability_rounds, opt.evolvability_horizon, rng);
          break;
      }
      per_trial[i].push_back({ts.condition, ts.trial, gen, static_cast<int>(genome.size()), value});
    }
  });
  std::vector<GenePoint> out;
  for (auto& v : per_trial) out.insert(out.end(), v.begin(), v.end());
  return out;
}

struct FitRow {
  Condition condition;
  std::size_t n = 0;
  double intercept = std::nan("");
  double slope = std::nan("");
};

inline std::vector<FitRow> fit_by_condition(const ExperimentPlan& plan, const std::vector<GenePoint>& points) {
  std::vector<FitRow> out;
  for (const auto& c : plan.conditions()) {
    std::vector<double> x, y;
    for (const auto& p : points) {
      if (p.condition == c) {
        x.push_back(p.gene_count);
        y.push_back(p.value);
      }
    }
    FitRow row{c, x.size()};
    if (x.size() >= 2 && std::adjacent_find(x.begin(), x.end(), std::not_equal_to<>()) != x.end()) {
      const auto fit = stats::least_squares(x, y);
      row.intercept = fit.intercept;
      row.slope = fit.slope;
    }
    out.push_back(row);
  }
  return out;
}

// Parameter sweeps.

struct SweepTableRow {
  std::string kind;
  std::string condition_id;
  double rate = 0.0;
  int generations = 0;
  int trial = 0;
  int gene_count = 0;
};

inline std::vector<SweepTableRow> read_sweep_csv(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line) || line != kSweepCsvHeader) throw InputError(source + ": unexpected sweep CSV header");
  std::vector<SweepTableRow> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 7) throw InputError(source + ": expected 7 columns");
    try {
      out.push_back({f[0], f[1], std::stod(f[2]), std::stoi(f[3]), std::stoi(f[4]), std::stoi(f[5])});
    } catch (const std::logic_error&) {
      throw InputError(source + ": malformed value");
    }
  }
  return out;
}

inline fs::path sweep_file(const fs::path& root, SweepKind kind) {
  return root / ("sweep_" + std::string(to_string(kind)) + ".csv");
}

inline fs::path sample_file(const fs::path& root) { return root / "samples.csv"; }

/// Runs one analysis over the result set at `root` and writes its tables.
/// Returns the files written.
inline std::vector<fs::path> analyze(const fs::path& root, AnalysisKind kind, const AnalysisOptions& opt = {}) {
  const ResultLayout layout{root};
  const fs::path dir = layout.analysis_dir();
  const fs::path values_path = dir / (std::string(to_string(kind)) + ".csv");
  const fs::path tests_path = dir / (std::string(to_string(kind)) + "_tests.csv");
  std::ostringstream values;
  std::ostringstream tests;

  if (kind == AnalysisKind::sweeps) {
    bool any = false;
    values << "kind,condition_id,rate,generations,n,mean,ci_low,ci_high\n";
    std::vector<TestRow> anovas;
    for (auto sk : {SweepKind::gene_event_rate, SweepKind::point_rate}) {
      const auto path = sweep_file(root, sk);
      if (!fs::exists(path)) continue;
      any = true;
      std::ifstream in(path);
      const auto rows = read_sweep_csv(in, path.string());
      std::map<std::pair<double, int>, std::vector<double>> cells;
      std::string cond_id;
      for (const auto& r : rows) {
        cells[{r.rate, r.generations}].push_back(r.gene_count);
        cond_id = r.condition_id;
      }
      std::vector<std::vector<double>> groups;
      for (auto it = cells.rbegin(); it != cells.rend(); ++it) {
        const auto& v = it->second;
        stats::Interval ci{stats::mean(v), std::nan(""), std::nan("")};
        if (v.size() >= 2) ci = stats::mean_ci95(v);
        values << to_string(sk) << ',' << cond_id << ',' << format_real(it->first.first) << ',' << it->first.second
               << ',' << v.size() << ',' << format_real(ci.mean) << ',' << format_real(ci.low) << ','
               << format_real(ci.high) << '\n';
        groups.push_back(v);
      }
      TestRow t{cond_id, std::string(to_string(sk)), {}, groups.size(), rows.size()};
      t.result.test = stats::TestName::anova_oneway;
      if (groups.size() >= 2) t.result = stats::anova_oneway(groups);
      anovas.push_back(t);
    }
    if (!any) {
      throw InputError("missing input: " + sweep_file(root, SweepKind::gene_event_rate).string() + " or " +
                       sweep_file(root, SweepKind::point_rate).string());
    }
    adjust(anovas);
    write_tests(tests, anovas);
  } else {
    const ResultSet rs = load_results(root);
    switch (kind) {
      case AnalysisKind::genes_over_time:
      case AnalysisKind::lotb_over_time:
      case AnalysisKind::essential_over_time: {
        const SeriesMetric metric = kind == AnalysisKind::genes_over_time   ? SeriesMetric::gene_count
                                    : kind == AnalysisKind::lotb_over_time ? SeriesMetric::mean_lotb
                                                                           : SeriesMetric::essential_count;
        values << kConditionColumns << ",generation,n,mean,ci_low,ci_high\n";
        for (const auto& p : summarize_series(rs, metric)) {
          values << condition_columns(p.condition) << ',' << p.generation << ',' << p.n << ','
                 << format_real(p.mean) << ',' << format_real(p.ci_low) << ',' << format_real(p.ci_high) << '\n';
        }
        write_tests(tests, compare_final(rs, metric));
        break;
      }
      case AnalysisKind::gene_count_dist: {
        const auto path = sample_file(root);
        if (!fs::exists(path)) throw InputError("missing input: " + path.string() + " (run the sample subcommand)");
        std::ifstream in(path);
        const auto samples = read_sample_csv(in, path.string());
        const auto dist = gene_count_distribution(rs, samples, opt.threshold.value_or(rs.plan.viability_threshold));
        values << "facet_id,source,gene_count,count,rate,rescaled\n";
        for (const auto& r : dist.rows) {
          values << r.facet_id << ',' << r.source << ',' << r.gene_count << ',' << r.count << ','
                 << format_real(r.rate) << ',' << format_real(r.rescaled) << '\n';
        }
        write_tests(tests, dist.tests);
        break;
      }
      case AnalysisKind::robustness_by_genes:
      case AnalysisKind::plasticity_by_genes:
      case AnalysisKind::evolvability_by_genes: {
        const GenomeMeasure m = kind == AnalysisKind::robustness_by_genes   ? GenomeMeasure::robustness
                                : kind == AnalysisKind::plasticity_by_genes ? GenomeMeasure::plasticity
                                                                            : GenomeMeasure::evolvability;
        const auto points = measure_by_genes(rs, m, opt);
        values << kConditionColumns << ",trial,generation,gene_count,value\n";
        for (const auto& p : points) {
          values << condition_columns(p.condition) << ',' << p.trial << ',' << p.generation << ',' << p.gene_count
                 << ',' << format_real(p.value) << '\n';
        }
        tests << kConditionColumns << ",n,intercept,slope\n";
        for (const auto& f : fit_by_condition(rs.plan, points)) {
          tests << condition_columns(f.condition) << ',' << f.n << ',' << format_real(f.intercept) << ','
                << format_real(f.slope) << '\n';
        }
        break;
      }
      case AnalysisKind::sweeps: break;
    }
  }
  write_atomically(values_path, values.str());
  write_atomically(tests_path, tests.str());
  return {values_path, tests_path};
}

}  // namespace qden
