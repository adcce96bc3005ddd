#pragma once

// On-disk result set: per-cell trial CSV shards, genome checkpoint files,
// and the manifest listing completed cells.
//
//   <out>/plan.txt                              copy of the plan
//   <out>/trials/<condition_id>/trial-NNNN.csv  one shard per (condition, trial)
//   <out>/genomes/<condition_id>/trial-NNNN.genomes
//   <out>/manifest.txt
//
// Shards are the commit point of a cell: they are written last, through a
// temporary file and a rename, so a shard on disk always means a finished cell.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qden/errors.hpp"
#include "qden/evolution.hpp"
#include "qden/genome.hpp"
#include "qden/plan.hpp"

namespace qden {

inline constexpr std::string_view kVersion = "0.2.0";
inline constexpr std::string_view kManifestHeader = "qden-manifest 1";

inline constexpr std::string_view kTrialCsvHeader =
    "condition_id,attack_kind,start_scheme,friendly_fire,origin,regime,trial,generation,score,"
    "gene_count,essential_count,mean_lotb,restarts";

namespace fs = std::filesystem;

/// %.9g; NaN and missing values are written as NA.
inline std::string format_real(double v) {
  if (std::isnan(v)) return "NA";
  if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.emplace_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline void write_trial_csv(std::ostream& out, const Condition& c, int trial, const TrialRecord& rec,
                            bool header = true) {
  if (header) out << kTrialCsvHeader << '\n';
  const std::string prefix = c.id() + "," + std::string(to_string(c.game.attack_kind)) + "," +
                             std::string(to_string(c.game.start_scheme)) + "," +
                             (c.game.friendly_fire ? "on" : "off") + "," +
                             std::string(to_string(c.origin)) + "," + std::string(to_string(c.regime)) +
                             "," + std::to_string(trial) + ",";
  for (const auto& row : rec.rows) {
    out << prefix << row.generation << ',' << row.score << ',' << row.gene_count << ','
        << (row.essential_count ? std::to_string(*row.essential_count) : "NA") << ','
        << (row.mean_lotb ? format_real(*row.mean_lotb) : "NA") << ',' << rec.restarts << '\n';
  }
}

/// One parsed shard row.
struct TrialCsvRow {
  std::string condition_id;
  int trial = 0;
  TrialRow row;
  int restarts = 0;
};

inline std::vector<TrialCsvRow> read_trial_csv(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line) || line != kTrialCsvHeader) {
    throw InputError(source + ": missing or unexpected trial CSV header");
  }
  std::vector<TrialCsvRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 13) throw InputError(source + ":" + std::to_string(line_no) + ": expected 13 columns");
    try {
      TrialCsvRow r;
      r.condition_id = f[0];
      r.trial = std::stoi(f[6]);
      r.row.generation = std::stoi(f[7]);
      r.row.score = std::stoi(f[8]);
      r.row.gene_count = std::stoi(f[9]);
      if (f[10] != "NA") r.row.essential_count = std::stoi(f[10]);
      if (f[11] != "NA") r.row.mean_lotb = std::stod(f[11]);
      r.restarts = std::stoi(f[12]);
      rows.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw InputError(source + ":" + std::to_string(line_no) + ": malformed value");
    }
  }
  return rows;
}

/// Checkpoint file: `# bootstrap_generations N`, then per checkpoint a
/// `# generation G` line followed by the genome text and a blank line.
inline void write_checkpoints(std::ostream& out, const TrialRecord& rec) {
  out << "# bootstrap_generations " << rec.bootstrap_generations << '\n';
  for (const auto& [gen, genome] : rec.checkpoints) {
    out << "# generation " << gen << '\n';
    write_genome(out, genome);
    out << '\n';
  }
}

inline std::vector<std::pair<int, Genome>> read_checkpoints(std::istream& in, const std::string& source) {
  std::vector<std::pair<int, Genome>> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.rfind("# bootstrap_generations", 0) == 0) continue;
    if (line.rfind("# generation ", 0) != 0) throw InputError(source + ": expected '# generation' line");
    int gen = 0;
    try {
      gen = std::stoi(line.substr(13));
    } catch (const std::logic_error&) {
      throw InputError(source + ": bad generation number");
    }
    out.emplace_back(gen, read_genome(in));
  }
  return out;
}

struct ResultLayout {
  fs::path root;

  fs::path plan_file() const { return root / "plan.txt"; }
  fs::path manifest_file() const { return root / "manifest.txt"; }
  fs::path analysis_dir() const { return root / "analysis"; }

  static std::string trial_stem(int trial) {
    std::ostringstream os;
    os << "trial-" << std::setw(4) << std::setfill('0') << trial;
    return os.str();
  }

  fs::path shard(const Condition& c, int trial) const {
    return root / "trials" / c.id() / (trial_stem(trial) + ".csv");
  }

  fs::path checkpoints(const Condition& c, int trial) const {
    return root / "genomes" / c.id() / (trial_stem(trial) + ".genomes");
  }
};

/// Writes `content` to `path` via a temporary file and rename.
inline void write_atomically(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw InputError("failed writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct ManifestEntry {
  std::string condition_id;
  int trial = 0;
  std::uint64_t seed = 0;
  int restarts = 0;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct Manifest {
  std::string plan_name;
  std::uint64_t master_seed = 0;
  std::string version{kVersion};
  std::vector<ManifestEntry> cells;
};

inline std::string render_manifest(const Manifest& m) {
  std::ostringstream os;
  os << kManifestHeader << '\n';
  os << "version " << m.version << '\n';
  os << "plan " << m.plan_name << '\n';
  os << "master_seed " << m.master_seed << '\n';
  for (const auto& c : m.cells) {
    os << "cell " << c.condition_id << ' ' << c.trial << " seed " << c.seed << " restarts " << c.restarts << '\n';
  }
  return os.str();
}

/// Parses a manifest; any deviation from the format is a data error.
inline Manifest parse_manifest(std::istream& in, const std::string& source) {
  Manifest m;
  std::string line;
  auto fail = [&](const std::string& why) -> void { throw InputError(source + ": corrupt manifest: " + why); };
  if (!std::getline(in, line) || line != kManifestHeader) fail("bad header");
  auto keyed = [&](const std::string& key) {
    if (!std::getline(in, line) || line.rfind(key + " ", 0) != 0) fail("missing '" + key + "' line");
    return line.substr(key.size() + 1);
  };
  m.version = keyed("version");
  m.plan_name = keyed("plan");
  try {
    m.master_seed = std::stoull(keyed("master_seed"));
  } catch (const std::logic_error&) {
    fail("bad master_seed");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tag, seed_kw, restarts_kw, extra;
    ManifestEntry e;
    if (!(ls >> tag >> e.condition_id >> e.trial >> seed_kw >> e.seed >> restarts_kw >> e.restarts) ||
        tag != "cell" || seed_kw != "seed" || restarts_kw != "restarts" || (ls >> extra)) {
      fail("malformed cell line '" + line + "'");
    }
    m.cells.push_back(e);
  }
  return m;
}

/// Scans the shards on disk and returns the manifest they imply.
inline Manifest manifest_from_disk(const ResultLayout& layout, const ExperimentPlan& plan) {
  Manifest m;
  m.plan_name = plan.name;
  m.master_seed = plan.master_seed;
  for (const auto& c : plan.conditions()) {
    for (int t = 0; t < plan.trials_per_condition; ++t) {
      const auto path = layout.shard(c, t);
      if (!fs::exists(path)) continue;
      std::ifstream in(path);
      const auto rows = read_trial_csv(in, path.string());
      m.cells.push_back({c.id(), t, plan.trial_seed(c, t), rows.empty() ? 0 : rows.back().restarts});
    }
  }
  return m;
}

}  // namespace qden
