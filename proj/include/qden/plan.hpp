#pragma once

// Experiment plans: the condition matrix plus the shared trial settings.
//
// Plan files are flat `key = value` text. The first non-comment line must be
// the version header `qden-plan 1`; `#` starts a comment line; unknown keys
// are errors. List values are comma separated. See README.md for the schema.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qden/errors.hpp"
#include "qden/evolution.hpp"
#include "qden/metrics.hpp"

namespace qden {

inline constexpr std::string_view kPlanHeader = "qden-plan 1";

struct Condition {
  GameConditions game;
  GeneOrigin origin = GeneOrigin::duplication;
  Regime regime = Regime::cne;

  /// Condition without the regime axis; CNE and ZFEL are compared per facet.
  std::string facet_id() const {
    std::string id;
    id += to_string(game.attack_kind);
    id += '-';
    id += to_string(game.start_scheme);
    id += game.friendly_fire ? "-ff-" : "-safe-";
    id += to_string(origin);
    return id;
  }

  std::string id() const { return facet_id() + "-" + std::string(to_string(regime)); }

  friend bool operator==(const Condition&, const Condition&) = default;
};

struct ExperimentPlan {
  std::string name = "desk";
  std::uint64_t master_seed = 1;
  std::vector<AttackKind> attack_kinds{AttackKind::melee, AttackKind::ranged};
  std::vector<StartScheme> start_schemes{StartScheme::same, StartScheme::corners, StartScheme::random};
  std::vector<bool> friendly_fire{false, true};
  std::vector<GeneOrigin> origins{GeneOrigin::duplication, GeneOrigin::de_novo};
  std::vector<Regime> regimes{Regime::cne, Regime::zfel};
  int trials_per_condition = 16;
  int neutral_generations = 1024;
  int metric_stride = 8;
  double point_rate = 0.01;
  double gene_event_rate = 0.01;
  int population_size = 1;
  double viability_threshold = 1.0;
  std::optional<int> fixed_gene_count;
  /// Draw a fresh opponent layout per trial index instead of the default ring.
  bool random_arena = false;
  int grid_size = 8;
  int opponent_count = 4;
  int opponent_health = 3;
  int player_health = 5;
  int gene_length = kDefaultGeneLength;
  /// Stuck-trial policy; see TrialConfig.
  long attempt_cap = 100'000;
  long bootstrap_generation_cap = 100'000;
  int max_restarts = 16;

  /// Cross product in axis order attack x start x friendly fire x origin x regime.
  std::vector<Condition> conditions() const {
    std::vector<Condition> out;
    for (auto a : attack_kinds)
      for (auto s : start_schemes)
        for (bool ff : friendly_fire)
          for (auto o : origins)
            for (auto r : regimes) out.push_back({{a, s, ff}, o, r});
    return out;
  }

  std::optional<Condition> find_condition(std::string_view id) const {
    for (const auto& c : conditions()) {
      if (c.id() == id) return c;
    }
    return std::nullopt;
  }

  Arena base_arena() const {
    Arena arena;
    arena.grid.size_n = grid_size;
    arena.grid.max_ticks = gene_length / 2;
    arena.starts.size_n = grid_size;
    arena.starts.numbered = default_start_positions(grid_size);
    arena.opponents = default_opponents(opponent_health);
    arena.player_health = player_health;
    return arena;
  }

  /// Arena for a trial index. Random layouts depend only on the trial index,
  /// so trial i faces the same layout in every condition.
  Arena arena_for_trial(int trial) const {
    Arena arena = base_arena();
    if (random_arena) {
      Rng rng(derive_seed(master_seed, "arena", static_cast<std::uint64_t>(trial)));
      arena.opponents = random_opponents(opponent_count, arena.grid, arena.starts.numbered,
                                         opponent_health, rng);
    }
    return arena;
  }

  std::uint64_t trial_seed(const Condition& c, int trial) const {
    return derive_seed(master_seed, c.id(), static_cast<std::uint64_t>(trial));
  }

  TrialConfig trial_config(const Condition& c, int trial) const {
    TrialConfig t;
    t.game = c.game;
    t.origin = c.origin;
    t.regime = c.regime;
    t.point_rate = point_rate;
    t.gene_event_rate = gene_event_rate;
    t.population_size = population_size;
    t.neutral_generations = neutral_generations;
    t.viability_threshold = viability_threshold;
    t.fixed_gene_count = fixed_gene_count;
    t.seed = trial_seed(c, trial);
    t.arena = arena_for_trial(trial);
    t.gene_length = gene_length;
    t.metric_stride = metric_stride;
    t.attempt_cap = attempt_cap;
    t.bootstrap_generation_cap = bootstrap_generation_cap;
    t.max_restarts = max_restarts;
    return t;
  }

  void validate() const {
    if (name.empty() || name.find_first_of(" \t/") != std::string::npos) {
      throw ConfigError("plan name must be non-empty without spaces or slashes");
    }
    if (attack_kinds.empty() || start_schemes.empty() || friendly_fire.empty() || origins.empty() ||
        regimes.empty()) {
      throw ConfigError("every condition axis needs at least one value");
    }
    if (trials_per_condition < 1) throw ConfigError("trials_per_condition must be positive");
    if (opponent_count < 1) throw ConfigError("opponent_count must be positive");
    if (opponent_health < 1) throw ConfigError("opponent_health must be positive");
    trial_config(conditions().front(), 0).validate();
  }
};

/// Desk-scale profile: 16 trials x 1,024 generations, metrics every 8.
inline ExperimentPlan desk_profile() { return ExperimentPlan{}; }

/// Full-scale profile: 64 trials x 4,096 generations, metrics every generation.
inline ExperimentPlan paper_profile() {
  ExperimentPlan p;
  p.name = "paper";
  p.trials_per_condition = 64;
  p.neutral_generations = 4096;
  p.metric_stride = 1;
  return p;
}

namespace plan_detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto piece = trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start));
    if (!piece.empty()) out.push_back(piece);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <class T>
std::string join(const std::vector<T>& xs, auto&& fmt) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += fmt(xs[i]);
  }
  return out;
}

inline long long parse_int(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long x = 0;
  try {
    x = std::stoll(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw ConfigError("plan key '" + key + "': expected an integer, got '" + v + "'");
  return x;
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  std::uint64_t x = 0;
  try {
    x = std::stoull(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty() || v.front() == '-') {
    throw ConfigError("plan key '" + key + "': expected an unsigned integer, got '" + v + "'");
  }
  return x;
}

inline double parse_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw ConfigError("plan key '" + key + "': expected a number, got '" + v + "'");
  return x;
}

}  // namespace plan_detail

inline AttackKind parse_attack_kind(const std::string& s) {
  if (s == "melee") return AttackKind::melee;
  if (s == "ranged") return AttackKind::ranged;
  throw ConfigError("unknown attack kind '" + s + "'");
}

inline StartScheme parse_start_scheme(const std::string& s) {
  if (s == "same") return StartScheme::same;
  if (s == "corners") return StartScheme::corners;
  if (s == "random") return StartScheme::random;
  throw ConfigError("unknown start scheme '" + s + "'");
}

inline bool parse_friendly_fire(const std::string& s) {
  if (s == "ff" || s == "on") return true;
  if (s == "safe" || s == "off") return false;
  throw ConfigError("unknown friendly fire value '" + s + "' (use ff or safe)");
}

inline GeneOrigin parse_origin(const std::string& s) {
  if (s == "duplication") return GeneOrigin::duplication;
  if (s == "de_novo") return GeneOrigin::de_novo;
  throw ConfigError("unknown gene origin '" + s + "'");
}

inline Regime parse_regime(const std::string& s) {
  if (s == "cne") return Regime::cne;
  if (s == "zfel") return Regime::zfel;
  throw ConfigError("unknown regime '" + s + "'");
}

inline ExperimentPlan parse_plan(std::istream& in) {
  using namespace plan_detail;
  ExperimentPlan plan;
  std::string line;
  bool header_seen = false;
  std::map<std::string, int> seen;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (!header_seen) {
      if (t != kPlanHeader) throw ConfigError("plan must start with '" + std::string(kPlanHeader) + "'");
      header_seen = true;
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("plan line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string value = trim(std::string_view(t).substr(eq + 1));
    if (seen[key]++) throw ConfigError("plan key '" + key + "' given twice");
    auto list_of = [&](auto parse) {
      std::vector<decltype(parse(std::string{}))> out;
      for (const auto& v : split_list(value)) out.push_back(parse(v));
      if (out.empty()) throw ConfigError("plan key '" + key + "' needs at least one value");
      return out;
    };
    if (key == "name") plan.name = value;
    else if (key == "master_seed") plan.master_seed = parse_u64(key, value);
    else if (key == "attack_kinds") plan.attack_kinds = list_of(parse_attack_kind);
    else if (key == "start_schemes") plan.start_schemes = list_of(parse_start_scheme);
    else if (key == "friendly_fire") plan.friendly_fire = list_of(parse_friendly_fire);
    else if (key == "origins") plan.origins = list_of(parse_origin);
    else if (key == "regimes") plan.regimes = list_of(parse_regime);
    else if (key == "trials_per_condition") plan.trials_per_condition = static_cast<int>(parse_int(key, value));
    else if (key == "neutral_generations") plan.neutral_generations = static_cast<int>(parse_int(key, value));
    else if (key == "metric_stride") plan.metric_stride = static_cast<int>(parse_int(key, value));
    else if (key == "point_rate") plan.point_rate = parse_double(key, value);
    else if (key == "gene_event_rate") plan.gene_event_rate = parse_double(key, value);
    else if (key == "population_size") plan.population_size = static_cast<int>(parse_int(key, value));
    else if (key == "viability_threshold") plan.viability_threshold = parse_double(key, value);
    else if (key == "fixed_gene_count") {
      if (value == "none") plan.fixed_gene_count.reset();
      else plan.fixed_gene_count = static_cast<int>(parse_int(key, value));
    } else if (key == "arena") {
      if (value == "fixed") plan.random_arena = false;
      else if (value == "random") plan.random_arena = true;
      else throw ConfigError("plan key 'arena' must be fixed or random");
    } else if (key == "grid_size") plan.grid_size = static_cast<int>(parse_int(key, value));
    else if (key == "opponent_count") plan.opponent_count = static_cast<int>(parse_int(key, value));
    else if (key == "opponent_health") plan.opponent_health = static_cast<int>(parse_int(key, value));
    else if (key == "player_health") plan.player_health = static_cast<int>(parse_int(key, value));
    else if (key == "gene_length") plan.gene_length = static_cast<int>(parse_int(key, value));
    else if (key == "attempt_cap") plan.attempt_cap = static_cast<long>(parse_int(key, value));
    else if (key == "bootstrap_generation_cap") plan.bootstrap_generation_cap = static_cast<long>(parse_int(key, value));
    else if (key == "max_restarts") plan.max_restarts = static_cast<int>(parse_int(key, value));
    else throw ConfigError("unknown plan key '" + key + "'");
  }
  if (!header_seen) throw ConfigError("plan is empty");
  plan.validate();
  return plan;
}

inline ExperimentPlan load_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open plan file " + path);
  return parse_plan(in);
}

inline void write_plan(std::ostream& out, const ExperimentPlan& p) {
  using plan_detail::join;
  auto str = [](auto v) { return std::string(to_string(v)); };
  auto num = [](double d) {
    std::ostringstream os;
    os.precision(17);
    os << d;
    return os.str();
  };
  out << kPlanHeader << '\n';
  out << "name = " << p.name << '\n';
  out << "master_seed = " << p.master_seed << '\n';
  out << "attack_kinds = " << join(p.attack_kinds, str) << '\n';
  out << "start_schemes = " << join(p.start_schemes, str) << '\n';
  out << "friendly_fire = " << join(p.friendly_fire, [](bool ff) { return std::string(ff ? "ff" : "safe"); }) << '\n';
  out << "origins = " << join(p.origins, str) << '\n';
  out << "regimes = " << join(p.regimes, str) << '\n';
  out << "trials_per_condition = " << p.trials_per_condition << '\n';
  out << "neutral_generations = " << p.neutral_generations << '\n';
  out << "metric_stride = " << p.metric_stride << '\n';
  out << "point_rate = " << num(p.point_rate) << '\n';
  out << "gene_event_rate = " << num(p.gene_event_rate) << '\n';
  out << "population_size = " << p.population_size << '\n';
  out << "viability_threshold = " << num(p.viability_threshold) << '\n';
  out << "fixed_gene_count = " << (p.fixed_gene_count ? std::to_string(*p.fixed_gene_count) : "none") << '\n';
  out << "arena = " << (p.random_arena ? "random" : "fixed") << '\n';
  out << "grid_size = " << p.grid_size << '\n';
  out << "opponent_count = " << p.opponent_count << '\n';
  out << "opponent_health = " << p.opponent_health << '\n';
  out << "player_health = " << p.player_health << '\n';
  out << "gene_length = " << p.gene_length << '\n';
  out << "attempt_cap = " << p.attempt_cap << '\n';
  out << "bootstrap_generation_cap = " << p.bootstrap_generation_cap << '\n';
  out << "max_restarts = " << p.max_restarts << '\n';
}

}  // namespace qden
