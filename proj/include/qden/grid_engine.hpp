#pragma once

// Deterministic simulation of a single Quandary Den session.
//
// Coordinates are (x, y) with x growing to the right and y growing upward,
// so `up` is y + 1. The grid has hard edges: moves off the grid are no-ops and
// rays stop at the boundary.
//
// Within a tick, living players act in priority order (gene order), then the
// opponents fire in configuration order. Each action is resolved completely,
// deaths included, before the next one starts, and the end conditions are
// checked after every resolution.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qden/errors.hpp"

namespace qden {

enum class Direction : std::uint8_t { up, right, down, left };
enum class Verb : std::uint8_t { move, attack };
enum class AttackKind : std::uint8_t { melee, ranged };
enum class Side : std::uint8_t { player, opponent };
enum class EndReason : std::uint8_t { opponents_depleted, players_depleted, actions_exhausted };

inline constexpr std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::up: return "up";
    case Direction::right: return "right";
    case Direction::down: return "down";
    case Direction::left: return "left";
  }
  return "?";
}

inline constexpr std::string_view to_string(Verb v) { return v == Verb::move ? "move" : "attack"; }

inline constexpr std::string_view to_string(AttackKind k) {
  return k == AttackKind::melee ? "melee" : "ranged";
}

inline constexpr std::string_view to_string(EndReason r) {
  switch (r) {
    case EndReason::opponents_depleted: return "opponents_depleted";
    case EndReason::players_depleted: return "players_depleted";
    case EndReason::actions_exhausted: return "actions_exhausted";
  }
  return "?";
}

struct Position {
  int x = 0;
  int y = 0;
  friend constexpr auto operator<=>(const Position&, const Position&) = default;
};

inline constexpr Position step(Position p, Direction d) {
  switch (d) {
    case Direction::up: return {p.x, p.y + 1};
    case Direction::right: return {p.x + 1, p.y};
    case Direction::down: return {p.x, p.y - 1};
    case Direction::left: return {p.x - 1, p.y};
  }
  return p;
}

struct Action {
  Direction direction = Direction::up;
  Verb verb = Verb::move;
  friend constexpr bool operator==(const Action&, const Action&) = default;
};

struct GridConfig {
  int size_n = 8;
  int max_ticks = 256;

  constexpr bool contains(Position p) const {
    return p.x >= 0 && p.y >= 0 && p.x < size_n && p.y < size_n;
  }

  void validate() const {
    if (size_n < 2) throw ConfigError("grid size must be at least 2");
    if (max_ticks < 1) throw ConfigError("max_ticks must be positive");
  }
};

struct OpponentSpec {
  Position position;
  Direction fire_direction = Direction::up;
  int initial_health = 3;
  friend bool operator==(const OpponentSpec&, const OpponentSpec&) = default;
};

struct OpponentConfig {
  std::vector<OpponentSpec> opponents;
  friend bool operator==(const OpponentConfig&, const OpponentConfig&) = default;
};

struct PlayerSpec {
  std::vector<Action> actions;
  Position start;
  AttackKind attack_kind = AttackKind::ranged;
};

struct Rules {
  GridConfig grid;
  bool friendly_fire = false;
  int player_health = 5;
};

struct SessionOutcome {
  int score = 0;
  int ticks_elapsed = 0;
  EndReason end_reason = EndReason::actions_exhausted;
  int damage_to_opponents = 0;
  int player_health_lost = 0;
  /// Players in priority order, then opponents in configuration order.
  std::vector<int> per_character_final_health;
  /// Stopped early because the score could no longer reach the caller's
  /// bound; the other fields describe the session up to that point.
  bool abandoned = false;

  friend bool operator==(const SessionOutcome&, const SessionOutcome&) = default;
};

/// Sum of opponent starting health: the score of a flawless win.
inline int compute_max_score(const OpponentConfig& opponents) {
  return std::accumulate(opponents.opponents.begin(), opponents.opponents.end(), 0,
                         [](int acc, const OpponentSpec& o) { return acc + o.initial_health; });
}

struct Character {
  int id = 0;
  Side side = Side::player;
  AttackKind attack_kind = AttackKind::ranged;
  Position position;
  int health = 0;
  int priority = 0;  // lower resolves first and is hit first within a square
  std::span<const Action> actions;  // players only
  Direction fire_direction = Direction::up;  // opponents only

  bool alive() const { return health > 0; }
};

/// Mutable state of a running session. Characters are stored with players
/// first (by priority) and then opponents, so id == index == priority.
struct SessionState {
  Rules rules;
  std::vector<Character> characters;
  int num_players = 0;
  int players_alive = 0;
  int opponents_alive = 0;
  int damage_to_opponents = 0;
  int player_health_lost = 0;

  /// Whether `shooter` is able to damage `target`.
  bool can_hit(const Character& shooter, const Character& target) const {
    if (!target.alive() || target.id == shooter.id) return false;
    if (shooter.side == Side::opponent) return target.side == Side::player;
    return target.side == Side::opponent || rules.friendly_fire;
  }
};

inline SessionState make_session_state(std::span<const PlayerSpec> team,
                                       const OpponentConfig& opponents, const Rules& rules) {
  rules.grid.validate();
  if (team.empty()) throw ConfigError("team must contain at least one player");
  if (rules.player_health < 1) throw ConfigError("player health must be positive");

  SessionState state;
  state.rules = rules;
  state.characters.reserve(team.size() + opponents.opponents.size());
  int id = 0;
  for (const auto& p : team) {
    if (!rules.grid.contains(p.start)) {
      throw ConfigError("player start (" + std::to_string(p.start.x) + "," +
                        std::to_string(p.start.y) + ") is off the grid");
    }
    if (p.actions.empty()) throw ConfigError("player action list is empty");
    Character c;
    c.id = c.priority = id++;
    c.side = Side::player;
    c.attack_kind = p.attack_kind;
    c.position = p.start;
    c.health = rules.player_health;
    c.actions = p.actions;
    state.characters.push_back(c);
  }
  for (const auto& o : opponents.opponents) {
    if (!rules.grid.contains(o.position)) throw ConfigError("opponent position is off the grid");
    if (o.initial_health < 0) throw ConfigError("opponent health must be non-negative");
    Character c;
    c.id = c.priority = id++;
    c.side = Side::opponent;
    c.attack_kind = AttackKind::ranged;
    c.position = o.position;
    c.health = o.initial_health;
    c.fire_direction = o.fire_direction;
    state.characters.push_back(c);
  }
  state.num_players = static_cast<int>(team.size());
  state.players_alive = state.num_players;
  state.opponents_alive = static_cast<int>(std::count_if(
      state.characters.begin() + state.num_players, state.characters.end(),
      [](const Character& c) { return c.alive(); }));
  return state;
}

/// First character hit by a ray leaving `origin` in `direction`, or nullopt
/// when the ray reaches the boundary. The origin square itself is never hit.
/// Characters the shooter cannot damage are transparent; within the first
/// square holding a hittable character, the highest-priority one is hit.
inline std::optional<int> trace_ray(const SessionState& state, Position origin,
                                    Direction direction, const Character& shooter) {
  std::optional<int> best;
  int best_distance = 0;
  for (const auto& c : state.characters) {
    if (!state.can_hit(shooter, c)) continue;
    int distance = 0;
    switch (direction) {
      case Direction::up:
        if (c.position.x != origin.x) continue;
        distance = c.position.y - origin.y;
        break;
      case Direction::down:
        if (c.position.x != origin.x) continue;
        distance = origin.y - c.position.y;
        break;
      case Direction::left:
        if (c.position.y != origin.y) continue;
        distance = origin.x - c.position.x;
        break;
      case Direction::right:
        if (c.position.y != origin.y) continue;
        distance = c.position.x - origin.x;
        break;
    }
    if (distance <= 0) continue;
    // Characters are visited in priority order, so strict < keeps the
    // highest-priority occupant of the nearest square.
    if (!best || distance < best_distance) {
      best = c.id;
      best_distance = distance;
    }
  }
  return best;
}

/// Highest-priority hittable character on the square adjacent to the shooter.
inline std::optional<int> melee_target(const SessionState& state, const Character& shooter,
                                       Direction direction) {
  const Position square = step(shooter.position, direction);
  if (!state.rules.grid.contains(square)) return std::nullopt;
  for (const auto& c : state.characters) {
    if (c.position == square && state.can_hit(shooter, c)) return c.id;
  }
  return std::nullopt;
}

namespace detail {

inline void apply_hit(SessionState& state, const Character& shooter, Character& target) {
  --target.health;
  if (target.side == Side::player) {
    ++state.player_health_lost;
    if (!target.alive()) --state.players_alive;
  } else {
    if (shooter.side == Side::player) ++state.damage_to_opponents;
    if (!target.alive()) --state.opponents_alive;
  }
}

inline void resolve_attack(SessionState& state, int shooter_id, Direction direction, int tick,
                           std::string_view label, std::ostream* trace) {
  const Character& shooter = state.characters[shooter_id];
  const std::optional<int> hit = shooter.attack_kind == AttackKind::melee
                                     ? melee_target(state, shooter, direction)
                                     : trace_ray(state, shooter.position, direction, shooter);
  if (hit) {
    Character& target = state.characters[*hit];
    apply_hit(state, shooter, target);
    if (trace) {
      *trace << tick << ' ' << shooter_id << ' ' << label << " hit " << target.id << ' '
             << target.health << '\n';
    }
  } else if (trace) {
    *trace << tick << ' ' << shooter_id << ' ' << label << " miss\n";
  }
}

inline std::optional<EndReason> check_end(const SessionState& state) {
  if (state.opponents_alive == 0) return EndReason::opponents_depleted;
  if (state.players_alive == 0) return EndReason::players_depleted;
  return std::nullopt;
}

inline SessionOutcome finish(const SessionState& state, int ticks, EndReason reason,
                             std::ostream* trace) {
  SessionOutcome out;
  out.ticks_elapsed = ticks;
  out.end_reason = reason;
  out.damage_to_opponents = state.damage_to_opponents;
  out.player_health_lost = state.player_health_lost;
  out.score = out.damage_to_opponents - out.player_health_lost;
  out.per_character_final_health.reserve(state.characters.size());
  for (const auto& c : state.characters) out.per_character_final_health.push_back(c.health);
  if (trace) *trace << "end " << to_string(reason) << " ticks " << ticks << " score " << out.score << '\n';
  return out;
}

}  // namespace detail

/// Runs one session to completion. Pure function of its inputs.
///
/// When `trace` is given, one line is written per resolved action:
///   <tick> <actor> <verb>-<direction> <resolution> [<target> <target health>]
/// where resolution is moved|blocked for moves and hit|miss for attacks,
/// followed by a final `end <reason> ticks <n> score <s>` line. Ticks are
/// 1-based; actor and target ids are players in priority order followed by
/// opponents in configuration order.
///
/// With `give_up_below`, the session stops as soon as the final score is
/// certain to fall below that bound (max score minus health already lost);
/// the outcome is then flagged `abandoned` and its score is below the bound.
inline SessionOutcome run_session(std::span<const PlayerSpec> team, const OpponentConfig& opponents,
                                  const Rules& rules, std::ostream* trace = nullptr,
                                  std::optional<int> give_up_below = std::nullopt) {
  SessionState state = make_session_state(team, opponents, rules);
  if (state.opponents_alive == 0) return detail::finish(state, 0, EndReason::opponents_depleted, trace);
  const int ceiling = compute_max_score(opponents);
  auto hopeless = [&] { return give_up_below && ceiling - state.player_health_lost < *give_up_below; };
  auto give_up = [&](int tick) {
    SessionOutcome out = detail::finish(state, tick, EndReason::actions_exhausted, nullptr);
    out.abandoned = true;
    if (trace) *trace << "abandoned ticks " << tick << " score " << out.score << '\n';
    return out;
  };
  if (hopeless()) return give_up(0);

  const int total = static_cast<int>(state.characters.size());
  std::string label;
  for (int t = 0; t < rules.grid.max_ticks; ++t) {
    const int tick = t + 1;
    for (int id = 0; id < state.num_players; ++id) {
      Character& p = state.characters[id];
      if (!p.alive() || t >= static_cast<int>(p.actions.size())) continue;
      const Action a = p.actions[t];
      if (trace) label = std::string(to_string(a.verb)) + "-" + std::string(to_string(a.direction));
      if (a.verb == Verb::move) {
        const Position next = step(p.position, a.direction);
        const bool inside = rules.grid.contains(next);
        if (inside) p.position = next;
        if (trace) *trace << tick << ' ' << id << ' ' << label << (inside ? " moved\n" : " blocked\n");
      } else {
        detail::resolve_attack(state, id, a.direction, tick, label, trace);
        if (auto end = detail::check_end(state)) return detail::finish(state, tick, *end, trace);
        if (hopeless()) return give_up(tick);
      }
    }
    for (int id = state.num_players; id < total; ++id) {
      const Character& o = state.characters[id];
      if (!o.alive()) continue;
      if (trace) label = "attack-" + std::string(to_string(o.fire_direction));
      detail::resolve_attack(state, id, o.fire_direction, tick, label, trace);
      if (auto end = detail::check_end(state)) return detail::finish(state, tick, *end, trace);
      if (hopeless()) return give_up(tick);
    }
    bool exhausted = true;
    for (int id = 0; id < state.num_players; ++id) {
      const Character& p = state.characters[id];
      if (p.alive() && tick < static_cast<int>(p.actions.size())) {
        exhausted = false;
        break;
      }
    }
    if (exhausted) return detail::finish(state, tick, EndReason::actions_exhausted, trace);
  }
  return detail::finish(state, rules.grid.max_ticks, EndReason::actions_exhausted, trace);
}

/// The default arena: an 8x8 grid with four opponents on an interior ring,
/// each firing outward along one arm of a pinwheel.
inline OpponentConfig default_opponents(int health = 3) {
  return {{{{2, 2}, Direction::right, health},
           {{5, 2}, Direction::down, health},
           {{5, 5}, Direction::left, health},
           {{2, 5}, Direction::up, health}}};
}

/// Numbered start positions 1-4 of the default arena.
inline std::vector<Position> default_start_positions(int size_n = 8) {
  const int m = size_n - 1;
  return {{0, 0}, {m, m}, {0, m}, {m, 0}};
}

}  // namespace qden
