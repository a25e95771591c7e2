#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "netsup/automaton.hpp"
#include "netsup/networked.hpp"
#include "netsup/ops.hpp"

namespace netsup {

/// splitmix64 finalizer.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based stream: the draw for (seed, counter) never depends on
/// earlier draws.
inline std::uint64_t random_at(std::uint64_t seed, std::uint64_t counter) {
  return splitmix64(splitmix64(seed) ^ splitmix64(counter * 0x632be59bd9b4e019ULL + 1));
}

/// Uniform integer in [0, n) without modulo bias.
inline std::size_t uniform_index(std::uint64_t seed, std::uint64_t counter, std::size_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  for (std::uint64_t attempt = 0;; ++attempt) {
    std::uint64_t r = random_at(seed, counter * 64 + attempt);
    if (r < limit) return static_cast<std::size_t>(r % n);
  }
}

struct Snapshot {
  std::string plant, oc, cc, ce, supervisor;
  bool operator==(const Snapshot&) const = default;
};

struct TraceStep {
  EventId event;  // empty for a silent plant move
  Snapshot after;
  bool operator==(const TraceStep&) const = default;
};

enum class Outcome { kCompleted, kSafetyViolation, kDeadlock };

inline const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::kCompleted: return "completed";
    case Outcome::kSafetyViolation: return "safety_violation";
    case Outcome::kDeadlock: return "deadlock";
  }
  return "completed";
}

struct Trace {
  std::uint64_t seed = 0;
  int horizon = 0;
  Snapshot initial;
  std::vector<TraceStep> steps;
  Outcome outcome = Outcome::kCompleted;
  int outcome_step = 0;  // number of steps taken when the run ended
  bool operator==(const Trace&) const = default;
};

/// The networked plant under a supervisor, explored state by state.
/// A state is (P state, supervisor state, state of the deterministic lifted
/// spec or -1 once the run left it).
class ClosedLoopSystem {
 public:
  struct State {
    int p, s, spec, closed;  // closed: state in the closed-language tracker
    auto operator<=>(const State&) const = default;
  };
  struct Move {
    int event;  // P event index or kSilent
    State to;
  };

  ClosedLoopSystem(const NetworkedPlant& p, const Automaton& supervisor, const Automaton& spec)
      : p_(p), s_(supervisor) {
    for (const auto& e : supervisor.events())
      if (!p.alphabet.is_observable(e))
        throw PreconditionError("supervisor event '" + e + "' is not observable to the supervisor");
    auto lifted = lift_spec(p, spec);
    spec_ = detail::subset_construction(lifted, p.automaton.events());
    closed_ = detail::subset_construction(trim(lifted), p.automaton.events());
    sup_index_.resize(static_cast<std::size_t>(p.automaton.num_events()), -2);
    for (int e = 0; e < p.automaton.num_events(); ++e) {
      const auto& name = p.automaton.event_name(e);
      if (p.alphabet.is_observable(name)) {
        auto se = supervisor.find_event(name);
        sup_index_[static_cast<std::size_t>(e)] = se ? *se : -1;  // -1: observable but never enabled
      }
    }
  }

  bool empty() const { return p_.automaton.empty() || s_.empty(); }

  State initial() const {
    return {p_.automaton.initial(), s_.initial(), spec_.initial, closed_.initial};
  }

  std::vector<Move> moves(const State& x) const {
    std::vector<Move> r;
    for (const Edge& e : p_.automaton.out(x.p)) {
      if (e.event == kSilent) {
        r.push_back({kSilent, {e.dst, x.s, x.spec, x.closed}});
        continue;
      }
      int si = sup_index_[static_cast<std::size_t>(e.event)];
      int ns = x.spec < 0 ? -1 : spec_.step(x.spec, e.event);
      int nc = x.closed < 0 ? -1 : closed_.step(x.closed, e.event);
      if (si == -2) {
        r.push_back({e.event, {e.dst, x.s, ns, nc}});
      } else if (si >= 0) {
        for (int t : s_.successors(x.s, si)) r.push_back({e.event, {e.dst, t, ns, nc}});
      }
    }
    return r;
  }

  bool marked(const State& x) const { return p_.automaton.is_marked(x.p) && s_.is_marked(x.s); }
  bool outside_closed_spec(const State& x) const { return x.closed < 0; }
  bool unsafe_marked(const State& x) const {
    return marked(x) && (x.spec < 0 || !spec_.marked[static_cast<std::size_t>(x.spec)]);
  }

  Snapshot snapshot(const State& x) const {
    const auto& t = p_.tuples[static_cast<std::size_t>(x.p)];
    return {p_.components[0].state_name(t[0]), p_.components[1].state_name(t[1]),
            p_.components[2].state_name(t[2]), p_.components[3].state_name(t[3]), s_.state_name(x.s)};
  }

  EventId event_name(int e) const { return e == kSilent ? EventId{} : p_.automaton.event_name(e); }

 private:
  const NetworkedPlant& p_;
  const Automaton& s_;
  detail::Dfa spec_, closed_;
  std::vector<int> sup_index_;  // P event -> supervisor event; -2 when unobservable
};

/// One seeded random run of the closed loop: each step picks an enabled
/// event uniformly, then one of its successors uniformly. The run stops at
/// the horizon, on a deadlock (nothing enabled in an unmarked state), or
/// when the plant-level string leaves the prefixes of the lifted spec.
inline Trace simulate(const NetworkedPlant& p, const Automaton& supervisor, const Automaton& spec,
                      std::uint64_t seed, int horizon) {
  if (horizon < 0) throw PreconditionError("simulate: horizon must be nonnegative");
  Trace tr;
  tr.seed = seed;
  tr.horizon = horizon;
  ClosedLoopSystem sys(p, supervisor, spec);
  if (sys.empty()) {
    tr.outcome = Outcome::kDeadlock;
    return tr;
  }
  auto x = sys.initial();
  tr.initial = sys.snapshot(x);
  if (sys.outside_closed_spec(x)) {
    tr.outcome = Outcome::kSafetyViolation;
    return tr;
  }
  for (int k = 0; k < horizon; ++k) {
    auto moves = sys.moves(x);
    if (moves.empty()) {
      tr.outcome = sys.marked(x) ? Outcome::kCompleted : Outcome::kDeadlock;
      tr.outcome_step = k;
      return tr;
    }
    std::vector<int> events;
    for (const auto& m : moves)
      if (events.empty() || events.back() != m.event) events.push_back(m.event);
    std::sort(events.begin(), events.end());
    events.erase(std::unique(events.begin(), events.end()), events.end());
    int ev = events[uniform_index(seed, 2 * static_cast<std::uint64_t>(k), events.size())];
    std::vector<ClosedLoopSystem::State> succ;
    for (const auto& m : moves)
      if (m.event == ev) succ.push_back(m.to);
    x = succ[uniform_index(seed, 2 * static_cast<std::uint64_t>(k) + 1, succ.size())];
    tr.steps.push_back({sys.event_name(ev), sys.snapshot(x)});
    if (sys.outside_closed_spec(x)) {
      tr.outcome = Outcome::kSafetyViolation;
      tr.outcome_step = k + 1;
      return tr;
    }
  }
  tr.outcome_step = horizon;
  return tr;
}

struct ExploreResult {
  std::size_t states_visited = 0;
  int depth = 0;
  std::size_t violation_count = 0;
  std::size_t deadlock_count = 0;
  std::vector<Trace> violations;  // first few witnesses, shortest first
  std::vector<Trace> deadlocks;
};

/// Breadth-first expansion of the closed loop to `depth` events. A violation
/// is a reachable marked state whose string is not a marked string of the
/// lifted spec, the same condition as is_subset on the closed loop; a
/// deadlock is an unmarked state with nothing enabled.
inline ExploreResult explore(const NetworkedPlant& p, const Automaton& supervisor, const Automaton& spec, int depth,
                             std::size_t budget = kDefaultStateBudget, std::size_t max_witnesses = 16) {
  if (depth < 0) throw PreconditionError("explore: depth must be nonnegative");
  ExploreResult r;
  r.depth = depth;
  ClosedLoopSystem sys(p, supervisor, spec);
  if (sys.empty()) return r;
  using State = ClosedLoopSystem::State;
  std::map<State, int> ids;
  std::vector<State> states;
  std::vector<std::pair<int, int>> parent;  // (previous, event)
  std::vector<int> level;
  auto witness = [&](int id, Outcome o) {
    std::vector<int> path;
    for (int n = id; n >= 0; n = parent[static_cast<std::size_t>(n)].first) path.push_back(n);
    std::reverse(path.begin(), path.end());
    Trace t;
    t.horizon = depth;
    t.initial = sys.snapshot(states[static_cast<std::size_t>(path[0])]);
    for (std::size_t i = 1; i < path.size(); ++i)
      t.steps.push_back({sys.event_name(parent[static_cast<std::size_t>(path[i])].second),
                         sys.snapshot(states[static_cast<std::size_t>(path[i])])});
    t.outcome = o;
    t.outcome_step = static_cast<int>(t.steps.size());
    return t;
  };
  ids.emplace(sys.initial(), 0);
  states.push_back(sys.initial());
  parent.emplace_back(-1, 0);
  level.push_back(0);
  for (std::size_t cur = 0; cur < states.size(); ++cur) {
    const State x = states[cur];
    const int d = level[cur];
    if (sys.unsafe_marked(x)) {
      ++r.violation_count;
      if (r.violations.size() < max_witnesses) r.violations.push_back(witness(static_cast<int>(cur), Outcome::kSafetyViolation));
    }
    auto moves = sys.moves(x);
    if (moves.empty() && !sys.marked(x)) {
      ++r.deadlock_count;
      if (r.deadlocks.size() < max_witnesses) r.deadlocks.push_back(witness(static_cast<int>(cur), Outcome::kDeadlock));
    }
    if (d >= depth) continue;
    for (const auto& m : moves) {
      auto [it, fresh] = ids.emplace(m.to, static_cast<int>(states.size()));
      if (!fresh) continue;
      if (states.size() >= budget) throw ResourceError("explore exceeded the state budget");
      states.push_back(m.to);
      parent.emplace_back(static_cast<int>(cur), m.event);
      level.push_back(d + 1);
    }
  }
  r.states_visited = states.size();
  return r;
}

}  // namespace netsup
