#pragma once

#include <random>
#include <string>
#include <vector>

#include "netsup/alphabet.hpp"
#include "netsup/automaton.hpp"

namespace fixtures {

using netsup::Alphabet;
using netsup::Automaton;
using netsup::EventId;
using netsup::EventSet;

using Rng = std::mt19937_64;

enum class Shape {
  kAny,         // transitions to any state
  kForward,     // i -> j with j >= i (DAG plus self-loops)
  kStrictDag,   // i -> j with j > i, so every string is shorter than the state count
};

inline std::vector<EventId> event_names(int n) {
  std::vector<EventId> r;
  for (int i = 0; i < n; ++i) r.push_back(std::string(1, static_cast<char>('a' + i)));
  return r;
}

inline bool coin(Rng& rng, double p) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; }

inline int pick(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

/// Random partition of the first n letters into controllable / observable.
/// `ctrl_in_obs` forces every controllable event to be observable.
inline Alphabet random_alphabet(Rng& rng, int n, bool ctrl_in_obs = false) {
  EventSet all, c, o;
  for (const auto& e : event_names(n)) {
    all.insert(e);
    bool ctrl = coin(rng, 0.5), obs = coin(rng, 0.6);
    if (ctrl) c.insert(e);
    if (obs || (ctrl && ctrl_in_obs)) o.insert(e);
  }
  return Alphabet(all, c, o);
}

/// Random plant on states q0..q{n-1} with q0 initial.
inline Automaton random_plant(Rng& rng, const std::vector<EventId>& events, int n, Shape shape, double density = 0.45,
                              bool deterministic = true) {
  Automaton a(events);
  for (int i = 0; i < n; ++i) a.add_state("q" + std::to_string(i), coin(rng, 0.5));
  for (int i = 0; i < n; ++i) {
    for (int e = 0; e < a.num_events(); ++e) {
      int lo = shape == Shape::kAny ? 0 : shape == Shape::kForward ? i : i + 1;
      if (lo >= n || !coin(rng, density)) continue;
      a.add_transition(i, e, pick(rng, lo, n - 1));
      if (!deterministic && coin(rng, 0.25)) a.add_transition(i, e, pick(rng, lo, n - 1));
    }
  }
  return a;
}

/// The plant with some transitions removed and a random marking: a spec
/// whose closed language lies inside the plant's.
inline Automaton random_sub(Rng& rng, const Automaton& plant, double keep = 0.7) {
  Automaton a(plant.events());
  for (int q = 0; q < plant.num_states(); ++q) a.add_state(plant.state_name(q), plant.is_marked(q) && coin(rng, 0.8));
  for (int q = 0; q < plant.num_states(); ++q)
    for (const auto& e : plant.out(q))
      if (coin(rng, keep)) a.add_transition(q, e.event, e.dst);
  return a;
}

/// Random state-feedback or estimate policy values: a subset of `pool`.
inline EventSet random_subset(Rng& rng, const EventSet& pool, double p = 0.5) {
  EventSet r;
  for (const auto& e : pool)
    if (coin(rng, p)) r.insert(e);
  return r;
}

}  // namespace fixtures
