#pragma once

#include <array>
#include <string>
#include <vector>

#include "netsup/alphabet.hpp"
#include "netsup/automaton.hpp"
#include "netsup/channels.hpp"
#include "netsup/ops.hpp"
#include "netsup/supervisory.hpp"

namespace netsup {

/// The plant composed with both channels and the command execution module,
/// P = G' || G_OC || G_CC || G_CE, with its networked event partition.
struct NetworkedPlant {
  enum Component { kPlant = 0, kObservation = 1, kControl = 2, kExecution = 3 };

  Automaton automaton;
  Alphabet alphabet;           // Σ^P with Σ_c^P and Σ_o^P
  Alphabet plant_alphabet;     // original Σ
  ControlPatternSet patterns;
  ChannelConfig config;
  std::array<Automaton, 4> components;
  std::vector<std::vector<int>> tuples;  // component states of each P state

  /// Events that are not plant moves: deliveries, losses and pattern traffic.
  EventSet channel_events() const {
    EventSet r;
    for (const auto& s : plant_alphabet.observable()) {
      r.insert(out_event(s));
      r.insert(loss_event(s));
    }
    for (int k = 0; k < patterns.size(); ++k) {
      auto n = ControlPatternSet::name(k);
      r.insert(in_event(n));
      r.insert(out_event(n));
      r.insert(loss_event(n));
    }
    return r;
  }

  /// Events of P that stand for plant moves (Σ_uo ∪ Σ_o^in).
  EventSet plant_events() const { return set_minus(alphabet.events(), channel_events()); }
};

/// Σ^P: the event partition seen by a supervisor of the networked plant.
/// Controllable: pattern sends, unobservable controllable plant events and
/// σ#in for observable controllable σ. Observable: pattern sends and
/// deliveries σ#out.
inline Alphabet networked_alphabet(const Alphabet& alphabet, const ControlPatternSet& patterns) {
  EventSet all, controllable, observable;
  for (const auto& s : alphabet.events()) {
    if (alphabet.is_observable(s)) {
      all.insert({in_event(s), out_event(s), loss_event(s)});
      observable.insert(out_event(s));
      if (alphabet.is_controllable(s)) controllable.insert(in_event(s));
    } else {
      all.insert(s);
      if (alphabet.is_controllable(s)) controllable.insert(s);
    }
  }
  for (int k = 0; k < patterns.size(); ++k) {
    auto n = ControlPatternSet::name(k);
    all.insert({in_event(n), out_event(n), loss_event(n)});
    controllable.insert(in_event(n));
    observable.insert(in_event(n));
  }
  return Alphabet(all, controllable, observable);
}

/// Builds the networked plant. Throws ResourceError when the composition
/// exceeds `budget` states.
inline NetworkedPlant compose_networked_plant(const Automaton& g, const Alphabet& alphabet,
                                              const ControlPatternSet& patterns, const ChannelConfig& cfg,
                                              std::size_t budget = kDefaultStateBudget) {
  alphabet.require_plant_names();
  patterns.validate(alphabet);
  cfg.validate(alphabet);

  NetworkedPlant np;
  np.plant_alphabet = alphabet;
  np.patterns = patterns;
  np.config = cfg;
  np.components[NetworkedPlant::kPlant] = relabel_plant(g, alphabet);
  np.components[NetworkedPlant::kObservation] = build_observation_channel(alphabet, cfg);
  np.components[NetworkedPlant::kControl] = build_control_channel(patterns, cfg);
  np.components[NetworkedPlant::kExecution] = build_command_execution(alphabet, patterns);

  const Automaton* parts[] = {&np.components[0], &np.components[1], &np.components[2], &np.components[3]};
  auto product = sync_product_all(parts, budget);
  np.automaton = std::move(product.automaton);
  np.tuples = std::move(product.tuples);

  np.alphabet = networked_alphabet(alphabet, patterns);
  return np;
}

/// Lifts a spec over Σ to Σ^P: observable events become σ#in and every
/// channel event self-loops at every state.
inline Automaton lift_spec(const NetworkedPlant& p, const Automaton& spec) {
  return add_selfloops(relabel_plant(spec, p.plant_alphabet), p.channel_events());
}

/// Supervisor over Σ_o^P for the networked plant; empty when none exists.
inline Automaton synthesize(const NetworkedPlant& p, const Automaton& spec,
                            std::size_t budget = kDefaultStateBudget) {
  return sup_controllable_normal(p.automaton, lift_spec(p, spec), p.alphabet, budget);
}

/// Single-state supervisor that enables every event it observes.
inline Automaton universal_supervisor(const NetworkedPlant& p) {
  Automaton s(p.alphabet.observable());
  int q = s.add_state("any", true);
  for (int e = 0; e < s.num_events(); ++e) s.add_transition(q, e, q);
  return s;
}

struct ClosedLoopReport {
  bool safe = false;
  bool nonblocking = false;
  std::optional<Counterexample> unsafe_string;
};

struct ClosedLoop {
  Automaton automaton;
  ClosedLoopReport report;
};

/// Composes P with a supervisor over Σ_o^P and reports safety (marked
/// language inside the lifted spec) and nonblocking.
inline ClosedLoop closed_loop(const NetworkedPlant& p, const Automaton& supervisor, const Automaton& spec,
                              std::size_t budget = kDefaultStateBudget) {
  for (const auto& e : supervisor.events())
    if (!p.alphabet.is_observable(e))
      throw PreconditionError("closed_loop: supervisor event '" + e + "' is not observable to the supervisor");
  Automaton s = supervisor;
  if (s.event_set() != p.alphabet.observable()) {
    // Widen to Σ_o^P so that absent observable events are blocked, not free.
    s = detail::rebuild(supervisor,
                        std::vector<EventId>(p.alphabet.observable().begin(), p.alphabet.observable().end()),
                        [&](int e) { return supervisor.event_name(e); });
  }
  ClosedLoop cl;
  cl.automaton = sync_product(p.automaton, s, budget);
  auto v = is_subset(cl.automaton, lift_spec(p, spec));
  cl.report.safe = v.holds;
  cl.report.unsafe_string = v.counterexample;
  cl.report.nonblocking = is_nonblocking(cl.automaton);
  return cl;
}

}  // namespace netsup
