#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "netsup/alphabet.hpp"
#include "netsup/automaton.hpp"
#include "netsup/ops.hpp"

namespace netsup {

/// A control pattern: the controllable events the supervisor enables.
using ControlPattern = EventSet;

/// The pattern set Γ with its lossy subset Γ_l (by index). Pattern k is
/// transmitted under the event names pat<k>#in / pat<k>#out / pat<k>#loss.
struct ControlPatternSet {
  std::vector<ControlPattern> patterns;
  std::set<int> lossy;

  static std::string name(int k) { return "pat" + std::to_string(k); }

  int size() const { return static_cast<int>(patterns.size()); }

  void validate(const Alphabet& alphabet) const {
    for (const auto& p : patterns)
      if (!is_subset_of(p, alphabet.controllable()))
        throw PreconditionError("control pattern contains an event that is not controllable");
    for (int k : lossy)
      if (k < 0 || k >= size()) throw PreconditionError("lossy pattern index out of range");
  }

  /// Every subset of the controllable events, pattern k being the subset
  /// whose bits (over the sorted controllable events) spell k.
  static ControlPatternSet all_subsets(const Alphabet& alphabet) {
    std::vector<EventId> c(alphabet.controllable().begin(), alphabet.controllable().end());
    if (c.size() > 16) throw ResourceError("too many controllable events to enumerate all control patterns");
    ControlPatternSet r;
    for (unsigned mask = 0; mask < (1u << c.size()); ++mask) {
      ControlPattern p;
      for (std::size_t i = 0; i < c.size(); ++i)
        if (mask & (1u << i)) p.insert(c[i]);
      r.patterns.push_back(std::move(p));
    }
    return r;
  }
};

/// Delay bounds (counted in event firings) and lossy sets of both channels.
struct ChannelConfig {
  int num_o = 0;
  int num_c = 0;
  EventSet lossy_events;  // Σ_ol
  std::set<int> lossy_patterns;  // Γ_l

  void validate(const Alphabet& alphabet) const {
    if (num_o < 0 || num_c < 0) throw PreconditionError("channel delay bounds must be nonnegative");
    if (!is_subset_of(lossy_events, alphabet.observable()))
      throw PreconditionError("lossy events must be observable");
  }
};

/// A message in transit with its remaining timer.
struct TimedMessage {
  int payload;  // index of the event or pattern
  int timer;
  auto operator<=>(const TimedMessage&) const = default;
};

/// Channel contents: a set of timed messages kept sorted.
using ChannelState = std::vector<TimedMessage>;

namespace detail {

/// Rules 1 and 4 may fire only when no message has run out of time; the
/// empty channel always qualifies.
inline bool timers_positive(const ChannelState& q) {
  return std::all_of(q.begin(), q.end(), [](const TimedMessage& m) { return m.timer >= 1; });
}

inline ChannelState count_down(const ChannelState& q) {
  ChannelState r;
  r.reserve(q.size() + 1);
  for (const auto& m : q) r.push_back({m.payload, m.timer - 1});
  return r;
}

inline ChannelState with_message(ChannelState q, TimedMessage m) {
  auto it = std::lower_bound(q.begin(), q.end(), m);
  if (it == q.end() || *it != m) q.insert(it, m);
  return q;
}

inline std::string channel_name(const ChannelState& q, const std::vector<std::string>& payload_names) {
  std::string s = "{";
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (i) s += ',';
    s += payload_names[static_cast<std::size_t>(q[i].payload)] + ":" + std::to_string(q[i].timer);
  }
  return s + "}";
}

/// Explores a timed channel from the empty state. `countdown_events` are
/// plant events that age every message (Rule 4 for the observation channel).
inline Automaton build_timed_channel(const std::vector<std::string>& payloads, const std::vector<char>& lossy,
                                     int bound, const std::vector<EventId>& countdown_events) {
  std::vector<EventId> events;
  for (const auto& p : payloads) {
    events.push_back(in_event(p));
    events.push_back(out_event(p));
    events.push_back(loss_event(p));
  }
  events.insert(events.end(), countdown_events.begin(), countdown_events.end());
  Automaton a(events);
  std::map<ChannelState, int> ids;
  std::vector<ChannelState> states;
  auto add = [&](const ChannelState& q) {
    auto [it, fresh] = ids.emplace(q, a.num_states());
    if (fresh) {
      a.add_state(channel_name(q, payloads), true);
      states.push_back(q);
    }
    return it->second;
  };
  add({});
  for (int cur = 0; cur < a.num_states(); ++cur) {
    const ChannelState q = states[static_cast<std::size_t>(cur)];
    const bool ready = timers_positive(q);
    for (std::size_t p = 0; p < payloads.size(); ++p) {
      if (ready) {
        int t = add(with_message(count_down(q), {static_cast<int>(p), bound}));
        a.add_transition(cur, in_event(payloads[p]), t);
      }
      for (std::size_t i = 0; i < q.size(); ++i) {
        if (q[i].payload != static_cast<int>(p)) continue;
        ChannelState r = q;
        r.erase(r.begin() + static_cast<std::ptrdiff_t>(i));
        int t = add(r);
        a.add_transition(cur, out_event(payloads[p]), t);
        if (lossy[p]) a.add_transition(cur, loss_event(payloads[p]), t);
      }
    }
    if (ready)
      for (const auto& u : countdown_events) a.add_transition(cur, u, add(count_down(q)));
  }
  return a;
}

}  // namespace detail

/// Observation channel G_OC: carries σ#in (send), σ#out (deliver) and
/// σ#loss (drop, lossy events only) for every observable σ; unobservable
/// plant events age the messages in transit. All states are marked.
inline Automaton build_observation_channel(const Alphabet& alphabet, const ChannelConfig& cfg) {
  cfg.validate(alphabet);
  std::vector<std::string> payloads(alphabet.observable().begin(), alphabet.observable().end());
  std::vector<char> lossy(payloads.size());
  for (std::size_t i = 0; i < payloads.size(); ++i) lossy[i] = contains(cfg.lossy_events, payloads[i]);
  auto uo = alphabet.unobservable();
  return detail::build_timed_channel(payloads, lossy, cfg.num_o, std::vector<EventId>(uo.begin(), uo.end()));
}

/// Control channel G_CC over pat<k>#in / #out / #loss. Timers age only when a
/// new pattern is sent.
inline Automaton build_control_channel(const ControlPatternSet& patterns, const ChannelConfig& cfg) {
  if (cfg.num_c < 0) throw PreconditionError("channel delay bounds must be nonnegative");
  std::vector<std::string> payloads;
  std::vector<char> lossy;
  for (int k = 0; k < patterns.size(); ++k) {
    payloads.push_back(ControlPatternSet::name(k));
    lossy.push_back(patterns.lossy.count(k) > 0 || cfg.lossy_patterns.count(k) > 0);
  }
  return detail::build_timed_channel(payloads, lossy, cfg.num_c, {});
}

/// Command execution automaton G_CE: waits for a delivered pattern, then lets
/// the plant fire enabled or uncontrollable events until the next observable
/// one. State "wait" is initial; state "cmd:pat<k>" holds pattern k.
inline Automaton build_command_execution(const Alphabet& alphabet, const ControlPatternSet& patterns) {
  patterns.validate(alphabet);
  std::vector<EventId> events;
  for (int k = 0; k < patterns.size(); ++k) events.push_back(out_event(ControlPatternSet::name(k)));
  for (const auto& s : alphabet.events())
    events.push_back(alphabet.is_observable(s) ? in_event(s) : s);
  Automaton a(events);
  const int wait = a.add_state("wait", true);
  std::vector<int> cmd;
  for (int k = 0; k < patterns.size(); ++k) cmd.push_back(a.add_state("cmd:" + ControlPatternSet::name(k), true));

  for (const auto& s : alphabet.events()) {
    if (alphabet.is_controllable(s)) continue;
    a.add_transition(wait, alphabet.is_observable(s) ? in_event(s) : s, wait);  // rules 1, 2
  }
  for (int k = 0; k < patterns.size(); ++k) {
    a.add_transition(wait, out_event(ControlPatternSet::name(k)), cmd[static_cast<std::size_t>(k)]);  // rule 3
    for (int j = 0; j < patterns.size(); ++j)  // rule 4
      a.add_transition(cmd[static_cast<std::size_t>(k)], out_event(ControlPatternSet::name(j)),
                       cmd[static_cast<std::size_t>(k)]);
    for (const auto& s : alphabet.events()) {
      const bool allowed = !alphabet.is_controllable(s) || contains(patterns.patterns[static_cast<std::size_t>(k)], s);
      if (!allowed) continue;
      if (alphabet.is_observable(s))
        a.add_transition(cmd[static_cast<std::size_t>(k)], in_event(s), wait);  // rule 5
      else
        a.add_transition(cmd[static_cast<std::size_t>(k)], s, cmd[static_cast<std::size_t>(k)]);  // rule 6
    }
  }
  return a;
}

/// Replaces every observable plant event σ by σ#in.
inline Automaton relabel_plant(const Automaton& g, const Alphabet& alphabet) {
  for (const auto& e : g.events())
    if (!alphabet.has(e)) throw PreconditionError("relabel_plant: plant event '" + e + "' is not in the alphabet");
  return relabel(g, [&](const EventId& e) { return alphabet.is_observable(e) ? in_event(e) : e; });
}

}  // namespace netsup
