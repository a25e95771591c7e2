#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "netsup/alphabet.hpp"
#include "netsup/errors.hpp"

namespace netsup {

/// Label index of a silent (epsilon) transition.
inline constexpr int kSilent = -1;

/// Default cap on the number of states any composition may create.
inline constexpr std::size_t kDefaultStateBudget = 1'000'000;

struct Edge {
  int event;  // index into Automaton::events(), or kSilent
  int dst;
  auto operator<=>(const Edge&) const = default;
};

using EventString = std::vector<EventId>;

/// A (possibly nondeterministic) finite automaton with silent transitions.
///
/// The event list is fixed at construction and kept sorted, so event indices
/// order the same way as event names. States carry a printable name that
/// records where they came from; no operation depends on the name text.
/// An automaton with no states recognizes the empty language.
class Automaton {
 public:
  Automaton() = default;

  explicit Automaton(std::vector<EventId> events) : events_(std::move(events)) {
    std::sort(events_.begin(), events_.end());
    events_.erase(std::unique(events_.begin(), events_.end()), events_.end());
    for (int i = 0; i < static_cast<int>(events_.size()); ++i) event_index_.emplace(events_[i], i);
  }

  explicit Automaton(const EventSet& events)
      : Automaton(std::vector<EventId>(events.begin(), events.end())) {}

  const std::vector<EventId>& events() const { return events_; }
  EventSet event_set() const { return EventSet(events_.begin(), events_.end()); }
  int num_events() const { return static_cast<int>(events_.size()); }

  std::optional<int> find_event(std::string_view name) const {
    auto it = event_index_.find(std::string(name));
    if (it == event_index_.end()) return std::nullopt;
    return it->second;
  }
  bool has_event(std::string_view name) const { return find_event(name).has_value(); }

  int event_at(std::string_view name) const {
    auto e = find_event(name);
    if (!e) throw PreconditionError("automaton: unknown event '" + std::string(name) + "'");
    return *e;
  }

  const EventId& event_name(int e) const { return events_.at(static_cast<std::size_t>(e)); }

  int num_states() const { return static_cast<int>(names_.size()); }
  bool empty() const { return names_.empty(); }

  int add_state(std::string name, bool marked = false) {
    int id = num_states();
    auto [it, fresh] = state_index_.emplace(name, id);
    if (!fresh) throw PreconditionError("automaton: duplicate state name '" + name + "'");
    names_.push_back(std::move(name));
    marked_.push_back(marked);
    out_.emplace_back();
    if (initial_ < 0) initial_ = id;
    return id;
  }

  std::optional<int> find_state(std::string_view name) const {
    auto it = state_index_.find(std::string(name));
    if (it == state_index_.end()) return std::nullopt;
    return it->second;
  }

  int state_at(std::string_view name) const {
    auto q = find_state(name);
    if (!q) throw PreconditionError("automaton: unknown state '" + std::string(name) + "'");
    return *q;
  }

  const std::string& state_name(int q) const { return names_.at(static_cast<std::size_t>(q)); }

  bool is_marked(int q) const { return marked_.at(static_cast<std::size_t>(q)); }
  void set_marked(int q, bool m) { marked_.at(static_cast<std::size_t>(q)) = m; }

  /// -1 when the automaton has no states.
  int initial() const { return initial_; }
  void set_initial(int q) {
    check_state(q);
    initial_ = q;
  }

  void add_transition(int src, int event, int dst) {
    check_state(src);
    check_state(dst);
    if (event != kSilent && (event < 0 || event >= num_events()))
      throw PreconditionError("automaton: event index out of range");
    auto& edges = out_[static_cast<std::size_t>(src)];
    Edge e{event, dst};
    auto it = std::lower_bound(edges.begin(), edges.end(), e);
    if (it == edges.end() || *it != e) edges.insert(it, e);
  }

  void add_transition(int src, std::string_view event, int dst) {
    add_transition(src, event_at(event), dst);
  }

  void add_silent(int src, int dst) { add_transition(src, kSilent, dst); }

  /// Outgoing edges of q, sorted by (event, dst); silent edges first.
  std::span<const Edge> out(int q) const { return out_.at(static_cast<std::size_t>(q)); }

  bool has_transition(int src, int event, int dst) const {
    auto edges = out(src);
    return std::binary_search(edges.begin(), edges.end(), Edge{event, dst});
  }

  std::size_t num_transitions() const {
    std::size_t n = 0;
    for (const auto& v : out_) n += v.size();
    return n;
  }

  /// Successors of q on event e (no silent closure).
  std::vector<int> successors(int q, int e) const {
    std::vector<int> r;
    auto edges = out(q);
    auto it = std::lower_bound(edges.begin(), edges.end(), Edge{e, -1});
    for (; it != edges.end() && it->event == e; ++it) r.push_back(it->dst);
    return r;
  }

  bool is_deterministic() const {
    for (const auto& edges : out_) {
      for (std::size_t i = 0; i < edges.size(); ++i) {
        if (edges[i].event == kSilent) return false;
        if (i > 0 && edges[i - 1].event == edges[i].event) return false;
      }
    }
    return true;
  }

  /// Empty automaton (no states) over the given events.
  static Automaton empty_over(std::vector<EventId> events) { return Automaton(std::move(events)); }

 private:
  void check_state(int q) const {
    if (q < 0 || q >= num_states()) throw PreconditionError("automaton: state index out of range");
  }

  std::vector<EventId> events_;
  std::unordered_map<EventId, int> event_index_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> state_index_;
  std::vector<bool> marked_;
  std::vector<std::vector<Edge>> out_;
  int initial_ = -1;
};

/// A violating string and the continuation that breaks the property.
/// For pair-type properties, `witness` is the second string of the pair.
struct Counterexample {
  EventString string;
  EventId event;
  std::optional<EventString> witness;
  bool operator==(const Counterexample&) const = default;
};

/// Outcome of a property check. Bounded checks set `exact = false` and
/// report how deep the search went.
struct Verdict {
  bool holds = true;
  std::optional<Counterexample> counterexample;
  bool exact = true;
  int exhaustive_to_depth = -1;

  explicit operator bool() const { return holds; }
};

}  // namespace netsup
