#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <string_view>

#include "netsup/errors.hpp"

namespace netsup {

using EventId = std::string;
using EventSet = std::set<EventId>;

/// Names of the channel-side copies of an event. The separator never occurs
/// in a plant event name, so the copies stay disjoint from the plant alphabet.
inline constexpr std::string_view kInSuffix = "#in";
inline constexpr std::string_view kOutSuffix = "#out";
inline constexpr std::string_view kLossSuffix = "#loss";

inline EventId in_event(std::string_view e) { return EventId(e) + std::string(kInSuffix); }
inline EventId out_event(std::string_view e) { return EventId(e) + std::string(kOutSuffix); }
inline EventId loss_event(std::string_view e) { return EventId(e) + std::string(kLossSuffix); }

/// Strips a channel suffix; returns the name unchanged if it has none.
inline EventId base_event(std::string_view e) {
  auto pos = e.find('#');
  return EventId(pos == std::string_view::npos ? e : e.substr(0, pos));
}

inline bool contains(const EventSet& s, std::string_view e) {
  return s.find(EventId(e)) != s.end();
}

inline EventSet set_union(const EventSet& a, const EventSet& b) {
  EventSet r = a;
  r.insert(b.begin(), b.end());
  return r;
}

inline EventSet set_minus(const EventSet& a, const EventSet& b) {
  EventSet r;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(r, r.end()));
  return r;
}

inline EventSet set_intersection(const EventSet& a, const EventSet& b) {
  EventSet r;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(r, r.end()));
  return r;
}

inline bool is_subset_of(const EventSet& a, const EventSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

/// Event universe with its controllable / observable / lossy partitions.
/// Uncontrollable and unobservable sets are derived, never stored.
class Alphabet {
 public:
  Alphabet() = default;
  Alphabet(EventSet events, EventSet controllable, EventSet observable,
           EventSet lossy_observable = {})
      : events_(std::move(events)),
        controllable_(std::move(controllable)),
        observable_(std::move(observable)),
        lossy_(std::move(lossy_observable)) {
    validate();
  }

  const EventSet& events() const { return events_; }
  const EventSet& controllable() const { return controllable_; }
  const EventSet& observable() const { return observable_; }
  const EventSet& lossy_observable() const { return lossy_; }

  EventSet uncontrollable() const { return set_minus(events_, controllable_); }
  EventSet unobservable() const { return set_minus(events_, observable_); }

  bool has(std::string_view e) const { return contains(events_, e); }
  bool is_controllable(std::string_view e) const { return contains(controllable_, e); }
  bool is_observable(std::string_view e) const { return contains(observable_, e); }
  bool is_lossy(std::string_view e) const { return contains(lossy_, e); }

  void add_event(const EventId& e, bool controllable, bool observable, bool lossy = false) {
    events_.insert(e);
    if (controllable) controllable_.insert(e);
    if (observable) observable_.insert(e);
    if (lossy) lossy_.insert(e);
    validate();
  }

  bool operator==(const Alphabet&) const = default;

  /// Plant alphabets must leave the '#' namespace to the channel copies.
  void require_plant_names() const {
    for (const auto& e : events_)
      if (e.find('#') != EventId::npos)
        throw PreconditionError("plant event names must not contain '#': " + e);
  }

 private:
  void validate() const {
    if (!is_subset_of(controllable_, events_))
      throw PreconditionError("alphabet: controllable events must belong to the alphabet");
    if (!is_subset_of(observable_, events_))
      throw PreconditionError("alphabet: observable events must belong to the alphabet");
    if (!is_subset_of(lossy_, observable_))
      throw PreconditionError("alphabet: lossy events must be observable");
    for (const auto& e : events_)
      if (e.empty()) throw PreconditionError("alphabet: empty event name");
  }

  EventSet events_;
  EventSet controllable_;
  EventSet observable_;
  EventSet lossy_;
};

}  // namespace netsup
