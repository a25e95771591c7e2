#pragma once

#include <algorithm>
#include <cstddef>
#include <deque>
#include <functional>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "netsup/automaton.hpp"

namespace netsup {

namespace detail {

struct VecHash {
  std::size_t operator()(const std::vector<int>& v) const noexcept {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (int x : v) {
      h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};

template <class V>
using VecMap = std::unordered_map<std::vector<int>, V, VecHash>;

/// Interns integer vectors into dense ids.
class Interner {
 public:
  std::pair<int, bool> intern(const std::vector<int>& key) {
    auto [it, fresh] = ids_.emplace(key, static_cast<int>(keys_.size()));
    if (fresh) keys_.push_back(key);
    return {it->second, fresh};
  }
  const std::vector<int>& key(int id) const { return keys_.at(static_cast<std::size_t>(id)); }
  int size() const { return static_cast<int>(keys_.size()); }
  bool contains(const std::vector<int>& key) const { return ids_.count(key) > 0; }
  int find(const std::vector<int>& key) const {
    auto it = ids_.find(key);
    return it == ids_.end() ? -1 : it->second;
  }

 private:
  VecMap<int> ids_;
  std::vector<std::vector<int>> keys_;
};

/// Deterministic automaton over an externally fixed event index space.
struct Dfa {
  int num_events = 0;
  std::vector<int> next;  // state * num_events + event -> state or -1
  std::vector<char> marked;
  std::vector<std::vector<int>> subsets;  // source states of each DFA state
  int initial = -1;

  int size() const { return static_cast<int>(marked.size()); }
  int step(int q, int e) const {
    return q < 0 ? -1 : next[static_cast<std::size_t>(q) * num_events + e];
  }
  bool enabled(int q, int e) const { return step(q, e) >= 0; }
};

/// Maps each event of `a` to its index in `sigma`, or -1 when absent.
inline std::vector<int> event_map(const Automaton& a, const std::vector<EventId>& sigma) {
  std::vector<int> m(a.events().size(), -1);
  for (std::size_t i = 0; i < a.events().size(); ++i) {
    auto it = std::lower_bound(sigma.begin(), sigma.end(), a.events()[i]);
    if (it != sigma.end() && *it == a.events()[i]) m[i] = static_cast<int>(it - sigma.begin());
  }
  return m;
}

inline std::vector<EventId> sorted_union(const std::vector<EventId>& a, const std::vector<EventId>& b) {
  std::vector<EventId> r;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
  return r;
}

/// Silent closure where `hidden[e]` marks additional events treated as silent.
inline void close_over(const Automaton& a, const std::vector<char>& hidden, std::vector<int>& set) {
  std::vector<char> seen(static_cast<std::size_t>(a.num_states()), 0);
  for (int q : set) seen[static_cast<std::size_t>(q)] = 1;
  std::vector<int> stack = set;
  while (!stack.empty()) {
    int q = stack.back();
    stack.pop_back();
    for (const Edge& e : a.out(q)) {
      if (e.event != kSilent && !hidden[static_cast<std::size_t>(e.event)]) continue;
      if (!seen[static_cast<std::size_t>(e.dst)]) {
        seen[static_cast<std::size_t>(e.dst)] = 1;
        set.push_back(e.dst);
        stack.push_back(e.dst);
      }
    }
  }
  std::sort(set.begin(), set.end());
}

/// Subset construction of `a` over `sigma`; events of `a` outside `sigma`
/// are erased.
inline Dfa subset_construction(const Automaton& a, const std::vector<EventId>& sigma,
                               std::size_t budget = kDefaultStateBudget) {
  Dfa d;
  d.num_events = static_cast<int>(sigma.size());
  if (a.empty()) return d;
  auto emap = event_map(a, sigma);
  std::vector<char> hidden(emap.size());
  for (std::size_t i = 0; i < emap.size(); ++i) hidden[i] = emap[i] < 0;

  VecMap<int> ids;
  auto add = [&](std::vector<int> set) {
    auto [it, fresh] = ids.emplace(set, d.size());
    if (fresh) {
      if (static_cast<std::size_t>(d.size()) >= budget)
        throw ResourceError("subset construction exceeded the state budget");
      bool m = std::any_of(set.begin(), set.end(), [&](int q) { return a.is_marked(q); });
      d.marked.push_back(m);
      d.subsets.push_back(std::move(set));
      d.next.resize(d.next.size() + sigma.size(), -1);
    }
    return it->second;
  };

  std::vector<int> init{a.initial()};
  close_over(a, hidden, init);
  d.initial = add(init);
  std::vector<std::vector<int>> buckets(sigma.size());
  for (int cur = 0; cur < d.size(); ++cur) {
    for (auto& b : buckets) b.clear();
    for (int q : d.subsets[static_cast<std::size_t>(cur)]) {
      for (const Edge& e : a.out(q)) {
        if (e.event == kSilent) continue;
        int g = emap[static_cast<std::size_t>(e.event)];
        if (g >= 0) buckets[static_cast<std::size_t>(g)].push_back(e.dst);
      }
    }
    for (std::size_t g = 0; g < sigma.size(); ++g) {
      auto& b = buckets[g];
      if (b.empty()) continue;
      std::sort(b.begin(), b.end());
      b.erase(std::unique(b.begin(), b.end()), b.end());
      std::vector<int> set = b;
      close_over(a, hidden, set);
      int id = add(std::move(set));
      d.next[static_cast<std::size_t>(cur) * sigma.size() + g] = id;
    }
  }
  return d;
}

inline std::string join_names(const Automaton& a, const std::vector<int>& states, char open, char close) {
  std::string s(1, open);
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (i) s += ',';
    s += a.state_name(states[i]);
  }
  s += close;
  return s;
}

/// Rebuilds `a` over a new event list; `rename` maps each old event index to
/// a name in `events` (or to an empty string for silent).
inline Automaton rebuild(const Automaton& a, std::vector<EventId> events,
                         const std::function<std::string(int)>& rename) {
  Automaton r(std::move(events));
  for (int q = 0; q < a.num_states(); ++q) r.add_state(a.state_name(q), a.is_marked(q));
  if (!a.empty()) r.set_initial(a.initial());
  std::vector<int> idx(static_cast<std::size_t>(a.num_events()));
  for (int e = 0; e < a.num_events(); ++e) {
    std::string n = rename(e);
    idx[static_cast<std::size_t>(e)] = n.empty() ? kSilent : r.event_at(n);
  }
  for (int q = 0; q < a.num_states(); ++q)
    for (const Edge& e : a.out(q))
      r.add_transition(q, e.event == kSilent ? kSilent : idx[static_cast<std::size_t>(e.event)], e.dst);
  return r;
}

}  // namespace detail

/// States reachable from the initial state.
inline std::vector<char> reachable_states(const Automaton& a) {
  std::vector<char> seen(static_cast<std::size_t>(a.num_states()), 0);
  if (a.empty()) return seen;
  std::vector<int> stack{a.initial()};
  seen[static_cast<std::size_t>(a.initial())] = 1;
  while (!stack.empty()) {
    int q = stack.back();
    stack.pop_back();
    for (const Edge& e : a.out(q))
      if (!seen[static_cast<std::size_t>(e.dst)]) {
        seen[static_cast<std::size_t>(e.dst)] = 1;
        stack.push_back(e.dst);
      }
  }
  return seen;
}

/// States from which a marked state is reachable.
inline std::vector<char> coreachable_states(const Automaton& a) {
  std::vector<std::vector<int>> rev(static_cast<std::size_t>(a.num_states()));
  for (int q = 0; q < a.num_states(); ++q)
    for (const Edge& e : a.out(q)) rev[static_cast<std::size_t>(e.dst)].push_back(q);
  std::vector<char> seen(static_cast<std::size_t>(a.num_states()), 0);
  std::vector<int> stack;
  for (int q = 0; q < a.num_states(); ++q)
    if (a.is_marked(q)) {
      seen[static_cast<std::size_t>(q)] = 1;
      stack.push_back(q);
    }
  while (!stack.empty()) {
    int q = stack.back();
    stack.pop_back();
    for (int p : rev[static_cast<std::size_t>(q)])
      if (!seen[static_cast<std::size_t>(p)]) {
        seen[static_cast<std::size_t>(p)] = 1;
        stack.push_back(p);
      }
  }
  return seen;
}

/// Sub-automaton induced by `keep`; the initial state must be kept, otherwise
/// the result is empty.
inline Automaton restrict_states(const Automaton& a, const std::vector<char>& keep) {
  Automaton r(a.events());
  if (a.empty() || !keep[static_cast<std::size_t>(a.initial())]) return r;
  std::vector<int> id(static_cast<std::size_t>(a.num_states()), -1);
  // Initial state first so that it keeps index 0 in the result.
  id[static_cast<std::size_t>(a.initial())] = r.add_state(a.state_name(a.initial()), a.is_marked(a.initial()));
  for (int q = 0; q < a.num_states(); ++q)
    if (keep[static_cast<std::size_t>(q)] && q != a.initial())
      id[static_cast<std::size_t>(q)] = r.add_state(a.state_name(q), a.is_marked(q));
  for (int q = 0; q < a.num_states(); ++q) {
    if (id[static_cast<std::size_t>(q)] < 0) continue;
    for (const Edge& e : a.out(q))
      if (id[static_cast<std::size_t>(e.dst)] >= 0)
        r.add_transition(id[static_cast<std::size_t>(q)], e.event, id[static_cast<std::size_t>(e.dst)]);
  }
  return r;
}

inline Automaton accessible(const Automaton& a) { return restrict_states(a, reachable_states(a)); }

/// Accessible and co-accessible part.
inline Automaton trim(const Automaton& a) {
  Automaton acc = accessible(a);
  return restrict_states(acc, coreachable_states(acc));
}

/// Copy with every state marked, so that L_m equals the closed language.
inline Automaton mark_all(const Automaton& a) {
  Automaton r = a;
  for (int q = 0; q < r.num_states(); ++q) r.set_marked(q, true);
  return r;
}

/// Copy over `events` (a superset of a's events) with every extra event
/// self-looped at every state.
inline Automaton add_selfloops(const Automaton& a, const EventSet& extra) {
  std::vector<EventId> evs = a.events();
  evs.insert(evs.end(), extra.begin(), extra.end());
  Automaton r = detail::rebuild(a, evs, [&](int e) { return a.event_name(e); });
  for (const auto& x : extra) {
    if (a.has_event(x)) continue;
    int e = r.event_at(x);
    for (int q = 0; q < r.num_states(); ++q) r.add_transition(q, e, q);
  }
  return r;
}

/// Renames events through `f`; an empty name turns the label silent.
inline Automaton relabel(const Automaton& a, const std::function<EventId(const EventId&)>& f) {
  std::vector<EventId> evs;
  for (const auto& e : a.events()) {
    auto n = f(e);
    if (!n.empty()) evs.push_back(n);
  }
  return detail::rebuild(a, evs, [&](int e) { return f(a.event_name(e)); });
}

/// Result of an n-ary synchronous product: the automaton and, for every
/// product state, the tuple of component state indices.
struct Product {
  Automaton automaton;
  std::vector<std::vector<int>> tuples;
};

/// Synchronous composition of all `parts`, accessible part only. Shared
/// events move jointly, private events and silent moves interleave.
inline Product sync_product_all(std::span<const Automaton* const> parts,
                                std::size_t budget = kDefaultStateBudget) {
  std::vector<EventId> sigma;
  for (const Automaton* p : parts) sigma = detail::sorted_union(sigma, p->events());
  Product result{Automaton(sigma), {}};
  if (parts.empty()) return result;
  for (const Automaton* p : parts)
    if (p->empty()) return result;

  const std::size_t n = parts.size();
  std::vector<std::vector<int>> to_global(n);
  std::vector<std::vector<int>> to_local(n, std::vector<int>(sigma.size(), -1));
  for (std::size_t i = 0; i < n; ++i) {
    to_global[i] = detail::event_map(*parts[i], sigma);
    for (std::size_t e = 0; e < to_global[i].size(); ++e)
      to_local[i][static_cast<std::size_t>(to_global[i][e])] = static_cast<int>(e);
  }

  Automaton& out = result.automaton;
  detail::VecMap<int> ids;
  auto add = [&](const std::vector<int>& t) {
    auto [it, fresh] = ids.emplace(t, out.num_states());
    if (fresh) {
      if (static_cast<std::size_t>(out.num_states()) >= budget)
        throw ResourceError("synchronous product exceeded the state budget of " + std::to_string(budget) +
                            " states");
      std::string name = "(";
      bool marked = true;
      for (std::size_t i = 0; i < n; ++i) {
        if (i) name += ',';
        name += parts[i]->state_name(t[i]);
        marked = marked && parts[i]->is_marked(t[i]);
      }
      name += ')';
      out.add_state(std::move(name), marked);
      result.tuples.push_back(t);
    }
    return it->second;
  };

  std::vector<int> init(n);
  for (std::size_t i = 0; i < n; ++i) init[i] = parts[i]->initial();
  add(init);
  std::vector<int> candidates;
  std::vector<std::vector<int>> choices(n);
  for (int cur = 0; cur < out.num_states(); ++cur) {
    const std::vector<int> t = result.tuples[static_cast<std::size_t>(cur)];
    candidates.clear();
    for (std::size_t i = 0; i < n; ++i) {
      for (const Edge& e : parts[i]->out(t[i])) {
        if (e.event == kSilent) {
          auto u = t;
          u[i] = e.dst;
          out.add_transition(cur, kSilent, add(u));
        } else {
          candidates.push_back(to_global[i][static_cast<std::size_t>(e.event)]);
        }
      }
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    for (int g : candidates) {
      bool ok = true;
      for (std::size_t i = 0; i < n && ok; ++i) {
        int l = to_local[i][static_cast<std::size_t>(g)];
        if (l < 0) {
          choices[i] = {t[i]};
        } else {
          choices[i] = parts[i]->successors(t[i], l);
          ok = !choices[i].empty();
        }
      }
      if (!ok) continue;
      std::vector<std::size_t> pos(n, 0);
      while (true) {
        std::vector<int> u(n);
        for (std::size_t i = 0; i < n; ++i) u[i] = choices[i][pos[i]];
        out.add_transition(cur, g, add(u));
        std::size_t i = 0;
        while (i < n && ++pos[i] == choices[i].size()) pos[i++] = 0;
        if (i == n) break;
      }
    }
  }
  return result;
}

inline Automaton sync_product(const Automaton& a, const Automaton& b,
                              std::size_t budget = kDefaultStateBudget) {
  const Automaton* parts[] = {&a, &b};
  return sync_product_all(parts, budget).automaton;
}

/// Natural projection onto `keep`, determinized by subset construction.
/// Result states are named by the set of source states they stand for.
inline Automaton project(const Automaton& a, const EventSet& keep) {
  std::vector<EventId> sigma(keep.begin(), keep.end());
  detail::Dfa d = detail::subset_construction(a, sigma);
  Automaton r(sigma);
  for (int q = 0; q < d.size(); ++q)
    r.add_state(detail::join_names(a, d.subsets[static_cast<std::size_t>(q)], '{', '}'),
                d.marked[static_cast<std::size_t>(q)]);
  for (int q = 0; q < d.size(); ++q)
    for (int e = 0; e < d.num_events; ++e)
      if (int t = d.step(q, e); t >= 0) r.add_transition(q, e, t);
  return r;
}

inline Automaton determinize(const Automaton& a) { return project(a, a.event_set()); }

namespace detail {

inline EventString rebuild_path(const std::vector<std::pair<int, int>>& parent, int node,
                                const std::vector<EventId>& sigma) {
  EventString s;
  while (parent[static_cast<std::size_t>(node)].first >= 0) {
    s.push_back(sigma[static_cast<std::size_t>(parent[static_cast<std::size_t>(node)].second)]);
    node = parent[static_cast<std::size_t>(node)].first;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

}  // namespace detail

/// Decides L_m(a) ⊆ L_m(b). On failure the counterexample string is the
/// shortest (then lexicographically least) string of L_m(a) − L_m(b).
inline Verdict is_subset(const Automaton& a, const Automaton& b) {
  Verdict v;
  if (a.empty()) return v;
  auto sigma = detail::sorted_union(a.events(), b.events());
  auto da = detail::subset_construction(a, sigma);
  auto db = detail::subset_construction(b, sigma);
  detail::Interner seen;
  std::vector<std::pair<int, int>> parent;
  seen.intern({da.initial, db.initial});
  parent.emplace_back(-1, -1);
  for (int cur = 0; cur < seen.size(); ++cur) {
    auto key = seen.key(cur);
    int x = key[0], y = key[1];
    if (da.marked[static_cast<std::size_t>(x)] && (y < 0 || !db.marked[static_cast<std::size_t>(y)])) {
      v.holds = false;
      v.counterexample = Counterexample{detail::rebuild_path(parent, cur, sigma), {}, std::nullopt};
      return v;
    }
    for (int e = 0; e < da.num_events; ++e) {
      int nx = da.step(x, e);
      if (nx < 0) continue;
      auto [id, fresh] = seen.intern({nx, db.step(y, e)});
      if (fresh) parent.emplace_back(cur, e);
    }
  }
  return v;
}

/// Decides L(a) ⊆ L(b).
inline Verdict is_closed_subset(const Automaton& a, const Automaton& b) {
  return is_subset(mark_all(a), mark_all(b));
}

inline bool language_equal(const Automaton& a, const Automaton& b) {
  return is_subset(a, b).holds && is_subset(b, a).holds;
}

inline bool closed_language_equal(const Automaton& a, const Automaton& b) {
  return is_closed_subset(a, b).holds && is_closed_subset(b, a).holds;
}

/// True iff every string of L(a) extends to a string of L_m(a).
inline bool is_nonblocking(const Automaton& a) {
  return is_closed_subset(a, trim(a)).holds;
}

}  // namespace netsup
