#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "netsup/alphabet.hpp"
#include "netsup/automaton.hpp"
#include "netsup/ops.hpp"

namespace netsup {

namespace detail {

inline void require_closed_subset(const Automaton& spec, const Automaton& plant, const char* what) {
  auto v = is_closed_subset(spec, plant);
  if (!v.holds) {
    std::string w;
    for (const auto& e : v.counterexample->string) w += (w.empty() ? "" : " ") + e;
    throw PreconditionError(std::string(what) + ": L(spec) is not contained in L(plant); spec string '" + w +
                            "' is not a plant string");
  }
}

inline std::vector<char> mask_of(const std::vector<EventId>& sigma, const EventSet& set) {
  std::vector<char> m(sigma.size());
  for (std::size_t i = 0; i < sigma.size(); ++i) m[i] = contains(set, sigma[i]);
  return m;
}

}  // namespace detail

/// Language controllability of L(spec) with respect to L(plant) and the
/// uncontrollable events of `alphabet`. Shortest counterexample (s, σ).
inline Verdict check_controllability(const Automaton& spec, const Automaton& plant, const Alphabet& alphabet) {
  detail::require_closed_subset(spec, plant, "check_controllability");
  Verdict v;
  if (spec.empty()) return v;
  auto sigma = detail::sorted_union(spec.events(), plant.events());
  auto ds = detail::subset_construction(spec, sigma);
  auto dp = detail::subset_construction(plant, sigma);
  auto ctrl = detail::mask_of(sigma, alphabet.controllable());
  detail::Interner seen;
  std::vector<std::pair<int, int>> parent{{-1, -1}};
  seen.intern({ds.initial, dp.initial});
  for (int cur = 0; cur < seen.size(); ++cur) {
    auto key = seen.key(cur);
    for (int e = 0; e < ds.num_events; ++e) {
      if (!ctrl[static_cast<std::size_t>(e)] && dp.enabled(key[1], e) && !ds.enabled(key[0], e)) {
        v.holds = false;
        v.counterexample = Counterexample{detail::rebuild_path(parent, cur, sigma), sigma[static_cast<std::size_t>(e)],
                                          std::nullopt};
        return v;
      }
    }
    for (int e = 0; e < ds.num_events; ++e) {
      if (!ds.enabled(key[0], e)) continue;
      auto [id, fresh] = seen.intern({ds.step(key[0], e), dp.step(key[1], e)});
      if (fresh) parent.emplace_back(cur, e);
    }
  }
  return v;
}

/// Observability of L(spec) with respect to L(plant), the natural projection
/// onto the observable events, and the controllable events. Decided on the
/// twin product (s tracked in spec, s' tracked in spec and plant). The
/// counterexample string is s' (s'σ leaves the spec); the witness is s (sσ
/// stays in it) with the same projection.
inline Verdict check_observability(const Automaton& spec, const Automaton& plant, const Alphabet& alphabet) {
  detail::require_closed_subset(spec, plant, "check_observability");
  Verdict v;
  if (spec.empty()) return v;
  auto sigma = detail::sorted_union(spec.events(), plant.events());
  auto dk = detail::subset_construction(spec, sigma);
  auto dg = detail::subset_construction(plant, sigma);
  auto ctrl = detail::mask_of(sigma, alphabet.controllable());
  auto obs = detail::mask_of(sigma, alphabet.observable());

  struct Move {
    int prev, event, who;  // who: 0 joint, 1 copy of s, 2 copy of s'
  };
  detail::Interner seen;
  std::vector<Move> parent{{-1, -1, 0}};
  seen.intern({dk.initial, dk.initial, dg.initial});
  auto visit = [&](std::vector<int> key, int cur, int e, int who) {
    auto [id, fresh] = seen.intern(key);
    if (fresh) parent.push_back({cur, e, who});
  };
  for (int cur = 0; cur < seen.size(); ++cur) {
    auto key = seen.key(cur);
    int k1 = key[0], k2 = key[1], g2 = key[2];
    for (int e = 0; e < dk.num_events; ++e) {
      if (ctrl[static_cast<std::size_t>(e)] && dk.enabled(k1, e) && dg.enabled(g2, e) && !dk.enabled(k2, e)) {
        EventString s1, s2;
        for (int n = cur; parent[static_cast<std::size_t>(n)].prev >= 0; n = parent[static_cast<std::size_t>(n)].prev) {
          const auto& m = parent[static_cast<std::size_t>(n)];
          if (m.who != 2) s1.push_back(sigma[static_cast<std::size_t>(m.event)]);
          if (m.who != 1) s2.push_back(sigma[static_cast<std::size_t>(m.event)]);
        }
        std::reverse(s1.begin(), s1.end());
        std::reverse(s2.begin(), s2.end());
        v.holds = false;
        v.counterexample = Counterexample{s2, sigma[static_cast<std::size_t>(e)], s1};
        return v;
      }
    }
    for (int e = 0; e < dk.num_events; ++e) {
      if (obs[static_cast<std::size_t>(e)]) {
        if (dk.enabled(k1, e) && dk.enabled(k2, e)) visit({dk.step(k1, e), dk.step(k2, e), dg.step(g2, e)}, cur, e, 0);
      } else {
        if (dk.enabled(k1, e)) visit({dk.step(k1, e), k2, g2}, cur, e, 1);
        if (dk.enabled(k2, e)) visit({k1, dk.step(k2, e), dg.step(g2, e)}, cur, e, 2);
      }
    }
  }
  return v;
}

/// Supremal controllable and normal supervisor.
///
/// Returns a deterministic automaton S over the observable events such that
/// the closed loop plant || S has marked language inside L_m(spec), is
/// nonblocking, and has a closed language that is controllable with respect
/// to L(plant) and normal with respect to the observable projection. S marks
/// an observation only when every plant string with that observation which
/// the plant marks is also marked by the spec. An empty automaton means that
/// no such supervisor exists.
///
/// The plant may be nondeterministic; nonblocking is then enforced state-wise
/// on the closed loop.
inline Automaton sup_controllable_normal(const Automaton& plant, const Automaton& spec, const Alphabet& alphabet,
                                         std::size_t budget = kDefaultStateBudget) {
  const EventSet& observable = alphabet.observable();
  Automaton result(observable);
  if (plant.empty()) return result;

  const Automaton target = trim(spec);
  const auto sigma = detail::sorted_union(plant.events(), spec.events());
  const auto de = detail::subset_construction(target, sigma);
  const auto pmap = detail::event_map(plant, sigma);
  const auto obs = detail::mask_of(sigma, observable);
  const auto ctrl = detail::mask_of(sigma, alphabet.controllable());

  // H: plant paired with the deterministic spec state (-1 once outside the spec).
  detail::Interner hids;
  std::vector<std::vector<Edge>> hout;
  auto hadd = [&](int p, int e) {
    auto [id, fresh] = hids.intern({p, e});
    if (fresh) {
      if (static_cast<std::size_t>(hids.size()) > budget)
        throw ResourceError("synthesis exceeded the state budget");
      hout.emplace_back();
    }
    return id;
  };
  hadd(plant.initial(), de.initial);
  for (int h = 0; h < hids.size(); ++h) {
    const int p = hids.key(h)[0], e = hids.key(h)[1];
    for (const Edge& ed : plant.out(p)) {
      if (ed.event == kSilent) {
        int t = hadd(ed.dst, e);
        hout[static_cast<std::size_t>(h)].push_back({kSilent, t});
      } else {
        int g = pmap[static_cast<std::size_t>(ed.event)];
        int t = hadd(ed.dst, de.step(e, g));
        hout[static_cast<std::size_t>(h)].push_back({g, t});
      }
    }
  }
  const int nh = hids.size();
  auto hp = [&](int h) { return hids.key(h)[0]; };
  auto he = [&](int h) { return hids.key(h)[1]; };
  auto hidden = [&](int ev) { return ev == kSilent || !obs[static_cast<std::size_t>(ev)]; };

  // Observer of H over the observable events.
  auto closure = [&](std::vector<int> set) {
    std::vector<char> in(static_cast<std::size_t>(nh), 0);
    for (int h : set) in[static_cast<std::size_t>(h)] = 1;
    for (std::size_t i = 0; i < set.size(); ++i)
      for (const Edge& ed : hout[static_cast<std::size_t>(set[i])])
        if (hidden(ed.event) && !in[static_cast<std::size_t>(ed.dst)]) {
          in[static_cast<std::size_t>(ed.dst)] = 1;
          set.push_back(ed.dst);
        }
    std::sort(set.begin(), set.end());
    return set;
  };
  const int ns = static_cast<int>(sigma.size());
  detail::Interner oids;
  std::vector<int> onext;
  auto oadd = [&](std::vector<int> set) {
    auto [id, fresh] = oids.intern(set);
    if (fresh) {
      if (static_cast<std::size_t>(oids.size()) > budget)
        throw ResourceError("synthesis exceeded the state budget");
      onext.resize(onext.size() + static_cast<std::size_t>(ns), -1);
    }
    return id;
  };
  oadd(closure({0}));
  std::vector<std::vector<int>> buckets(static_cast<std::size_t>(ns));
  for (int o = 0; o < oids.size(); ++o) {
    // An observation holding an out-of-spec state is dead; its successors
    // are only needed if reached some other way.
    const auto& key = oids.key(o);
    if (std::any_of(key.begin(), key.end(), [&](int h) { return he(h) < 0; })) continue;
    for (auto& b : buckets) b.clear();
    for (int h : oids.key(o))
      for (const Edge& ed : hout[static_cast<std::size_t>(h)])
        if (!hidden(ed.event)) buckets[static_cast<std::size_t>(ed.event)].push_back(ed.dst);
    for (int g = 0; g < ns; ++g) {
      auto& b = buckets[static_cast<std::size_t>(g)];
      if (b.empty()) continue;
      std::sort(b.begin(), b.end());
      b.erase(std::unique(b.begin(), b.end()), b.end());
      int t = oadd(closure(b));
      onext[static_cast<std::size_t>(o) * ns + g] = t;
    }
  }
  const int no = oids.size();
  auto step = [&](int o, int g) { return onext[static_cast<std::size_t>(o) * ns + g]; };

  std::vector<char> alive(static_cast<std::size_t>(no), 1), omark(static_cast<std::size_t>(no), 1);
  for (int o = 0; o < no; ++o)
    for (int h : oids.key(o)) {
      if (he(h) < 0) alive[static_cast<std::size_t>(o)] = 0;
      else if (plant.is_marked(hp(h)) && !de.marked[static_cast<std::size_t>(he(h))])
        omark[static_cast<std::size_t>(o)] = 0;
    }

  // Controllability: an observation whose uncontrollable observable
  // continuation is dead must itself die.
  std::vector<std::vector<int>> unc_pred(static_cast<std::size_t>(no));
  for (int o = 0; o < no; ++o)
    for (int g = 0; g < ns; ++g)
      if (!ctrl[static_cast<std::size_t>(g)] && step(o, g) >= 0)
        unc_pred[static_cast<std::size_t>(step(o, g))].push_back(o);
  auto propagate = [&]() {
    std::vector<int> work;
    for (int o = 0; o < no; ++o)
      if (!alive[static_cast<std::size_t>(o)]) work.push_back(o);
    while (!work.empty()) {
      int o = work.back();
      work.pop_back();
      for (int p : unc_pred[static_cast<std::size_t>(o)])
        if (alive[static_cast<std::size_t>(p)]) {
          alive[static_cast<std::size_t>(p)] = 0;
          work.push_back(p);
        }
    }
  };

  // Node offsets for the closed-loop graph (o, h) with h ∈ o.
  std::vector<int> offset(static_cast<std::size_t>(no) + 1, 0);
  for (int o = 0; o < no; ++o)
    offset[static_cast<std::size_t>(o) + 1] = offset[static_cast<std::size_t>(o)] + static_cast<int>(oids.key(o).size());
  auto node = [&](int o, int h) {
    const auto& set = oids.key(o);
    return offset[static_cast<std::size_t>(o)] +
           static_cast<int>(std::lower_bound(set.begin(), set.end(), h) - set.begin());
  };
  const int nn = offset.back();

  while (true) {
    propagate();
    std::vector<std::vector<int>> rev(static_cast<std::size_t>(nn));
    std::vector<char> co(static_cast<std::size_t>(nn), 0);
    std::vector<int> stack;
    for (int o = 0; o < no; ++o) {
      if (!alive[static_cast<std::size_t>(o)]) continue;
      for (int h : oids.key(o)) {
        int from = node(o, h);
        if (omark[static_cast<std::size_t>(o)] && plant.is_marked(hp(h))) {
          co[static_cast<std::size_t>(from)] = 1;
          stack.push_back(from);
        }
        for (const Edge& ed : hout[static_cast<std::size_t>(h)]) {
          int to_o = hidden(ed.event) ? o : step(o, ed.event);
          if (to_o < 0 || !alive[static_cast<std::size_t>(to_o)]) continue;
          rev[static_cast<std::size_t>(node(to_o, ed.dst))].push_back(from);
        }
      }
    }
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      for (int y : rev[static_cast<std::size_t>(x)])
        if (!co[static_cast<std::size_t>(y)]) {
          co[static_cast<std::size_t>(y)] = 1;
          stack.push_back(y);
        }
    }
    bool changed = false;
    for (int o = 0; o < no; ++o) {
      if (!alive[static_cast<std::size_t>(o)]) continue;
      for (int h : oids.key(o))
        if (!co[static_cast<std::size_t>(node(o, h))]) {
          alive[static_cast<std::size_t>(o)] = 0;
          changed = true;
          break;
        }
    }
    if (!changed) break;
  }

  if (!alive[0]) return result;
  std::vector<int> id(static_cast<std::size_t>(no), -1);
  std::vector<int> order{0};
  id[0] = result.add_state("s0", omark[0]);
  for (std::size_t i = 0; i < order.size(); ++i) {
    int o = order[i];
    for (int g = 0; g < ns; ++g) {
      int t = step(o, g);
      if (t < 0 || !alive[static_cast<std::size_t>(t)]) continue;
      if (id[static_cast<std::size_t>(t)] < 0) {
        id[static_cast<std::size_t>(t)] =
            result.add_state("s" + std::to_string(result.num_states()), omark[static_cast<std::size_t>(t)]);
        order.push_back(t);
      }
      result.add_transition(id[static_cast<std::size_t>(o)], sigma[static_cast<std::size_t>(g)],
                            id[static_cast<std::size_t>(t)]);
    }
  }
  return result;
}

}  // namespace netsup
