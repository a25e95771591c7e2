#pragma once

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "netsup/alphabet.hpp"
#include "netsup/automaton.hpp"
#include "netsup/delay_maps.hpp"
#include "netsup/ops.hpp"
#include "netsup/supervisory.hpp"

namespace netsup {

/// A local supervisor: what it sees, what it may disable (under the
/// conjunctive and disjunctive rules), and its channel delay bounds.
struct Site {
  EventSet observable;
  EventSet controllable;
  EventSet cp;  // conjunctive-permissive events
  EventSet da;  // disjunctive-anti-permissive events
  int obs_delay = 0;
  int ctrl_delay = 0;

  /// Σ_i, the events the site knows about.
  EventSet events() const { return set_union(observable, controllable); }

  void validate(const Alphabet& alphabet) const {
    if (!is_subset_of(set_union(cp, da), controllable))
      throw PreconditionError("site: cp and da events must be site-controllable");
    if (!is_subset_of(controllable, alphabet.controllable()))
      throw PreconditionError("site: controllable events must be controllable");
    if (!is_subset_of(observable, alphabet.observable()))
      throw PreconditionError("site: observable events must be observable");
    if (obs_delay < 0 || ctrl_delay < 0) throw PreconditionError("site: delay bounds must be nonnegative");
  }
};

enum class CoobservabilityMode { kConjunctive, kDisjunctive };

struct FusionValues {
  EventSet vc, vd, vg;
  std::vector<EventSet> vc_site, vd_site;
};

namespace detail {

/// Pairs (spec state, plant state) of the strings in the spec's closed
/// language sharing the site projection `t`.
class SiteEstimator {
 public:
  SiteEstimator(const Dfa& dk, const Dfa& dg, std::vector<char> observable)
      : dk_(dk), dg_(dg), obs_(std::move(observable)) {}

  using Set = std::set<std::pair<int, int>>;

  Set initial() const {
    Set s;
    if (dk_.initial >= 0) s.emplace(dk_.initial, dg_.initial);
    return close(std::move(s));
  }

  Set observe(const Set& s, int e) const {
    Set r;
    for (auto [k, g] : s)
      if (dk_.enabled(k, e)) r.emplace(dk_.step(k, e), dg_.step(g, e));
    return close(std::move(r));
  }

 private:
  Set close(Set s) const {
    std::vector<std::pair<int, int>> work(s.begin(), s.end());
    while (!work.empty()) {
      auto [k, g] = work.back();
      work.pop_back();
      for (int e = 0; e < dk_.num_events; ++e)
        if (!obs_[static_cast<std::size_t>(e)] && dk_.enabled(k, e)) {
          std::pair<int, int> n{dk_.step(k, e), dg_.step(g, e)};
          if (s.insert(n).second) work.push_back(n);
        }
    }
    return s;
  }

  const Dfa& dk_;
  const Dfa& dg_;
  std::vector<char> obs_;
};

inline void validate_sites(const std::vector<Site>& sites, const Alphabet& alphabet) {
  if (sites.empty()) throw PreconditionError("at least one site is required");
  for (const auto& s : sites) s.validate(alphabet);
}

inline bool string_in(const Dfa& d, const std::vector<EventId>& sigma, const EventString& s) {
  int q = d.initial;
  for (const auto& e : s) {
    auto it = std::lower_bound(sigma.begin(), sigma.end(), e);
    if (it == sigma.end() || *it != e) return false;
    q = d.step(q, static_cast<int>(it - sigma.begin()));
    if (q < 0) return false;
  }
  return q >= 0;
}

/// Strongly connected components (iterative Tarjan) of the subgraph given by
/// `use_edge`.
inline std::vector<int> scc_ids(const Automaton& a, const std::function<bool(const Edge&)>& use_edge) {
  const int n = a.num_states();
  std::vector<int> index(static_cast<std::size_t>(n), -1), low(static_cast<std::size_t>(n), 0),
      comp(static_cast<std::size_t>(n), -1);
  std::vector<char> on_stack(static_cast<std::size_t>(n), 0);
  std::vector<int> stack;
  int counter = 0, ncomp = 0;
  for (int root = 0; root < n; ++root) {
    if (index[static_cast<std::size_t>(root)] >= 0) continue;
    std::vector<std::pair<int, std::size_t>> call{{root, 0}};
    index[static_cast<std::size_t>(root)] = low[static_cast<std::size_t>(root)] = counter++;
    stack.push_back(root);
    on_stack[static_cast<std::size_t>(root)] = 1;
    while (!call.empty()) {
      auto& [v, i] = call.back();
      auto edges = a.out(v);
      if (i < edges.size()) {
        const Edge& e = edges[i++];
        if (!use_edge(e)) continue;
        int w = e.dst;
        if (index[static_cast<std::size_t>(w)] < 0) {
          index[static_cast<std::size_t>(w)] = low[static_cast<std::size_t>(w)] = counter++;
          stack.push_back(w);
          on_stack[static_cast<std::size_t>(w)] = 1;
          call.emplace_back(w, 0);
        } else if (on_stack[static_cast<std::size_t>(w)]) {
          low[static_cast<std::size_t>(v)] = std::min(low[static_cast<std::size_t>(v)], index[static_cast<std::size_t>(w)]);
        }
        continue;
      }
      int done = v;
      call.pop_back();
      if (!call.empty()) {
        int parent = call.back().first;
        low[static_cast<std::size_t>(parent)] =
            std::min(low[static_cast<std::size_t>(parent)], low[static_cast<std::size_t>(done)]);
      }
      if (low[static_cast<std::size_t>(done)] == index[static_cast<std::size_t>(done)]) {
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[static_cast<std::size_t>(w)] = 0;
          comp[static_cast<std::size_t>(w)] = ncomp;
        } while (w != done);
        ++ncomp;
      }
    }
  }
  return comp;
}

}  // namespace detail

/// V_c, V_d and V_g after plant string s, with the per-site values.
inline FusionValues eval_fusion(const std::vector<Site>& sites, const Automaton& spec, const Automaton& plant,
                                const Alphabet& alphabet, const EventString& s) {
  detail::validate_sites(sites, alphabet);
  auto sigma = detail::sorted_union(spec.events(), plant.events());
  auto dk = detail::subset_construction(spec, sigma);
  auto dg = detail::subset_construction(plant, sigma);
  if (!detail::string_in(dg, sigma, s)) throw PreconditionError("eval_fusion: string is not generated by the plant");
  const EventSet unc = alphabet.uncontrollable();
  FusionValues f;
  f.vc = alphabet.events();
  f.vd = unc;
  for (const auto& site : sites) {
    detail::SiteEstimator est(dk, dg, detail::mask_of(sigma, site.observable));
    auto cur = est.initial();
    for (const auto& e : s)
      if (contains(site.observable, e)) cur = est.observe(cur, static_cast<int>(
                                              std::lower_bound(sigma.begin(), sigma.end(), e) - sigma.begin()));
    auto index_of = [&](const EventId& e) -> int {
      auto it = std::lower_bound(sigma.begin(), sigma.end(), e);
      return it != sigma.end() && *it == e ? static_cast<int>(it - sigma.begin()) : -1;
    };
    EventSet vc = set_union(set_minus(alphabet.controllable(), site.cp), unc);
    for (const auto& e : site.cp) {
      int i = index_of(e);
      if (i >= 0 && std::any_of(cur.begin(), cur.end(), [&](auto kg) { return dk.enabled(kg.first, i); }))
        vc.insert(e);
    }
    EventSet vd = unc;
    for (const auto& e : site.da) {
      int i = index_of(e);
      if (i < 0 || std::all_of(cur.begin(), cur.end(), [&](auto kg) {
            return !dg.enabled(kg.second, i) || dk.enabled(kg.first, i);
          }))
        vd.insert(e);
    }
    f.vc = set_intersection(f.vc, vc);
    f.vd = set_union(f.vd, vd);
    f.vc_site.push_back(std::move(vc));
    f.vd_site.push_back(std::move(vd));
  }
  f.vg = set_union(f.vc, f.vd);
  return f;
}

/// (C&P) or (D&A) co-observability of the spec's closed language, decided on
/// a product with one reference copy and one copy per site. In C&P mode the
/// counterexample is s with sσ outside the spec; in D&A mode sσ is inside it
/// and the witness is a confusable string of the first site responsible for σ.
inline Verdict check_coobservability(const Automaton& spec, const Automaton& plant, const std::vector<Site>& sites,
                                     const Alphabet& alphabet, CoobservabilityMode mode,
                                     std::size_t budget = kDefaultStateBudget) {
  detail::validate_sites(sites, alphabet);
  detail::require_closed_subset(spec, plant, "check_coobservability");
  Verdict v;
  if (spec.empty()) return v;
  auto sigma = detail::sorted_union(spec.events(), plant.events());
  auto dk = detail::subset_construction(spec, sigma);
  auto dg = detail::subset_construction(plant, sigma);
  const std::size_t n = sites.size();
  const bool cp = mode == CoobservabilityMode::kConjunctive;
  std::vector<std::vector<char>> obs, resp;
  std::vector<char> any_resp(sigma.size(), 0);
  for (const auto& s : sites) {
    obs.push_back(detail::mask_of(sigma, s.observable));
    resp.push_back(detail::mask_of(sigma, cp ? s.cp : s.da));
    for (std::size_t e = 0; e < sigma.size(); ++e) any_resp[e] |= resp.back()[e];
  }

  struct Move {
    int prev, event, who;  // who: -1 joint, i site copy i alone
  };
  detail::Interner seen;
  std::vector<Move> parent{{-1, -1, -1}};
  std::vector<int> init{dk.initial, dg.initial};
  for (std::size_t i = 0; i < n; ++i) init.insert(init.end(), {dk.initial, dg.initial});
  seen.intern(init);
  auto visit = [&](const std::vector<int>& key, int cur, int e, int who) {
    auto [id, fresh] = seen.intern(key);
    if (fresh) {
      if (static_cast<std::size_t>(seen.size()) > budget)
        throw ResourceError("co-observability product exceeded the state budget");
      parent.push_back({cur, e, who});
    }
  };
  auto strings = [&](int node, int site) {
    EventString ref, loc;
    for (int x = node; parent[static_cast<std::size_t>(x)].prev >= 0; x = parent[static_cast<std::size_t>(x)].prev) {
      const auto& m = parent[static_cast<std::size_t>(x)];
      const auto& ev = sigma[static_cast<std::size_t>(m.event)];
      if (m.who < 0) ref.push_back(ev);
      if (m.who == site || (m.who < 0 && obs[static_cast<std::size_t>(site)][static_cast<std::size_t>(m.event)]))
        loc.push_back(ev);
    }
    std::reverse(ref.begin(), ref.end());
    std::reverse(loc.begin(), loc.end());
    return std::make_pair(ref, loc);
  };

  for (int cur = 0; cur < seen.size(); ++cur) {
    const auto key = seen.key(cur);
    const int k = key[0], g = key[1];
    auto ki = [&](std::size_t i) { return key[2 + 2 * i]; };
    auto gi = [&](std::size_t i) { return key[3 + 2 * i]; };
    for (int e = 0; e < dk.num_events; ++e) {
      if (!any_resp[static_cast<std::size_t>(e)]) continue;
      bool bad = cp ? dg.enabled(g, e) && !dk.enabled(k, e) : dk.enabled(k, e);
      if (!bad) continue;
      int first = -1;
      for (std::size_t i = 0; i < n && bad; ++i) {
        if (!resp[i][static_cast<std::size_t>(e)]) continue;
        bool confused = cp ? dk.enabled(ki(i), e) : dg.enabled(gi(i), e) && !dk.enabled(ki(i), e);
        if (!confused) bad = false;
        else if (first < 0) first = static_cast<int>(i);
      }
      if (!bad) continue;
      auto [ref, loc] = strings(cur, first);
      v.holds = false;
      v.counterexample = Counterexample{ref, sigma[static_cast<std::size_t>(e)], loc};
      return v;
    }
    for (int e = 0; e < dk.num_events; ++e) {
      if (dk.enabled(k, e)) {
        std::vector<int> nk{dk.step(k, e), dg.step(g, e)};
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i) {
          if (obs[i][static_cast<std::size_t>(e)]) {
            ok = dk.enabled(ki(i), e);
            nk.insert(nk.end(), {dk.step(ki(i), e), dg.step(gi(i), e)});
          } else {
            nk.insert(nk.end(), {ki(i), gi(i)});
          }
        }
        if (ok) visit(nk, cur, e, -1);
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (obs[i][static_cast<std::size_t>(e)] || !dk.enabled(ki(i), e)) continue;
        auto nk = key;
        nk[2 + 2 * i] = dk.step(ki(i), e);
        nk[3 + 2 * i] = dg.step(gi(i), e);
        visit(nk, cur, e, static_cast<int>(i));
      }
    }
  }
  return v;
}

/// Fails with UncontrollableLoop when a reachable cycle of the plant fires
/// an uncontrollable event.
inline void require_no_uncontrollable_loop(const Automaton& plant, const Alphabet& alphabet) {
  Automaton a = accessible(plant);
  auto unc = detail::mask_of(a.events(), alphabet.uncontrollable());
  auto comp = detail::scc_ids(a, [&](const Edge& e) { return e.event == kSilent || unc[static_cast<std::size_t>(e.event)]; });
  for (int q = 0; q < a.num_states(); ++q)
    for (const Edge& e : a.out(q))
      if (e.event != kSilent && unc[static_cast<std::size_t>(e.event)] &&
          comp[static_cast<std::size_t>(q)] == comp[static_cast<std::size_t>(e.dst)])
        throw UncontrollableLoop("plant has a cycle through uncontrollable event '" + a.event_name(e.event) +
                                 "' at state '" + a.state_name(q) + "'");
}

/// Delay co-observability of the spec's closed language. The counterexample
/// string is s·u (u uncontrollable) with s·u·σ a plant string outside the
/// spec; the witness is s'·u'·σ-enabling string of the first site controlling σ.
inline Verdict check_delay_coobservability(const Automaton& spec, const Automaton& plant,
                                           const std::vector<Site>& sites, const Alphabet& alphabet,
                                           std::size_t budget = kDefaultStateBudget) {
  detail::validate_sites(sites, alphabet);
  detail::require_closed_subset(spec, plant, "check_delay_coobservability");
  require_no_uncontrollable_loop(plant, alphabet);
  for (const auto& s : sites)
    if (!is_subset_of(s.controllable, s.observable))
      throw AssumptionViolation("site controls an event it does not observe");
  Verdict v;
  if (spec.empty()) return v;
  auto sigma = detail::sorted_union(spec.events(), plant.events());
  auto dk = detail::subset_construction(spec, sigma);
  auto dg = detail::subset_construction(plant, sigma);
  const std::size_t n = sites.size();
  auto unc = detail::mask_of(sigma, alphabet.uncontrollable());
  auto ctrl = detail::mask_of(sigma, alphabet.controllable());
  std::vector<std::vector<char>> obs, resp;
  for (const auto& s : sites) {
    obs.push_back(detail::mask_of(sigma, s.observable));
    resp.push_back(detail::mask_of(sigma, s.controllable));
  }

  // Uncontrollable continuations inside the spec, with the suffix reaching each.
  struct Reach {
    std::vector<std::vector<int>> keys;
    std::vector<EventString> suffix;
  };
  auto reach = [&](std::vector<int> start) {
    Reach r;
    std::set<std::vector<int>> seen{start};
    r.keys.push_back(std::move(start));
    r.suffix.emplace_back();
    for (std::size_t i = 0; i < r.keys.size(); ++i) {
      for (int e = 0; e < dk.num_events; ++e) {
        if (!unc[static_cast<std::size_t>(e)] || !dk.enabled(r.keys[i][0], e)) continue;
        std::vector<int> nk{dk.step(r.keys[i][0], e)};
        if (r.keys[i].size() > 1) nk.push_back(dg.step(r.keys[i][1], e));
        if (!seen.insert(nk).second) continue;
        auto suf = r.suffix[i];
        suf.push_back(sigma[static_cast<std::size_t>(e)]);
        r.keys.push_back(std::move(nk));
        r.suffix.push_back(std::move(suf));
      }
    }
    return r;
  };
  std::map<int, Reach> site_reach;
  auto site_reach_of = [&](int k) -> const Reach& {
    auto it = site_reach.find(k);
    if (it == site_reach.end()) it = site_reach.emplace(k, reach({k})).first;
    return it->second;
  };

  struct Move {
    int prev, event, who;
  };
  detail::Interner seen;
  std::vector<Move> parent{{-1, -1, -1}};
  std::vector<int> init{dk.initial, dg.initial};
  init.insert(init.end(), n, dk.initial);
  seen.intern(init);
  auto visit = [&](const std::vector<int>& key, int cur, int e, int who) {
    auto [id, fresh] = seen.intern(key);
    if (fresh) {
      if (static_cast<std::size_t>(seen.size()) > budget)
        throw ResourceError("delay co-observability product exceeded the state budget");
      parent.push_back({cur, e, who});
    }
  };
  auto strings = [&](int node, int site) {
    EventString ref, loc;
    for (int x = node; parent[static_cast<std::size_t>(x)].prev >= 0; x = parent[static_cast<std::size_t>(x)].prev) {
      const auto& m = parent[static_cast<std::size_t>(x)];
      const auto& ev = sigma[static_cast<std::size_t>(m.event)];
      if (m.who < 0) ref.push_back(ev);
      if (site >= 0 &&
          (m.who == site || (m.who < 0 && obs[static_cast<std::size_t>(site)][static_cast<std::size_t>(m.event)])))
        loc.push_back(ev);
    }
    std::reverse(ref.begin(), ref.end());
    std::reverse(loc.begin(), loc.end());
    return std::make_pair(ref, loc);
  };

  for (int cur = 0; cur < seen.size(); ++cur) {
    const auto key = seen.key(cur);
    Reach ref_reach = reach({key[0], key[1]});
    for (std::size_t r = 0; r < ref_reach.keys.size(); ++r) {
      const int k = ref_reach.keys[r][0], g = ref_reach.keys[r][1];
      for (int e = 0; e < dk.num_events; ++e) {
        if (!ctrl[static_cast<std::size_t>(e)] || !dg.enabled(g, e) || dk.enabled(k, e)) continue;
        bool blocked_by_some = false;
        int first = -1;
        EventString first_suffix;
        for (std::size_t i = 0; i < n && !blocked_by_some; ++i) {
          if (!resp[i][static_cast<std::size_t>(e)]) continue;
          const Reach& sr = site_reach_of(key[2 + i]);
          bool confused = false;
          for (std::size_t j = 0; j < sr.keys.size() && !confused; ++j)
            if (dk.enabled(sr.keys[j][0], e)) {
              confused = true;
              if (first < 0) {
                first = static_cast<int>(i);
                first_suffix = sr.suffix[j];
              }
            }
          if (!confused) blocked_by_some = true;
        }
        if (blocked_by_some) continue;
        auto [s, loc] = strings(cur, first);
        s.insert(s.end(), ref_reach.suffix[r].begin(), ref_reach.suffix[r].end());
        std::optional<EventString> witness;
        if (first >= 0) {
          loc.insert(loc.end(), first_suffix.begin(), first_suffix.end());
          witness = loc;
        }
        v.holds = false;
        v.counterexample = Counterexample{s, sigma[static_cast<std::size_t>(e)], witness};
        return v;
      }
    }
    const int k = key[0], g = key[1];
    for (int e = 0; e < dk.num_events; ++e) {
      if (dk.enabled(k, e)) {
        std::vector<int> nk{dk.step(k, e), dg.step(g, e)};
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i) {
          int ki = key[2 + i];
          if (obs[i][static_cast<std::size_t>(e)]) {
            ok = dk.enabled(ki, e);
            nk.push_back(dk.step(ki, e));
          } else {
            nk.push_back(ki);
          }
        }
        if (ok) visit(nk, cur, e, -1);
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (obs[i][static_cast<std::size_t>(e)] || !dk.enabled(key[2 + i], e)) continue;
        auto nk = key;
        nk[2 + i] = dk.step(key[2 + i], e);
        visit(nk, cur, e, static_cast<int>(i));
      }
    }
  }
  return v;
}

/// Θ_i(s): site projections of s with up to N_o trailing events undelivered.
inline std::set<EventString> theta_site(const EventString& s, const Site& site) {
  std::set<EventString> r;
  for (const auto& t : theta_d(s, site.obs_delay)) {
    EventString p;
    for (const auto& e : t)
      if (contains(site.observable, e)) p.push_back(e);
    r.insert(std::move(p));
  }
  return r;
}

/// π_{i,min}(θ): events defined within N_c steps of any required-behavior
/// state the site may be in after seeing θ, plus the site's uncontrollable
/// events. G_r must be deterministic.
inline EventSet pi_min(const Site& site, const Automaton& required, const Alphabet& alphabet,
                       const EventString& observed) {
  if (!required.is_deterministic()) throw PreconditionError("pi_min: required automaton must be deterministic");
  EventSet result = set_intersection(alphabet.uncontrollable(), site.events());
  if (required.empty()) return result;
  std::vector<char> hidden(static_cast<std::size_t>(required.num_events()));
  for (int e = 0; e < required.num_events(); ++e)
    hidden[static_cast<std::size_t>(e)] = !contains(site.observable, required.event_name(e));
  std::vector<int> cur{required.initial()};
  detail::close_over(required, hidden, cur);
  for (const auto& ev : observed) {
    auto e = required.find_event(ev);
    std::vector<int> next;
    if (e && contains(site.observable, ev))
      for (int q : cur)
        for (int t : required.successors(q, *e)) next.push_back(t);
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    detail::close_over(required, hidden, next);
    cur = std::move(next);
  }
  // Up to N_o unreported events, then up to N_c events of command lag.
  auto within = [&](std::vector<int> from, int steps) {
    std::vector<int> dist(static_cast<std::size_t>(required.num_states()), -1);
    std::deque<int> queue;
    for (int q : from) {
      dist[static_cast<std::size_t>(q)] = 0;
      queue.push_back(q);
    }
    while (!queue.empty()) {
      int q = queue.front();
      queue.pop_front();
      for (const Edge& e : required.out(q)) {
        int d = dist[static_cast<std::size_t>(q)] + (e.event == kSilent ? 0 : 1);
        if (d > steps) continue;
        int& b = dist[static_cast<std::size_t>(e.dst)];
        if (b < 0 || d < b) {
          b = d;
          if (e.event == kSilent) queue.push_front(e.dst);
          else queue.push_back(e.dst);
        }
      }
    }
    std::vector<int> r;
    for (int q = 0; q < required.num_states(); ++q)
      if (dist[static_cast<std::size_t>(q)] >= 0) r.push_back(q);
    return r;
  };
  for (int q : within(within(cur, site.obs_delay), site.ctrl_delay))
    for (const Edge& e : required.out(q))
      if (e.event != kSilent) result.insert(required.event_name(e.event));
  return result;
}

struct DcpndesReport {
  bool feasible_co_control = true;
  bool feasible_co_observation = true;
  bool kr_contained = true;
  bool la_contained = true;
  int depth = 0;
  std::optional<EventString> co_control_witness;
  std::optional<EventString> kr_witness;  // required string outside L_r
  std::optional<EventString> la_witness;  // L_a string outside K_a
};

/// Evaluates the four DCPNDES conditions for the conjunction of the minimal
/// site policies over all plant strings of length at most `depth`.
inline DcpndesReport check_dcpndes_bounded(const Automaton& plant, const Automaton& required,
                                           const Automaton& admissible, const std::vector<Site>& sites,
                                           const Alphabet& alphabet, int depth) {
  detail::validate_sites(sites, alphabet);
  if (depth < 1) throw PreconditionError("check_dcpndes_bounded: depth must be at least 1");
  DcpndesReport rep;
  rep.depth = depth;
  auto sigma = detail::sorted_union(detail::sorted_union(plant.events(), required.events()), admissible.events());
  auto dg = detail::subset_construction(plant, sigma);
  auto dr = detail::subset_construction(required, sigma);
  auto da = detail::subset_construction(admissible, sigma);
  const EventSet unc = alphabet.uncontrollable();

  std::map<std::pair<std::size_t, EventString>, EventSet> policy;
  auto pi = [&](std::size_t i, const EventString& theta) -> const EventSet& {
    auto key = std::make_pair(i, theta);
    auto it = policy.find(key);
    if (it == policy.end()) it = policy.emplace(key, pi_min(sites[i], required, alphabet, theta)).first;
    return it->second;
  };
  // Policy value recorded for each observation, to confirm it depends on θ alone.
  std::map<std::pair<std::size_t, EventString>, EventSet> seen_policy;

  // All of σ's per-site admissions along the last N_c+1 prefixes.
  auto allowed = [&](const EventString& s, const EventId& sigma_ev, bool every_m) {
    for (std::size_t i = 0; i < sites.size(); ++i) {
      bool site_ok = every_m;
      for (int m = 0; m <= sites[i].ctrl_delay && m <= static_cast<int>(s.size()); ++m) {
        EventString prefix(s.begin(), s.end() - m);
        bool all_theta = true;
        for (const auto& theta : theta_site(prefix, sites[i]))
          if (!contains(pi(i, theta), sigma_ev)) {
            all_theta = false;
            break;
          }
        if (every_m && !all_theta) {
          site_ok = false;
          break;
        }
        if (!every_m && all_theta) {
          site_ok = true;
          break;
        }
      }
      if (!site_ok) return false;
    }
    return true;
  };

  struct Frame {
    EventString s;
    int g, r, a;
    bool in_lr, in_la;
  };
  std::vector<Frame> stack{{{}, dg.initial, dr.initial, da.initial, true, true}};
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    if (f.r >= 0 && !f.in_lr && rep.kr_contained) {
      rep.kr_contained = false;
      rep.kr_witness = f.s;
    }
    if (f.in_la && f.a < 0 && rep.la_contained) {
      rep.la_contained = false;
      rep.la_witness = f.s;
    }
    for (std::size_t i = 0; i < sites.size(); ++i)
      for (const auto& theta : theta_site(f.s, sites[i])) {
        const EventSet& p = pi(i, theta);
        if (rep.feasible_co_control && !is_subset_of(unc, p)) {
          rep.feasible_co_control = false;
          rep.co_control_witness = f.s;
        }
        auto [it, fresh] = seen_policy.emplace(std::make_pair(i, theta), p);
        if (!fresh && it->second != p) rep.feasible_co_observation = false;
      }
    if (static_cast<int>(f.s.size()) >= depth) continue;
    for (int e = dg.num_events - 1; e >= 0; --e) {
      if (!dg.enabled(f.g, e)) continue;
      const auto& ev = sigma[static_cast<std::size_t>(e)];
      Frame n{f.s, dg.step(f.g, e), dr.step(f.r, e), da.step(f.a, e), false, false};
      n.s.push_back(ev);
      n.in_lr = f.in_lr && allowed(f.s, ev, true);
      n.in_la = f.in_la && allowed(f.s, ev, false);
      stack.push_back(std::move(n));
    }
  }
  // Required strings the plant cannot generate are never in L_r.
  if (rep.kr_contained) {
    auto v = is_closed_subset(required, plant);
    if (!v.holds && static_cast<int>(v.counterexample->string.size()) <= depth) {
      rep.kr_contained = false;
      rep.kr_witness = v.counterexample->string;
    }
  }
  return rep;
}

}  // namespace netsup
