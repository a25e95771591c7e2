// Acceptance suite: one PASS/FAIL line per criterion.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "netsup/netsup.hpp"
#include "oracles.hpp"
#include "random_models.hpp"
#include "samples.hpp"

namespace {

using namespace netsup;
using fixtures::Rng;
using fixtures::Shape;

// Pinned limits.
constexpr double kChannelSeconds = 5.0;
constexpr double kZeroDelaySeconds = 30.0;
constexpr double kOracleSuiteSeconds = 60.0;
constexpr double kSynthesisSeconds = 120.0;
constexpr int kReductionInstances = 100;
constexpr int kOracleInstances = 50;
constexpr int kOracleLength = 6;
constexpr int kCoobsInstances = 50;
constexpr int kCoobsLength = 5;
constexpr int kExploreDepth = 12;
constexpr int kSimulationRuns = 10000;
constexpr int kSimulationHorizon = 40;
constexpr int kRoundTripSeeds = 20;

struct Result {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void fail(Result& r, const std::string& why) {
  if (r.pass) r.detail = why;
  r.pass = false;
}

// 1 -------------------------------------------------------------------------

Result channel_fidelity() {
  Result r;
  auto t0 = Clock::now();
  int cases = 0;
  for (int n_obs : {1, 2}) {
    for (int num_o : {0, 1, 2}) {
      for (bool lossy : {false, true}) {
        EventSet all{"u"}, obs;
        for (int i = 0; i < n_obs; ++i) {
          std::string e(1, static_cast<char>('a' + i));
          all.insert(e);
          obs.insert(e);
        }
        Alphabet alphabet(all, {}, obs);
        ChannelConfig cfg;
        cfg.num_o = num_o;
        if (lossy) cfg.lossy_events = {"a"};
        auto oc = build_observation_channel(alphabet, cfg);
        auto ref = oracle::observation_channel(alphabet, num_o, cfg.lossy_events);
        std::set<std::string> states;
        std::set<std::tuple<std::string, std::string, std::string>> trans;
        for (int q = 0; q < oc.num_states(); ++q) {
          states.insert(oc.state_name(q));
          for (const auto& e : oc.out(q)) trans.emplace(oc.state_name(q), oc.event_name(e.event), oc.state_name(e.dst));
        }
        ++cases;
        if (states != ref.states || trans != ref.transitions)
          fail(r, "mismatch at |So|=" + std::to_string(n_obs) + " num_o=" + std::to_string(num_o) +
                      (lossy ? " lossy" : ""));
        if (n_obs == 1 && num_o == 1 && !lossy && oc.num_states() != 4)
          fail(r, "|So|=1 num_o=1 lossless has " + std::to_string(oc.num_states()) + " states, expected 4");
      }
    }
  }
  double secs = seconds_since(t0);
  if (secs >= kChannelSeconds) fail(r, "too slow");
  if (r.pass) r.detail = std::to_string(cases) + " channel configurations identical";
  r.detail += " (" + std::to_string(secs) + " s)";
  return r;
}

// 2 -------------------------------------------------------------------------

Result zero_delay_reduction() {
  Result r;
  auto t0 = Clock::now();
  auto samples = fixtures::load_samples(NETSUP_SAMPLES);
  for (const auto& s : samples) {
    auto p = compose_networked_plant(s.plant, s.alphabet, s.zero.patterns, s.zero.config);
    auto sup = synthesize(p, s.spec);
    auto networked = fixtures::plant_view(p, closed_loop(p, sup, s.spec).automaton);
    auto classical_sup = sup_controllable_normal(s.plant, s.spec, s.alphabet);
    auto classical = sync_product(s.plant, classical_sup);
    if (sup.empty() || classical_sup.empty()) fail(r, s.name + ": empty supervisor");
    if (!language_equal(networked, classical)) fail(r, s.name + ": marked languages differ");
    if (!closed_language_equal(networked, classical)) fail(r, s.name + ": closed languages differ");
  }
  double secs = seconds_since(t0);
  if (secs >= kZeroDelaySeconds) fail(r, "too slow");
  if (r.pass) r.detail = std::to_string(samples.size()) + " bundled plants language-equal";
  r.detail += " (" + std::to_string(secs) + " s)";
  return r;
}

// 3 -------------------------------------------------------------------------

Result delay_free_reductions() {
  Result r;
  int agree = 0, total = 0, obs_hold = 0, ctrl_hold = 0;
  for (int seed = 0; seed < kReductionInstances; ++seed) {
    Rng rng(1000 + seed);
    int n_events = fixtures::pick(rng, 2, 4);
    auto alphabet = fixtures::random_alphabet(rng, n_events);
    auto plant = fixtures::random_plant(rng, fixtures::event_names(n_events), fixtures::pick(rng, 2, 6), Shape::kAny,
                                        0.6, seed % 2 == 0);
    auto spec = fixtures::random_sub(rng, plant, 0.6);
    ObservationModel none;
    bool obs = check_observability(spec, plant, alphabet).holds;
    bool net_obs = check_network_observability(spec, plant, none, alphabet).holds;
    auto bounded = check_network_observability(spec, plant, none, alphabet, {64, true});
    bool ctrl = check_controllability(spec, plant, alphabet).holds;
    bool net_ctrl = check_network_controllability(spec, plant, {0}, alphabet).holds;
    obs_hold += obs;
    ctrl_hold += ctrl;
    total += 3;
    agree += (obs == net_obs) + (obs == bounded.holds && bounded.exact) + (ctrl == net_ctrl);
  }
  if (agree != total) fail(r, std::to_string(agree) + "/" + std::to_string(total) + " agree");
  else
    r.detail = std::to_string(agree) + "/" + std::to_string(total) + " verdicts agree (observable " +
               std::to_string(obs_hold) + ", controllable " + std::to_string(ctrl_hold) + " of " +
               std::to_string(kReductionInstances) + ")";
  return r;
}

// 4 -------------------------------------------------------------------------

/// Random observation model over the plant's observable transitions.
ObservationModel random_model(Rng& rng, const Automaton& g, const Alphabet& alphabet) {
  ObservationModel m;
  m.delay_bound = fixtures::pick(rng, 0, 2);
  for (int q = 0; q < g.num_states(); ++q)
    for (const auto& e : g.out(q))
      if (alphabet.is_observable(g.event_name(e.event)) && fixtures::coin(rng, 0.3))
        m.lossy_transitions.insert({g.state_name(q), g.event_name(e.event), g.state_name(e.dst)});
  return m;
}

Site random_site(Rng& rng, const Alphabet& alphabet, bool ctrl_in_obs = false) {
  Site s;
  s.observable = fixtures::random_subset(rng, alphabet.observable(), 0.6);
  s.controllable = fixtures::random_subset(rng, alphabet.controllable(), 0.7);
  if (ctrl_in_obs) s.controllable = set_intersection(s.controllable, s.observable);
  for (const auto& e : s.controllable) {
    if (fixtures::coin(rng, 0.6)) s.cp.insert(e);
    if (fixtures::coin(rng, 0.6)) s.da.insert(e);
  }
  s.obs_delay = fixtures::pick(rng, 0, 2);
  s.ctrl_delay = fixtures::pick(rng, 0, 2);
  return s;
}

struct OracleInstance {
  Alphabet alphabet;
  Automaton plant;
};

/// Every string of a strict DAG on 7 states has length at most 6, so string
/// enumeration to length 6 is complete.
OracleInstance dag_instance(Rng& rng, bool deterministic) {
  int n_events = fixtures::pick(rng, 3, 4);
  auto alphabet = fixtures::random_alphabet(rng, n_events);
  auto plant = fixtures::random_plant(rng, fixtures::event_names(n_events), kOracleLength + 1, Shape::kStrictDag, 0.8,
                                      deterministic);
  return {alphabet, plant};
}

std::vector<EventString> observed_strings(const Alphabet& alphabet, int maxlen) {
  std::vector<EventString> out{{}};
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (static_cast<int>(out[i].size()) == maxlen) continue;
    for (const auto& e : alphabet.observable()) out.push_back(oracle::extend(out[i], e));
  }
  return out;
}

int g_compared = 0;  // comparisons made by the running oracle suite

struct Suite {
  std::string name;
  std::function<bool(int, std::string&)> run;  // seed -> agreement
};

Result definitional_oracles() {
  Result r;
  std::vector<Suite> suites;
  suites.push_back({"theta_dl", [](int seed, std::string& why) {
                      Rng rng(2000 + seed);
                      auto in = dag_instance(rng, seed % 2 == 0);
                      auto m = random_model(rng, in.plant, in.alphabet);
                      for (const auto& s : oracle::strings_upto(in.plant, kOracleLength))
                        if (++g_compared, theta_dl(s, in.plant, m, in.alphabet) != oracle::theta_dl(s, in.plant, m, in.alphabet)) {
                          why = "string of length " + std::to_string(s.size());
                          return false;
                        }
                      return true;
                    }});
  suites.push_back({"state_estimate", [](int seed, std::string& why) {
                      Rng rng(3000 + seed);
                      auto in = dag_instance(rng, seed % 2 == 0);
                      auto m = random_model(rng, in.plant, in.alphabet);
                      for (const auto& t : observed_strings(in.alphabet, 3))
                        if (++g_compared, state_estimate(in.plant, m, in.alphabet, t) !=
                            oracle::state_estimate(in.plant, m, in.alphabet, t, kOracleLength)) {
                          why = "observation of length " + std::to_string(t.size());
                          return false;
                        }
                      return true;
                    }});
  suites.push_back({"closed_behavior_obs", [](int seed, std::string& why) {
                      Rng rng(4000 + seed);
                      auto in = dag_instance(rng, seed % 2 == 0);
                      auto m = random_model(rng, in.plant, in.alphabet);
                      StateEstimatePolicy pol;
                      for (const auto& t : observed_strings(in.alphabet, 3)) {
                        auto e = oracle::state_estimate(in.plant, m, in.alphabet, t, kOracleLength);
                        if (!pol.disabled.count(e))
                          pol.disabled[e] = fixtures::random_subset(rng, in.alphabet.controllable());
                      }
                      auto built = closed_behavior_obs(in.plant, pol, m, in.alphabet);
                      if (g_compared += static_cast<int>(oracle::language(built.automaton, kOracleLength).size()),
                          oracle::language(built.automaton, kOracleLength) !=
                          oracle::closed_behavior_obs(in.plant, pol, m, in.alphabet, kOracleLength, kOracleLength)) {
                        why = "closed behavior differs";
                        return false;
                      }
                      return true;
                    }});
  suites.push_back({"closed_behavior_ctrl", [](int seed, std::string& why) {
                      Rng rng(5000 + seed);
                      int n_events = fixtures::pick(rng, 2, 4);
                      auto alphabet = fixtures::random_alphabet(rng, n_events);
                      auto g = fixtures::random_plant(rng, fixtures::event_names(n_events), fixtures::pick(rng, 2, 6),
                                                      Shape::kAny, 0.5, true);
                      StateFeedbackPolicy pol;
                      for (int q = 0; q < g.num_states(); ++q)
                        pol[g.state_name(q)] = fixtures::random_subset(rng, alphabet.controllable());
                      int M = fixtures::pick(rng, 0, 2);
                      auto built = closed_behavior_ctrl(g, pol, {M}, alphabet);
                      if (g_compared += static_cast<int>(oracle::language(built, kOracleLength).size()),
                          oracle::language(built, kOracleLength) !=
                          oracle::closed_behavior_ctrl(g, pol, M, alphabet, kOracleLength)) {
                        why = "closed behavior differs (M=" + std::to_string(M) + ")";
                        return false;
                      }
                      return true;
                    }});
  suites.push_back({"eval_fusion", [](int seed, std::string& why) {
                      Rng rng(6000 + seed);
                      auto in = dag_instance(rng, true);
                      auto spec = fixtures::random_sub(rng, in.plant);
                      std::vector<Site> sites{random_site(rng, in.alphabet), random_site(rng, in.alphabet)};
                      for (const auto& s : oracle::strings_upto(in.plant, kOracleLength)) {
                        ++g_compared;
                        auto a = eval_fusion(sites, spec, in.plant, in.alphabet, s);
                        auto b = oracle::eval_fusion(sites, spec, in.plant, in.alphabet, s, kOracleLength);
                        if (a.vc != b.vc || a.vd != b.vd || a.vg != b.vg || a.vc_site != b.vc_site ||
                            a.vd_site != b.vd_site) {
                          why = "fusion values differ";
                          return false;
                        }
                      }
                      return true;
                    }});
  suites.push_back({"theta_site", [](int seed, std::string& why) {
                      Rng rng(7000 + seed);
                      auto in = dag_instance(rng, false);
                      auto site = random_site(rng, in.alphabet);
                      for (const auto& s : oracle::strings_upto(in.plant, kOracleLength))
                        if (++g_compared, theta_site(s, site) != oracle::theta_site(s, site)) {
                          why = "observation sets differ";
                          return false;
                        }
                      return true;
                    }});
  suites.push_back({"pi_min", [](int seed, std::string& why) {
                      Rng rng(8000 + seed);
                      auto in = dag_instance(rng, true);
                      auto site = random_site(rng, in.alphabet);
                      std::set<EventString> thetas;
                      for (const auto& t : oracle::strings_upto(in.plant, kOracleLength))
                        for (const auto& th : oracle::theta_site(t, site)) thetas.insert(th);
                      for (const auto& th : observed_strings(in.alphabet, 2)) thetas.insert(th);
                      for (const auto& th : thetas)
                        if (++g_compared, pi_min(site, in.plant, in.alphabet, th) !=
                            oracle::pi_min(site, in.plant, in.alphabet, th, kOracleLength)) {
                          why = "policy values differ";
                          return false;
                        }
                      return true;
                    }});

  std::string summary;
  for (const auto& suite : suites) {
    auto t0 = Clock::now();
    int agree = 0;
    g_compared = 0;
    for (int seed = 0; seed < kOracleInstances; ++seed) {
      std::string why;
      if (suite.run(seed, why)) ++agree;
      else fail(r, suite.name + " seed " + std::to_string(seed) + ": " + why);
    }
    double secs = seconds_since(t0);
    if (secs >= kOracleSuiteSeconds) fail(r, suite.name + " too slow");
    summary += (summary.empty() ? "" : ", ") + suite.name + " " + std::to_string(agree) + "/" +
               std::to_string(kOracleInstances) + " (" + std::to_string(g_compared) + " values) in " + std::to_string(static_cast<int>(secs * 1000)) + " ms";
  }
  r.detail = r.pass ? summary : r.detail + "; " + summary;
  return r;
}

// 5 -------------------------------------------------------------------------

bool has_uncontrollable_cycle(const Automaton& g, const Alphabet& alphabet) {
  auto reachable = oracle::strings_upto(g, g.num_states());
  std::set<int> live;
  for (const auto& s : reachable)
    for (int q : oracle::run(g, s)) live.insert(q);
  for (int start : live) {
    std::vector<int> stack{start};
    std::set<int> seen;
    while (!stack.empty()) {
      int q = stack.back();
      stack.pop_back();
      for (const auto& e : g.out(q)) {
        if (!alphabet.uncontrollable().count(g.event_name(e.event))) continue;
        if (e.dst == start) return true;
        if (seen.insert(e.dst).second) stack.push_back(e.dst);
      }
    }
  }
  return false;
}

Result coobservability_checkers() {
  Result r;
  int agree = 0, total = 0, held = 0;
  for (int seed = 0; seed < kCoobsInstances; ++seed) {
    Rng rng(9000 + seed);
    int n_events = fixtures::pick(rng, 2, 4);
    auto alphabet = fixtures::random_alphabet(rng, n_events);
    auto plant = fixtures::random_plant(rng, fixtures::event_names(n_events), kCoobsLength + 1, Shape::kStrictDag, 0.8,
                                        seed % 3 != 0);
    auto spec = fixtures::random_sub(rng, plant);
    std::vector<Site> sites{random_site(rng, alphabet), random_site(rng, alphabet)};
    bool cp = check_coobservability(spec, plant, sites, alphabet, CoobservabilityMode::kConjunctive).holds;
    bool da = check_coobservability(spec, plant, sites, alphabet, CoobservabilityMode::kDisjunctive).holds;
    std::vector<Site> dsites{random_site(rng, alphabet, true), random_site(rng, alphabet, true)};
    bool dc = check_delay_coobservability(spec, plant, dsites, alphabet).holds;
    held += cp + da + dc;
    total += 3;
    agree += (cp == oracle::coobservable(spec, plant, sites, alphabet, true, kCoobsLength)) +
             (da == oracle::coobservable(spec, plant, sites, alphabet, false, kCoobsLength)) +
             (dc == oracle::delay_coobservable(spec, plant, dsites, alphabet, kCoobsLength));
  }
  if (agree != total) fail(r, std::to_string(agree) + "/" + std::to_string(total) + " agree with brute force");

  int loops = 0, raised = 0;
  for (int seed = 0; seed < kCoobsInstances; ++seed) {
    Rng rng(9500 + seed);
    int n_events = fixtures::pick(rng, 2, 4);
    auto alphabet = fixtures::random_alphabet(rng, n_events);
    auto plant =
        fixtures::random_plant(rng, fixtures::event_names(n_events), fixtures::pick(rng, 1, 5), Shape::kAny, 0.5);
    bool loop = has_uncontrollable_cycle(plant, alphabet);
    bool threw = false;
    try {
      check_delay_coobservability(plant, plant, {Site{}}, alphabet);
    } catch (const UncontrollableLoop&) {
      threw = true;
    }
    loops += loop;
    raised += threw && loop;
    if (threw != loop) fail(r, "UncontrollableLoop mismatch at seed " + std::to_string(seed));
  }
  std::string summary = std::to_string(agree) + "/" + std::to_string(total) + " verdicts agree (" + std::to_string(held) + " hold); " +
                        std::to_string(raised) + "/" + std::to_string(loops) + " looping plants raise";
  r.detail = r.pass ? summary : r.detail + "; " + summary;
  return r;
}

// 6 -------------------------------------------------------------------------

Result synthesis_soundness() {
  Result r;
  auto t0 = Clock::now();
  auto samples = fixtures::load_samples(NETSUP_SAMPLES);
  int runs = 0, supervisors = 0;
  for (const auto& s : samples) {
    for (const auto* net : {&s.zero, &s.delayed}) {
      auto p = compose_networked_plant(s.plant, s.alphabet, net->patterns, net->config);
      auto sup = synthesize(p, s.spec);
      const std::string tag = s.name + (net == &s.zero ? "/zero" : "/delayed");
      if (sup.empty()) {
        fail(r, tag + ": empty supervisor");
        continue;
      }
      ++supervisors;
      auto cl = closed_loop(p, sup, s.spec);
      if (!cl.report.safe) fail(r, tag + ": closed loop unsafe");
      if (!cl.report.nonblocking) fail(r, tag + ": closed loop blocking");
      if (!check_controllability(cl.automaton, p.automaton, p.alphabet).holds) fail(r, tag + ": not controllable");
      auto normal = sync_product(p.automaton, project(cl.automaton, p.alphabet.observable()));
      if (!closed_language_equal(normal, cl.automaton)) fail(r, tag + ": not normal");
      auto ex = explore(p, sup, s.spec, kExploreDepth);
      if (ex.violation_count != 0) fail(r, tag + ": explore found a violation");
      for (int seed = 0; seed < kSimulationRuns; ++seed, ++runs)
        if (simulate(p, sup, s.spec, static_cast<std::uint64_t>(seed), kSimulationHorizon).outcome ==
            Outcome::kSafetyViolation) {
          fail(r, tag + ": simulation violated the spec at seed " + std::to_string(seed));
          break;
        }
    }
  }
  double secs = seconds_since(t0);
  if (secs >= kSynthesisSeconds) fail(r, "too slow");
  if (r.pass)
    r.detail = std::to_string(supervisors) + " supervisors sound; " + std::to_string(runs) + " simulations clean";
  r.detail += " (" + std::to_string(secs) + " s)";
  return r;
}

// 7 -------------------------------------------------------------------------

bool stable(const io::json& j) { return io::dump(io::parse_text(io::dump(j))) == io::dump(j); }

Result determinism_round_trips() {
  Result r;
  int artifacts = 0;
  auto samples = fixtures::load_samples(NETSUP_SAMPLES);
  auto check = [&](const std::string& what, const std::string& a, const std::string& b) {
    ++artifacts;
    if (a != b) fail(r, what + " not byte-stable");
  };
  for (const auto& s : samples) {
    for (const char* file : {"plant.json", "spec.json", "config.json", "config_zero.json"}) {
      std::string path = std::string(NETSUP_SAMPLES) + "/" + s.name + "/" + file;
      std::ifstream in(path);
      std::stringstream text;
      text << in.rdbuf();
      check(s.name + "/" + file, io::dump(io::parse_text(text.str())), text.str());
    }
    auto p = compose_networked_plant(s.plant, s.alphabet, s.delayed.patterns, s.delayed.config);
    auto sup = synthesize(p, s.spec);
    auto pj = io::automaton_to_json(p.automaton, p.alphabet);
    auto back = io::automaton_from_json(pj);
    check(s.name + " networked plant", io::dump(io::automaton_to_json(back.automaton, back.alphabet)), io::dump(pj));
    auto sj = io::supervisor_to_json(sup, p.alphabet);
    auto sback = io::automaton_from_json(sj);
    check(s.name + " supervisor", io::dump(io::supervisor_to_json(sback.automaton, sback.alphabet)), io::dump(sj));
    auto cj = io::channel_config_to_json(s.delayed.config, s.delayed.patterns);
    auto cback = io::channel_config_from_json(cj);
    check(s.name + " channel config", io::dump(io::channel_config_to_json(cback.config, cback.patterns)), io::dump(cj));
    auto vj = io::verdict_to_json(check_controllability(s.spec, s.plant, s.alphabet));
    check(s.name + " verdict", io::dump(io::parse_text(io::dump(vj))), io::dump(vj));
    for (int seed = 0; seed < kRoundTripSeeds; ++seed) {
      auto a = simulate(p, sup, s.spec, static_cast<std::uint64_t>(seed), kSimulationHorizon);
      auto b = simulate(p, sup, s.spec, static_cast<std::uint64_t>(seed), kSimulationHorizon);
      if (!(a == b)) fail(r, s.name + ": traces differ for seed " + std::to_string(seed));
      auto text = io::trace_to_jsonl(a);
      check(s.name + " trace", io::trace_to_jsonl(io::trace_from_jsonl(text)), text);
    }
  }
  ObservationModel m{2, {{"q0", "a", "q1"}}};
  auto mj = io::observation_model_to_json(m);
  check("observation model", io::dump(io::observation_model_to_json(io::observation_model_from_json(mj))), io::dump(mj));
  auto dj = io::control_delay_to_json({3});
  check("control delay model", io::dump(io::control_delay_to_json(io::control_delay_from_json(dj))), io::dump(dj));
  std::vector<Site> sites{{{"a", "b"}, {"a"}, {"a"}, {}, 1, 2}};
  auto stj = io::sites_to_json(sites);
  check("sites", io::dump(io::sites_to_json(io::sites_from_json(stj))), io::dump(stj));
  if (!stable(stj)) fail(r, "sites text not stable");
  if (r.pass) r.detail = std::to_string(artifacts) + " artifacts byte-stable; traces reproducible";
  return r;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Result()> run;
  };
  std::vector<Criterion> criteria{
      {1, "channel-model fidelity", channel_fidelity},
      {2, "zero-delay reduction", zero_delay_reduction},
      {3, "delay-free reductions", delay_free_reductions},
      {4, "definitional oracles", definitional_oracles},
      {5, "co-observability checkers", coobservability_checkers},
      {6, "synthesis soundness", synthesis_soundness},
      {7, "determinism and round-trips", determinism_round_trips},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Result r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    failures += !r.pass;
    std::printf("%s criterion %d %s: %s\n", r.pass ? "PASS" : "FAIL", c.id, c.name, r.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
