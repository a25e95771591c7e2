#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "netsup/alphabet.hpp"
#include "netsup/automaton.hpp"
#include "netsup/channels.hpp"
#include "netsup/decentralized.hpp"
#include "netsup/delay_maps.hpp"
#include "netsup/simulator.hpp"

namespace netsup::io {

using json = nlohmann::json;

/// Canonical text form: two-space indent and a trailing newline. Keys are
/// sorted, so equal documents always print identically.
inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline json parse_text(const std::string& text, const std::string& what = "input") {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(what + ": " + e.what());
  }
}

inline json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str(), path);
}

inline void write_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write '" + path + "'");
  out << dump(j);
}

namespace detail {

/// Runs `f`, turning schema mistakes reported by the json library into
/// ParseError.
template <class F>
auto schema(const std::string& what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ParseError(what + ": " + e.what());
  }
}

inline EventSet event_set(const json& j) {
  EventSet s;
  for (const auto& e : j) s.insert(e.get<std::string>());
  return s;
}

inline json event_list(const EventSet& s) { return json(std::vector<std::string>(s.begin(), s.end())); }

inline json string_json(const EventString& s) { return json(s); }

}  // namespace detail

// Alphabet ---------------------------------------------------------------

inline json events_to_json(const std::vector<EventId>& events, const Alphabet& alphabet) {
  json arr = json::array();
  for (const auto& e : events)
    arr.push_back({{"name", e},
                   {"controllable", alphabet.is_controllable(e)},
                   {"observable", alphabet.is_observable(e)},
                   {"lossy", alphabet.is_lossy(e)}});
  return arr;
}

inline json alphabet_to_json(const Alphabet& alphabet) {
  const auto& ev = alphabet.events();
  return json{{"events", events_to_json(std::vector<EventId>(ev.begin(), ev.end()), alphabet)}};
}

/// Reads the "events" array of an alphabet or automaton document.
inline Alphabet alphabet_from_json(const json& j) {
  return detail::schema("alphabet", [&] {
    EventSet all, c, o, l;
    for (const auto& e : j.at("events")) {
      auto name = e.at("name").get<std::string>();
      if (!all.insert(name).second) throw ParseError("alphabet: duplicate event '" + name + "'");
      if (e.value("controllable", false)) c.insert(name);
      if (e.value("observable", true)) o.insert(name);
      if (e.value("lossy", false)) l.insert(name);
    }
    try {
      return Alphabet(all, c, o, l);
    } catch (const PreconditionError& err) {
      throw ParseError(std::string("alphabet: ") + err.what());
    }
  });
}

// Automaton --------------------------------------------------------------

inline json automaton_to_json(const Automaton& a, const Alphabet& alphabet) {
  json states = json::array(), marked = json::array(), trans = json::array();
  for (int q = 0; q < a.num_states(); ++q) {
    states.push_back(a.state_name(q));
    if (a.is_marked(q)) marked.push_back(a.state_name(q));
    for (const Edge& e : a.out(q))
      trans.push_back(json::array(
          {a.state_name(q), e.event == kSilent ? json(nullptr) : json(a.event_name(e.event)), a.state_name(e.dst)}));
  }
  return json{{"states", states},
              {"events", events_to_json(a.events(), alphabet)},
              {"transitions", trans},
              {"initial", a.empty() ? json(nullptr) : json(a.state_name(a.initial()))},
              {"marked", marked}};
}

struct LoadedAutomaton {
  Automaton automaton;
  Alphabet alphabet;
};

inline LoadedAutomaton automaton_from_json(const json& j) {
  return detail::schema("automaton", [&] {
    Alphabet alphabet = alphabet_from_json(j);
    const auto& ev = alphabet.events();
    Automaton a(std::vector<EventId>(ev.begin(), ev.end()));
    try {
      for (const auto& s : j.at("states")) a.add_state(s.get<std::string>());
      for (const auto& m : j.at("marked")) a.set_marked(a.state_at(m.get<std::string>()), true);
      if (!j.at("initial").is_null()) a.set_initial(a.state_at(j.at("initial").get<std::string>()));
      else if (a.num_states() > 0) throw ParseError("automaton: states listed but initial is null");
      for (const auto& t : j.at("transitions")) {
        if (!t.is_array() || t.size() != 3) throw ParseError("automaton: transition must be [src, event, dst]");
        int src = a.state_at(t[0].get<std::string>());
        int dst = a.state_at(t[2].get<std::string>());
        if (t[1].is_null()) a.add_silent(src, dst);
        else a.add_transition(src, t[1].get<std::string>(), dst);
      }
    } catch (const PreconditionError& err) {
      throw ParseError(std::string("automaton: ") + err.what());
    }
    return LoadedAutomaton{std::move(a), std::move(alphabet)};
  });
}

/// Supervisor files also carry the alphabet the supervisor observes.
inline json supervisor_to_json(const Automaton& s, const Alphabet& alphabet) {
  json j = automaton_to_json(s, alphabet);
  j["observable_alphabet"] = detail::event_list(alphabet.observable());
  return j;
}

// Channel configuration --------------------------------------------------

struct LoadedChannelConfig {
  ChannelConfig config;
  std::optional<ControlPatternSet> patterns;  // absent: every subset of Σ_c
};

inline json channel_config_to_json(const ChannelConfig& cfg, const std::optional<ControlPatternSet>& patterns) {
  json j{{"num_o", cfg.num_o},
         {"num_c", cfg.num_c},
         {"lossy_events", detail::event_list(cfg.lossy_events)},
         {"lossy_patterns", std::vector<int>(cfg.lossy_patterns.begin(), cfg.lossy_patterns.end())}};
  if (patterns) {
    json arr = json::array();
    for (const auto& p : patterns->patterns) arr.push_back(detail::event_list(p));
    j["patterns"] = arr;
  }
  return j;
}

inline LoadedChannelConfig channel_config_from_json(const json& j) {
  return detail::schema("channel config", [&] {
    LoadedChannelConfig r;
    r.config.num_o = j.value("num_o", 0);
    r.config.num_c = j.value("num_c", 0);
    if (j.contains("lossy_events")) r.config.lossy_events = detail::event_set(j.at("lossy_events"));
    if (j.contains("lossy_patterns"))
      for (const auto& k : j.at("lossy_patterns")) r.config.lossy_patterns.insert(k.get<int>());
    if (j.contains("patterns")) {
      ControlPatternSet ps;
      for (const auto& p : j.at("patterns")) ps.patterns.push_back(detail::event_set(p));
      ps.lossy = r.config.lossy_patterns;
      r.patterns = std::move(ps);
    }
    if (r.config.num_o < 0 || r.config.num_c < 0) throw ParseError("channel config: negative delay bound");
    return r;
  });
}

// Delay models -----------------------------------------------------------

inline json observation_model_to_json(const ObservationModel& m) {
  json arr = json::array();
  for (const auto& t : m.lossy_transitions) arr.push_back(json::array({t.src, t.event, t.dst}));
  return json{{"N", m.delay_bound}, {"lossy_transitions", arr}};
}

inline ObservationModel observation_model_from_json(const json& j) {
  return detail::schema("observation model", [&] {
    ObservationModel m;
    m.delay_bound = j.value("N", 0);
    if (m.delay_bound < 0) throw ParseError("observation model: N must be nonnegative");
    if (j.contains("lossy_transitions"))
      for (const auto& t : j.at("lossy_transitions")) {
        if (!t.is_array() || t.size() != 3) throw ParseError("observation model: transition must be [src, event, dst]");
        m.lossy_transitions.insert({t[0].get<std::string>(), t[1].get<std::string>(), t[2].get<std::string>()});
      }
    return m;
  });
}

inline json control_delay_to_json(const ControlDelayModel& m) { return json{{"M", m.bound}}; }

inline ControlDelayModel control_delay_from_json(const json& j) {
  return detail::schema("control delay model", [&] {
    ControlDelayModel m{j.at("M").get<int>()};
    if (m.bound < 0) throw ParseError("control delay model: M must be nonnegative");
    return m;
  });
}

// Sites ------------------------------------------------------------------

inline json sites_to_json(const std::vector<Site>& sites) {
  json arr = json::array();
  for (const auto& s : sites)
    arr.push_back({{"observable", detail::event_list(s.observable)},
                   {"controllable", detail::event_list(s.controllable)},
                   {"cp", detail::event_list(s.cp)},
                   {"da", detail::event_list(s.da)},
                   {"N_o", s.obs_delay},
                   {"N_c", s.ctrl_delay}});
  return json{{"sites", arr}};
}

inline std::vector<Site> sites_from_json(const json& j) {
  return detail::schema("sites", [&] {
    std::vector<Site> r;
    for (const auto& s : j.at("sites")) {
      Site site;
      site.observable = detail::event_set(s.at("observable"));
      site.controllable = detail::event_set(s.at("controllable"));
      if (s.contains("cp")) site.cp = detail::event_set(s.at("cp"));
      if (s.contains("da")) site.da = detail::event_set(s.at("da"));
      site.obs_delay = s.value("N_o", 0);
      site.ctrl_delay = s.value("N_c", 0);
      r.push_back(std::move(site));
    }
    return r;
  });
}

// Verdicts and traces ----------------------------------------------------

inline json counterexample_to_json(const Counterexample& c) {
  json j{{"string", detail::string_json(c.string)}, {"event", c.event}};
  if (c.witness) j["witness"] = detail::string_json(*c.witness);
  return j;
}

inline json verdict_to_json(const Verdict& v) {
  json j{{"holds", v.holds}, {"exact", v.exact}};
  if (v.exhaustive_to_depth >= 0) j["exhaustive_to_depth"] = v.exhaustive_to_depth;
  j["counterexample"] = v.counterexample ? counterexample_to_json(*v.counterexample) : json(nullptr);
  return j;
}

inline json snapshot_to_json(const Snapshot& s) {
  return json{{"plant", s.plant}, {"oc", s.oc}, {"cc", s.cc}, {"ce", s.ce}, {"supervisor", s.supervisor}};
}

inline Snapshot snapshot_from_json(const json& j) {
  return {j.at("plant").get<std::string>(), j.at("oc").get<std::string>(), j.at("cc").get<std::string>(),
          j.at("ce").get<std::string>(), j.at("supervisor").get<std::string>()};
}

/// JSON lines: a header with the seed, horizon, outcome and initial
/// snapshot, then one line per step.
inline std::string trace_to_jsonl(const Trace& t) {
  std::string out;
  json head{{"seed", t.seed},
            {"horizon", t.horizon},
            {"outcome", outcome_name(t.outcome)},
            {"outcome_step", t.outcome_step},
            {"initial", snapshot_to_json(t.initial)}};
  out += head.dump() + "\n";
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    json line = snapshot_to_json(t.steps[i].after);
    line["step"] = i + 1;
    line["event"] = t.steps[i].event.empty() ? json(nullptr) : json(t.steps[i].event);
    out += line.dump() + "\n";
  }
  return out;
}

inline Trace trace_from_jsonl(const std::string& text) {
  return detail::schema("trace", [&] {
    Trace t;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("trace: empty input");
    json head = parse_text(line, "trace header");
    t.seed = head.at("seed").get<std::uint64_t>();
    t.horizon = head.at("horizon").get<int>();
    auto outcome = head.at("outcome").get<std::string>();
    if (outcome == "completed") t.outcome = Outcome::kCompleted;
    else if (outcome == "safety_violation") t.outcome = Outcome::kSafetyViolation;
    else if (outcome == "deadlock") t.outcome = Outcome::kDeadlock;
    else throw ParseError("trace: unknown outcome '" + outcome + "'");
    t.outcome_step = head.at("outcome_step").get<int>();
    t.initial = snapshot_from_json(head.at("initial"));
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      json j = parse_text(line, "trace step");
      t.steps.push_back({j.at("event").is_null() ? EventId{} : j.at("event").get<std::string>(), snapshot_from_json(j)});
    }
    return t;
  });
}

}  // namespace netsup::io
