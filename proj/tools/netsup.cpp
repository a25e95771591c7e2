// netsup: command-line front end over the shared JSON formats.
//
// Exit codes: 0 property holds / success, 1 property fails, 2 usage or
// input error, 3 state budget exceeded.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "netsup/netsup.hpp"

namespace {

using netsup::io::json;
namespace io = netsup::io;

constexpr int kHolds = 0;
constexpr int kFails = 1;
constexpr int kUsage = 2;
constexpr int kBudget = 3;
constexpr std::size_t kMaxImplicitPatternEvents = 4;

std::size_t state_budget() {
  if (const char* env = std::getenv("NETSUP_STATE_BUDGET")) {
    try {
      long long v = std::stoll(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    throw netsup::ParseError("NETSUP_STATE_BUDGET must be a positive integer");
  }
  return netsup::kDefaultStateBudget;
}

void emit(const json& j, const std::string& out) {
  if (out.empty()) std::cout << io::dump(j);
  else io::write_file(out, j);
}

struct Inputs {
  std::string plant, spec, config, supervisor, alphabet;
};

io::LoadedAutomaton load(const std::string& path) { return io::automaton_from_json(io::read_file(path)); }

netsup::Alphabet load_alphabet(const std::string& path) { return io::alphabet_from_json(io::read_file(path)); }

/// Channel configuration with the plant's lossy flags folded in.
struct Network {
  netsup::ChannelConfig config;
  netsup::ControlPatternSet patterns;
};

Network load_network(const std::string& path, const netsup::Alphabet& alphabet) {
  auto loaded = io::channel_config_from_json(io::read_file(path));
  Network n;
  n.config = loaded.config;
  n.config.lossy_events = netsup::set_union(n.config.lossy_events, alphabet.lossy_observable());
  if (!loaded.patterns && alphabet.controllable().size() > kMaxImplicitPatternEvents)
    throw netsup::ParseError("more than " + std::to_string(kMaxImplicitPatternEvents) +
                             " controllable events: list the control patterns in the config");
  n.patterns = loaded.patterns ? *loaded.patterns : netsup::ControlPatternSet::all_subsets(alphabet);
  for (int k : n.config.lossy_patterns) n.patterns.lossy.insert(k);
  return n;
}

netsup::NetworkedPlant compose(const Inputs& in) {
  auto g = load(in.plant);
  auto net = load_network(in.config, g.alphabet);
  return netsup::compose_networked_plant(g.automaton, g.alphabet, net.patterns, net.config, state_budget());
}

json report_json(const netsup::ClosedLoopReport& r, int states) {
  json j{{"safe", r.safe}, {"nonblocking", r.nonblocking}, {"states", states}};
  if (r.unsafe_string) j["unsafe_string"] = r.unsafe_string->string;
  return j;
}

netsup::Automaton supervisor_for(const netsup::NetworkedPlant& p, const Inputs& in, const netsup::Automaton& spec) {
  if (!in.supervisor.empty()) return load(in.supervisor).automaton;
  return netsup::synthesize(p, spec, state_budget());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Supervisory control of networked discrete-event systems"};
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads, "Parallelism hint (the library is single-threaded)")->check(CLI::PositiveNumber);

  Inputs in;
  std::string out, report_out, cc_out, ce_out;

  auto* build = app.add_subcommand("build-channel", "Write the observation channel (and optionally G_CC, G_CE)");
  build->add_option("--alphabet", in.alphabet, "Alphabet or automaton file")->required();
  build->add_option("--config", in.config, "Channel configuration")->required();
  build->add_option("--out", out, "Observation channel output (stdout if omitted)");
  build->add_option("--cc-out", cc_out, "Control channel output");
  build->add_option("--ce-out", ce_out, "Command execution output");

  auto* comp = app.add_subcommand("compose", "Write the networked plant");
  comp->add_option("--plant", in.plant)->required();
  comp->add_option("--config", in.config)->required();
  comp->add_option("--out", out);

  auto* synth = app.add_subcommand("synthesize", "Synthesize a supervisor for the networked plant");
  synth->add_option("--plant", in.plant)->required();
  synth->add_option("--spec", in.spec)->required();
  synth->add_option("--config", in.config)->required();
  synth->add_option("--out", out, "Supervisor output (stdout if omitted)");
  synth->add_option("--report", report_out, "Report output (stderr if omitted)");

  std::string property, model, sites_path, required_path, admissible_path;
  int delay_m = -1, delay_n = -1, depth = 16;
  auto* verify = app.add_subcommand("verify", "Check a property; exit 0 if it holds, 1 if not");
  verify->add_option("--property", property)
      ->required()
      ->check(CLI::IsMember({"controllability", "observability", "network-controllability", "network-observability",
                             "coobservability", "da-coobservability", "delay-coobservability", "dcpndes"}));
  verify->add_option("--plant", in.plant)->required();
  verify->add_option("--spec", in.spec);
  verify->add_option("--M", delay_m, "Control delay bound");
  verify->add_option("--N", delay_n, "Observation delay bound (overrides the model file)");
  verify->add_option("--model", model, "Observation model file");
  verify->add_option("--sites", sites_path);
  verify->add_option("--required", required_path, "Required behavior G_r (dcpndes)");
  verify->add_option("--admissible", admissible_path, "Admissible behavior G_a (dcpndes)");
  verify->add_option("--depth", depth, "Search bound for bounded checks")->check(CLI::NonNegativeNumber);
  verify->add_option("--out", out, "Verdict output (stdout if omitted)");

  std::uint64_t seed = 0;
  int horizon = 100;
  auto* sim = app.add_subcommand("simulate", "Run one seeded random closed-loop trace");
  sim->add_option("--plant", in.plant)->required();
  sim->add_option("--spec", in.spec)->required();
  sim->add_option("--config", in.config)->required();
  sim->add_option("--supervisor", in.supervisor, "Supervisor file (synthesized if omitted)");
  sim->add_option("--seed", seed);
  sim->add_option("--horizon", horizon)->check(CLI::NonNegativeNumber);
  sim->add_option("--out", out, "Trace output, JSON lines (stdout if omitted)");

  int explore_depth = 12;
  auto* expl = app.add_subcommand("explore", "Exhaustively expand the closed loop to a depth");
  expl->add_option("--plant", in.plant)->required();
  expl->add_option("--spec", in.spec)->required();
  expl->add_option("--config", in.config)->required();
  expl->add_option("--supervisor", in.supervisor, "Supervisor file (synthesized if omitted)");
  expl->add_option("--depth", explore_depth)->check(CLI::NonNegativeNumber);
  expl->add_option("--out", out);

  std::string a_path, b_path;
  std::vector<std::string> keep;
  auto* prod = app.add_subcommand("product", "Synchronous product of two automata");
  prod->add_option("a", a_path)->required();
  prod->add_option("b", b_path)->required();
  prod->add_option("--out", out);

  auto* proj = app.add_subcommand("project", "Natural projection (determinized) onto a set of events");
  proj->add_option("input", a_path)->required();
  proj->add_option("--events", keep)->delimiter(',')->required();
  proj->add_option("--out", out);

  auto* trm = app.add_subcommand("trim", "Accessible and coaccessible part");
  trm->add_option("input", a_path)->required();
  trm->add_option("--out", out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  try {
    if (*build) {
      auto alphabet = load_alphabet(in.alphabet);
      alphabet.require_plant_names();
      auto net = load_network(in.config, alphabet);
      auto np_alphabet = netsup::networked_alphabet(alphabet, net.patterns);
      auto label = [&](const netsup::Automaton& a) { return io::automaton_to_json(a, np_alphabet); };
      emit(label(netsup::build_observation_channel(alphabet, net.config)), out);
      if (!cc_out.empty()) io::write_file(cc_out, label(netsup::build_control_channel(net.patterns, net.config)));
      if (!ce_out.empty()) io::write_file(ce_out, label(netsup::build_command_execution(alphabet, net.patterns)));
      return kHolds;
    }
    if (*comp) {
      auto p = compose(in);
      emit(io::automaton_to_json(p.automaton, p.alphabet), out);
      return kHolds;
    }
    if (*synth) {
      auto p = compose(in);
      auto spec = load(in.spec).automaton;
      auto s = netsup::synthesize(p, spec, state_budget());
      emit(io::supervisor_to_json(s, p.alphabet), out);
      json r{{"safe", false}, {"nonblocking", false}, {"states", 0}, {"empty", true}};
      bool ok = false;
      if (!s.empty()) {
        auto cl = netsup::closed_loop(p, s, spec, state_budget());
        r = report_json(cl.report, s.num_states());
        r["empty"] = false;
        ok = cl.report.safe && cl.report.nonblocking;
      }
      if (report_out.empty()) std::cerr << io::dump(r);
      else io::write_file(report_out, r);
      return ok ? kHolds : kFails;
    }
    if (*verify) {
      auto g = load(in.plant);
      auto need = [&](const std::string& path, const char* flag) -> const std::string& {
        if (path.empty()) throw netsup::ParseError(std::string("verify --property ") + property + " needs " + flag);
        return path;
      };
      netsup::Verdict v;
      if (property == "dcpndes") {
        auto req = load(need(required_path, "--required")).automaton;
        auto adm = load(need(admissible_path, "--admissible")).automaton;
        auto sites = io::sites_from_json(io::read_file(need(sites_path, "--sites")));
        auto rep = netsup::check_dcpndes_bounded(g.automaton, req, adm, sites, g.alphabet, std::max(depth, 1));
        json j{{"feasible_co_control", rep.feasible_co_control},
               {"feasible_co_observation", rep.feasible_co_observation},
               {"kr_contained", rep.kr_contained},
               {"la_contained", rep.la_contained},
               {"exhaustive_to_depth", rep.depth}};
        if (rep.co_control_witness) j["co_control_witness"] = *rep.co_control_witness;
        if (rep.kr_witness) j["kr_witness"] = *rep.kr_witness;
        if (rep.la_witness) j["la_witness"] = *rep.la_witness;
        emit(j, out);
        bool ok = rep.feasible_co_control && rep.feasible_co_observation && rep.kr_contained && rep.la_contained;
        return ok ? kHolds : kFails;
      }
      auto spec = load(need(in.spec, "--spec")).automaton;
      if (property == "controllability") {
        v = netsup::check_controllability(spec, g.automaton, g.alphabet);
      } else if (property == "observability") {
        v = netsup::check_observability(spec, g.automaton, g.alphabet);
      } else if (property == "network-controllability") {
        if (delay_m < 0) throw netsup::ParseError("verify --property network-controllability needs --M");
        v = netsup::check_network_controllability(spec, g.automaton, {delay_m}, g.alphabet);
      } else if (property == "network-observability") {
        netsup::ObservationModel m;
        if (!model.empty()) m = io::observation_model_from_json(io::read_file(model));
        if (delay_n >= 0) m.delay_bound = delay_n;
        v = netsup::check_network_observability(spec, g.automaton, m, g.alphabet, {depth, false});
      } else {
        auto sites = io::sites_from_json(io::read_file(need(sites_path, "--sites")));
        if (property == "coobservability")
          v = netsup::check_coobservability(spec, g.automaton, sites, g.alphabet,
                                            netsup::CoobservabilityMode::kConjunctive, state_budget());
        else if (property == "da-coobservability")
          v = netsup::check_coobservability(spec, g.automaton, sites, g.alphabet,
                                            netsup::CoobservabilityMode::kDisjunctive, state_budget());
        else
          v = netsup::check_delay_coobservability(spec, g.automaton, sites, g.alphabet, state_budget());
      }
      emit(io::verdict_to_json(v), out);
      return v.holds ? kHolds : kFails;
    }
    if (*sim) {
      auto p = compose(in);
      auto spec = load(in.spec).automaton;
      auto s = supervisor_for(p, in, spec);
      auto t = netsup::simulate(p, s, spec, seed, horizon);
      auto text = io::trace_to_jsonl(t);
      if (out.empty()) std::cout << text;
      else {
        std::ofstream f(out);
        if (!f) throw netsup::ParseError("cannot write '" + out + "'");
        f << text;
      }
      return t.outcome == netsup::Outcome::kSafetyViolation ? kFails : kHolds;
    }
    if (*expl) {
      auto p = compose(in);
      auto spec = load(in.spec).automaton;
      auto s = supervisor_for(p, in, spec);
      auto r = netsup::explore(p, s, spec, explore_depth, state_budget());
      json j{{"states_visited", r.states_visited},
             {"exhaustive_to_depth", r.depth},
             {"violations", r.violation_count},
             {"deadlocks", r.deadlock_count}};
      json wit = json::array();
      for (const auto& t : r.violations) {
        json steps = json::array();
        for (const auto& st : t.steps) steps.push_back(st.event.empty() ? json(nullptr) : json(st.event));
        wit.push_back(steps);
      }
      j["violation_strings"] = wit;
      emit(j, out);
      return r.violation_count == 0 ? kHolds : kFails;
    }
    if (*prod) {
      auto a = load(a_path), b = load(b_path);
      auto alphabet = a.alphabet;
      for (const auto& e : b.alphabet.events())
        if (!alphabet.has(e))
          alphabet.add_event(e, b.alphabet.is_controllable(e), b.alphabet.is_observable(e), b.alphabet.is_lossy(e));
      emit(io::automaton_to_json(netsup::sync_product(a.automaton, b.automaton, state_budget()), alphabet), out);
      return kHolds;
    }
    if (*proj) {
      auto a = load(a_path);
      netsup::EventSet k(keep.begin(), keep.end());
      emit(io::automaton_to_json(netsup::project(a.automaton, k), a.alphabet), out);
      return kHolds;
    }
    if (*trm) {
      auto a = load(a_path);
      emit(io::automaton_to_json(netsup::trim(a.automaton), a.alphabet), out);
      return kHolds;
    }
  } catch (const netsup::ResourceError& e) {
    std::cerr << "netsup: " << e.what() << "\n";
    return kBudget;
  } catch (const std::exception& e) {
    std::cerr << "netsup: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
