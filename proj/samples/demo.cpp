// Loads one sample, synthesizes a supervisor for its delayed network and
// prints a short seeded run.
#include <iostream>
#include <string>

#include "netsup/netsup.hpp"

int main(int argc, char** argv) {
  using namespace netsup;
  const std::string dir = std::string(NETSUP_SAMPLES) + "/" + (argc > 1 ? argv[1] : "tank") + "/";
  try {
    auto g = io::automaton_from_json(io::read_file(dir + "plant.json"));
    auto spec = io::automaton_from_json(io::read_file(dir + "spec.json")).automaton;
    auto cfg = io::channel_config_from_json(io::read_file(dir + "config.json"));
    auto patterns = cfg.patterns ? *cfg.patterns : ControlPatternSet::all_subsets(g.alphabet);
    auto p = compose_networked_plant(g.automaton, g.alphabet, patterns, cfg.config);
    auto sup = synthesize(p, spec);
    std::cout << "networked plant: " << p.automaton.num_states() << " states, " << p.automaton.num_transitions()
              << " transitions\nsupervisor: " << sup.num_states() << " states\n";
    if (sup.empty()) return 1;
    auto cl = closed_loop(p, sup, spec);
    std::cout << std::boolalpha << "safe: " << cl.report.safe << ", nonblocking: " << cl.report.nonblocking << "\n";
    auto t = simulate(p, sup, spec, 1, 20);
    for (const auto& st : t.steps) std::cout << "  " << (st.event.empty() ? "(silent)" : st.event) << "\n";
    std::cout << "outcome: " << outcome_name(t.outcome) << "\n";
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
}
