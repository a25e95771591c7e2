#include <catch_amalgamated.hpp>

#include "build.hpp"
#include "netsup/netsup.hpp"
#include "oracles.hpp"
#include "random_models.hpp"

using namespace netsup;
using fixtures::make;
using fixtures::Rng;
using fixtures::Shape;

namespace {

using Strings = std::set<EventString>;

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

// After a the site may issue c, after b it may not, and d looks like b to a
// site that only sees a.
struct Branches {
  Alphabet alphabet{{"a", "b", "c", "d"}, {"c"}, {"a", "b", "c", "d"}};
  Automaton plant = make({"a", "b", "c", "d"},
                         {{"0", "a", "1"}, {"0", "b", "2"}, {"0", "d", "5"}, {"1", "c", "3"}, {"2", "c", "4"},
                          {"5", "c", "6"}},
                         {"3", "4", "6"});
  Automaton spec = make({"a", "b", "c", "d"},
                        {{"0", "a", "1"}, {"0", "b", "2"}, {"0", "d", "5"}, {"1", "c", "3"}, {"5", "c", "6"}},
                        {"3", "6"});
};

}  // namespace

TEST_CASE("fusion values with no responsibilities", "[decentralized]") {
  Branches x;
  std::vector<Site> sites{{{"a"}, {"c"}, {}, {}, 0, 0}, {{"b"}, {"c"}, {}, {}, 0, 0}};
  auto f = eval_fusion(sites, x.spec, x.plant, x.alphabet, {"b"});
  CHECK(f.vc_site[0] == x.alphabet.events());
  CHECK(f.vc == x.alphabet.events());
  CHECK(f.vd == x.alphabet.uncontrollable());
  CHECK(f.vg == x.alphabet.events());
  CHECK_THROWS_AS(eval_fusion(sites, x.spec, x.plant, x.alphabet, {"c"}), PreconditionError);
}

TEST_CASE("fusion values on branches", "[decentralized]") {
  Branches x;
  std::vector<Site> sites{{{"a"}, {"c"}, {"c"}, {"c"}, 0, 0}, {{"b"}, {"c"}, {"c"}, {"c"}, 0, 0}};
  auto f = eval_fusion(sites, x.spec, x.plant, x.alphabet, {"b"});
  CHECK(f.vc_site[0].count("c"));
  CHECK_FALSE(f.vc_site[1].count("c"));
  CHECK_FALSE(f.vc.count("c"));
  CHECK_FALSE(f.vd.count("c"));
  auto g = eval_fusion(sites, x.spec, x.plant, x.alphabet, {"d"});
  CHECK(g.vc.count("c"));
  CHECK_FALSE(g.vd_site[0].count("c"));
  CHECK(g.vd_site[1].count("c"));
  CHECK(g.vd.count("c"));
  for (const auto& s : oracle::strings_upto(x.plant, 2)) {
    auto lib = eval_fusion(sites, x.spec, x.plant, x.alphabet, s);
    auto o = oracle::eval_fusion(sites, x.spec, x.plant, x.alphabet, s, 4);
    CHECK(o.vc == lib.vc);
    CHECK(o.vd == lib.vd);
    CHECK(o.vc_site == lib.vc_site);
    CHECK(o.vd_site == lib.vd_site);
  }
}

TEST_CASE("fusion value invariants", "[decentralized]") {
  Rng rng(79);
  for (int i = 0; i < 40; ++i) {
    auto alphabet = fixtures::random_alphabet(rng, 4);
    auto plant = fixtures::random_plant(rng, fixtures::event_names(4), 5, Shape::kAny, 0.5);
    auto spec = fixtures::random_sub(rng, plant);
    std::vector<Site> one{random_site(rng, alphabet)};
    auto two = one;
    two.push_back(random_site(rng, alphabet));
    for (const auto& s : oracle::strings_upto(plant, 4)) {
      auto f1 = eval_fusion(one, spec, plant, alphabet, s), f2 = eval_fusion(two, spec, plant, alphabet, s);
      CHECK(is_subset_of(alphabet.uncontrollable(), f2.vc));
      CHECK(is_subset_of(alphabet.uncontrollable(), f2.vd));
      CHECK(is_subset_of(f2.vc, f1.vc));
      CHECK(is_subset_of(f1.vd, f2.vd));
    }
  }
}

TEST_CASE("co-observability examples", "[decentralized]") {
  Branches x;
  Site sees_a{{"a"}, {"c"}, {"c"}, {"c"}, 0, 0}, sees_b{{"b"}, {"c"}, {"c"}, {"c"}, 0, 0};
  auto cp = CoobservabilityMode::kConjunctive, da = CoobservabilityMode::kDisjunctive;
  CHECK(check_coobservability(x.plant, x.plant, {sees_a}, x.alphabet, cp).holds);
  CHECK(check_coobservability(x.spec, x.plant, {sees_a, sees_b}, x.alphabet, cp).holds);
  CHECK(check_coobservability(x.spec, x.plant, {sees_b}, x.alphabet, cp).holds);
  auto v = check_coobservability(x.spec, x.plant, {sees_a}, x.alphabet, cp);
  REQUIRE_FALSE(v.holds);
  CHECK(v.counterexample->string == EventString{"b"});
  CHECK(v.counterexample->event == "c");
  CHECK(check_coobservability(x.spec, x.plant, {sees_a, sees_b}, x.alphabet, da).holds);
  auto w = check_coobservability(x.spec, x.plant, {sees_a}, x.alphabet, da);
  REQUIRE_FALSE(w.holds);
  CHECK(w.counterexample->string == EventString{"d"});
}

TEST_CASE("one fully responsible site is observability", "[decentralized]") {
  Rng rng(83);
  int fails = 0;
  for (int i = 0; i < 100; ++i) {
    auto alphabet = fixtures::random_alphabet(rng, 3);
    auto plant = fixtures::random_plant(rng, fixtures::event_names(3), fixtures::pick(rng, 2, 6), Shape::kAny, 0.6,
                                        i % 2 == 0);
    auto spec = fixtures::random_sub(rng, plant, 0.6);
    Site s{alphabet.observable(), alphabet.controllable(), alphabet.controllable(), {}, 0, 0};
    bool v = check_coobservability(spec, plant, {s}, alphabet, CoobservabilityMode::kConjunctive).holds;
    fails += !v;
    CHECK(v == check_observability(spec, plant, alphabet).holds);
  }
  CHECK(fails > 0);
}

TEST_CASE("co-observability agrees with enumeration", "[decentralized]") {
  Rng rng(89);
  for (int i = 0; i < 60; ++i) {
    auto alphabet = fixtures::random_alphabet(rng, 3);
    auto plant = fixtures::random_plant(rng, fixtures::event_names(3), 6, Shape::kStrictDag, 0.7, i % 2 == 0);
    auto spec = fixtures::random_sub(rng, plant, 0.6);
    std::vector<Site> sites{random_site(rng, alphabet), random_site(rng, alphabet)};
    for (bool conj : {true, false}) {
      auto mode = conj ? CoobservabilityMode::kConjunctive : CoobservabilityMode::kDisjunctive;
      CHECK(check_coobservability(spec, plant, sites, alphabet, mode).holds ==
            oracle::coobservable(spec, plant, sites, alphabet, conj, 5));
    }
  }
}

TEST_CASE("site validation", "[decentralized]") {
  Branches x;
  CHECK_THROWS_AS(check_coobservability(x.spec, x.plant, {}, x.alphabet, CoobservabilityMode::kConjunctive),
                  PreconditionError);
  Site bad_cp{{"a"}, {}, {"c"}, {}, 0, 0};
  CHECK_THROWS_AS(eval_fusion({bad_cp}, x.spec, x.plant, x.alphabet, {}), PreconditionError);
  Site bad_ctrl{{"a"}, {"a"}, {}, {}, 0, 0};
  CHECK_THROWS_AS(eval_fusion({bad_ctrl}, x.spec, x.plant, x.alphabet, {}), PreconditionError);
  Site negative{{"a"}, {}, {}, {}, -1, 0};
  CHECK_THROWS_AS(eval_fusion({negative}, x.spec, x.plant, x.alphabet, {}), PreconditionError);
}

TEST_CASE("delay co-observability examples", "[decentralized]") {
  Branches x;
  std::vector<Site> both{{{"a", "c"}, {"c"}, {}, {}, 0, 0}, {{"b", "c"}, {"c"}, {}, {}, 0, 0}};
  CHECK(check_delay_coobservability(x.plant, x.plant, both, x.alphabet).holds);
  // With a, b, d uncontrollable no site can rule out a c after an unseen a.
  CHECK_FALSE(check_delay_coobservability(x.spec, x.plant, both, x.alphabet).holds);
  Alphabet ctrl(x.alphabet.events(), x.alphabet.events(), x.alphabet.events());
  CHECK(check_delay_coobservability(x.spec, x.plant, both, ctrl).holds);
  std::vector<Site> only_a{{{"a", "c"}, {"c"}, {}, {}, 0, 0}};
  auto v = check_delay_coobservability(x.spec, x.plant, only_a, ctrl);
  REQUIRE_FALSE(v.holds);
  CHECK(v.counterexample->event == "c");
  for (const auto& al : {x.alphabet, ctrl})
    for (const auto& ss : {both, only_a})
      CHECK(check_delay_coobservability(x.spec, x.plant, ss, al).holds ==
            oracle::delay_coobservable(x.spec, x.plant, ss, al, 4));

  std::vector<Site> unseen{{{"a"}, {"c"}, {}, {}, 0, 0}};
  CHECK_THROWS_AS(check_delay_coobservability(x.spec, x.plant, unseen, x.alphabet), AssumptionViolation);

  auto loop = make({"a", "u"}, {{"0", "a", "1"}, {"1", "u", "1"}}, {"1"});
  Alphabet la({"a", "u"}, {"a"}, {"a", "u"});
  CHECK_THROWS_AS(check_delay_coobservability(loop, loop, {Site{{"a"}, {"a"}, {}, {}, 0, 0}}, la), UncontrollableLoop);
  auto cycle = make({"a", "u"}, {{"0", "a", "1"}, {"1", "u", "0"}}, {"1"});
  CHECK_NOTHROW(require_no_uncontrollable_loop(cycle, la));
}

TEST_CASE("unseen uncontrollable events confuse a site", "[decentralized]") {
  Alphabet alphabet({"a", "u", "c"}, {"a", "c"}, {"a", "u", "c"});
  auto plant = make({"a", "u", "c"}, {{"0", "a", "1"}, {"1", "u", "2"}, {"2", "c", "3"}, {"0", "c", "4"}}, {"3", "4"});
  auto spec = make({"a", "u", "c"}, {{"0", "a", "1"}, {"1", "u", "2"}, {"0", "c", "4"}}, {"4"}, {"2"});
  std::vector<Site> sees_a{{{"a", "c"}, {"c"}, {}, {}, 0, 0}};
  std::vector<Site> blind{{{"c"}, {"c"}, {}, {}, 0, 0}};
  CHECK(check_delay_coobservability(spec, plant, sees_a, alphabet).holds);
  CHECK_FALSE(check_delay_coobservability(spec, plant, blind, alphabet).holds);
  CHECK(oracle::delay_coobservable(spec, plant, sees_a, alphabet, 4));
  CHECK_FALSE(oracle::delay_coobservable(spec, plant, blind, alphabet, 4));
}

TEST_CASE("delay co-observability agrees with enumeration", "[decentralized]") {
  Rng rng(97);
  int fails = 0;
  for (int i = 0; i < 60; ++i) {
    auto alphabet = fixtures::random_alphabet(rng, 3);
    auto plant = fixtures::random_plant(rng, fixtures::event_names(3), 6, Shape::kStrictDag, 0.7, i % 2 == 0);
    auto spec = fixtures::random_sub(rng, plant, 0.6);
    std::vector<Site> sites{random_site(rng, alphabet, true), random_site(rng, alphabet, true)};
    bool v = check_delay_coobservability(spec, plant, sites, alphabet).holds;
    fails += !v;
    CHECK(v == oracle::delay_coobservable(spec, plant, sites, alphabet, 5));
  }
  CHECK(fails > 0);
}

TEST_CASE("delay co-observability without uncontrollable events is C&P", "[decentralized]") {
  Rng rng(101);
  for (int i = 0; i < 50; ++i) {
    auto events = fixtures::event_names(3);
    EventSet all(events.begin(), events.end());
    Alphabet alphabet(all, all, all);
    auto plant = fixtures::random_plant(rng, events, 5, Shape::kAny, 0.5);
    auto spec = fixtures::random_sub(rng, plant, 0.6);
    std::vector<Site> sites;
    for (int k = 0; k < 2; ++k) {
      auto c = fixtures::random_subset(rng, all, 0.6);
      if (k == 0) c = all;
      sites.push_back({all, c, c, {}, 0, 0});
    }
    CHECK(check_delay_coobservability(spec, plant, sites, alphabet).holds ==
          check_coobservability(spec, plant, sites, alphabet, CoobservabilityMode::kConjunctive).holds);
  }
}

TEST_CASE("site observation sets", "[decentralized]") {
  Site s{{"a", "b"}, {}, {}, {}, 0, 0};
  CHECK(theta_site({"a", "u", "b"}, s) == Strings{{"a", "b"}});
  s.obs_delay = 1;
  CHECK(theta_site({"a", "b"}, s) == Strings{{"a", "b"}, {"a"}});
  CHECK(theta_site({"a", "b", "u"}, s) == Strings{{"a", "b"}});
  Rng rng(103);
  for (int i = 0; i < 30; ++i) {
    auto alphabet = fixtures::random_alphabet(rng, 3);
    auto g = fixtures::random_plant(rng, fixtures::event_names(3), 4, Shape::kAny, 0.6);
    auto site = random_site(rng, alphabet);
    for (const auto& str : oracle::strings_upto(g, 5)) CHECK(theta_site(str, site) == oracle::theta_site(str, site));
  }
}

TEST_CASE("minimal site policy", "[decentralized]") {
  Alphabet alphabet({"a", "b", "c", "u"}, {"a", "b", "c"}, {"a", "b", "c", "u"});
  auto gr = make({"a", "b", "c", "u"}, {{"0", "a", "1"}, {"1", "b", "2"}, {"0", "c", "2"}, {"2", "u", "0"}}, {"0"});
  Site full{{"a", "b", "c", "u"}, {"a", "b", "c"}, {}, {}, 0, 0};
  CHECK(pi_min(full, gr, alphabet, {}) == EventSet{"a", "c", "u"});
  CHECK(pi_min(full, gr, alphabet, {"a"}) == EventSet{"b", "u"});
  CHECK(pi_min(full, gr, alphabet, {"b"}) == EventSet{"u"});
  full.ctrl_delay = 1;
  CHECK(pi_min(full, gr, alphabet, {}) == EventSet{"a", "b", "c", "u"});
  CHECK(pi_min(full, gr, alphabet, {"a"}) == EventSet{"b", "u"});
  CHECK(oracle::pi_min(full, gr, alphabet, {"a"}, 6) == EventSet{"b", "u"});
  auto nd = make({"a"}, {{"0", "a", "1"}, {"0", "a", "2"}}, {"1"});
  CHECK_THROWS_AS(pi_min(full, nd, alphabet, {}), PreconditionError);
}

TEST_CASE("minimal site policy grows with the control delay", "[decentralized]") {
  Rng rng(107);
  for (int i = 0; i < 40; ++i) {
    auto alphabet = fixtures::random_alphabet(rng, 3);
    auto gr = fixtures::random_plant(rng, fixtures::event_names(3), 5, Shape::kAny, 0.5);
    auto site = random_site(rng, alphabet);
    for (const auto& s : oracle::strings_upto(gr, 4))
      for (const auto& theta : theta_site(s, site)) {
        auto lo = site;
        lo.ctrl_delay = 0;
        auto hi = lo;
        EventSet prev = pi_min(lo, gr, alphabet, theta);
        for (int n = 1; n <= 3; ++n) {
          hi.ctrl_delay = n;
          auto cur = pi_min(hi, gr, alphabet, theta);
          CHECK(is_subset_of(prev, cur));
          prev = cur;
        }
      }
  }
}

TEST_CASE("bounded decentralized networked control", "[decentralized]") {
  Alphabet alphabet({"a", "b"}, {"a", "b"}, {"a", "b"});
  auto g = make({"a", "b"}, {{"0", "a", "1"}, {"1", "b", "2"}, {"0", "b", "3"}}, {"2", "3"});
  auto kr = make({"a", "b"}, {{"0", "a", "1"}, {"1", "b", "2"}}, {"2"});
  Site seer{{"a", "b"}, {"a", "b"}, {}, {}, 0, 1};
  Site blind{{}, {}, {}, {}, 0, 0};

  SECTION("trivial required behavior") {
    auto eps = make({"a", "b"}, {}, {"0"}, {"0"});
    auto r = check_dcpndes_bounded(g, eps, g, {seer, blind}, alphabet, 4);
    CHECK(r.feasible_co_control);
    CHECK(r.feasible_co_observation);
    CHECK(r.kr_contained);
    CHECK(r.la_contained);
    CHECK(r.depth == 4);
  }
  SECTION("a one-step command lag admits b too early") {
    auto r = check_dcpndes_bounded(g, kr, kr, {seer, blind}, alphabet, 4);
    CHECK(r.kr_contained);
    CHECK_FALSE(r.la_contained);
    CHECK(r.la_witness == EventString{"b"});
  }
  SECTION("without the lag the required behavior is exact") {
    seer.ctrl_delay = 0;
    auto r = check_dcpndes_bounded(g, kr, kr, {seer, blind}, alphabet, 4);
    CHECK(r.kr_contained);
    CHECK(r.la_contained);
  }
  SECTION("uncontrollable events unknown to a site break co-control feasibility") {
    Alphabet unc({"a", "b"}, {"a"}, {"a", "b"});
    Site a_only{{"a"}, {"a"}, {}, {}, 0, 0};
    auto r = check_dcpndes_bounded(g, kr, g, {a_only}, unc, 3);
    CHECK_FALSE(r.feasible_co_control);
    REQUIRE(r.co_control_witness);
  }
  SECTION("required strings outside the plant") {
    auto big = make({"a", "b"}, {{"0", "a", "1"}, {"1", "a", "2"}}, {"2"});
    auto r = check_dcpndes_bounded(g, big, g, {seer}, alphabet, 3);
    CHECK_FALSE(r.kr_contained);
  }
  CHECK_THROWS_AS(check_dcpndes_bounded(g, kr, kr, {seer}, alphabet, 0), PreconditionError);
}
