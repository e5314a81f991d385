#include <gtest/gtest.h>

#include <chrono>

#include "muval/cegis.hpp"
#include "muval/driver.hpp"
#include "muval/encoders.hpp"
#include "muval/eval.hpp"
#include "muval/reduction.hpp"
#include "support/fixtures.hpp"
#include "support/finite.hpp"
#include "support/planted.hpp"

namespace muval {
namespace {

constexpr int kInstances = 12;

// Explicit states are 0..n-1, so bound n-1 covers them; no encoded step
// leaves that range.
bool decide(const Program& p, int n) {
  BoundedVerdict v = bounded_evaluate(p, n - 1);
  EXPECT_NE(v, BoundedVerdict::OutOfDomain) << to_muclp(p);
  return v == BoundedVerdict::Valid;
}

struct Tally {
  int yes = 0, no = 0;
  void add(bool v) { (v ? yes : no) += 1; }
};

TEST(Formats, ParseLtsGameAndAutomaton) {
  SymbolicLts lts = parse_lts(testing::fixture("counter.lts"));
  EXPECT_EQ(lts.vars.size(), 2u);
  EXPECT_EQ(lts.labels().size(), 2u);
  GameSpec g = parse_game(testing::fixture("gf_restore.game"));
  EXPECT_EQ(g.objective, Objective::Ltl);
  EXPECT_EQ(g.exists_labels.size(), 3u);
  EXPECT_EQ(g.forall_labels.size(), 2u);
  BuchiAutomaton a = parse_buchi(testing::fixture("gf_restore.buchi"));
  EXPECT_EQ(a.states.size(), 2u);
  EXPECT_EQ(a.final.size(), 1u);
  GameSpec c = parse_game(testing::fixture("cinderella.game"));
  EXPECT_EQ(c.objective, Objective::Safety);
  EXPECT_EQ(c.lts.vars.size(), 5u);
}

TEST(Formats, ReportBadInput) {
  EXPECT_THROW(parse_lts("trans a: x' = x;\n"), ParseError);
  EXPECT_THROW(parse_game("vars x: int;\ntrans a exists: x' = x;\n"), ParseError);
  EXPECT_THROW(parse_game("vars x: int;\ntrans a exists: x' = x;\ntrans a forall: x' = x;\nsafe true;\n"), ParseError);
  EXPECT_THROW(parse_buchi("states q0;\nq0 -> q1 : a;\ninit q0;\n"), ParseError);
}

TEST(EncoderOracle, Buchi) {
  testing::Rng rng(101);
  Tally t;
  for (int i = 0; i < kInstances; ++i) {
    const int n = testing::uniform(rng, 2, 4);
    testing::FiniteLts lts = testing::random_lts(rng, n, {"a", "b"}, 0.3, true);
    testing::DetBuchi a = testing::random_det_buchi(rng, testing::uniform(rng, 1, 3), {"a", "b"});
    Program p = encode_buchi(parse_lts(testing::lts_text(lts)), parse_buchi(testing::buchi_text(a)));
    const bool want = testing::buchi_oracle(lts, a);
    EXPECT_EQ(decide(p, n), want) << testing::lts_text(lts) << testing::buchi_text(a);
    t.add(want);
  }
  EXPECT_GT(t.yes, 0);
  EXPECT_GT(t.no, 0);
}

TEST(EncoderOracle, SafetyGame) {
  testing::Rng rng(202);
  Tally t;
  for (int i = 0; i < kInstances; ++i) {
    const int n = testing::uniform(rng, 2, 5);
    testing::FiniteGame g = testing::random_game(rng, n, 0.25);
    Program p = encode_safety_game(parse_game(testing::game_text(g, "safe")));
    const bool want = testing::safety_oracle(g);
    EXPECT_EQ(decide(p, n), want) << testing::game_text(g, "safe");
    t.add(want);
  }
  EXPECT_GT(t.yes, 0);
  EXPECT_GT(t.no, 0);
}

TEST(EncoderOracle, ReachabilityGame) {
  testing::Rng rng(303);
  Tally t;
  for (int i = 0; i < kInstances; ++i) {
    const int n = testing::uniform(rng, 2, 5);
    testing::FiniteGame g = testing::random_game(rng, n, 0.3);
    g.target.erase(g.lts.init);
    Program p = encode_reachability_game(parse_game(testing::game_text(g, "reach")));
    const bool want = testing::reach_oracle(g);
    EXPECT_EQ(decide(p, n), want) << testing::game_text(g, "reach");
    t.add(want);
  }
  EXPECT_GT(t.yes, 0);
  EXPECT_GT(t.no, 0);
}

TEST(EncoderOracle, LtlGame) {
  testing::Rng rng(404);
  const std::vector<std::string> labels{"e1", "e2", "u1", "u2"};
  Tally t;
  for (int i = 0; i < kInstances; ++i) {
    const int n = testing::uniform(rng, 2, 4);
    testing::FiniteGame g = testing::random_game(rng, n, 0.35);
    testing::DetBuchi a = testing::random_det_buchi(rng, testing::uniform(rng, 1, 3), labels);
    GameSpec spec = parse_game(testing::game_text(g, "ltl"));
    spec.automaton = parse_buchi(testing::buchi_text(a));
    const bool want = testing::ltl_game_oracle(g, a);
    EXPECT_EQ(decide(encode_ltl_game(spec), n), want) << testing::game_text(g, "ltl") << testing::buchi_text(a);
    t.add(want);
  }
  EXPECT_GT(t.yes, 0);
  EXPECT_GT(t.no, 0);
}

TEST(EncoderOracle, Bisimulation) {
  testing::Rng rng(505);
  Tally t;
  for (int i = 0; i < kInstances; ++i) {
    const int n1 = testing::uniform(rng, 2, 3);
    int n2 = testing::uniform(rng, 2, 3);
    testing::FiniteLts a = testing::random_lts(rng, n1, {"a", "b"}, 0.3, false);
    // Every other instance compares a system with a copy of itself, so that
    // bisimilar pairs occur.
    testing::FiniteLts b = i % 2 ? a : testing::random_lts(rng, n2, {"a", "b"}, 0.3, false);
    if (i % 2) n2 = n1;
    const int s = testing::uniform(rng, 0, n1 - 1), u = testing::uniform(rng, 0, n2 - 1);
    BisimQuery q;
    q.pairs = {{s, u}};
    Program p = encode_bisimulation(parse_lts(testing::lts_text(a)), parse_lts(testing::lts_text(b)), q);
    const bool want = testing::bisimulation_oracle(a, b)[s][u];
    EXPECT_EQ(decide(p, std::max(n1, n2)), want) << testing::lts_text(a) << testing::lts_text(b) << s << "," << u;
    t.add(want);
  }
  EXPECT_GT(t.yes, 0);
  EXPECT_GT(t.no, 0);
}

// The complement of a safety game, read as a reachability game for the
// other player, always has the opposite verdict.
TEST(EncoderOracle, SafetyReachabilityDuality) {
  testing::Rng rng(606);
  for (int i = 0; i < 2 * kInstances; ++i) {
    const int n = testing::uniform(rng, 2, 5);
    testing::FiniteGame g = testing::random_game(rng, n, 0.25);
    GameSpec spec = parse_game(testing::game_text(g, "safe"));
    EXPECT_NE(decide(encode_safety_game(spec), n), decide(safety_complement_as_reachability(spec), n))
        << testing::game_text(g, "safe");
  }
}

TEST(EncodeBisim, RequiresSharedLabels) {
  SymbolicLts a = parse_lts("vars x: int;\ntrans a: x' = x;\n");
  SymbolicLts b = parse_lts("vars x: int;\ntrans b: x' = x;\n");
  BisimQuery q;
  q.pairs = {{0, 0}};
  EXPECT_THROW(encode_bisimulation(a, b, q), Error);
}

TEST(EncodeBisim, VariablesAreSuffixedPerSystem) {
  SymbolicLts c = parse_lts(testing::fixture("counter.lts"));
  std::vector<std::string> names;
  for (const auto& p : bisim_vars(c, c)) names.push_back(p.name.str());
  EXPECT_EQ(names, (std::vector<std::string>{"x1", "y1", "x2", "y2"}));
}

TEST(EncodeBisim, UpperBoundIsTheDualOfTheRelation) {
  // Bisimilar counter states keep the same distance to their bound.
  SymbolicLts c = parse_lts(testing::fixture("counter.lts"));
  BisimQuery q;
  q.kind = BisimQueryKind::Upper;
  q.formula = parse_formula("y1 - x1 = y2 - x2 \\/ (x1 >= y1 /\\ x2 >= y2)", bisim_vars(c, c));
  Program p = encode_bisimulation(c, c, q);
  EXPECT_EQ(bounded_evaluate(p, 3), BoundedVerdict::Valid);
  q.formula = parse_formula("x1 = x2", bisim_vars(c, c));
  EXPECT_EQ(bounded_evaluate(encode_bisimulation(c, c, q), 3), BoundedVerdict::Invalid);
}

TEST(CounterBisimulation, PlantedInvariantRevalidates) {
  SymbolicLts c = parse_lts(testing::fixture("counter.lts"));
  BisimQuery q;
  q.pairs = {{0, 1, 1, 2}};
  Reduction r = reduce(encode_bisimulation(c, c, q));
  ASSERT_EQ(r.trace.skolems.size(), 8u);
  for (const auto& sk : r.trace.skolems) ASSERT_EQ(sk.args.size(), 6u);
  CandidateSolution s = testing::planted_counter(r);
  SmtSolver smt(SmtOptions{});
  EXPECT_TRUE(validate(r.csp, s, smt).valid);
  s[Symbol("bisim")] = Lambda{s[Symbol("bisim")].params, mk_true()};
  EXPECT_FALSE(validate(r.csp, s, smt).valid);
}

TEST(CounterBisimulation, QueryIsValid) {
  SymbolicLts c = parse_lts(testing::fixture("counter.lts"));
  BisimQuery q;
  q.pairs = {{0, 1, 1, 2}};
  Program p = encode_bisimulation(c, c, q);
  RunConfig cfg;
  cfg.timeout = std::chrono::seconds(120);
  const auto start = std::chrono::steady_clock::now();
  EXPECT_EQ(muval_solve(p, cfg).outcome, Outcome::Valid);
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(120));
}

}  // namespace
}  // namespace muval
