#include <gtest/gtest.h>

#include "muval/pfwcsp.hpp"
#include "muval/sexpr.hpp"
#include "support/fixtures.hpp"
#include "support/finite.hpp"

namespace muval {
namespace {

TEST(Pcsp, CegisExampleSplitsIntoFiveClauses) {
  PfwCsp p = parse_pcsp(testing::fixture("cegis_example.pcsp"));
  EXPECT_EQ(p.clauses.size(), 5u);
  int max_source = -1;
  for (const auto& c : p.clauses) max_source = std::max(max_source, c.source);
  EXPECT_EQ(max_source, 2);
  EXPECT_TRUE(p.is_wf(Symbol("WF_Y")));
  EXPECT_EQ(p.pred(Symbol("WF_Y"))->args.size(), 2u);
  EXPECT_EQ(classify(p), ClauseClass::LinearCHC);
  EXPECT_NO_THROW(check_pcsp(p));
}

TEST(Pcsp, PrintParseRoundTrip) {
  for (const char* f : {"cegis_example.pcsp", "elim_example.golden.pcsp", "ground_contradiction.pcsp"}) {
    PfwCsp p = parse_pcsp(testing::fixture(f));
    PfwCsp q = parse_pcsp(to_pcsp(p));
    EXPECT_TRUE(alpha_equivalent(p.clauses, q.clauses)) << f;
    EXPECT_EQ(p.wf, q.wf);
  }
}

TEST(Pcsp, RejectsUndeclaredPredicate) {
  EXPECT_THROW(check_pcsp(parse_pcsp("(declare-fun X (Int) Bool)\n(assert (forall ((x Int)) (Y x)))\n")), Error);
}

TEST(Classify, HornShapes) {
  std::vector<Param> x{Param{Symbol("x"), Sort::Int}};
  Expr X = pred_call(Symbol("X"), {var(x[0])});
  Expr Y = pred_call(Symbol("Y"), {var(x[0])});
  EXPECT_EQ(classify(make_clause({not_(X), Y}, x)), ClauseClass::LinearCHC);
  EXPECT_EQ(classify(make_clause({not_(X), not_(Y)}, x)), ClauseClass::CHC);
  EXPECT_EQ(classify(make_clause({X, Y}, x)), ClauseClass::CoCHC);
  EXPECT_EQ(classify(make_clause({X, Y, not_(X), not_(Y)}, x)), ClauseClass::General);
}

TEST(NegateCoChc, SwapsPolarityAndRenames) {
  PfwCsp p = parse_pcsp(
      "(declare-fun X (Int) Bool)\n(declare-fun Y (Int) Bool)\n"
      "(assert (forall ((x Int)) (or (X x) (Y x))))\n");
  PfwCsp q = negate_cochc_to_chc(p);
  ASSERT_EQ(q.clauses.size(), 1u);
  EXPECT_TRUE(q.clauses[0].pos.empty());
  EXPECT_EQ(q.clauses[0].neg.size(), 2u);
  EXPECT_NE(q.pred(dual_name(Symbol("X"))), nullptr);
  EXPECT_THROW(negate_cochc_to_chc(parse_pcsp(testing::fixture("cegis_example.pcsp"))), PreconditionViolation);
}

TEST(Solution, PrintParseRoundTrip) {
  PfwCsp p = parse_pcsp(testing::fixture("cegis_example.pcsp"));
  std::vector<Param> one{Param{Symbol("a"), Sort::Int}};
  std::vector<Param> two{Param{Symbol("a"), Sort::Int}, Param{Symbol("b"), Sort::Int}};
  CandidateSolution s{{Symbol("X"), Lambda{one, parse_formula("a >= 0", one)}},
                      {Symbol("Y"), Lambda{one, parse_formula("ite(a >= 0, a, 0 - a) >= 0", one)}},
                      {Symbol("WF_Y"), Lambda{two, parse_formula("a >= 0 /\\ a > b", two)}}};
  const std::string text = solution_to_smt2(p, s);
  CandidateSolution back = parse_solution(text, p);
  EXPECT_EQ(solution_to_smt2(p, back), text);
}

TEST(SExpr, TrailingCommentsAreNotPartialInput) {
  EXPECT_EQ(parse_sexprs("(a b)\n; done").size(), 1u);
  EXPECT_EQ(parse_sexprs("(a (b c)) ; x\n; y\n").size(), 1u);
  EXPECT_THROW(parse_sexprs("(a b"), Error);
}

// Property: a ground instance holds exactly when its folded matrix is true.
TEST(InstantiateProperty, HoldsAgreesWithGroundEvaluation) {
  PfwCsp p = parse_pcsp(testing::fixture("cegis_example.pcsp"));
  std::vector<Param> one{Param{Symbol("a"), Sort::Int}};
  std::vector<Param> two{Param{Symbol("a"), Sort::Int}, Param{Symbol("b"), Sort::Int}};
  CandidateSolution s{{Symbol("X"), Lambda{one, parse_formula("a >= 2", one)}},
                      {Symbol("Y"), Lambda{one, parse_formula("a >= 1", one)}},
                      {Symbol("WF_Y"), Lambda{two, parse_formula("a > b", two)}}};
  testing::Rng rng(12);
  for (int i = 0; i < 200; ++i) {
    const Clause& c = p.clauses[static_cast<std::size_t>(testing::uniform(rng, 0, 4))];
    std::map<Symbol, std::int64_t> theta;
    for (const auto& v : c.vars) theta[v.name] = testing::uniform(rng, -5, 5);
    Clause g = instantiate(c, theta);
    ASSERT_TRUE(g.is_ground());
    Env env;
    for (const auto& [k, v] : theta) env.emplace_back(k, v);
    SolutionContext ctx(s);
    EXPECT_EQ(holds(g, s), evaluate(clause_matrix(c), env, ctx) != 0) << to_string(g);
  }
}

}  // namespace
}  // namespace muval
