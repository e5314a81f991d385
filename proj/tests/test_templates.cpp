#include <gtest/gtest.h>

#include <algorithm>

#include "muval/cegis.hpp"
#include "support/finite.hpp"

namespace muval {
namespace {

Params wf_params(std::int64_t nl, std::int64_t np, std::int64_t nc) {
  Params p;
  p.family = Family::WellFounded;
  p.values = {nl, np, nc, 2, 2, 2, 2};
  return p;
}

// Number of pairs related by `wf` on the grid [-range, range]^4.
std::size_t related_pairs(const Lambda& wf, std::int64_t range) {
  CandidateSolution none;
  SolutionContext ctx(none);
  std::size_t n = 0;
  for (std::int64_t a = -range; a <= range; ++a) {
    for (std::int64_t b = -range; b <= range; ++b) {
      for (std::int64_t c = -range; c <= range; ++c) {
        for (std::int64_t d = -range; d <= range; ++d) {
          Env env{{wf.params[0].name, a}, {wf.params[1].name, b}, {wf.params[2].name, c}, {wf.params[3].name, d}};
          n += evaluate(wf.body, env, ctx) != 0;
        }
      }
    }
  }
  return n;
}

// Property: every coefficient assignment of a WF template denotes a
// relation without cycles on sampled graphs.
TEST(WfTemplateProperty, RandomCoefficientsAreCycleFree) {
  testing::Rng rng(4242);
  const std::vector<Sort> args(4, Sort::Int);
  int nonempty = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::int64_t nl = 1 + trial % 2, np = 1 + (trial / 2) % 2;
    TemplateInstance t = build_wf_template(Symbol("W"), args, wf_params(nl, np, 1));
    TemplateSet ts{{t.target, t}};
    CoeffAssignment theta;
    for (Symbol u : t.unknowns) {
      const std::int64_t b = t.bounds.count(u) ? t.bounds.at(u) : 2;
      theta[u] = testing::uniform(rng, -b, b);
    }
    Lambda wf = extract_candidate(ts, theta).at(t.target);
    EXPECT_EQ(count_wf_cycles(wf, 500, static_cast<std::uint64_t>(trial), 20), 0u)
        << "nl=" << nl << " np=" << np << " body " << to_muclp(wf.body);
    nonempty += related_pairs(wf, 2) > 0;
  }
  // Guards against a vacuous property: most relations relate something.
  EXPECT_GE(nonempty, 30);
}

TEST(WfTemplate, RejectsOddArity) {
  EXPECT_THROW(build_wf_template(Symbol("W"), {Sort::Int}, wf_params(1, 1, 0)), Error);
}

TEST(WfTemplate, SinglePieceRankingIsExpressible) {
  // r(x) = x with nc = 0: the relation x >= 0 /\ x > x'.
  TemplateInstance t = build_wf_template(Symbol("W"), {Sort::Int, Sort::Int}, wf_params(1, 1, 0));
  CoeffAssignment theta;
  for (Symbol u : t.unknowns) {
    const std::string n = u.str();
    if (n.size() > 2 && n.compare(n.size() - 2, 2, "#1") == 0 && n.find("#r#") != std::string::npos) theta[u] = 1;
  }
  Lambda wf = extract_candidate(TemplateSet{{t.target, t}}, theta).at(t.target);
  CandidateSolution none;
  SolutionContext ctx(none);
  Env down{{wf.params[0].name, 3}, {wf.params[1].name, 2}};
  Env up{{wf.params[0].name, 2}, {wf.params[1].name, 3}};
  Env negative{{wf.params[0].name, -1}, {wf.params[1].name, -2}};
  EXPECT_EQ(evaluate(wf.body, down, ctx), 1);
  EXPECT_EQ(evaluate(wf.body, up, ctx), 0);
  EXPECT_EQ(evaluate(wf.body, negative, ctx), 0);
}

TEST(PredTemplate, ZeroAssignmentIsExtractable) {
  Params p;
  p.values = {2, 2, 1, 1};
  TemplateInstance t = build_pred_template(Symbol("X"), {Sort::Int, Sort::Int}, p);
  EXPECT_FALSE(t.unknowns.empty());
  Lambda l = extract_candidate(TemplateSet{{t.target, t}}, {}).at(t.target);
  EXPECT_EQ(l.params.size(), 2u);
  for (Symbol m : t.multipliers) {
    EXPECT_NE(std::find(t.unknowns.begin(), t.unknowns.end(), m), t.unknowns.end());
  }
}

TEST(Hypothesis, ModelSatisfiesSeparableExamples) {
  PfwCsp csp = parse_pcsp("(declare-fun X (Int) Bool)\n(assert (forall ((x Int)) (X x)))\n");
  std::vector<Clause> examples{make_clause({pred_call(Symbol("X"), {int_lit(0)})}, {}),
                               make_clause({pred_call(Symbol("X"), {int_lit(1)})}, {}),
                               make_clause({not_(pred_call(Symbol("X"), {int_lit(4)}))}, {})};
  TemplateSet ts = build_templates(csp, initial_params(csp));
  Hypothesis h = hypothesis_constraint(examples, ts);
  SmtSolver smt(SmtOptions{});
  std::vector<Expr> terms;
  for (Symbol u : h.unknowns) terms.push_back(var(u, Sort::Int));
  SatResult r = smt.check_sat({}, h.assertions, terms);
  ASSERT_EQ(r.status, SmtStatus::Sat);
  CoeffAssignment theta;
  for (std::size_t i = 0; i < h.unknowns.size(); ++i) theta[h.unknowns[i]] = r.values.at(i);
  CandidateSolution s = extract_candidate(ts, theta);
  for (const auto& e : examples) EXPECT_TRUE(holds(e, s)) << to_string(e);
}

TEST(UnitMultipliers, ConfinesEveryMultiplierOnce) {
  Params p;
  p.values = {1, 2, 4, 4};
  TemplateInstance t = build_pred_template(Symbol("X"), {Sort::Int, Sort::Int}, p);
  TemplateSet ts{{t.target, t}};
  auto unit = unit_multipliers(ts);
  ASSERT_TRUE(unit.has_value());
  for (Symbol m : t.multipliers) EXPECT_EQ(unit->at(t.target).bounds.at(m), 1);
  EXPECT_FALSE(unit_multipliers(*unit).has_value());
}

// Property: bumping is monotone and keeps levels within the fairness gap.
TEST(BumpProperty, MonotoneAndFair) {
  PfwCsp csp = parse_pcsp(
      "(declare-fun X (Int) Bool)\n(declare-fun Y (Int Int) Bool)\n(declare-wf W (Int Int))\n"
      "(declare-fnvar f (Int) Int)\n(assert (forall ((x Int)) (X x)))\n");
  testing::Rng rng(77);
  const unsigned fairness = 3;
  ParamVector p = initial_params(csp);
  std::vector<Symbol> names;
  for (const auto& [n, _] : p.vars) names.push_back(n);
  for (int step = 0; step < 200; ++step) {
    CoreBlame blame;
    const Symbol pick = names[static_cast<std::size_t>(testing::uniform(rng, 0, static_cast<int>(names.size()) - 1))];
    blame.vars.insert(pick);
    if (testing::coin(rng, 0.5)) blame.bounded.insert(pick);
    ParamVector q = bump_params(p, blame, fairness);
    EXPECT_TRUE(p <= q);
    EXPECT_FALSE(q <= p) << "step " << step << " did not grow";
    unsigned lo = ~0u, hi = 0;
    for (const auto& [_, ps] : q.vars) {
      lo = std::min(lo, ps.level);
      hi = std::max(hi, ps.level);
    }
    EXPECT_LE(hi - lo, fairness + 1);
    p = std::move(q);
  }
}

TEST(Families, DeclaredKindsDecideTheFamily) {
  PfwCsp csp = parse_pcsp(
      "(declare-fun X (Int) Bool)\n(declare-wf W (Int Int))\n(declare-fnvar f (Int) Int)\n"
      "(assert (forall ((x Int)) (X x)))\n");
  EXPECT_EQ(family_of(csp, Symbol("X")), Family::Ordinary);
  EXPECT_EQ(family_of(csp, Symbol("W")), Family::WellFounded);
  EXPECT_EQ(family_of(csp, Symbol("f")), Family::Function);
  EXPECT_EQ(component_names(Family::WellFounded).size(), 7u);
}

}  // namespace
}  // namespace muval
