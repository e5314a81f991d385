#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <chrono>
#include <set>
#include <sstream>

#include "muval/cegis.hpp"
#include "support/fixtures.hpp"

namespace muval {
namespace {

Expr call(const char* name, std::vector<std::int64_t> args) {
  std::vector<Expr> es;
  for (auto a : args) es.push_back(int_lit(a));
  return pred_call(Symbol(name), es);
}

Clause unit(Expr lit) { return make_clause({std::move(lit)}, {}); }

const PfwCsp& wf_signature() {
  static const PfwCsp csp =
      parse_pcsp("(declare-wf WF (Int Int))\n(assert (forall ((x Int)) (WF x (- x 1))))\n");
  return csp;
}

TEST(CycleLearning, TwoCycleNeedsExactlyOneLearntClause) {
  const auto start = std::chrono::steady_clock::now();
  SmtSolver smt(SmtOptions{});
  ExampleCheck r = check_examples_unsat({unit(call("WF", {0, 1})), unit(call("WF", {1, 0}))}, wf_signature(), smt);
  EXPECT_EQ(r.status, ExampleStatus::Unsat);
  EXPECT_EQ(r.learnt.size(), 1u);
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(1));
}

TEST(CycleLearning, ChainIsSatisfiable) {
  SmtSolver smt(SmtOptions{});
  ExampleCheck r = check_examples_unsat({unit(call("WF", {0, 1})), unit(call("WF", {1, 2}))}, wf_signature(), smt);
  EXPECT_EQ(r.status, ExampleStatus::Sat);
}

TEST(CycleLearning, DisjunctiveEdgesNeedOneClausePerCycle) {
  // Either edge of the first clause closes a distinct cycle with the units.
  std::vector<Clause> inst{make_clause({call("WF", {0, 1}), call("WF", {0, 2})}, {}), unit(call("WF", {1, 0})),
                           unit(call("WF", {2, 0}))};
  SmtSolver smt(SmtOptions{});
  ExampleCheck r = check_examples_unsat(inst, wf_signature(), smt);
  EXPECT_EQ(r.status, ExampleStatus::Unsat);
  EXPECT_EQ(r.learnt.size(), 2u);
}

TEST(Resolution, DerivesGroundConsequences) {
  PfwCsp csp = parse_pcsp(
      "(declare-fun X (Int) Bool)\n(declare-fun Y (Int) Bool)\n"
      "(assert (forall ((x Int)) (=> (X x) (Y (+ x 1)))))\n");
  ExampleStore store;
  store.add(unit(call("X", {3})));
  ExampleStore out = resolution_closure(store, csp, 1);
  EXPECT_EQ(out.positives.count(call("Y", {4})), 1u);
  EXPECT_EQ(resolution_closure(store, csp, 0).positives.count(call("Y", {4})), 0u);
}

TEST(ExampleStoreTest, RejectsDuplicates) {
  ExampleStore s;
  EXPECT_TRUE(s.add(unit(call("X", {1}))));
  EXPECT_FALSE(s.add(unit(call("X", {1}))));
  EXPECT_TRUE(s.contains(unit(call("X", {1}))));
}

TEST(Solve, CegisExampleIsSatWithProgress) {
  PfwCsp csp = parse_pcsp(testing::fixture("cegis_example.pcsp"));
  std::ostringstream log;
  SolveConfig cfg;
  cfg.timeout = std::chrono::seconds(60);
  cfg.log = &log;
  Verdict v = solve(csp, cfg);
  ASSERT_EQ(v.kind, VerdictKind::Sat) << v.reason;
  EXPECT_LE(v.iterations, 50u);
  EXPECT_LT(v.elapsed, std::chrono::seconds(60));

  SmtSolver smt(SmtOptions{});
  EXPECT_TRUE(validate(csp, v.solution, smt).valid);
  EXPECT_EQ(count_wf_cycles(v.solution.at(Symbol("WF_Y")), 500, 17), 0u);

  std::set<std::string> candidates, examples;
  std::size_t last = 0, records = 0;
  std::istringstream lines(log.str());
  for (std::string line; std::getline(lines, line);) {
    auto rec = nlohmann::json::parse(line);
    ++records;
    EXPECT_TRUE(candidates.insert(rec.at("candidate").dump()).second) << "repeated candidate: " << line;
    if (rec.contains("new_examples")) {
      for (const auto& e : rec["new_examples"]) {
        EXPECT_TRUE(examples.insert(e.get<std::string>()).second) << "repeated example " << e;
      }
      const auto n = rec.at("examples").get<std::size_t>();
      EXPECT_GT(n, last);
      last = n;
    }
  }
  EXPECT_EQ(records, v.iterations);
}

TEST(Solve, GroundContradictionIsUnsat) {
  Verdict v = solve(parse_pcsp(testing::fixture("ground_contradiction.pcsp")));
  ASSERT_EQ(v.kind, VerdictKind::Unsat);
  SmtSolver smt(SmtOptions{});
  EXPECT_EQ(check_examples_unsat(v.examples, parse_pcsp(testing::fixture("ground_contradiction.pcsp")), smt).status,
            ExampleStatus::Unsat);
}

TEST(Solve, UnrankableLoopIsUnsat) {
  // X(0) holds and X(x) needs X(x + 1) with x + 1 below x.
  PfwCsp csp = parse_pcsp(
      "(declare-fun X (Int) Bool)\n(declare-wf W (Int Int))\n(assert (X 0))\n"
      "(assert (forall ((x Int)) (=> (X x) (and (X x) (W x x)))))\n");
  SolveConfig cfg;
  cfg.timeout = std::chrono::seconds(30);
  EXPECT_EQ(solve(csp, cfg).kind, VerdictKind::Unsat);
}

TEST(Solve, DeadlineIsHonoured) {
  // The even numbers: no finite union of intervals separates them.
  PfwCsp csp = parse_pcsp(
      "(declare-fun X (Int) Bool)\n(assert (X 0))\n"
      "(assert (forall ((x Int)) (=> (X x) (X (+ x 2)))))\n"
      "(assert (forall ((x Int)) (=> (X x) (X (- x 2)))))\n"
      "(assert (forall ((x Int)) (not (and (X x) (X (+ x 1))))))\n");
  SolveConfig cfg;
  cfg.timeout = std::chrono::seconds(3);
  const auto start = std::chrono::steady_clock::now();
  Verdict v = solve(csp, cfg);
  EXPECT_EQ(v.kind, VerdictKind::Unknown);
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(5));
}

}  // namespace
}  // namespace muval
