#include <gtest/gtest.h>

#include "muval/eval.hpp"
#include "support/fixtures.hpp"

namespace muval {
namespace {

TEST(BoundedEvaluate, NestingOrderDecidesTheQuery) {
  EXPECT_EQ(bounded_evaluate(parse_muclp(testing::fixture("p_nu_mu.muclp")), 1), BoundedVerdict::Valid);
  EXPECT_EQ(bounded_evaluate(parse_muclp(testing::fixture("p_mu_nu.muclp")), 1), BoundedVerdict::Invalid);
}

TEST(BoundedEvaluate, LeastAndGreatestFixpointsOfSelfLoop) {
  EXPECT_EQ(bounded_evaluate(parse_muclp("query X(0);\nX(x: int) =mu X(x);\n"), 2), BoundedVerdict::Invalid);
  EXPECT_EQ(bounded_evaluate(parse_muclp("query X(0);\nX(x: int) =nu X(x);\n"), 2), BoundedVerdict::Valid);
}

TEST(BoundedEvaluate, DescendingRecursionTerminates) {
  Program p = parse_muclp("query forall x: int. X(x);\nX(x: int) =mu x <= 0 \\/ X(x - 1);\n");
  EXPECT_EQ(bounded_evaluate(p, 4), BoundedVerdict::Valid);
}

TEST(BoundedEvaluate, EscapingCallsAreOutOfDomain) {
  Program p = parse_muclp("query X(0);\nX(x: int) =mu X(x + 1);\n");
  EXPECT_EQ(bounded_evaluate(p, 3), BoundedVerdict::OutOfDomain);
}

TEST(BoundedEvaluate, BoundaryResolutionAgreesWhenIrrelevant) {
  // X(3) calls X(4) outside the box, but x >= 0 already decides it.
  Program p = parse_muclp("query X(0);\nX(x: int) =mu x >= 0 \\/ X(x + 1);\n");
  EXPECT_EQ(bounded_evaluate(p, 3), BoundedVerdict::Valid);
}

TEST(BoundedTables, EnumeratesLexicographically) {
  Program p = parse_muclp("query X(0);\nX(x: int) =mu x >= 1;\n");
  auto t = bounded_tables(p, 1, false);
  const std::vector<bool> want{false, false, true};
  EXPECT_EQ(t.at(Symbol("X")), want);
}

TEST(EvaluateGround, ArithmeticAndComparisons) {
  EXPECT_EQ(evaluate_ground(parse_formula("1 + 2 * 3", {})), 7);
  EXPECT_EQ(evaluate_ground(parse_formula("3 <= 2 \\/ 1 = 1", {})), 1);
}

}  // namespace
}  // namespace muval
