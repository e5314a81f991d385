#include <gtest/gtest.h>

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>

#include "muval/cegis.hpp"
#include "muval/driver.hpp"
#include "muval/reduction.hpp"
#include "support/corpus.hpp"

namespace muval {
namespace {

TEST(Config, ParsesKeysAndRejectsUnknownOnes) {
  RunConfig cfg;
  apply_config(cfg, "# budgets\ntimeout = 7\nmax_iterations=9\ndual=off\nordinary = 2,1,3,3\n");
  EXPECT_EQ(cfg.timeout, std::chrono::seconds(7));
  EXPECT_EQ(cfg.max_iterations, 9u);
  EXPECT_FALSE(cfg.dual);
  EXPECT_EQ(cfg.templates.ordinary, (std::vector<std::int64_t>{2, 1, 3, 3}));
  EXPECT_THROW(apply_config(cfg, "colour = red\n"), Error);
  EXPECT_THROW(apply_config(cfg, "ordinary = 1,2\n"), Error);
  EXPECT_THROW(apply_config(cfg, "timeout = 0\n"), Error);
}

TEST(ExitCodes, OnePerOutcome) {
  EXPECT_EQ(exit_code(Outcome::Valid), 0);
  EXPECT_EQ(exit_code(Outcome::Invalid), 1);
  EXPECT_EQ(exit_code(Outcome::Unknown), 2);
  EXPECT_EQ(exit_code(Outcome::Timeout), 2);
  EXPECT_EQ(exit_code(Outcome::Conflict), 4);
}

TEST(MuvalSolve, TerminationPrograms) {
  RunConfig cfg;
  cfg.timeout = std::chrono::seconds(60);
  EXPECT_EQ(muval_solve(parse_muclp(testing::fixture("p_term.muclp")), cfg).outcome, Outcome::Valid);
  EXPECT_EQ(muval_solve(parse_muclp(testing::fixture("p_nterm.muclp")), cfg).outcome, Outcome::Invalid);
}

// Each side is solved on its own, so a wrong Sat on either would show up
// together with the other side's Sat. The acceptance run covers the encoded
// fixtures too.
TEST(PrimalDual, SidesNeverBothSatisfiable) {
  RunConfig cfg;
  cfg.timeout = std::chrono::seconds(10);
  cfg.dual = false;
  const ReductionOptions opts{true};
  for (const auto& e : testing::fixture_corpus()) {
    if (!e.name.ends_with(".muclp")) continue;
    const Outcome primal = pcsat_solve(reduce(e.program, opts).csp, cfg).outcome;
    const Outcome dual = pcsat_solve(reduce(demorgan_dual(e.program), opts).csp, cfg).outcome;
    EXPECT_FALSE(primal == Outcome::Valid && dual == Outcome::Valid) << e.name;
    const bool decided = primal == Outcome::Valid || dual == Outcome::Valid;
    if (decided) EXPECT_EQ(primal == Outcome::Valid ? Outcome::Valid : Outcome::Invalid, e.expected) << e.name;
    if (e.name == "p_term.muclp" || e.name == "p_nterm.muclp") EXPECT_TRUE(decided) << e.name;
  }
}

int run(const std::string& cmd) {
  const int status = std::system((cmd + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string capture(const std::string& cmd) {
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return out;
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, p)) > 0;) out.append(buf, n);
  pclose(p);
  return out;
}

TEST(Cli, MuvalExitCodes) {
  const std::string muval = MUVAL_BIN;
  EXPECT_EQ(run(muval + " solve " + testing::fixture_path("p_term.muclp") + " --timeout 60"), 0);
  EXPECT_EQ(run(muval + " solve " + testing::fixture_path("p_nterm.muclp") + " --timeout 60"), 1);
  EXPECT_EQ(run(muval + " solve /nonexistent.muclp"), 3);
  EXPECT_EQ(run(muval + " solve " + testing::fixture_path("cegis_example.pcsp")), 3);
  EXPECT_EQ(run(muval + " frobnicate"), 3);
}

TEST(Cli, EncodeWritesParsableProgram) {
  const auto out = std::filesystem::temp_directory_path() / "muval_cli_cinderella.muclp";
  ASSERT_EQ(run(std::string(MUVAL_BIN) + " encode safety-game " + testing::fixture_path("cinderella.game") + " -o " +
                out.string()),
            0);
  Program p = parse_muclp(testing::slurp(out.string()));
  EXPECT_NO_THROW(check_wellformed(p));
  std::filesystem::remove(out);
  EXPECT_EQ(run(std::string(MUVAL_BIN) + " encode bisim " + testing::fixture_path("counter.lts") + " -o /dev/null"), 3);
}

TEST(Cli, PcsatPrintsAReusableSolution) {
  const std::string pcsat = PCSAT_BIN;
  const std::string out = capture(pcsat + " " + testing::fixture_path("cegis_example.pcsp") + " --timeout 60");
  ASSERT_EQ(out.rfind("sat\n", 0), 0u) << out;
  PfwCsp csp = parse_pcsp(testing::fixture("cegis_example.pcsp"));
  CandidateSolution s = parse_solution(out.substr(4), csp);
  SmtSolver smt(SmtOptions{});
  EXPECT_TRUE(validate(csp, s, smt).valid);
  EXPECT_EQ(run(pcsat + " " + testing::fixture_path("ground_contradiction.pcsp")), 1);
  EXPECT_EQ(run(pcsat + " " + testing::fixture_path("p_term.muclp")), 3);
}

}  // namespace
}  // namespace muval
