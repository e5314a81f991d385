#include <fstream>
#include <iostream>

#include "common.hpp"
#include "muval/encoders.hpp"
#include "muval/reduction.hpp"

namespace {

using namespace muval;

int solve_command(const std::string& file, const tools::CommonFlags& flags, bool no_dual, bool no_suppress,
                  const std::string& emit) {
  Program p;
  RunConfig cfg;
  try {
    cfg = tools::resolve(flags);
    p = parse_muclp(tools::slurp(file));
    check_wellformed(p);
  } catch (const Error& e) {
    std::cerr << "muval: " << e.what() << "\n";
    return 3;
  }
  if (no_dual) cfg.dual = false;
  if (no_suppress) cfg.suppress_arguments = false;
  try {
    if (!emit.empty()) {
      std::ofstream out(emit);
      ReductionOptions opts;
      opts.suppress_unused_arguments = cfg.suppress_arguments;
      out << to_pcsp(reduce(p, opts).csp);
      if (!out) throw Error("cannot write " + emit);
    }
    std::ofstream log;
    if (!flags.log.empty()) {
      log.open(flags.log);
      cfg.log = &log;
    }
    FinalReport r = muval_solve(p, cfg);
    print_report(std::cout, r, false);
    return exit_code(r.outcome);
  } catch (const Error& e) {
    std::cerr << "muval: internal error: " << e.what() << "\n";
    return 4;
  }
}

std::vector<std::int64_t> parse_tuple(const std::string& s) {
  std::vector<std::int64_t> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(std::stoll(item));
  return out;
}

int encode_command(const std::string& kind, const std::vector<std::string>& inputs, const std::string& out_path,
                   const std::string& pairs, const std::string& lower, const std::string& upper) {
  auto need = [&](std::size_t n) {
    if (inputs.size() != n) throw Error(kind + " takes " + std::to_string(n) + " input file(s)");
  };
  Program p;
  if (kind == "buchi") {
    need(2);
    p = encode_buchi(parse_lts(tools::slurp(inputs[0])), parse_buchi(tools::slurp(inputs[1])));
  } else if (kind == "safety-game" || kind == "reach-game") {
    need(1);
    GameSpec g = parse_game(tools::slurp(inputs[0]));
    p = kind == "safety-game" ? encode_safety_game(g) : encode_reachability_game(g);
  } else if (kind == "ltl-game") {
    need(2);
    GameSpec g = parse_game(tools::slurp(inputs[0]));
    g.automaton = parse_buchi(tools::slurp(inputs[1]));
    p = encode_ltl_game(g);
  } else if (kind == "bisim") {
    need(2);
    SymbolicLts a = parse_lts(tools::slurp(inputs[0])), b = parse_lts(tools::slurp(inputs[1]));
    BisimQuery q;
    if (!pairs.empty() + !lower.empty() + !upper.empty() != 1) {
      throw Error("bisim needs exactly one of --pairs, --lower, --upper");
    }
    if (!pairs.empty()) {
      std::stringstream ss(pairs);
      for (std::string t; std::getline(ss, t, ';');) q.pairs.push_back(parse_tuple(t));
    } else {
      q.kind = lower.empty() ? BisimQueryKind::Upper : BisimQueryKind::Lower;
      q.formula = parse_formula(lower.empty() ? upper : lower, bisim_vars(a, b));
    }
    p = encode_bisimulation(a, b, q);
  } else {
    throw Error("unknown encoder " + kind);
  }
  std::ofstream out(out_path);
  out << to_muclp(p);
  if (!out) throw Error("cannot write " + out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"muval: validity of MuCLP programs"};
  app.require_subcommand(1);

  auto* solve = app.add_subcommand("solve", "Decide validity of a .muclp file");
  std::string file, emit;
  bool no_dual = false, no_suppress = false;
  tools::CommonFlags flags;
  solve->add_option("FILE", file, "Program in the MuCLP format")->required();
  solve->add_flag("--no-dual", no_dual, "Solve the primal reduction only");
  solve->add_flag("--no-suppress", no_suppress, "Keep every added argument in the reduction");
  solve->add_option("--emit-pcsp", emit, "Write the reduced constraint set");
  tools::add_common(*solve, flags);

  auto* encode = app.add_subcommand("encode", "Translate a verification problem into MuCLP");
  std::string kind, out, pairs, lower, upper;
  std::vector<std::string> inputs;
  encode->add_option("KIND", kind, "buchi | safety-game | reach-game | ltl-game | bisim")
      ->required()
      ->check(CLI::IsMember({"buchi", "safety-game", "reach-game", "ltl-game", "bisim"}));
  encode->add_option("INPUTS", inputs, "Input files")->required();
  encode->add_option("-o", out, "Output .muclp file")->required();
  encode->add_option("--pairs", pairs, "bisim: state pairs, e.g. 0,1,1,2;0,0,1,1");
  encode->add_option("--lower", lower, "bisim: phi implies bisimilarity");
  encode->add_option("--upper", upper, "bisim: bisimilarity implies phi");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 3;
  }
  if (*solve) return solve_command(file, flags, no_dual, no_suppress, emit);
  try {
    return encode_command(kind, inputs, out, pairs, lower, upper);
  } catch (const std::exception& e) {
    std::cerr << "muval: " << e.what() << "\n";
    return 3;
  }
}
