#include <fstream>
#include <iostream>

#include "common.hpp"

int main(int argc, char** argv) {
  using namespace muval;
  CLI::App app{"pcsat: satisfiability of pfwCSP constraint sets"};
  std::string file;
  tools::CommonFlags flags;
  app.add_option("FILE", file, "Constraint set in the pfwCSP format")->required();
  tools::add_common(app, flags);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 3;
  }
  PfwCsp csp;
  RunConfig cfg;
  try {
    cfg = tools::resolve(flags);
    csp = parse_pcsp(tools::slurp(file));
  } catch (const Error& e) {
    std::cerr << "pcsat: " << e.what() << "\n";
    return 3;
  }
  std::ofstream log;
  if (!flags.log.empty()) {
    log.open(flags.log);
    cfg.log = &log;
  }
  try {
    FinalReport r = pcsat_solve(csp, cfg);
    print_report(std::cout, r, true);
    return exit_code(r.outcome);
  } catch (const Error& e) {
    std::cerr << "pcsat: internal error: " << e.what() << "\n";
    return 4;
  }
}
