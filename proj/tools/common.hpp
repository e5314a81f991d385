#pragma once

// Flags shared by muval and pcsat.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "muval/driver.hpp"

namespace muval::tools {

struct CommonFlags {
  double timeout_s = 0;
  std::string smt_solver;
  std::string config;
  std::string log;
  long long seed = -1;
  int resolution_depth = -1;
  std::size_t max_iterations = 0;
};

inline void add_common(CLI::App& app, CommonFlags& f) {
  app.add_option("--timeout", f.timeout_s, "Wall-clock budget in seconds");
  app.add_option("--smt-solver", f.smt_solver, "SMT-LIB2 solver executable");
  app.add_option("--config", f.config, "key=value configuration file");
  app.add_option("--log", f.log, "Iteration log (JSON lines)");
  app.add_option("--seed", f.seed, "SMT seed; runs sides sequentially");
  app.add_option("--resolution-depth", f.resolution_depth, "Resolution rounds per iteration");
  app.add_option("--max-iterations", f.max_iterations, "CEGIS iteration budget");
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Config file first, then command-line overrides.
inline RunConfig resolve(const CommonFlags& f) {
  RunConfig cfg;
  if (!f.config.empty()) apply_config(cfg, slurp(f.config));
  if (f.timeout_s > 0) cfg.timeout = std::chrono::milliseconds(static_cast<long long>(f.timeout_s * 1000));
  if (!f.smt_solver.empty()) cfg.smt_solver = f.smt_solver;
  if (f.seed >= 0) cfg.seed = static_cast<unsigned>(f.seed);
  if (f.resolution_depth >= 0) cfg.resolution_depth = f.resolution_depth;
  if (f.max_iterations > 0) cfg.max_iterations = f.max_iterations;
  return cfg;
}

}  // namespace muval::tools
