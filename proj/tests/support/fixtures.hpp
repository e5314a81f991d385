#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace muval::testing {

inline std::string fixture_path(const std::string& name) { return std::string(MUVAL_FIXTURES) + "/" + name; }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string fixture(const std::string& name) { return slurp(fixture_path(name)); }

}  // namespace muval::testing
