#include "muval/driver.hpp"

#include <mutex>
#include <sstream>
#include <thread>

#include "muval/reduction.hpp"

namespace muval {

SolveConfig RunConfig::solve_config() const {
  SolveConfig s;
  s.max_iterations = max_iterations;
  s.timeout = timeout;
  s.resolution_depth = resolution_depth;
  s.templates = templates;
  s.smt.path = smt_solver;
  s.smt.timeout_ms = hypothesis_timeout_ms;
  if (seed) s.smt.seed = *seed;
  return s;
}

namespace {

std::string trim(std::string_view s) {
  const char* ws = " \t\r";
  auto a = s.find_first_not_of(ws);
  if (a == std::string_view::npos) return {};
  auto b = s.find_last_not_of(ws);
  return std::string(s.substr(a, b - a + 1));
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    long long n = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return n;
  } catch (const std::exception&) {
    throw Error("config key " + key + " expects an integer, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw Error("config key " + key + " expects a Boolean, got '" + v + "'");
}

std::vector<std::int64_t> to_list(const std::string& key, const std::string& v, std::size_t n) {
  std::vector<std::int64_t> out;
  std::stringstream ss(v);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(to_int(key, trim(item)));
  if (out.size() != n) throw Error("config key " + key + " expects " + std::to_string(n) + " values");
  return out;
}

}  // namespace

void apply_config(RunConfig& cfg, std::string_view text) {
  std::stringstream in{std::string(text)};
  std::size_t lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw Error("config line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
    if (key == "timeout") {
      cfg.timeout = std::chrono::seconds(to_int(key, v));
    } else if (key == "max_iterations") {
      cfg.max_iterations = static_cast<std::size_t>(to_int(key, v));
    } else if (key == "smt_solver") {
      cfg.smt_solver = v;
    } else if (key == "hypothesis_timeout_ms") {
      cfg.hypothesis_timeout_ms = static_cast<unsigned>(to_int(key, v));
    } else if (key == "dual") {
      cfg.dual = to_bool(key, v);
    } else if (key == "suppress_arguments") {
      cfg.suppress_arguments = to_bool(key, v);
    } else if (key == "resolution_depth") {
      cfg.resolution_depth = static_cast<int>(to_int(key, v));
    } else if (key == "fairness") {
      cfg.templates.fairness = static_cast<unsigned>(to_int(key, v));
    } else if (key == "bool_split_cap") {
      cfg.templates.bool_split_cap = static_cast<unsigned>(to_int(key, v));
    } else if (key == "ordinary") {
      cfg.templates.ordinary = to_list(key, v, 4);
    } else if (key == "function") {
      cfg.templates.function = to_list(key, v, 6);
    } else if (key == "well_founded") {
      cfg.templates.well_founded = to_list(key, v, 7);
    } else if (key == "seed") {
      cfg.seed = static_cast<unsigned>(to_int(key, v));
    } else {
      throw Error("unknown config key " + key);
    }
  }
  if (cfg.timeout.count() <= 0 || cfg.max_iterations == 0) throw Error("budgets must be positive");
}

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::Valid: return "valid";
    case Outcome::Invalid: return "invalid";
    case Outcome::Unknown: return "unknown";
    case Outcome::Timeout: return "timeout";
    case Outcome::Conflict: return "conflict";
  }
  return "?";
}

int exit_code(Outcome o) {
  switch (o) {
    case Outcome::Valid: return 0;
    case Outcome::Invalid: return 1;
    case Outcome::Unknown:
    case Outcome::Timeout: return 2;
    case Outcome::Conflict: return 4;
  }
  return 2;
}

namespace {

struct Side {
  std::string name;
  PfwCsp csp;
  bool dual = false;
};

// Sat on the primal or Unsat on the dual means valid.
std::optional<Outcome> decides(const Side& s, const Verdict& v) {
  if (v.kind == VerdictKind::Unknown) return std::nullopt;
  return (v.kind == VerdictKind::Sat) != s.dual ? Outcome::Valid : Outcome::Invalid;
}

FinalReport run_sides(const std::vector<Side>& sides, const RunConfig& cfg) {
  std::vector<std::optional<Verdict>> results(sides.size());
  std::vector<std::ostringstream> logs(sides.size());
  std::mutex mu;
  std::stop_source stop;
  auto run = [&](std::size_t i, std::chrono::milliseconds budget) {
    SolveConfig sc = cfg.solve_config();
    sc.timeout = budget;
    sc.stop = stop.get_token();
    sc.log = cfg.log ? &logs[i] : nullptr;
    sc.log_tag = sides[i].name;
    Verdict v = solve(sides[i].csp, sc);
    std::lock_guard lock(mu);
    if (decides(sides[i], v)) stop.request_stop();
    results[i] = std::move(v);
  };
  if (cfg.seed || sides.size() == 1) {
    auto remaining = cfg.timeout;
    for (std::size_t i = 0; i < sides.size() && !stop.stop_requested(); ++i) {
      const auto t0 = std::chrono::steady_clock::now();
      auto budget = i + 1 == sides.size() ? remaining : remaining / 2;
      run(i, budget);
      remaining -= std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);
      if (remaining.count() <= 0) break;
    }
  } else {
    std::vector<std::jthread> threads;
    for (std::size_t i = 0; i < sides.size(); ++i) threads.emplace_back(run, i, cfg.timeout);
  }
  if (cfg.log) {
    for (auto& l : logs) *cfg.log << l.str();
    cfg.log->flush();
  }

  FinalReport r;
  std::optional<Outcome> decided;
  bool timed_out = false;
  for (std::size_t i = 0; i < sides.size(); ++i) {
    if (!results[i]) continue;
    const Verdict& v = *results[i];
    if (auto o = decides(sides[i], v)) {
      if (decided && *decided != *o) {
        r.outcome = Outcome::Conflict;
        r.diagnostic = "internal error: primal and dual reached opposite verdicts";
        r.sides.push_back(SideReport{sides[i].name, sides[i].csp, v});
        return r;
      }
      decided = o;
      r.sides.insert(r.sides.begin(), SideReport{sides[i].name, sides[i].csp, v});
    } else {
      timed_out = timed_out || v.reason == "timeout";
      if (!decided) r.sides.push_back(SideReport{sides[i].name, sides[i].csp, v});
    }
  }
  if (decided) {
    r.outcome = *decided;
    r.sides.resize(1);
  } else {
    r.outcome = timed_out ? Outcome::Timeout : Outcome::Unknown;
  }
  return r;
}

}  // namespace

FinalReport muval_solve(const Program& p, const RunConfig& cfg) {
  check_wellformed(p);
  ReductionOptions opts;
  opts.suppress_unused_arguments = cfg.suppress_arguments;
  std::vector<Side> sides{Side{"primal", reduce(p, opts).csp, false}};
  if (cfg.dual) sides.push_back(Side{"dual", reduce(demorgan_dual(p), opts).csp, true});
  return run_sides(sides, cfg);
}

FinalReport pcsat_solve(const PfwCsp& csp, const RunConfig& cfg) {
  FinalReport r = run_sides({Side{"primal", csp, false}}, cfg);
  return r;
}

void print_report(std::ostream& out, const FinalReport& r, bool csp_words) {
  if (csp_words) {
    switch (r.outcome) {
      case Outcome::Valid: out << "sat\n"; break;
      case Outcome::Invalid: out << "unsat\n"; break;
      default: out << (r.outcome == Outcome::Conflict ? "conflict" : "unknown") << "\n"; break;
    }
  } else {
    out << to_string(r.outcome) << "\n";
  }
  if (!r.diagnostic.empty()) out << "; " << r.diagnostic << "\n";
  for (const auto& s : r.sides) {
    const Verdict& v = s.verdict;
    if (!csp_words) out << "; side: " << s.side << "\n";
    if (v.kind == VerdictKind::Sat) {
      out << solution_to_smt2(s.csp, v.solution);
    } else if (v.kind == VerdictKind::Unsat) {
      out << "; unsatisfiable example instances\n";
      for (const auto& c : v.examples) out << "(assert " << to_string(c) << ")\n";
    } else {
      out << "; reason: " << v.reason << "\n";
    }
    out << "; iterations " << v.iterations << ", smt queries " << v.smt_queries << ", time " << v.elapsed.count()
        << " ms\n";
  }
}

}  // namespace muval
