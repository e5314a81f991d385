#include "muval/cegis.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <map>
#include <mutex>
#include <random>
#include <stop_token>
#include <thread>

#include <nlohmann/json.hpp>

#include "muval/cycles.hpp"

namespace muval {

bool ExampleStore::add(Clause ground) {
  if (!ground.is_ground()) throw Error("example instance is not ground: " + to_string(ground));
  if (!keys.insert(to_string(ground)).second) return false;
  instances.push_back(std::move(ground));
  return true;
}

bool ExampleStore::contains(const Clause& ground) const { return keys.count(to_string(ground)) != 0; }

const char* to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::Sat: return "sat";
    case VerdictKind::Unsat: return "unsat";
    case VerdictKind::Unknown: return "unknown";
  }
  return "?";
}

// ---------------------------------------------------------------- cycles

std::vector<std::vector<ValueTuple>> enumerate_simple_cycles(
    const std::vector<std::pair<ValueTuple, ValueTuple>>& edges) {
  std::map<ValueTuple, std::size_t> id;
  for (const auto& [a, b] : edges) {
    id.emplace(a, 0);
    id.emplace(b, 0);
  }
  std::vector<ValueTuple> tuples;
  for (auto& [t, i] : id) {
    i = tuples.size();
    tuples.push_back(t);
  }
  Digraph g(tuples.size());
  for (const auto& [a, b] : edges) g[id[a]].push_back(id[b]);
  std::vector<std::vector<ValueTuple>> out;
  for (const auto& c : elementary_circuits(g)) {
    std::vector<ValueTuple> cycle;
    for (std::size_t v : c) cycle.push_back(tuples[v]);
    out.push_back(std::move(cycle));
  }
  return out;
}

std::size_t count_wf_cycles(const Lambda& wf, std::size_t samples, std::uint64_t seed, std::int64_t range,
                            std::size_t limit) {
  const std::size_t half = wf.params.size() / 2;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> dist(-range, range);
  std::set<ValueTuple> unique;
  for (std::size_t i = 0; i < samples; ++i) {
    ValueTuple t;
    for (std::size_t k = 0; k < half; ++k) {
      t.push_back(wf.params[k].sort == Sort::Bool ? (dist(rng) & 1) : dist(rng));
    }
    unique.insert(std::move(t));
  }
  const std::vector<ValueTuple> pts(unique.begin(), unique.end());
  CandidateSolution none;
  SolutionContext ctx(none);
  Digraph g(pts.size());
  for (std::size_t a = 0; a < pts.size(); ++a) {
    for (std::size_t b = 0; b < pts.size(); ++b) {
      Env env;
      for (std::size_t k = 0; k < half; ++k) {
        env.emplace_back(wf.params[k].name, pts[a][k]);
        env.emplace_back(wf.params[half + k].name, pts[b][k]);
      }
      if (evaluate(wf.body, env, ctx) != 0) g[a].push_back(b);
    }
  }
  std::size_t n = 0;
  for_each_circuit(g, [&](const std::vector<std::size_t>&) { return ++n < limit; });
  return n;
}

// ---------------------------------------------------------------- example satisfiability

namespace {

std::vector<Signature> uf_signatures(const PfwCsp& p) {
  std::vector<Signature> uf = p.preds;
  uf.insert(uf.end(), p.funs.begin(), p.funs.end());
  return uf;
}

void collect_wf_atoms(const Expr& e, const PfwCsp& p, std::set<Expr, ExprLess>& out) {
  if (e->op == Op::Call && p.is_wf(e->name)) out.insert(e);
  for (const auto& k : e->kids) collect_wf_atoms(k, p, out);
}

Expr literal(std::int64_t v, Sort s) { return s == Sort::Int ? int_lit(v) : bool_lit(v != 0); }

}  // namespace

ExampleCheck check_examples_unsat(const std::vector<Clause>& instances, const PfwCsp& sigs, SmtSolver& smt,
                                  std::size_t max_rounds) {
  ExampleCheck out;
  const auto uf = uf_signatures(sigs);
  std::vector<NamedAssertion> as;
  std::set<Expr, ExprLess> atoms;
  for (const auto& c : instances) {
    if (!c.is_ground()) throw Error("check_examples_unsat requires ground instances");
    Expr m = clause_matrix(c);
    as.push_back(NamedAssertion{"", m});
    collect_wf_atoms(m, sigs, atoms);
  }
  std::vector<Expr> terms;
  std::vector<Expr> atom_list(atoms.begin(), atoms.end());
  for (const auto& a : atom_list) {
    terms.push_back(a);
    for (const auto& k : a->kids) terms.push_back(k);
  }
  for (std::size_t round = 0; round < max_rounds; ++round) {
    SatResult r = smt.check_sat(uf, as, terms);
    if (r.status == SmtStatus::Unsat) {
      out.status = ExampleStatus::Unsat;
      return out;
    }
    if (r.status == SmtStatus::Unknown) return out;
    std::map<Symbol, std::vector<std::pair<ValueTuple, ValueTuple>>> edges;
    std::size_t pos = 0;
    for (const auto& a : atom_list) {
      const bool holds = r.values[pos++] != 0;
      const std::size_t half = a->kids.size() / 2;
      ValueTuple src, dst;
      for (std::size_t k = 0; k < a->kids.size(); ++k) (k < half ? src : dst).push_back(r.values[pos++]);
      if (holds) edges[a->name].push_back({src, dst});
    }
    bool cyclic = false;
    for (const auto& [wf, es] : edges) {
      const Signature* sig = sigs.pred(wf);
      for (const auto& cycle : enumerate_simple_cycles(es)) {
        cyclic = true;
        std::vector<Expr> lits;
        for (std::size_t i = 0; i < cycle.size(); ++i) {
          const ValueTuple& a = cycle[i];
          const ValueTuple& b = cycle[(i + 1) % cycle.size()];
          std::vector<Expr> args;
          for (std::size_t k = 0; k < a.size(); ++k) args.push_back(literal(a[k], sig->args[k]));
          for (std::size_t k = 0; k < b.size(); ++k) args.push_back(literal(b[k], sig->args[a.size() + k]));
          lits.push_back(not_(pred_call(wf, std::move(args))));
        }
        Expr learnt = or_(lits);
        out.learnt.push_back(learnt);
        as.push_back(NamedAssertion{"", learnt});
      }
    }
    if (!cyclic) {
      out.status = ExampleStatus::Sat;
      return out;
    }
  }
  return out;
}

// ---------------------------------------------------------------- synthesis and validation

namespace {

struct Attempt {
  Hypothesis hypothesis;
  SatResult result;
  std::optional<CandidateSolution> candidate;
};

Attempt attempt(const std::vector<Clause>& instances, const TemplateSet& ts, SmtSolver& smt, bool want_core) {
  Attempt a;
  a.hypothesis = hypothesis_constraint(instances, ts);
  std::vector<Expr> terms;
  for (Symbol u : a.hypothesis.unknowns) terms.push_back(var(u, Sort::Int));
  a.result = smt.check_sat({}, a.hypothesis.assertions, terms, want_core);
  if (a.result.status != SmtStatus::Sat) return a;
  CoeffAssignment theta;
  for (std::size_t i = 0; i < a.hypothesis.unknowns.size(); ++i) theta[a.hypothesis.unknowns[i]] = a.result.values[i];
  CandidateSolution cand = extract_candidate(ts, theta);
  for (const auto& inst : instances) {
    if (!holds(inst, cand)) throw Error("candidate violates example " + to_string(inst));
  }
  a.candidate = std::move(cand);
  return a;
}

}  // namespace

SynthResult synthesize(const std::vector<Clause>& instances, const PfwCsp& csp, ParamVector params,
                       const TemplateConfig& cfg, SmtSolver& smt, std::chrono::steady_clock::time_point deadline,
                       std::size_t max_bumps) {
  SynthResult out;
  for (;;) {
    if (std::chrono::steady_clock::now() > deadline) {
      out.reason = "timeout";
      break;
    }
    // Only the Sat answer of the unit attempt is used.
    const TemplateSet ts = build_templates(csp, params, cfg);
    if (auto unit = unit_multipliers(ts)) {
      Attempt small = attempt(instances, *unit, smt, false);
      if (small.candidate) {
        out.candidate = std::move(small.candidate);
        break;
      }
    }
    Attempt full = attempt(instances, ts, smt, true);
    const SatResult& r = full.result;
    if (full.candidate) {
      out.candidate = std::move(full.candidate);
      break;
    }
    if (r.status == SmtStatus::Unknown) {
      out.reason = "solver returned unknown on the hypothesis constraint";
      break;
    }
    if (out.bumps >= max_bumps) {
      out.reason = "parameter budget exhausted";
      break;
    }
    params = bump_params(params, implicated(r.core, instances, full.hypothesis), cfg.fairness);
    ++out.bumps;
  }
  out.params = std::move(params);
  return out;
}

Validation validate(const PfwCsp& csp, const CandidateSolution& s, SmtSolver& smt) {
  Validation v;
  for (std::size_t i = 0; i < csp.clauses.size(); ++i) {
    const Clause& c = csp.clauses[i];
    ValidityResult r = smt.check_validity(c.vars, apply_solution(c, s));
    if (r.validity == Validity::Invalid) {
      v.failures.push_back(Failure{i, r.countermodel});
    } else if (r.validity == Validity::Unknown) {
      v.unknown = true;
    }
  }
  v.valid = v.failures.empty() && !v.unknown;
  return v;
}

// ---------------------------------------------------------------- resolution

namespace {

bool ground_atom(const Expr& a) {
  return std::all_of(a->kids.begin(), a->kids.end(),
                     [](const Expr& k) { return k->op == Op::IntLit || k->op == Op::BoolLit; });
}

// Solves `t = v` for the clause variable in t; t is a literal, x, x + k or x - k.
bool match_term(const Expr& t, std::int64_t v, std::map<Symbol, std::int64_t>& theta) {
  auto bind = [&](Symbol x, std::int64_t value) {
    auto [it, inserted] = theta.emplace(x, value);
    return inserted || it->second == value;
  };
  switch (t->op) {
    case Op::IntLit:
    case Op::BoolLit: return t->value == v;
    case Op::Var: return bind(t->name, v);
    case Op::Add:
      if (t->kids[0]->op == Op::Var && t->kids[1]->op == Op::IntLit) return bind(t->kids[0]->name, v - t->kids[1]->value);
      if (t->kids[1]->op == Op::Var && t->kids[0]->op == Op::IntLit) return bind(t->kids[1]->name, v - t->kids[0]->value);
      return false;
    case Op::Sub:
      if (t->kids[0]->op == Op::Var && t->kids[1]->op == Op::IntLit) return bind(t->kids[0]->name, v + t->kids[1]->value);
      return false;
    default: return false;
  }
}

enum class Truth { True, False, Open };

Truth atom_truth(const Expr& a, bool positive, const ExampleStore& s) {
  if (s.positives.count(a)) return positive ? Truth::True : Truth::False;
  if (s.negatives.count(a)) return positive ? Truth::False : Truth::True;
  return Truth::Open;
}

void propagate(ExampleStore& s) {
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& c : s.instances) {
      // A constraint not folded to false blocks derivation.
      if (c.phi->op != Op::BoolLit || c.phi->value != 0) continue;
      bool satisfied = false;
      std::vector<std::pair<Expr, bool>> open;
      for (const auto& a : c.pos) {
        Truth t = atom_truth(a, true, s);
        if (t == Truth::True) satisfied = true;
        if (t == Truth::Open) open.push_back({a, true});
      }
      for (const auto& a : c.neg) {
        Truth t = atom_truth(a, false, s);
        if (t == Truth::True) satisfied = true;
        if (t == Truth::Open) open.push_back({a, false});
      }
      if (satisfied || open.size() != 1 || !ground_atom(open[0].first)) continue;
      auto& target = open[0].second ? s.positives : s.negatives;
      changed = target.insert(open[0].first).second || changed;
    }
  }
}

}  // namespace

ExampleStore resolution_closure(const ExampleStore& store, const PfwCsp& csp, int depth) {
  constexpr std::size_t kMaxResolventsPerRound = 64;
  ExampleStore out = store;
  for (int round = 0; round < depth; ++round) {
    propagate(out);
    std::size_t added = 0;
    for (const auto& c : csp.clauses) {
      auto resolve = [&](const std::vector<Expr>& lits, const std::set<Expr, ExprLess>& facts) {
        for (const auto& lit : lits) {
          for (const auto& f : facts) {
            if (added >= kMaxResolventsPerRound) return;
            if (f->name != lit->name) continue;
            std::map<Symbol, std::int64_t> theta;
            bool ok = true;
            for (std::size_t k = 0; ok && k < lit->kids.size(); ++k) ok = match_term(lit->kids[k], f->kids[k]->value, theta);
            if (!ok || theta.size() != c.vars.size()) continue;
            if (out.add(instantiate(c, theta))) ++added;
          }
        }
      };
      resolve(c.neg, out.positives);
      resolve(c.pos, out.negatives);
    }
    if (added == 0) break;
  }
  propagate(out);
  return out;
}

// ---------------------------------------------------------------- solve

namespace {

std::string candidate_key(const CandidateSolution& s) {
  std::string k;
  for (const auto& [name, l] : s) k += name.str() + "=" + to_muclp(l.body) + ";";
  return k;
}

nlohmann::json candidate_json(const CandidateSolution& s) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [name, l] : s) j[name.str()] = to_muclp(l.body);
  return j;
}

nlohmann::json params_json(const ParamVector& p) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [name, ps] : p.vars) j[name.str()] = ps.values;
  return j;
}

}  // namespace

Verdict solve(const PfwCsp& csp, const SolveConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const auto deadline = start + cfg.timeout;
  Verdict v;
  // The watchdog turns the deadline into a cancellation so that a running
  // query cannot overrun the budget.
  std::stop_source halt;
  std::stop_callback forward(cfg.stop, [&] { halt.request_stop(); });
  std::atomic<bool> expired = false;
  std::jthread watchdog([&](std::stop_token done) {
    std::mutex m;
    std::condition_variable_any cv;
    std::unique_lock lock(m);
    if (!cv.wait_until(lock, done, deadline, [] { return false; }) && !done.stop_requested()) {
      expired = true;
      halt.request_stop();
    }
  });
  const std::stop_token stop = halt.get_token();
  SmtSolver smt(cfg.smt, stop);
  ExampleStore store;
  ParamVector params = initial_params(csp, cfg.templates);
  std::set<std::string> seen;
  auto finish = [&](Verdict&& out) {
    out.smt_queries = smt.queries();
    out.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    return std::move(out);
  };
  auto log = [&](nlohmann::json rec) {
    if (!cfg.log) return;
    if (!cfg.log_tag.empty()) rec["tag"] = cfg.log_tag;
    *cfg.log << rec.dump() << '\n';
    cfg.log->flush();
  };
  try {
    for (v.iterations = 1; v.iterations <= cfg.max_iterations; ++v.iterations) {
      if (stop.stop_requested()) {
        v.reason = expired ? "timeout" : "cancelled";
        return finish(std::move(v));
      }
      if (std::chrono::steady_clock::now() > deadline) {
        v.reason = "timeout";
        return finish(std::move(v));
      }
      if (!store.instances.empty()) {
        ExampleCheck ex = check_examples_unsat(store.instances, csp, smt);
        if (ex.status == ExampleStatus::Unsat) {
          SmtSolver fresh(cfg.smt, stop);
          if (check_examples_unsat(store.instances, csp, fresh).status != ExampleStatus::Unsat) {
            throw Error("example set failed its unsat re-check");
          }
          log({{"iteration", v.iterations}, {"verdict", "unsat"}, {"examples", store.instances.size()},
               {"learnt", ex.learnt.size()}});
          v.kind = VerdictKind::Unsat;
          v.examples = store.instances;
          return finish(std::move(v));
        }
        if (ex.status == ExampleStatus::Unknown) {
          v.reason = "example check undecided";
          return finish(std::move(v));
        }
      }
      SynthResult syn = synthesize(store.instances, csp, params, cfg.templates, smt, deadline);
      params = syn.params;
      if (!syn.candidate) {
        v.reason = syn.reason;
        return finish(std::move(v));
      }
      const CandidateSolution& cand = *syn.candidate;
      if (!seen.insert(candidate_key(cand)).second) throw Error("candidate repeated across iterations");
      Validation val = validate(csp, cand, smt);
      nlohmann::json rec{{"iteration", v.iterations}, {"candidate", candidate_json(cand)},
                         {"params", params_json(params)}, {"bumps", syn.bumps}};
      if (val.valid) {
        for (Symbol wf : csp.wf) {
          if (count_wf_cycles(cand.at(wf), 500, v.iterations) != 0) throw Error("WF candidate has a cycle");
        }
        SmtSolver fresh(cfg.smt, stop);
        if (!validate(csp, cand, fresh).valid) throw Error("solution failed its re-validation");
        rec["verdict"] = "sat";
        rec["examples"] = store.instances.size();
        log(rec);
        v.kind = VerdictKind::Sat;
        v.solution = cand;
        return finish(std::move(v));
      }
      if (val.failures.empty()) {
        v.reason = "validation undecided";
        log(rec);
        return finish(std::move(v));
      }
      const std::size_t before = store.instances.size();
      nlohmann::json failed = nlohmann::json::array(), added = nlohmann::json::array();
      for (const auto& f : val.failures) {
        Clause inst = instantiate(csp.clauses[f.clause], f.theta);
        if (holds(inst, cand)) throw Error("countermodel does not falsify " + to_string(inst));
        failed.push_back(f.clause);
        added.push_back(to_string(inst));
        store.add(std::move(inst));
      }
      if (store.instances.size() == before) throw Error("validation produced no new example");
      store = resolution_closure(store, csp, cfg.resolution_depth);
      rec["failed"] = failed;
      rec["new_examples"] = added;
      rec["examples"] = store.instances.size();
      log(rec);
    }
    v.iterations = cfg.max_iterations;
    v.reason = "iteration budget exhausted";
  } catch (const Cancelled&) {
    v.reason = expired ? "timeout" : "cancelled";
  } catch (const SmtBackendError& e) {
    v.reason = std::string("backend: ") + e.what();
  }
  return finish(std::move(v));
}

}  // namespace muval
