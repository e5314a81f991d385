#include "muval/eval.hpp"

#include <algorithm>

namespace muval {

std::pair<std::int64_t, std::int64_t> EvalContext::int_range() {
  throw Error("quantifier in ground evaluation");
}

namespace {

std::int64_t lookup(const Env& env, Symbol s) {
  for (auto it = env.rbegin(); it != env.rend(); ++it) {
    if (it->first == s) return it->second;
  }
  throw Error("unbound variable " + s.str() + " during evaluation");
}

std::int64_t checked(bool overflow, std::int64_t r) {
  if (overflow) throw Error("integer overflow during evaluation");
  return r;
}

}  // namespace

std::int64_t evaluate(const Expr& e, Env& env, EvalContext& ctx) {
  std::int64_t r = 0;
  switch (e->op) {
    case Op::IntLit:
    case Op::BoolLit: return e->value;
    case Op::Var: return lookup(env, e->name);
    case Op::Call: {
      std::vector<std::int64_t> args;
      args.reserve(e->kids.size());
      for (const auto& k : e->kids) args.push_back(evaluate(k, env, ctx));
      return ctx.call(*e, args);
    }
    case Op::Add: {
      bool o = __builtin_add_overflow(evaluate(e->kids[0], env, ctx), evaluate(e->kids[1], env, ctx), &r);
      return checked(o, r);
    }
    case Op::Sub: {
      bool o = __builtin_sub_overflow(evaluate(e->kids[0], env, ctx), evaluate(e->kids[1], env, ctx), &r);
      return checked(o, r);
    }
    case Op::Mul: {
      bool o = __builtin_mul_overflow(evaluate(e->kids[0], env, ctx), evaluate(e->kids[1], env, ctx), &r);
      return checked(o, r);
    }
    case Op::Neg: {
      bool o = __builtin_sub_overflow(std::int64_t{0}, evaluate(e->kids[0], env, ctx), &r);
      return checked(o, r);
    }
    case Op::Ite:
      return evaluate(e->kids[0], env, ctx) ? evaluate(e->kids[1], env, ctx)
                                            : evaluate(e->kids[2], env, ctx);
    case Op::Eq: return evaluate(e->kids[0], env, ctx) == evaluate(e->kids[1], env, ctx);
    case Op::Neq: return evaluate(e->kids[0], env, ctx) != evaluate(e->kids[1], env, ctx);
    case Op::Le: return evaluate(e->kids[0], env, ctx) <= evaluate(e->kids[1], env, ctx);
    case Op::Lt: return evaluate(e->kids[0], env, ctx) < evaluate(e->kids[1], env, ctx);
    case Op::Ge: return evaluate(e->kids[0], env, ctx) >= evaluate(e->kids[1], env, ctx);
    case Op::Gt: return evaluate(e->kids[0], env, ctx) > evaluate(e->kids[1], env, ctx);
    case Op::Not: return evaluate(e->kids[0], env, ctx) ? 0 : 1;
    case Op::And:
      for (const auto& k : e->kids) {
        if (!evaluate(k, env, ctx)) return 0;
      }
      return 1;
    case Op::Or:
      for (const auto& k : e->kids) {
        if (evaluate(k, env, ctx)) return 1;
      }
      return 0;
    case Op::Forall:
    case Op::Exists: {
      const bool univ = e->op == Op::Forall;
      std::int64_t lo = 0, hi = 1;
      if (e->bound_sort == Sort::Int) std::tie(lo, hi) = ctx.int_range();
      env.emplace_back(e->name, 0);
      std::int64_t result = univ ? 1 : 0;
      for (std::int64_t v = lo; v <= hi; ++v) {
        env.back().second = v;
        const bool b = evaluate(e->kids[0], env, ctx) != 0;
        if (b != univ) {
          result = univ ? 0 : 1;
          break;
        }
      }
      env.pop_back();
      return result;
    }
  }
  return 0;
}

namespace {

class GroundContext final : public EvalContext {
 public:
  std::int64_t call(const Node& c, const std::vector<std::int64_t>&) override {
    throw Error("uninterpreted call to " + c.name.str() + " during ground evaluation");
  }
};

}  // namespace

std::int64_t evaluate_ground(const Expr& e, const Env& env) {
  Env local = env;
  GroundContext ctx;
  return evaluate(e, local, ctx);
}

const char* to_string(BoundedVerdict v) {
  switch (v) {
    case BoundedVerdict::Valid: return "valid";
    case BoundedVerdict::Invalid: return "invalid";
    default: return "out-of-domain";
  }
}

// ---------------------------------------------------------------- bounded semantics

namespace {

struct MissingEntry {};

class BoundedSolver final : public EvalContext {
 public:
  BoundedSolver(const Program& p, std::int64_t bound, bool boundary,
                std::optional<std::chrono::steady_clock::time_point> deadline,
                const FiniteInterpretation* interp)
      : p_(p), bound_(bound), boundary_(boundary), deadline_(deadline), interp_(interp) {
    const std::size_t n = p.equations.size();
    tables_.resize(n);
    sizes_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      index_[p.equations[i].head] = i;
      std::size_t size = 1;
      for (const auto& prm : p.equations[i].params) {
        size *= prm.sort == Sort::Int ? static_cast<std::size_t>(2 * bound + 1) : 2;
      }
      sizes_[i] = size;
    }
  }

  bool touched_boundary() const { return touched_; }

  void solve_from(std::size_t k) {
    if (k == p_.equations.size()) return;
    const Equation& eq = p_.equations[k];
    std::vector<std::uint8_t> q(sizes_[k], eq.kind == Fixpoint::Nu ? 1 : 0);
    while (true) {
      tables_[k] = q;
      solve_from(k + 1);
      std::vector<std::uint8_t> next(sizes_[k]);
      Env env;
      for (const auto& prm : eq.params) env.emplace_back(prm.name, 0);
      for (std::size_t idx = 0; idx < sizes_[k]; ++idx) {
        decode(eq, idx, env);
        next[idx] = evaluate(eq.body, env, *this) ? 1 : 0;
        tick();
      }
      if (next == q) break;
      q = std::move(next);
    }
  }

  bool query() {
    Env env;
    return evaluate(p_.query, env, *this) != 0;
  }

  std::vector<bool> table(std::size_t k) const {
    return std::vector<bool>(tables_[k].begin(), tables_[k].end());
  }

  std::int64_t call(const Node& c, const std::vector<std::int64_t>& args) override {
    if (c.call_kind == CallKind::Pred) {
      auto it = index_.find(c.name);
      if (it != index_.end()) {
        auto idx = encode(p_.equations[it->second], args);
        if (!idx) {
          touched_ = true;
          return boundary_ ? 1 : 0;
        }
        return tables_[it->second][*idx];
      }
      if (interp_) {
        auto pt = interp_->predicates.find(c.name);
        if (pt != interp_->predicates.end()) return pt->second.count(args) ? 1 : 0;
      }
      throw Error("no interpretation for predicate " + c.name.str());
    }
    if (interp_) {
      auto ft = interp_->functions.find(c.name);
      if (ft != interp_->functions.end()) {
        auto v = ft->second.find(args);
        if (v == ft->second.end()) throw MissingEntry{};
        return v->second;
      }
    }
    throw Error("no interpretation for function " + c.name.str());
  }

  std::pair<std::int64_t, std::int64_t> int_range() override { return {-bound_, bound_}; }

 private:
  const Program& p_;
  std::int64_t bound_;
  bool boundary_;
  std::optional<std::chrono::steady_clock::time_point> deadline_;
  const FiniteInterpretation* interp_;
  std::map<Symbol, std::size_t> index_;
  std::vector<std::vector<std::uint8_t>> tables_;
  std::vector<std::size_t> sizes_;
  bool touched_ = false;
  std::size_t ticks_ = 0;

  void tick() {
    if (deadline_ && (++ticks_ & 0x3ff) == 0 && std::chrono::steady_clock::now() > *deadline_) {
      throw Timeout();
    }
  }

  std::optional<std::size_t> encode(const Equation& eq, const std::vector<std::int64_t>& args) const {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < args.size(); ++i) {
      const bool is_int = eq.params[i].sort == Sort::Int;
      const std::size_t radix = is_int ? static_cast<std::size_t>(2 * bound_ + 1) : 2;
      std::int64_t v = args[i];
      if (is_int) {
        if (v < -bound_ || v > bound_) return std::nullopt;
        v += bound_;
      }
      idx = idx * radix + static_cast<std::size_t>(v);
    }
    return idx;
  }

  void decode(const Equation& eq, std::size_t idx, Env& env) const {
    for (std::size_t i = eq.params.size(); i-- > 0;) {
      const bool is_int = eq.params[i].sort == Sort::Int;
      const std::size_t radix = is_int ? static_cast<std::size_t>(2 * bound_ + 1) : 2;
      std::int64_t v = static_cast<std::int64_t>(idx % radix);
      idx /= radix;
      env[i].second = is_int ? v - bound_ : v;
    }
  }
};

}  // namespace

BoundedVerdict bounded_evaluate(const Program& p, std::int64_t bound,
                                std::optional<std::chrono::steady_clock::time_point> deadline,
                                const FiniteInterpretation* interp) {
  try {
    BoundedSolver low(p, bound, false, deadline, interp);
    low.solve_from(0);
    const bool v_low = low.query();
    if (!low.touched_boundary()) return v_low ? BoundedVerdict::Valid : BoundedVerdict::Invalid;
    BoundedSolver high(p, bound, true, deadline, interp);
    high.solve_from(0);
    const bool v_high = high.query();
    if (v_low != v_high) return BoundedVerdict::OutOfDomain;
    return v_low ? BoundedVerdict::Valid : BoundedVerdict::Invalid;
  } catch (const MissingEntry&) {
    return BoundedVerdict::OutOfDomain;
  }
}

std::map<Symbol, std::vector<bool>> bounded_tables(const Program& p, std::int64_t bound,
                                                   bool boundary_value) {
  BoundedSolver s(p, bound, boundary_value, std::nullopt, nullptr);
  s.solve_from(0);
  std::map<Symbol, std::vector<bool>> out;
  for (std::size_t i = 0; i < p.equations.size(); ++i) out[p.equations[i].head] = s.table(i);
  return out;
}

}  // namespace muval
