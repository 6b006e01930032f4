#pragma once

#include <chrono>
#include <string>
#include <unordered_map>

#include "obmc/bdd.hpp"
#include "obmc/semantics.hpp"

namespace obmc {

enum class Verdict { True, False, Ko };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::True:
      return "TRUE";
    case Verdict::False:
      return "FALSE";
    default:
      return "KO";
  }
}

struct CheckResult {
  Verdict verdict = Verdict::Ko;
  std::string engine;
  double wall_ms = 0.0;
  std::size_t peak_nodes = 0;
  std::string note;  // what gave out, when the verdict is KO
};

namespace detail {

// Rewrites expansion operators away using the reduction principles: an
// expansion distributes over the truth-functional connectives, turns the
// matching belief atom into truth, relativizes the expanding agent's own
// boxes, and leaves other agents untouched.
class DynamicsReducer {
 public:
  explicit DynamicsReducer(FormulaArena& A) : A_(A) {}

  FormulaId reduce(FormulaId f) {
    auto it = memo_.find(f);
    if (it != memo_.end()) return it->second;
    const FormulaNode n = A_.node(f);
    FormulaId r;
    switch (n.kind) {
      case Kind::Atom:
      case Kind::Top:
      case Kind::Bottom:
      case Kind::ExplicitBelief:
        r = f;
        break;
      case Kind::Not:
        r = A_.not_(reduce(n.a));
        break;
      case Kind::And:
        r = A_.and_(reduce(n.a), reduce(n.b));
        break;
      case Kind::Or:
        r = A_.or_(reduce(n.a), reduce(n.b));
        break;
      case Kind::Implies:
        r = A_.implies(reduce(n.a), reduce(n.b));
        break;
      case Kind::Iff:
        r = A_.iff(reduce(n.a), reduce(n.b));
        break;
      case Kind::Xor:
        r = A_.xor_(reduce(n.a), reduce(n.b));
        break;
      case Kind::AtLeast:
        r = A_.at_least(n.agent, reduce(n.a));
        break;
      case Kind::AtMost:
        r = A_.at_most(n.agent, reduce(n.a));
        break;
      case Kind::Only:
        throw std::logic_error("only-believing operators must be expanded before reduction");
      case Kind::Expand: {
        FormulaId body = reduce(n.b);
        std::unordered_map<FormulaId, FormulaId> pmemo;
        r = push(n.agent, n.a, body, pmemo);
        break;
      }
      default:
        throw std::logic_error("unhandled kind");
    }
    memo_.emplace(f, r);
    return r;
  }

 private:
  FormulaId push(AgentId i, FormulaId alpha, FormulaId f,
                 std::unordered_map<FormulaId, FormulaId>& pmemo) {
    auto it = pmemo.find(f);
    if (it != pmemo.end()) return it->second;
    const FormulaNode n = A_.node(f);
    FormulaId r;
    switch (n.kind) {
      case Kind::Atom:
      case Kind::Top:
      case Kind::Bottom:
        r = f;
        break;
      case Kind::Not:
        r = A_.not_(push(i, alpha, n.a, pmemo));
        break;
      case Kind::And:
        r = A_.and_(push(i, alpha, n.a, pmemo), push(i, alpha, n.b, pmemo));
        break;
      case Kind::Or:
        r = A_.or_(push(i, alpha, n.a, pmemo), push(i, alpha, n.b, pmemo));
        break;
      case Kind::Implies:
        r = A_.implies(push(i, alpha, n.a, pmemo), push(i, alpha, n.b, pmemo));
        break;
      case Kind::Iff:
        r = A_.iff(push(i, alpha, n.a, pmemo), push(i, alpha, n.b, pmemo));
        break;
      case Kind::Xor:
        r = A_.xor_(push(i, alpha, n.a, pmemo), push(i, alpha, n.b, pmemo));
        break;
      case Kind::ExplicitBelief:
        if (n.agent == i && A_.normalize(n.a) == A_.normalize(alpha))
          r = A_.top();
        else
          r = f;
        break;
      case Kind::AtLeast:
        if (n.agent == i)
          r = A_.at_least(i, A_.implies(alpha, n.a));
        else
          r = f;
        break;
      case Kind::AtMost:
        if (n.agent == i)
          r = A_.and_(A_.at_least(i, A_.implies(A_.not_(alpha), n.a)), f);
        else
          r = f;
        break;
      case Kind::Only:
        throw std::logic_error("only-believing operators must be expanded before reduction");
      case Kind::Expand:
        throw std::logic_error("expansion bodies are reduced before being pushed through");
      default:
        throw std::logic_error("unhandled kind");
    }
    pmemo.emplace(f, r);
    return r;
  }

  FormulaArena& A_;
  std::unordered_map<FormulaId, FormulaId> memo_;
};

}  // namespace detail

// Eliminates every expansion operator by rewriting, producing an equivalent
// formula of the static language. Only-believing is unfolded first since the
// rewriting steps are stated for the primitive modalities.
inline FormulaId reduce_dynamics(FormulaArena& A, FormulaId f) {
  detail::DynamicsReducer r(A);
  return r.reduce(A.expand_only(f));
}

inline bool contains_expand(FormulaArena& A, FormulaId f) {
  for (FormulaId g : subformulas(A, f))
    if (A.node(g).kind == Kind::Expand) return true;
  return false;
}

// The symbolic engine: rewrite dynamics away, translate to a leveled QBF
// grounded at the actual state, and collapse it with decision diagrams. The
// grounding keeps the engine sound even when the state's bases have left the
// vocabulary, which happens after expansions.
inline CheckResult check_symbolic(FormulaArena& A, const VocabularyProfile& vocab,
                                  const AtomTable& atoms, const State& s, FormulaId query,
                                  const Budget& budget = {}) {
  auto t0 = std::chrono::steady_clock::now();
  CheckResult res;
  res.engine = "bdd";
  FormulaId f = reduce_dynamics(A, query);
  QbfArena Q;
  Translator tr(Q, A, vocab, atoms, &s);
  QbfId root = tr(f);
  VarOrder order(vocab, atoms);
  BddStore store(budget.max_nodes, budget.deadline());
  try {
    BddRef r = build_bdd(store, Q, root, [&order](const LeveledVar& v) { return order(v); });
    if (r == kBddTrue)
      res.verdict = Verdict::True;
    else if (r == kBddFalse)
      res.verdict = Verdict::False;
    else
      throw std::logic_error("grounded sentence did not collapse to a constant");
  } catch (const ResourceExhausted& e) {
    res.verdict = Verdict::Ko;
    res.note = e.what();
  }
  res.peak_nodes = store.node_count();
  res.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

inline CheckResult check_symbolic(ProblemInstance& inst, FormulaId query,
                                  const Budget& budget = {}) {
  return check_symbolic(inst.arena, inst.vocab, inst.atoms, inst.initial, query, budget);
}

// The other route to a dynamic verdict: apply the expansions to the state
// itself, then check the static core symbolically. Requires the query to be
// a chain of expansions around an expansion-free formula.
inline CheckResult check_dynamic_direct(ProblemInstance& inst, FormulaId query,
                                        const Budget& budget = {}) {
  State s = inst.initial;
  FormulaId f = query;
  while (inst.arena.node(f).kind == Kind::Expand) {
    const FormulaNode& n = inst.arena.node(f);
    s = expand_state(inst.arena, inst.vocab.agents(), s, n.agent, n.a);
    f = n.b;
  }
  if (contains_expand(inst.arena, f))
    throw std::invalid_argument(
        "expansions must form an outer prefix for the state-expansion route");
  return check_symbolic(inst.arena, inst.vocab, inst.atoms, s, f, budget);
}

enum class Engine { Auto, Bdd, Enumerate };

inline CheckResult check_enumerate(ProblemInstance& inst, FormulaId query,
                                   const Budget& budget = {}) {
  auto t0 = std::chrono::steady_clock::now();
  CheckResult res;
  res.engine = "enumerate";
  UniversalContext ctx(inst.vocab, inst.atoms);
  try {
    bool v = check_direct(inst.arena, ctx, inst.initial, query, budget);
    res.verdict = v ? Verdict::True : Verdict::False;
  } catch (const ResourceExhausted& e) {
    res.verdict = Verdict::Ko;
    res.note = e.what();
  }
  res.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

// Engine selection: explicit choices are honored (an oversized context under
// the enumerating engine is the caller's error), and automatic mode
// enumerates exactly when the context fits under the enumeration cap.
inline CheckResult check_instance(ProblemInstance& inst, FormulaId query, Engine engine,
                                  const Budget& budget = {}) {
  if (engine == Engine::Auto) {
    UniversalContext ctx(inst.vocab, inst.atoms);
    engine = ctx.bit_width() <= budget.enumeration_cap_bits ? Engine::Enumerate : Engine::Bdd;
  }
  if (engine == Engine::Enumerate) return check_enumerate(inst, query, budget);
  return check_symbolic(inst, query, budget);
}

inline CheckResult check_instance(ProblemInstance& inst, Engine engine = Engine::Auto,
                                  const Budget& budget = {}) {
  if (inst.query == kNoFormula) throw std::invalid_argument("instance has no query");
  return check_instance(inst, inst.query, engine, budget);
}

}  // namespace obmc
