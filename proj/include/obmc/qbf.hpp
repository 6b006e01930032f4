#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "obmc/instance.hpp"
#include "obmc/parser.hpp"

namespace obmc {

// Leveled propositional variables. x_{p,k} speaks about the atom p at
// recursion level k; x_{tri(i,alpha),k} says that alpha is in agent i's base
// at level k. Belief variables carry the normalized body id.
enum class VarKind : std::uint8_t { Prop, Belief };

struct LeveledVar {
  VarKind kind;
  std::uint32_t level;
  AgentId agent;   // Belief only
  FormulaId body;  // Belief only, normalized
  AtomId atom;     // Prop only
};

using QbfId = std::uint32_t;
using QbfVarId = std::uint32_t;

enum class QbfKind : std::uint8_t { Const, Var, Not, And, Or, Implies, ForAll, Exists };

struct QbfNode {
  QbfKind kind;
  bool value = false;        // Const
  QbfVarId var = 0;          // Var
  QbfId a = 0;               // unary and binary left; quantifier body
  QbfId b = 0;               // binary right
  std::uint32_t block = 0;   // quantifiers: index into blocks()
};

// Quantified Boolean formulas as a plain DAG arena. Constructors fold
// constants so that a fully grounded sentence collapses while it is built.
class QbfArena {
 public:
  QbfArena() = default;
  QbfArena(const QbfArena&) = delete;
  QbfArena& operator=(const QbfArena&) = delete;
  QbfArena(QbfArena&&) = default;
  QbfArena& operator=(QbfArena&&) = default;

  QbfVarId var_id(const LeveledVar& v) {
    std::array<std::uint32_t, 5> key{static_cast<std::uint32_t>(v.kind), v.level,
                                     v.kind == VarKind::Belief ? v.agent : 0,
                                     v.kind == VarKind::Belief ? v.body : 0,
                                     v.kind == VarKind::Prop ? v.atom : 0};
    auto it = var_index_.find(key);
    if (it != var_index_.end()) return it->second;
    QbfVarId id = static_cast<QbfVarId>(vars_.size());
    vars_.push_back(v);
    var_index_.emplace(key, id);
    return id;
  }

  const LeveledVar& var_info(QbfVarId id) const { return vars_.at(id); }
  std::size_t var_count() const { return vars_.size(); }

  const QbfNode& node(QbfId id) const { return nodes_.at(id); }
  std::size_t node_count() const { return nodes_.size(); }
  const std::vector<QbfVarId>& block(std::uint32_t idx) const { return blocks_.at(idx); }

  QbfId constant(bool v) {
    QbfNode n;
    n.kind = QbfKind::Const;
    n.value = v;
    return push(n);
  }

  QbfId variable(const LeveledVar& v) {
    QbfNode n;
    n.kind = QbfKind::Var;
    n.var = var_id(v);
    return push(n);
  }

  QbfId not_(QbfId a) {
    const QbfNode& na = nodes_.at(a);
    if (na.kind == QbfKind::Const) return constant(!na.value);
    if (na.kind == QbfKind::Not) return na.a;
    QbfNode n;
    n.kind = QbfKind::Not;
    n.a = a;
    return push(n);
  }

  QbfId and_(QbfId a, QbfId b) {
    if (is_const(a)) return nodes_[a].value ? b : a;
    if (is_const(b)) return nodes_[b].value ? a : b;
    QbfNode n;
    n.kind = QbfKind::And;
    n.a = a;
    n.b = b;
    return push(n);
  }

  QbfId or_(QbfId a, QbfId b) {
    if (is_const(a)) return nodes_[a].value ? a : b;
    if (is_const(b)) return nodes_[b].value ? b : a;
    QbfNode n;
    n.kind = QbfKind::Or;
    n.a = a;
    n.b = b;
    return push(n);
  }

  QbfId implies(QbfId a, QbfId b) {
    if (is_const(a)) return nodes_[a].value ? b : constant(true);
    if (is_const(b)) return nodes_[b].value ? b : not_(a);
    QbfNode n;
    n.kind = QbfKind::Implies;
    n.a = a;
    n.b = b;
    return push(n);
  }

  QbfId forall(std::vector<QbfVarId> vars, QbfId body) {
    return quantified(QbfKind::ForAll, std::move(vars), body);
  }

  QbfId exists(std::vector<QbfVarId> vars, QbfId body) {
    return quantified(QbfKind::Exists, std::move(vars), body);
  }

 private:
  bool is_const(QbfId id) const { return nodes_[id].kind == QbfKind::Const; }

  QbfId quantified(QbfKind k, std::vector<QbfVarId> vars, QbfId body) {
    if (is_const(body) || vars.empty()) return body;
    QbfNode n;
    n.kind = k;
    n.a = body;
    n.block = static_cast<std::uint32_t>(blocks_.size());
    blocks_.push_back(std::move(vars));
    return push(n);
  }

  QbfId push(QbfNode n) {
    nodes_.push_back(n);
    return static_cast<QbfId>(nodes_.size() - 1);
  }

  std::vector<LeveledVar> vars_;
  std::map<std::array<std::uint32_t, 5>, QbfVarId> var_index_;
  std::vector<QbfNode> nodes_;
  std::vector<std::vector<QbfVarId>> blocks_;
};

inline std::string var_name(const FormulaArena& A, const QbfArena& Q, QbfVarId id) {
  const LeveledVar& v = Q.var_info(id);
  std::ostringstream out;
  if (v.kind == VarKind::Prop) {
    out << A.atom_name(v.atom);
  } else {
    out << "tri" << v.agent << ":" << print_formula(A, v.body);
  }
  out << "@" << v.level;
  return out.str();
}

// A fixed variable order for the decision diagrams: level-major, and inside
// one level the atom variables in table order followed by the belief
// variables in agent then vocabulary order.
class VarOrder {
 public:
  VarOrder(const VocabularyProfile& vocab, const AtomTable& atoms)
      : vocab_(&vocab), atoms_(&atoms) {
    agent_offsets_.reserve(vocab.agent_count());
    std::size_t off = atoms.size();
    for (std::size_t i = 0; i < vocab.agent_count(); ++i) {
      agent_offsets_.push_back(off);
      off += vocab.elements(i).size();
    }
    stride_ = off;
  }

  std::uint32_t stride() const { return static_cast<std::uint32_t>(stride_); }

  std::uint32_t operator()(const LeveledVar& v) const {
    std::size_t within;
    if (v.kind == VarKind::Prop) {
      int idx = atoms_->index_of(v.atom);
      if (idx < 0) throw std::logic_error("atom variable outside the atom table");
      within = static_cast<std::size_t>(idx);
    } else {
      int agent_idx = vocab_->agents().index_of(v.agent);
      if (agent_idx < 0) throw std::logic_error("belief variable for unknown agent");
      int slot = vocab_->slot_of_norm(static_cast<std::size_t>(agent_idx), v.body);
      if (slot < 0) throw std::logic_error("belief variable outside the vocabulary");
      within = agent_offsets_[static_cast<std::size_t>(agent_idx)] +
               static_cast<std::size_t>(slot);
    }
    return static_cast<std::uint32_t>(v.level * stride_ + within);
  }

 private:
  const VocabularyProfile* vocab_;
  const AtomTable* atoms_;
  std::vector<std::size_t> agent_offsets_;
  std::size_t stride_ = 0;
};

// Translates modal formulas into leveled QBF. A box at level k quantifies
// over the level k+1 copies of every variable; the guard R(i,k) ties level k
// belief variables to the truth of their bodies one level deeper. When a
// ground state is supplied, level 0 is evaluated against it directly: atoms
// and explicit beliefs become constants and the guard conjoins the actual
// base, which stays correct even when that base has left the vocabulary.
class Translator {
 public:
  Translator(QbfArena& Q, FormulaArena& A, const VocabularyProfile& vocab,
             const AtomTable& atoms, const State* ground = nullptr)
      : Q_(Q), A_(A), vocab_(vocab), atoms_(atoms), ground_(ground) {}

  QbfId operator()(FormulaId f) { return tr(f, 0); }

  QbfId tr(FormulaId f, std::uint32_t level) {
    std::uint64_t key = (static_cast<std::uint64_t>(f) << 16) | level;
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    QbfId r = tr_raw(f, level);
    memo_.emplace(key, r);
    return r;
  }

  std::vector<QbfVarId> level_block(std::uint32_t level) {
    auto it = blocks_.find(level);
    if (it != blocks_.end()) return it->second;
    std::vector<QbfVarId> block;
    for (AtomId id : atoms_.atoms()) {
      LeveledVar v{VarKind::Prop, level, 0, kNoFormula, id};
      block.push_back(Q_.var_id(v));
    }
    for (std::size_t i = 0; i < vocab_.agent_count(); ++i) {
      AgentId agent = vocab_.agents().ids[i];
      for (FormulaId norm : vocab_.norm_elements(i)) {
        LeveledVar v{VarKind::Belief, level, agent, norm, 0};
        block.push_back(Q_.var_id(v));
      }
    }
    blocks_.emplace(level, block);
    return block;
  }

 private:
  QbfId tr_raw(FormulaId f, std::uint32_t level) {
    const FormulaNode& n = A_.node(f);
    switch (n.kind) {
      case Kind::Atom: {
        if (level == 0 && ground_) {
          int idx = atoms_.index_of(n.atom);
          bool v = idx >= 0 && idx < static_cast<int>(ground_->valuation.size()) &&
                   ground_->valuation[static_cast<std::size_t>(idx)];
          return Q_.constant(v);
        }
        // Context valuations cover the atom table and nothing else, so an
        // undeclared atom is false at every quantified state.
        if (atoms_.index_of(n.atom) < 0) return Q_.constant(false);
        return Q_.variable(LeveledVar{VarKind::Prop, level, 0, kNoFormula, n.atom});
      }
      case Kind::Top:
        return Q_.constant(true);
      case Kind::Bottom:
        return Q_.constant(false);
      case Kind::Not:
        return Q_.not_(tr(n.a, level));
      case Kind::And:
        return Q_.and_(tr(n.a, level), tr(n.b, level));
      case Kind::Or:
        return Q_.or_(tr(n.a, level), tr(n.b, level));
      case Kind::Implies:
        return Q_.implies(tr(n.a, level), tr(n.b, level));
      case Kind::Iff: {
        QbfId a = tr(n.a, level);
        QbfId b = tr(n.b, level);
        return Q_.and_(Q_.implies(a, b), Q_.implies(b, a));
      }
      case Kind::Xor: {
        QbfId a = tr(n.a, level);
        QbfId b = tr(n.b, level);
        return Q_.or_(Q_.and_(a, Q_.not_(b)), Q_.and_(Q_.not_(a), b));
      }
      case Kind::ExplicitBelief: {
        int agent_idx = vocab_.agents().index_of(n.agent);
        if (level == 0 && ground_) {
          bool v = agent_idx >= 0 &&
                   base_contains(A_, *ground_, static_cast<std::size_t>(agent_idx), n.a);
          return Q_.constant(v);
        }
        if (agent_idx < 0) return Q_.constant(false);
        FormulaId norm = A_.normalize(n.a);
        // A belief outside the agent's vocabulary cannot hold at any state
        // of the universal context.
        if (vocab_.slot_of_norm(static_cast<std::size_t>(agent_idx), norm) < 0)
          return Q_.constant(false);
        return Q_.variable(LeveledVar{VarKind::Belief, level, n.agent, norm, 0});
      }
      case Kind::AtLeast:
      case Kind::AtMost: {
        int agent_idx = vocab_.agents().index_of(n.agent);
        if (agent_idx < 0) throw std::invalid_argument("unknown agent in modal operator");
        QbfId guard = (level == 0 && ground_)
                          ? grounded_guard(static_cast<std::size_t>(agent_idx))
                          : relation(static_cast<std::size_t>(agent_idx), level);
        QbfId body = tr(n.a, level + 1);
        QbfId cond = n.kind == Kind::AtLeast ? guard : Q_.not_(guard);
        return Q_.forall(level_block(level + 1), Q_.implies(cond, body));
      }
      case Kind::Only:
        throw std::invalid_argument("expand the only-believing operator before translation");
      case Kind::Expand:
        throw std::invalid_argument("reduce dynamic operators before translation");
    }
    throw std::logic_error("unhandled kind");
  }

  // R(i,k): whichever vocabulary formulas agent i believes at level k must
  // hold at level k+1.
  QbfId relation(std::size_t agent_idx, std::uint32_t level) {
    std::uint64_t key = (static_cast<std::uint64_t>(agent_idx) << 16) | level;
    auto it = rel_memo_.find(key);
    if (it != rel_memo_.end()) return it->second;
    AgentId agent = vocab_.agents().ids[agent_idx];
    const auto& elems = vocab_.elements(agent_idx);
    const auto& norms = vocab_.norm_elements(agent_idx);
    QbfId r = Q_.constant(true);
    for (std::size_t j = 0; j < elems.size(); ++j) {
      QbfId lhs = Q_.variable(LeveledVar{VarKind::Belief, level, agent, norms[j], 0});
      r = Q_.and_(r, Q_.implies(lhs, tr(elems[j], level + 1)));
    }
    rel_memo_.emplace(key, r);
    return r;
  }

  // The level 0 guard at a known state: the belief bits are fixed, so the
  // guard is just the conjunction of the actual base, pushed one level down.
  QbfId grounded_guard(std::size_t agent_idx) {
    auto it = ground_memo_.find(agent_idx);
    if (it != ground_memo_.end()) return it->second;
    QbfId r = Q_.constant(true);
    for (FormulaId alpha : ground_->bases.at(agent_idx)) r = Q_.and_(r, tr(alpha, 1));
    ground_memo_.emplace(agent_idx, r);
    return r;
  }

  QbfArena& Q_;
  FormulaArena& A_;
  const VocabularyProfile& vocab_;
  const AtomTable& atoms_;
  const State* ground_;
  std::unordered_map<std::uint64_t, QbfId> memo_;
  std::unordered_map<std::uint64_t, QbfId> rel_memo_;
  std::unordered_map<std::size_t, QbfId> ground_memo_;
  std::unordered_map<std::uint32_t, std::vector<QbfVarId>> blocks_;
};

// The level 0 minterm of a state: one positive or negative literal per
// vocabulary slot of every agent, then one per atom. The state must lie in
// the universal context.
inline QbfId describe_state(QbfArena& Q, FormulaArena& A, const VocabularyProfile& vocab,
                            const AtomTable& atoms, const State& s) {
  QbfId d = Q.constant(true);
  for (std::size_t i = 0; i < vocab.agent_count(); ++i) {
    AgentId agent = vocab.agents().ids[i];
    std::unordered_set<FormulaId> held;
    for (FormulaId alpha : s.bases.at(i)) {
      FormulaId norm = A.normalize(alpha);
      if (vocab.slot_of_norm(i, norm) < 0)
        throw std::invalid_argument(
            "cannot describe a state whose base leaves the vocabulary");
      held.insert(norm);
    }
    for (FormulaId norm : vocab.norm_elements(i)) {
      QbfId lit = Q.variable(LeveledVar{VarKind::Belief, 0, agent, norm, 0});
      d = Q.and_(d, held.count(norm) ? lit : Q.not_(lit));
    }
  }
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    QbfId lit = Q.variable(LeveledVar{VarKind::Prop, 0, 0, kNoFormula, atoms.atoms()[j]});
    bool v = j < s.valuation.size() && s.valuation[j];
    d = Q.and_(d, v ? lit : Q.not_(lit));
  }
  return d;
}

// The closed sentence whose truth matches the checking problem: some level 0
// assignment both describes the state and satisfies the translated query.
inline QbfId proposition1_sentence(QbfArena& Q, FormulaArena& A, const VocabularyProfile& vocab,
                                   const AtomTable& atoms, const State& s, FormulaId query) {
  Translator t(Q, A, vocab, atoms);
  QbfId desc = describe_state(Q, A, vocab, atoms, s);
  QbfId body = Q.and_(desc, t.tr(query, 0));
  return Q.exists(t.level_block(0), body);
}

namespace detail {

struct QdimacsBuilder {
  const QbfArena& Q;
  const FormulaArena& A;

  struct Block {
    char quant;  // 'a' or 'e'
    std::vector<int> vars;
  };

  // Negation-normal matrix over solver literals.
  struct MatNode {
    std::uint8_t kind;  // 0 literal, 1 and, 2 or
    int lit = 0;
    int a = -1, b = -1;
  };

  int last_var = 0;
  std::vector<Block> prefix;
  std::vector<MatNode> mat;
  std::unordered_map<QbfVarId, int> env;
  std::unordered_map<QbfVarId, int> free_vars;
  std::map<int, std::string> names;
  std::unordered_map<std::uint64_t, int> memo;  // (node, polarity, scope)
  std::uint32_t scope = 0;
  std::uint32_t next_scope = 1;

  explicit QdimacsBuilder(const QbfArena& q, const FormulaArena& a) : Q(q), A(a) {}

  int mat_lit(int lit) {
    mat.push_back(MatNode{0, lit, -1, -1});
    return static_cast<int>(mat.size() - 1);
  }

  int mat_bin(std::uint8_t kind, int a, int b) {
    mat.push_back(MatNode{kind, 0, a, b});
    return static_cast<int>(mat.size() - 1);
  }

  // -1 means constant false, -2 constant true; indexes >= 0 are matrix nodes.
  int mand(int a, int b) {
    if (a == -1 || b == -1) return -1;
    if (a == -2) return b;
    if (b == -2) return a;
    return mat_bin(1, a, b);
  }

  int mor(int a, int b) {
    if (a == -2 || b == -2) return -2;
    if (a == -1) return b;
    if (b == -1) return a;
    return mat_bin(2, a, b);
  }

  int lookup(QbfVarId v) {
    auto it = env.find(v);
    if (it != env.end()) return it->second;
    auto fit = free_vars.find(v);
    if (fit != free_vars.end()) return fit->second;
    int d = ++last_var;
    free_vars.emplace(v, d);
    names.emplace(d, var_name(A, Q, v));
    return d;
  }

  int build(QbfId id, bool neg) {
    const QbfNode& n = Q.node(id);
    bool memoizable = n.kind != QbfKind::Var;  // vars are cheap, skip the table
    std::uint64_t key = (static_cast<std::uint64_t>(id) << 33) |
                        (static_cast<std::uint64_t>(neg) << 32) | scope;
    if (memoizable) {
      auto it = memo.find(key);
      if (it != memo.end()) return it->second;
    }
    int r;
    switch (n.kind) {
      case QbfKind::Const:
        r = n.value != neg ? -2 : -1;
        break;
      case QbfKind::Var: {
        int d = lookup(n.var);
        r = mat_lit(neg ? -d : d);
        break;
      }
      case QbfKind::Not:
        r = build(n.a, !neg);
        break;
      case QbfKind::And:
        r = neg ? mor(build(n.a, true), build(n.b, true))
                : mand(build(n.a, false), build(n.b, false));
        break;
      case QbfKind::Or:
        r = neg ? mand(build(n.a, true), build(n.b, true))
                : mor(build(n.a, false), build(n.b, false));
        break;
      case QbfKind::Implies:
        r = neg ? mand(build(n.a, false), build(n.b, true))
                : mor(build(n.a, true), build(n.b, false));
        break;
      case QbfKind::ForAll:
      case QbfKind::Exists: {
        bool universal = (n.kind == QbfKind::ForAll) != neg;
        const std::vector<QbfVarId>& block = Q.block(n.block);
        Block b;
        b.quant = universal ? 'a' : 'e';
        std::vector<std::pair<QbfVarId, int>> saved;
        saved.reserve(block.size());
        for (QbfVarId v : block) {
          int d = ++last_var;
          b.vars.push_back(d);
          names.emplace(d, var_name(A, Q, v));
          auto it = env.find(v);
          saved.emplace_back(v, it == env.end() ? 0 : it->second);
          env[v] = d;
        }
        std::size_t block_pos = prefix.size();
        prefix.push_back(std::move(b));
        std::uint32_t outer = scope;
        scope = next_scope++;
        r = build(n.a, neg);
        scope = outer;
        for (auto it2 = saved.rbegin(); it2 != saved.rend(); ++it2) {
          if (it2->second == 0)
            env.erase(it2->first);
          else
            env[it2->first] = it2->second;
        }
        // A body that folded to a constant makes the block vacuous.
        if (r == -1 || r == -2) prefix.erase(prefix.begin() + static_cast<long>(block_pos));
        break;
      }
      default:
        throw std::logic_error("unhandled qbf kind");
    }
    if (memoizable) memo.emplace(key, r);
    return r;
  }
};

}  // namespace detail

// Renders a sentence in QDIMACS. Bound blocks are rectified (every
// quantifier occurrence gets fresh solver variables), negation is pushed to
// the leaves so universals under an odd number of negations come out
// existential, the matrix is clausified with one definition variable per
// internal node, and those definition variables form a final existential
// block. Free variables, if any, surface in a leading existential block.
// Lines of the form "c map <var> <name>" relate solver variables to the
// leveled variables they stand for.
inline std::string export_qdimacs(const QbfArena& Q, const FormulaArena& A, QbfId root) {
  detail::QdimacsBuilder b(Q, A);
  int top = b.build(root, false);

  std::vector<std::vector<int>> clauses;
  if (top == -2) {
    // Constant truth: a single tautological clause over a throwaway variable.
    b.last_var = 1;
    b.prefix.clear();
    b.names.clear();
    b.prefix.push_back({'e', {1}});
    clauses.push_back({1, -1});
  } else if (top == -1) {
    b.last_var = 1;
    b.prefix.clear();
    b.names.clear();
    b.prefix.push_back({'e', {1}});
    clauses.push_back({1});
    clauses.push_back({-1});
  } else {
    std::vector<int> def(b.mat.size(), 0);
    std::vector<int> tseitin;
    std::function<int(int)> define = [&](int idx) -> int {
      const auto& n = b.mat[static_cast<std::size_t>(idx)];
      if (n.kind == 0) return n.lit;
      if (def[static_cast<std::size_t>(idx)] != 0) return def[static_cast<std::size_t>(idx)];
      int a = define(n.a);
      int c = define(n.b);
      int t = ++b.last_var;
      tseitin.push_back(t);
      if (n.kind == 1) {
        clauses.push_back({-t, a});
        clauses.push_back({-t, c});
        clauses.push_back({t, -a, -c});
      } else {
        clauses.push_back({-t, a, c});
        clauses.push_back({t, -a});
        clauses.push_back({t, -c});
      }
      def[static_cast<std::size_t>(idx)] = t;
      return t;
    };
    clauses.push_back({define(top)});
    if (!b.free_vars.empty()) {
      std::vector<int> fv;
      for (auto& [v, d] : b.free_vars) fv.push_back(d);
      std::sort(fv.begin(), fv.end());
      b.prefix.insert(b.prefix.begin(), {'e', std::move(fv)});
    }
    if (!tseitin.empty()) b.prefix.push_back({'e', std::move(tseitin)});
  }

  std::vector<char> used(static_cast<std::size_t>(b.last_var) + 1, 0);
  for (const auto& cl : clauses)
    for (int lit : cl) used[static_cast<std::size_t>(std::abs(lit))] = 1;

  std::ostringstream out;
  for (const auto& [d, name] : b.names)
    if (used[static_cast<std::size_t>(d)]) out << "c map " << d << " " << name << "\n";
  out << "p cnf " << b.last_var << " " << clauses.size() << "\n";
  char pending = 0;
  std::vector<int> pending_vars;
  auto flush = [&]() {
    if (pending_vars.empty()) return;
    out << pending;
    for (int v : pending_vars) out << " " << v;
    out << " 0\n";
    pending_vars.clear();
  };
  for (const auto& blk : b.prefix) {
    std::vector<int> vars;
    for (int v : blk.vars)
      if (used[static_cast<std::size_t>(v)]) vars.push_back(v);
    if (vars.empty()) continue;
    if (blk.quant != pending) {
      flush();
      pending = blk.quant;
    }
    pending_vars.insert(pending_vars.end(), vars.begin(), vars.end());
  }
  flush();
  for (const auto& cl : clauses) {
    for (int lit : cl) out << lit << " ";
    out << "0\n";
  }
  return out.str();
}

}  // namespace obmc
