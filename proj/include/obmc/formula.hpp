#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace obmc {

using FormulaId = std::uint32_t;
using AtomId = std::uint32_t;
using AgentId = std::uint32_t;

inline constexpr FormulaId kNoFormula = 0xffffffffu;

enum class Kind : std::uint8_t {
  Atom,
  Top,
  Bottom,
  Not,
  And,
  Or,
  Implies,
  Iff,
  Xor,
  ExplicitBelief,
  AtLeast,
  AtMost,
  Only,
  Expand,
};

inline bool is_binary(Kind k) {
  switch (k) {
    case Kind::And:
    case Kind::Or:
    case Kind::Implies:
    case Kind::Iff:
    case Kind::Xor:
      return true;
    default:
      return false;
  }
}

inline bool is_modal(Kind k) {
  switch (k) {
    case Kind::ExplicitBelief:
    case Kind::AtLeast:
    case Kind::AtMost:
    case Kind::Only:
    case Kind::Expand:
      return true;
    default:
      return false;
  }
}

struct FormulaNode {
  Kind kind;
  bool l0;              // true when the subtree has no AtLeast/AtMost/Only/Expand
  std::uint32_t depth;  // modal nesting depth (levels consumed by the translation)
  AgentId agent;        // modal and dynamic nodes, 0 otherwise
  AtomId atom;          // Atom nodes, 0 otherwise
  FormulaId a;          // unary body, binary lhs, Expand info
  FormulaId b;          // binary rhs, Expand body
};

// Hash-consing arena. Structurally identical formulas share one id, so id
// equality is structural equality and sets of formulas can be sets of ids.
class FormulaArena {
 public:
  FormulaArena() {
    top_ = intern(Kind::Top, 0, 0, kNoFormula, kNoFormula);
    bottom_ = intern(Kind::Bottom, 0, 0, kNoFormula, kNoFormula);
  }

  FormulaArena(const FormulaArena&) = delete;
  FormulaArena& operator=(const FormulaArena&) = delete;
  FormulaArena(FormulaArena&&) = default;
  FormulaArena& operator=(FormulaArena&&) = default;

  AtomId atom_id(std::string_view name) {
    auto it = atom_ids_.find(std::string(name));
    if (it != atom_ids_.end()) return it->second;
    AtomId id = static_cast<AtomId>(atom_names_.size());
    atom_names_.emplace_back(name);
    atom_ids_.emplace(std::string(name), id);
    return id;
  }

  const std::string& atom_name(AtomId id) const { return atom_names_.at(id); }
  std::size_t atom_count() const { return atom_names_.size(); }

  FormulaId atom(std::string_view name) {
    return intern(Kind::Atom, 0, atom_id(name), kNoFormula, kNoFormula);
  }
  FormulaId atom(AtomId id) {
    if (id >= atom_names_.size()) throw std::invalid_argument("unknown atom id");
    return intern(Kind::Atom, 0, id, kNoFormula, kNoFormula);
  }

  FormulaId top() const { return top_; }
  FormulaId bottom() const { return bottom_; }

  FormulaId not_(FormulaId f) { return intern(Kind::Not, 0, 0, check(f), kNoFormula); }
  FormulaId and_(FormulaId a, FormulaId b) { return intern(Kind::And, 0, 0, check(a), check(b)); }
  FormulaId or_(FormulaId a, FormulaId b) { return intern(Kind::Or, 0, 0, check(a), check(b)); }
  FormulaId implies(FormulaId a, FormulaId b) {
    return intern(Kind::Implies, 0, 0, check(a), check(b));
  }
  FormulaId iff(FormulaId a, FormulaId b) { return intern(Kind::Iff, 0, 0, check(a), check(b)); }
  FormulaId xor_(FormulaId a, FormulaId b) { return intern(Kind::Xor, 0, 0, check(a), check(b)); }

  FormulaId explicit_belief(AgentId i, FormulaId body) {
    if (!node(check(body)).l0)
      throw std::invalid_argument("explicit belief body must be an L0 formula");
    return intern(Kind::ExplicitBelief, i, 0, body, kNoFormula);
  }
  FormulaId at_least(AgentId i, FormulaId body) {
    return intern(Kind::AtLeast, i, 0, check(body), kNoFormula);
  }
  FormulaId at_most(AgentId i, FormulaId body) {
    return intern(Kind::AtMost, i, 0, check(body), kNoFormula);
  }
  FormulaId only(AgentId i, FormulaId body) {
    return intern(Kind::Only, i, 0, check(body), kNoFormula);
  }
  FormulaId expand(AgentId i, FormulaId info, FormulaId body) {
    if (!node(check(info)).l0)
      throw std::invalid_argument("expansion info must be an L0 formula");
    return intern(Kind::Expand, i, 0, info, check(body));
  }

  const FormulaNode& node(FormulaId f) const { return nodes_.at(f); }
  Kind kind(FormulaId f) const { return node(f).kind; }
  bool is_l0(FormulaId f) const { return node(f).l0; }
  std::uint32_t modal_depth(FormulaId f) const { return node(f).depth; }
  std::size_t size() const { return nodes_.size(); }

  // Rewrites the derived connectives Or, Implies, Iff, Xor into {Not, And};
  // Top/Bottom and the modal and dynamic nodes are kept. Satisfaction is
  // preserved, and the result is the canonical representative used for
  // set-membership tests on belief bases.
  FormulaId normalize(FormulaId f) {
    auto it = norm_memo_.find(f);
    if (it != norm_memo_.end()) return it->second;
    FormulaNode n = node(f);
    FormulaId r;
    switch (n.kind) {
      case Kind::Atom:
      case Kind::Top:
      case Kind::Bottom:
        r = f;
        break;
      case Kind::Not:
        r = not_(normalize(n.a));
        break;
      case Kind::And:
        r = and_(normalize(n.a), normalize(n.b));
        break;
      case Kind::Or: {
        FormulaId a = normalize(n.a), b = normalize(n.b);
        r = not_(and_(not_(a), not_(b)));
        break;
      }
      case Kind::Implies: {
        FormulaId a = normalize(n.a), b = normalize(n.b);
        r = not_(and_(a, not_(b)));
        break;
      }
      case Kind::Iff: {
        FormulaId a = normalize(n.a), b = normalize(n.b);
        r = and_(not_(and_(a, not_(b))), not_(and_(b, not_(a))));
        break;
      }
      case Kind::Xor: {
        FormulaId a = normalize(n.a), b = normalize(n.b);
        r = and_(not_(and_(a, b)), not_(and_(not_(a), not_(b))));
        break;
      }
      case Kind::ExplicitBelief:
        r = explicit_belief(n.agent, normalize(n.a));
        break;
      case Kind::AtLeast:
        r = at_least(n.agent, normalize(n.a));
        break;
      case Kind::AtMost:
        r = at_most(n.agent, normalize(n.a));
        break;
      case Kind::Only:
        r = only(n.agent, normalize(n.a));
        break;
      case Kind::Expand:
        r = expand(n.agent, normalize(n.a), normalize(n.b));
        break;
      default:
        throw std::logic_error("unhandled kind");
    }
    norm_memo_.emplace(f, r);
    norm_memo_.emplace(r, r);
    return r;
  }

  // Replaces every Only(i, phi) by AtLeast(i, phi) & AtMost(i, ~phi),
  // recursively. Idempotent.
  FormulaId expand_only(FormulaId f) {
    auto it = only_memo_.find(f);
    if (it != only_memo_.end()) return it->second;
    FormulaNode n = node(f);
    FormulaId r;
    switch (n.kind) {
      case Kind::Atom:
      case Kind::Top:
      case Kind::Bottom:
        r = f;
        break;
      case Kind::Not:
        r = not_(expand_only(n.a));
        break;
      case Kind::And:
      case Kind::Or:
      case Kind::Implies:
      case Kind::Iff:
      case Kind::Xor:
        r = intern(n.kind, 0, 0, expand_only(n.a), expand_only(n.b));
        break;
      case Kind::ExplicitBelief:
        r = f;
        break;
      case Kind::AtLeast:
        r = at_least(n.agent, expand_only(n.a));
        break;
      case Kind::AtMost:
        r = at_most(n.agent, expand_only(n.a));
        break;
      case Kind::Only: {
        FormulaId body = expand_only(n.a);
        r = and_(at_least(n.agent, body), at_most(n.agent, not_(body)));
        break;
      }
      case Kind::Expand:
        r = expand(n.agent, n.a, expand_only(n.b));
        break;
      default:
        throw std::logic_error("unhandled kind");
    }
    only_memo_.emplace(f, r);
    return r;
  }

 private:
  struct NodeKey {
    Kind kind;
    AgentId agent;
    AtomId atom;
    FormulaId a;
    FormulaId b;
    bool operator==(const NodeKey&) const = default;
  };
  struct NodeKeyHash {
    std::size_t operator()(const NodeKey& k) const {
      std::uint64_t h = static_cast<std::uint64_t>(k.kind);
      auto mix = [&h](std::uint64_t v) {
        h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
      };
      mix(k.agent);
      mix(k.atom);
      mix(k.a);
      mix(k.b);
      return static_cast<std::size_t>(h);
    }
  };

  FormulaId check(FormulaId f) const {
    if (f >= nodes_.size()) throw std::invalid_argument("formula id out of range");
    return f;
  }

  FormulaId intern(Kind k, AgentId agent, AtomId atom, FormulaId a, FormulaId b) {
    NodeKey key{k, agent, atom, a, b};
    auto it = unique_.find(key);
    if (it != unique_.end()) return it->second;
    FormulaNode n;
    n.kind = k;
    n.agent = agent;
    n.atom = atom;
    n.a = a;
    n.b = b;
    bool l0 = true;
    std::uint32_t depth = 0;
    switch (k) {
      case Kind::Atom:
      case Kind::Top:
      case Kind::Bottom:
        break;
      case Kind::Not:
        l0 = nodes_[a].l0;
        depth = nodes_[a].depth;
        break;
      case Kind::And:
      case Kind::Or:
      case Kind::Implies:
      case Kind::Iff:
      case Kind::Xor:
        l0 = nodes_[a].l0 && nodes_[b].l0;
        depth = std::max(nodes_[a].depth, nodes_[b].depth);
        break;
      case Kind::ExplicitBelief:
        l0 = nodes_[a].l0;
        depth = 0;
        break;
      case Kind::AtLeast:
      case Kind::AtMost:
      case Kind::Only:
        l0 = false;
        depth = 1 + nodes_[a].depth;
        break;
      case Kind::Expand:
        // The reduction principles push an expansion through its body without
        // adding modal nesting, so the depth is the body's depth.
        l0 = false;
        depth = nodes_[b].depth;
        break;
    }
    n.l0 = l0;
    n.depth = depth;
    FormulaId id = static_cast<FormulaId>(nodes_.size());
    nodes_.push_back(n);
    unique_.emplace(key, id);
    return id;
  }

  std::vector<FormulaNode> nodes_;
  std::unordered_map<NodeKey, FormulaId, NodeKeyHash> unique_;
  std::vector<std::string> atom_names_;
  std::unordered_map<std::string, AtomId> atom_ids_;
  std::unordered_map<FormulaId, FormulaId> norm_memo_;
  std::unordered_map<FormulaId, FormulaId> only_memo_;
  FormulaId top_ = 0;
  FormulaId bottom_ = 0;
};

// All syntactic subformulas of f, including f itself, as a sorted id vector.
// Derived connectives are not expanded; explicit-belief bodies and both parts
// of an Expand node are included.
inline void collect_subformulas(const FormulaArena& A, FormulaId f,
                                std::unordered_set<FormulaId>& out) {
  if (!out.insert(f).second) return;
  const FormulaNode& n = A.node(f);
  if (n.a != kNoFormula) collect_subformulas(A, n.a, out);
  if (n.b != kNoFormula) collect_subformulas(A, n.b, out);
}

inline std::vector<FormulaId> subformulas(const FormulaArena& A, FormulaId f) {
  std::unordered_set<FormulaId> seen;
  collect_subformulas(A, f, seen);
  std::vector<FormulaId> out(seen.begin(), seen.end());
  std::sort(out.begin(), out.end());
  return out;
}

inline std::uint32_t modal_depth(const FormulaArena& A, FormulaId f) {
  return A.modal_depth(f);
}

inline void collect_atoms(const FormulaArena& A, FormulaId f, std::set<AtomId>& out) {
  const FormulaNode& n = A.node(f);
  if (n.kind == Kind::Atom) {
    out.insert(n.atom);
    return;
  }
  if (n.a != kNoFormula) collect_atoms(A, n.a, out);
  if (n.b != kNoFormula) collect_atoms(A, n.b, out);
}

struct AgentSet {
  std::vector<AgentId> ids;

  AgentSet() = default;
  explicit AgentSet(std::vector<AgentId> v) : ids(std::move(v)) {
    std::unordered_set<AgentId> seen;
    for (AgentId a : ids)
      if (!seen.insert(a).second) throw std::invalid_argument("duplicate agent id");
  }
  static AgentSet range(std::size_t n) {
    std::vector<AgentId> v;
    v.reserve(n);
    for (std::size_t i = 1; i <= n; ++i) v.push_back(static_cast<AgentId>(i));
    return AgentSet(std::move(v));
  }

  std::size_t size() const { return ids.size(); }
  int index_of(AgentId a) const {
    for (std::size_t i = 0; i < ids.size(); ++i)
      if (ids[i] == a) return static_cast<int>(i);
    return -1;
  }
  bool contains(AgentId a) const { return index_of(a) >= 0; }
};

// The finite slice of the atom alphabet relevant to one problem instance,
// in a fixed deterministic order.
class AtomTable {
 public:
  AtomTable() = default;

  int add(AtomId id) {
    auto it = index_.find(id);
    if (it != index_.end()) return it->second;
    int pos = static_cast<int>(atoms_.size());
    atoms_.push_back(id);
    index_.emplace(id, pos);
    return pos;
  }
  int index_of(AtomId id) const {
    auto it = index_.find(id);
    return it == index_.end() ? -1 : it->second;
  }
  bool contains(AtomId id) const { return index_.count(id) != 0; }
  std::size_t size() const { return atoms_.size(); }
  const std::vector<AtomId>& atoms() const { return atoms_; }

 private:
  std::vector<AtomId> atoms_;
  std::unordered_map<AtomId, int> index_;
};

// Per-agent vocabularies Gamma_i: finite sets of L0 formulas, stored in the
// order given (deduplicated by normal form, first occurrence kept). The
// profile implicitly denotes the universal context S_Gamma.
class VocabularyProfile {
 public:
  VocabularyProfile() = default;

  static VocabularyProfile make(FormulaArena& A, AgentSet agents,
                                std::vector<std::vector<FormulaId>> raw) {
    if (raw.size() != agents.size())
      throw std::invalid_argument("vocabulary rows must match the agent set");
    VocabularyProfile p;
    p.agents_ = std::move(agents);
    p.elems_.resize(raw.size());
    p.norm_elems_.resize(raw.size());
    p.slot_by_norm_.resize(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
      for (FormulaId e : raw[i]) {
        if (!A.is_l0(e))
          throw std::invalid_argument("vocabulary elements must be L0 formulas");
        FormulaId ne = A.normalize(e);
        if (p.slot_by_norm_[i].count(ne)) continue;
        int slot = static_cast<int>(p.elems_[i].size());
        p.elems_[i].push_back(e);
        p.norm_elems_[i].push_back(ne);
        p.slot_by_norm_[i].emplace(ne, slot);
      }
    }
    return p;
  }

  const AgentSet& agents() const { return agents_; }
  std::size_t agent_count() const { return agents_.size(); }

  const std::vector<FormulaId>& elements(std::size_t agent_idx) const {
    return elems_.at(agent_idx);
  }
  const std::vector<FormulaId>& norm_elements(std::size_t agent_idx) const {
    return norm_elems_.at(agent_idx);
  }
  int slot_of_norm(std::size_t agent_idx, FormulaId norm_id) const {
    const auto& m = slot_by_norm_.at(agent_idx);
    auto it = m.find(norm_id);
    return it == m.end() ? -1 : it->second;
  }
  bool contains_norm(std::size_t agent_idx, FormulaId norm_id) const {
    return slot_of_norm(agent_idx, norm_id) >= 0;
  }

  std::size_t total_width() const {
    std::size_t w = 0;
    for (const auto& v : elems_) w += v.size();
    return w;
  }

 private:
  AgentSet agents_;
  std::vector<std::vector<FormulaId>> elems_;
  std::vector<std::vector<FormulaId>> norm_elems_;
  std::vector<std::unordered_map<FormulaId, int>> slot_by_norm_;
};

// Replaces every subformula ExplicitBelief(i, alpha) whose (recursively
// pruned) alpha lies outside Gamma_i by Bottom. Over the universal context
// such subformulas are false at every state. Idempotent.
inline FormulaId prune_to_vocabulary(FormulaArena& A, FormulaId f,
                                     const VocabularyProfile& vocab) {
  FormulaNode n = A.node(f);
  switch (n.kind) {
    case Kind::Atom:
    case Kind::Top:
    case Kind::Bottom:
      return f;
    case Kind::Not:
      return A.not_(prune_to_vocabulary(A, n.a, vocab));
    case Kind::And:
      return A.and_(prune_to_vocabulary(A, n.a, vocab), prune_to_vocabulary(A, n.b, vocab));
    case Kind::Or:
      return A.or_(prune_to_vocabulary(A, n.a, vocab), prune_to_vocabulary(A, n.b, vocab));
    case Kind::Implies:
      return A.implies(prune_to_vocabulary(A, n.a, vocab), prune_to_vocabulary(A, n.b, vocab));
    case Kind::Iff:
      return A.iff(prune_to_vocabulary(A, n.a, vocab), prune_to_vocabulary(A, n.b, vocab));
    case Kind::Xor:
      return A.xor_(prune_to_vocabulary(A, n.a, vocab), prune_to_vocabulary(A, n.b, vocab));
    case Kind::ExplicitBelief: {
      int idx = vocab.agents().index_of(n.agent);
      FormulaId body = prune_to_vocabulary(A, n.a, vocab);
      if (idx < 0 || !vocab.contains_norm(static_cast<std::size_t>(idx), A.normalize(body)))
        return A.bottom();
      return A.explicit_belief(n.agent, body);
    }
    case Kind::AtLeast:
      return A.at_least(n.agent, prune_to_vocabulary(A, n.a, vocab));
    case Kind::AtMost:
      return A.at_most(n.agent, prune_to_vocabulary(A, n.a, vocab));
    case Kind::Only:
      return A.only(n.agent, prune_to_vocabulary(A, n.a, vocab));
    case Kind::Expand:
      return A.expand(n.agent, prune_to_vocabulary(A, n.a, vocab),
                      prune_to_vocabulary(A, n.b, vocab));
  }
  throw std::logic_error("unhandled kind");
}

namespace detail {

inline void maximal_l0_bodies(const FormulaArena& A, FormulaId f, std::set<FormulaId>& out) {
  if (A.is_l0(f)) {
    out.insert(f);
    return;
  }
  const FormulaNode& n = A.node(f);
  if (n.a != kNoFormula) maximal_l0_bodies(A, n.a, out);
  if (n.b != kNoFormula) maximal_l0_bodies(A, n.b, out);
}

inline bool is_literal(const FormulaArena& A, FormulaId f) {
  const FormulaNode& n = A.node(f);
  if (n.kind == Kind::Atom) return true;
  return n.kind == Kind::Not && A.kind(n.a) == Kind::Atom;
}

}  // namespace detail

// Relevant-atom count of an instance: the per-agent base bit-width the
// search-space accounting is stated in. Counted without duplicates:
//   - every vocabulary formula (the union U over all agents),
//   - every propositional variable occurring in the vocabulary or the query,
//   - every literal occurring in the query's maximal L0 bodies,
//   - one belief atom per agent/vocabulary-formula pair (n * |U|),
// plus, per maximal L0 body of the query, its compound subformulas that are
// not already vocabulary formulas or induced belief atoms. Compounds are
// deliberately counted per body rather than globally: two bodies sharing a
// compound still occupy separate tracking slots.
inline std::size_t ratoms(const FormulaArena& A, const VocabularyProfile& vocab,
                          FormulaId query) {
  const AgentSet& agents = vocab.agents();
  std::set<FormulaId> base;  // U, plus atoms and literals
  std::set<FormulaId> u;
  for (std::size_t i = 0; i < vocab.agent_count(); ++i)
    for (FormulaId e : vocab.elements(i)) u.insert(e);
  base.insert(u.begin(), u.end());

  std::unordered_set<FormulaId> seen;
  for (FormulaId e : u) collect_subformulas(A, e, seen);
  collect_subformulas(A, query, seen);
  for (FormulaId s : seen)
    if (A.kind(s) == Kind::Atom) base.insert(s);

  auto in_induced = [&](FormulaId f) {
    const FormulaNode& n = A.node(f);
    return n.kind == Kind::ExplicitBelief && agents.contains(n.agent) && u.count(n.a) != 0;
  };

  std::set<FormulaId> bodies;
  detail::maximal_l0_bodies(A, query, bodies);

  std::size_t compounds = 0;
  for (FormulaId b : bodies) {
    std::unordered_set<FormulaId> subs;
    collect_subformulas(A, b, subs);
    for (FormulaId s : subs) {
      if (detail::is_literal(A, s)) {
        base.insert(s);
      } else if (!u.count(s) && !in_induced(s)) {
        ++compounds;
      }
    }
  }

  std::size_t induced_new = 0;
  for (AgentId i : agents.ids) {
    (void)i;
    induced_new += u.size();
  }
  for (FormulaId e : u)
    if (in_induced(e)) --induced_new;

  return base.size() + induced_new + compounds;
}

// Base-2 exponent of the search-space size 2^|Atm| * (2^ratoms)^n.
inline std::size_t state_count_exponent(const FormulaArena& A, const VocabularyProfile& vocab,
                                        FormulaId query, const AtomTable& atoms) {
  return atoms.size() + vocab.agent_count() * ratoms(A, vocab, query);
}

}  // namespace obmc
