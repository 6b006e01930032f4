#pragma once

#include <cstdint>
#include <optional>

#include "obmc/instance.hpp"
#include "obmc/limits.hpp"

namespace obmc {

struct EnumerationCapExceeded : std::runtime_error {
  std::size_t bits;
  std::size_t cap;
  EnumerationCapExceeded(std::size_t bits_, std::size_t cap_)
      : std::runtime_error("universal context needs " + std::to_string(bits_) +
                           " state bits, over the enumeration cap of " + std::to_string(cap_) +
                           " (use the symbolic engine)"),
        bits(bits_),
        cap(cap_) {}
};

// Truth of an L0 formula at a state: atoms from the valuation, explicit
// beliefs by (normal-form) set membership, connectives truth-functionally.
inline bool sat0(FormulaArena& A, const AtomTable& atoms, const AgentSet& agents,
                 const State& s, FormulaId alpha) {
  const FormulaNode& n = A.node(alpha);
  switch (n.kind) {
    case Kind::Atom: {
      int idx = atoms.index_of(n.atom);
      return idx >= 0 && idx < static_cast<int>(s.valuation.size()) && s.valuation[idx];
    }
    case Kind::Top:
      return true;
    case Kind::Bottom:
      return false;
    case Kind::Not:
      return !sat0(A, atoms, agents, s, n.a);
    case Kind::And:
      return sat0(A, atoms, agents, s, n.a) && sat0(A, atoms, agents, s, n.b);
    case Kind::Or:
      return sat0(A, atoms, agents, s, n.a) || sat0(A, atoms, agents, s, n.b);
    case Kind::Implies:
      return !sat0(A, atoms, agents, s, n.a) || sat0(A, atoms, agents, s, n.b);
    case Kind::Iff:
      return sat0(A, atoms, agents, s, n.a) == sat0(A, atoms, agents, s, n.b);
    case Kind::Xor:
      return sat0(A, atoms, agents, s, n.a) != sat0(A, atoms, agents, s, n.b);
    case Kind::ExplicitBelief: {
      int idx = agents.index_of(n.agent);
      return idx >= 0 && base_contains(A, s, static_cast<std::size_t>(idx), n.a);
    }
    default:
      throw std::invalid_argument("sat0 requires an L0 formula");
  }
}

// S' is an epistemic alternative for agent i at S when it satisfies every
// formula agent i explicitly believes at S.
inline bool epistemic_related(FormulaArena& A, const AtomTable& atoms, const AgentSet& agents,
                              const State& s, const State& sp, AgentId agent) {
  int idx = agents.index_of(agent);
  if (idx < 0) throw std::invalid_argument("unknown agent");
  for (FormulaId alpha : s.bases.at(static_cast<std::size_t>(idx)))
    if (!sat0(A, atoms, agents, sp, alpha)) return false;
  return true;
}

// Private expansion: agent i adds alpha to its base, everything else is kept.
inline State expand_state(FormulaArena& A, const AgentSet& agents, const State& s,
                          AgentId agent, FormulaId alpha) {
  int idx = agents.index_of(agent);
  if (idx < 0) throw std::invalid_argument("unknown agent");
  State out = s;
  base_insert(A, out, static_cast<std::size_t>(idx), alpha);
  return out;
}

// The universal context S_Gamma: every state whose bases draw from the
// vocabulary profile and whose valuation draws from the atom table. Never
// materialized; states are encoded as bit masks with one bit per vocabulary
// slot (agents in order, elements in vocabulary order) followed by one bit
// per atom (table order). Bit b of a state index is slot b.
class UniversalContext {
 public:
  UniversalContext(const VocabularyProfile& vocab, const AtomTable& atoms)
      : vocab_(&vocab), atoms_(&atoms) {
    agent_offsets_.reserve(vocab.agent_count());
    std::size_t off = 0;
    for (std::size_t i = 0; i < vocab.agent_count(); ++i) {
      agent_offsets_.push_back(off);
      off += vocab.elements(i).size();
    }
    atom_offset_ = off;
    bits_ = off + atoms.size();
  }

  const VocabularyProfile& vocab() const { return *vocab_; }
  const AtomTable& atoms() const { return *atoms_; }
  std::size_t bit_width() const { return bits_; }
  std::size_t agent_offset(std::size_t agent_idx) const { return agent_offsets_.at(agent_idx); }
  std::size_t atom_offset() const { return atom_offset_; }

  State state_at(std::uint64_t mask) const {
    State s;
    s.bases.resize(vocab_->agent_count());
    for (std::size_t i = 0; i < vocab_->agent_count(); ++i) {
      const auto& elems = vocab_->elements(i);
      for (std::size_t j = 0; j < elems.size(); ++j)
        if (mask >> (agent_offsets_[i] + j) & 1) s.bases[i].push_back(elems[j]);
    }
    s.valuation.resize(atoms_->size());
    for (std::size_t j = 0; j < atoms_->size(); ++j)
      s.valuation[j] = mask >> (atom_offset_ + j) & 1;
    return s;
  }

 private:
  const VocabularyProfile* vocab_;
  const AtomTable* atoms_;
  std::vector<std::size_t> agent_offsets_;
  std::size_t atom_offset_ = 0;
  std::size_t bits_ = 0;
};

// Streams every state of the universal context exactly once, in increasing
// bit-mask order. Refuses oversized contexts up front.
class ContextEnumerator {
 public:
  explicit ContextEnumerator(const UniversalContext& ctx, std::size_t cap_bits = 24)
      : ctx_(&ctx) {
    if (ctx.bit_width() > cap_bits) throw EnumerationCapExceeded(ctx.bit_width(), cap_bits);
    count_ = std::uint64_t{1} << ctx.bit_width();
  }

  std::optional<State> next() {
    if (next_ >= count_) return std::nullopt;
    return ctx_->state_at(next_++);
  }

  std::uint64_t state_count() const { return count_; }

 private:
  const UniversalContext* ctx_;
  std::uint64_t next_ = 0;
  std::uint64_t count_ = 0;
};

namespace detail {

// Explicit-state recursive checker. Context states are bit masks; the actual
// state (and any state reached by a dynamic expansion) is kept concrete,
// since its bases may leave the vocabulary.
class DirectChecker {
 public:
  DirectChecker(FormulaArena& A, const UniversalContext& ctx, const Budget& budget)
      : A_(A), ctx_(ctx), deadline_(budget.deadline()) {
    if (ctx.bit_width() > budget.enumeration_cap_bits)
      throw EnumerationCapExceeded(ctx.bit_width(), budget.enumeration_cap_bits);
    mask_count_ = std::uint64_t{1} << ctx.bit_width();
  }

  bool check_concrete(const State& s, FormulaId f) {
    const FormulaNode& n = A_.node(f);
    switch (n.kind) {
      case Kind::Atom: {
        int idx = ctx_.atoms().index_of(n.atom);
        return idx >= 0 && idx < static_cast<int>(s.valuation.size()) && s.valuation[idx];
      }
      case Kind::Top:
        return true;
      case Kind::Bottom:
        return false;
      case Kind::Not:
        return !check_concrete(s, n.a);
      case Kind::And:
        return check_concrete(s, n.a) && check_concrete(s, n.b);
      case Kind::Or:
        return check_concrete(s, n.a) || check_concrete(s, n.b);
      case Kind::Implies:
        return !check_concrete(s, n.a) || check_concrete(s, n.b);
      case Kind::Iff:
        return check_concrete(s, n.a) == check_concrete(s, n.b);
      case Kind::Xor:
        return check_concrete(s, n.a) != check_concrete(s, n.b);
      case Kind::ExplicitBelief: {
        int idx = ctx_.vocab().agents().index_of(n.agent);
        return idx >= 0 && base_contains(A_, s, static_cast<std::size_t>(idx), n.a);
      }
      case Kind::AtLeast:
      case Kind::AtMost:
      case Kind::Only:
        return quantified(
            [&](std::uint64_t m, std::size_t agent_idx) { return related_concrete(s, agent_idx, m); },
            n);
      case Kind::Expand: {
        State sp = expand_state(A_, ctx_.vocab().agents(), s, n.agent, n.a);
        return check_concrete(sp, n.b);
      }
    }
    throw std::logic_error("unhandled kind");
  }

  bool check_mask(std::uint64_t mask, FormulaId f) {
    const FormulaNode& n = A_.node(f);
    switch (n.kind) {
      case Kind::Atom: {
        int idx = ctx_.atoms().index_of(n.atom);
        return idx >= 0 && (mask >> (ctx_.atom_offset() + idx) & 1);
      }
      case Kind::Top:
        return true;
      case Kind::Bottom:
        return false;
      case Kind::Not:
        return !check_mask(mask, n.a);
      case Kind::And:
        return check_mask(mask, n.a) && check_mask(mask, n.b);
      case Kind::Or:
        return check_mask(mask, n.a) || check_mask(mask, n.b);
      case Kind::Implies:
        return !check_mask(mask, n.a) || check_mask(mask, n.b);
      case Kind::Iff:
        return check_mask(mask, n.a) == check_mask(mask, n.b);
      case Kind::Xor:
        return check_mask(mask, n.a) != check_mask(mask, n.b);
      case Kind::ExplicitBelief: {
        int idx = ctx_.vocab().agents().index_of(n.agent);
        if (idx < 0) return false;
        int slot = ctx_.vocab().slot_of_norm(static_cast<std::size_t>(idx),
                                             A_.normalize(n.a));
        if (slot < 0) return false;
        return mask >> (ctx_.agent_offset(static_cast<std::size_t>(idx)) + slot) & 1;
      }
      case Kind::AtLeast:
      case Kind::AtMost:
      case Kind::Only: {
        std::uint64_t key = (static_cast<std::uint64_t>(f) << ctx_.bit_width()) | mask;
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        bool r = quantified(
            [&](std::uint64_t m, std::size_t agent_idx) { return related_mask(mask, agent_idx, m); },
            n);
        memo_.emplace(key, r);
        return r;
      }
      case Kind::Expand:
        return check_concrete(ctx_.state_at(mask), f);
    }
    throw std::logic_error("unhandled kind");
  }

 private:
  // One sweep over the context for AtLeast (related states must satisfy the
  // body), AtMost (unrelated states must satisfy it), and Only (related must
  // satisfy, unrelated must falsify).
  template <typename RelatedFn>
  bool quantified(const RelatedFn& related, const FormulaNode& n) {
    int agent_idx = ctx_.vocab().agents().index_of(n.agent);
    if (agent_idx < 0) throw std::invalid_argument("unknown agent in modal operator");
    for (std::uint64_t m = 0; m < mask_count_; ++m) {
      if ((m & 0x1fff) == 0) check_deadline(deadline_, "explicit-state check");
      bool rel = related(m, static_cast<std::size_t>(agent_idx));
      switch (n.kind) {
        case Kind::AtLeast:
          if (rel && !check_mask(m, n.a)) return false;
          break;
        case Kind::AtMost:
          if (!rel && !check_mask(m, n.a)) return false;
          break;
        default:  // Only
          if (rel != check_mask(m, n.a)) return false;
          break;
      }
    }
    return true;
  }

  bool related_concrete(const State& s, std::size_t agent_idx, std::uint64_t m) {
    for (FormulaId alpha : s.bases.at(agent_idx))
      if (!check_mask(m, alpha)) return false;
    return true;
  }

  bool related_mask(std::uint64_t from, std::size_t agent_idx, std::uint64_t m) {
    const auto& elems = ctx_.vocab().elements(agent_idx);
    std::size_t off = ctx_.agent_offset(agent_idx);
    for (std::size_t j = 0; j < elems.size(); ++j)
      if ((from >> (off + j) & 1) && !check_mask(m, elems[j])) return false;
    return true;
  }

  FormulaArena& A_;
  const UniversalContext& ctx_;
  std::optional<std::chrono::steady_clock::time_point> deadline_;
  std::uint64_t mask_count_ = 0;
  std::unordered_map<std::uint64_t, bool> memo_;
};

}  // namespace detail

// The explicit-state model checker: recursion on the formula, quantifying
// over the enumerated universal context. Handles the full dynamic language;
// doubles as the brute-force oracle for the symbolic engine.
inline bool check_direct(FormulaArena& A, const UniversalContext& ctx, const State& s,
                         FormulaId f, const Budget& budget = {}) {
  detail::DirectChecker checker(A, ctx, budget);
  return checker.check_concrete(s, f);
}

inline bool check_direct(ProblemInstance& inst, FormulaId f, const Budget& budget = {}) {
  UniversalContext ctx(inst.vocab, inst.atoms);
  return check_direct(inst.arena, ctx, inst.initial, f, budget);
}

inline bool check_direct(ProblemInstance& inst, const Budget& budget = {}) {
  if (inst.query == kNoFormula) throw std::invalid_argument("instance has no query");
  return check_direct(inst, inst.query, budget);
}

}  // namespace obmc
