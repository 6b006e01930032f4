#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "obmc/limits.hpp"
#include "obmc/qbf.hpp"

namespace obmc {

using BddRef = std::uint32_t;
using VarSetId = std::uint32_t;

inline constexpr BddRef kBddFalse = 0;
inline constexpr BddRef kBddTrue = 1;

// Reduced ordered binary decision diagrams. Nodes are hash-consed, so two
// equivalent functions built over the same store always end up at the same
// reference; there are no complement edges and no reordering. The store
// enforces a node budget and an optional deadline, reporting overruns as
// ResourceExhausted.
class BddStore {
 public:
  explicit BddStore(std::size_t max_nodes = 50'000'000,
                    std::optional<std::chrono::steady_clock::time_point> deadline = std::nullopt)
      : max_nodes_(max_nodes), deadline_(deadline) {
    nodes_.push_back({kLeafVar, 0, 0});  // false
    nodes_.push_back({kLeafVar, 1, 1});  // true
  }

  BddStore(const BddStore&) = delete;
  BddStore& operator=(const BddStore&) = delete;

  std::size_t node_count() const { return nodes_.size(); }

  std::uint32_t var_of(BddRef r) const { return nodes_[r].var; }
  BddRef lo_of(BddRef r) const { return nodes_[r].lo; }
  BddRef hi_of(BddRef r) const { return nodes_[r].hi; }
  bool is_terminal(BddRef r) const { return r <= kBddTrue; }

  BddRef var(std::uint32_t v) { return mk(v, kBddFalse, kBddTrue); }

  BddRef negate(BddRef a) {
    if (a == kBddFalse) return kBddTrue;
    if (a == kBddTrue) return kBddFalse;
    auto it = not_memo_.find(a);
    if (it != not_memo_.end()) return it->second;
    tick();
    BddRef r = mk(nodes_[a].var, negate(nodes_[a].lo), negate(nodes_[a].hi));
    not_memo_.emplace(a, r);
    return r;
  }

  BddRef and_(BddRef a, BddRef b) {
    if (a == kBddFalse || b == kBddFalse) return kBddFalse;
    if (a == kBddTrue) return b;
    if (b == kBddTrue) return a;
    if (a == b) return a;
    if (a > b) std::swap(a, b);
    std::uint64_t key = (static_cast<std::uint64_t>(a) << 32) | b;
    auto it = and_memo_.find(key);
    if (it != and_memo_.end()) return it->second;
    tick();
    BddRef r = combine(a, b, [this](BddRef x, BddRef y) { return and_(x, y); });
    and_memo_.emplace(key, r);
    return r;
  }

  BddRef or_(BddRef a, BddRef b) {
    if (a == kBddTrue || b == kBddTrue) return kBddTrue;
    if (a == kBddFalse) return b;
    if (b == kBddFalse) return a;
    if (a == b) return a;
    if (a > b) std::swap(a, b);
    std::uint64_t key = (static_cast<std::uint64_t>(a) << 32) | b;
    auto it = or_memo_.find(key);
    if (it != or_memo_.end()) return it->second;
    tick();
    BddRef r = combine(a, b, [this](BddRef x, BddRef y) { return or_(x, y); });
    or_memo_.emplace(key, r);
    return r;
  }

  BddRef implies(BddRef a, BddRef b) { return or_(negate(a), b); }

  VarSetId make_varset(std::vector<std::uint32_t> vars) {
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    if (vars.size() >= (1u << 16))
      throw std::invalid_argument("quantifier block too wide for the store");
    for (std::size_t i = 0; i < varsets_.size(); ++i)
      if (varsets_[i] == vars) return static_cast<VarSetId>(i);
    if (varsets_.size() >= (1u << 16))
      throw std::invalid_argument("too many distinct quantifier blocks");
    varsets_.push_back(std::move(vars));
    return static_cast<VarSetId>(varsets_.size() - 1);
  }

  BddRef exists(BddRef a, VarSetId vs) { return quantify(a, vs, 0, false); }
  BddRef forall(BddRef a, VarSetId vs) { return quantify(a, vs, 0, true); }

  bool evaluate(BddRef a, const std::vector<bool>& assignment) const {
    while (!is_terminal(a)) {
      std::uint32_t v = nodes_[a].var;
      bool bit = v < assignment.size() && assignment[v];
      a = bit ? nodes_[a].hi : nodes_[a].lo;
    }
    return a == kBddTrue;
  }

 private:
  static constexpr std::uint32_t kLeafVar = std::numeric_limits<std::uint32_t>::max();

  struct Node {
    std::uint32_t var;
    BddRef lo, hi;
  };

  struct NodeKey {
    std::uint32_t var;
    BddRef lo, hi;
    bool operator==(const NodeKey& o) const {
      return var == o.var && lo == o.lo && hi == o.hi;
    }
  };

  struct NodeKeyHash {
    std::size_t operator()(const NodeKey& k) const {
      std::uint64_t h = k.var;
      h = h * 0x9e3779b97f4a7c15ull + k.lo;
      h = (h ^ (h >> 29)) * 0xbf58476d1ce4e5b9ull + k.hi;
      return static_cast<std::size_t>(h ^ (h >> 32));
    }
  };

  BddRef mk(std::uint32_t v, BddRef lo, BddRef hi) {
    if (lo == hi) return lo;
    NodeKey key{v, lo, hi};
    auto it = unique_.find(key);
    if (it != unique_.end()) return it->second;
    if (nodes_.size() >= max_nodes_)
      throw ResourceExhausted("decision diagram exceeded its node budget");
    nodes_.push_back({v, lo, hi});
    BddRef r = static_cast<BddRef>(nodes_.size() - 1);
    unique_.emplace(key, r);
    return r;
  }

  template <typename Op>
  BddRef combine(BddRef a, BddRef b, const Op& op) {
    std::uint32_t va = nodes_[a].var;
    std::uint32_t vb = nodes_[b].var;
    std::uint32_t m = std::min(va, vb);
    BddRef a0 = va == m ? nodes_[a].lo : a;
    BddRef a1 = va == m ? nodes_[a].hi : a;
    BddRef b0 = vb == m ? nodes_[b].lo : b;
    BddRef b1 = vb == m ? nodes_[b].hi : b;
    return mk(m, op(a0, b0), op(a1, b1));
  }

  BddRef quantify(BddRef a, VarSetId vs, std::size_t i, bool universal) {
    if (is_terminal(a)) return a;
    const std::vector<std::uint32_t>& vars = varsets_[vs];
    std::uint32_t v = nodes_[a].var;
    while (i < vars.size() && vars[i] < v) ++i;
    if (i == vars.size()) return a;
    std::uint64_t key = (static_cast<std::uint64_t>(a) << 32) |
                        (static_cast<std::uint64_t>(vs) << 16) | i;
    auto& memo = universal ? forall_memo_ : exists_memo_;
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    tick();
    std::size_t next = vars[i] == v ? i + 1 : i;
    BddRef lo = quantify(nodes_[a].lo, vs, next, universal);
    BddRef hi = quantify(nodes_[a].hi, vs, next, universal);
    BddRef r;
    if (vars[i] == v)
      r = universal ? and_(lo, hi) : or_(lo, hi);
    else
      r = mk(v, lo, hi);
    memo.emplace(key, r);
    return r;
  }

  void tick() {
    if ((++ticks_ & 0xfff) == 0) check_deadline(deadline_, "decision diagram build");
  }

  std::vector<Node> nodes_;
  std::unordered_map<NodeKey, BddRef, NodeKeyHash> unique_;
  std::unordered_map<std::uint64_t, BddRef> and_memo_;
  std::unordered_map<std::uint64_t, BddRef> or_memo_;
  std::unordered_map<BddRef, BddRef> not_memo_;
  std::unordered_map<std::uint64_t, BddRef> exists_memo_;
  std::unordered_map<std::uint64_t, BddRef> forall_memo_;
  std::vector<std::vector<std::uint32_t>> varsets_;
  std::size_t max_nodes_;
  std::optional<std::chrono::steady_clock::time_point> deadline_;
  std::uint64_t ticks_ = 0;
};

// Compiles a leveled QBF into the store, quantifying each block eagerly as
// soon as its subformula is built so intermediate diagrams stay small.
inline BddRef build_bdd(BddStore& store, const QbfArena& Q, QbfId root,
                        const std::function<std::uint32_t(const LeveledVar&)>& order) {
  std::unordered_map<QbfId, BddRef> memo;
  std::unordered_map<std::uint32_t, VarSetId> block_sets;
  std::function<BddRef(QbfId)> rec = [&](QbfId id) -> BddRef {
    auto it = memo.find(id);
    if (it != memo.end()) return it->second;
    const QbfNode& n = Q.node(id);
    BddRef r;
    switch (n.kind) {
      case QbfKind::Const:
        r = n.value ? kBddTrue : kBddFalse;
        break;
      case QbfKind::Var:
        r = store.var(order(Q.var_info(n.var)));
        break;
      case QbfKind::Not:
        r = store.negate(rec(n.a));
        break;
      case QbfKind::And:
        r = store.and_(rec(n.a), rec(n.b));
        break;
      case QbfKind::Or:
        r = store.or_(rec(n.a), rec(n.b));
        break;
      case QbfKind::Implies:
        r = store.implies(rec(n.a), rec(n.b));
        break;
      case QbfKind::ForAll:
      case QbfKind::Exists: {
        auto bit = block_sets.find(n.block);
        VarSetId vs;
        if (bit != block_sets.end()) {
          vs = bit->second;
        } else {
          std::vector<std::uint32_t> mapped;
          for (QbfVarId v : Q.block(n.block)) mapped.push_back(order(Q.var_info(v)));
          vs = store.make_varset(std::move(mapped));
          block_sets.emplace(n.block, vs);
        }
        BddRef body = rec(n.a);
        r = n.kind == QbfKind::ForAll ? store.forall(body, vs) : store.exists(body, vs);
        break;
      }
      default:
        throw std::logic_error("unhandled qbf kind");
    }
    memo.emplace(id, r);
    return r;
  };
  return rec(root);
}

}  // namespace obmc
