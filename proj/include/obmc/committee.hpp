#pragma once

#include <map>
#include <string>
#include <vector>

#include "obmc/instance.hpp"

namespace obmc {

// The selection-committee scenario: n committee members vote on m candidates
// under three rules, and each member privately knows only their own ballot.
// The benchmark family fixes m = n > 2 with member i barred from candidate i
// (their co-author).
struct CommitteeConfig {
  std::size_t n = 3;
  std::size_t m = 3;
  std::vector<std::vector<std::size_t>> coauthors;  // 1-based candidate indices, per agent

  static CommitteeConfig benchmark(std::size_t n) {
    CommitteeConfig cfg;
    cfg.n = n;
    cfg.m = n;
    cfg.coauthors.resize(n);
    for (std::size_t i = 0; i < n; ++i) cfg.coauthors[i] = {i + 1};
    return cfg;
  }

  bool is_benchmark_shape() const {
    if (m != n || n <= 2 || coauthors.size() != n) return false;
    for (std::size_t i = 0; i < n; ++i)
      if (coauthors[i] != std::vector<std::size_t>{i + 1}) return false;
    return true;
  }
};

enum class CommitteeVariant { First, Second };

namespace committee {

inline FormulaId vote(FormulaArena& A, std::size_t i, std::size_t c) {
  return A.atom("vote(" + std::to_string(i) + ",c" + std::to_string(c) + ")");
}

namespace detail {

template <typename Op>
FormulaId fold_right(FormulaArena& A, const std::vector<FormulaId>& xs, Op op, FormulaId empty) {
  if (xs.empty()) return empty;
  FormulaId acc = xs.back();
  for (std::size_t k = xs.size() - 1; k-- > 0;) acc = op(A, xs[k], acc);
  return acc;
}

inline FormulaId and_all(FormulaArena& A, const std::vector<FormulaId>& xs) {
  return fold_right(
      A, xs, [](FormulaArena& a, FormulaId l, FormulaId r) { return a.and_(l, r); }, A.top());
}

inline FormulaId or_all(FormulaArena& A, const std::vector<FormulaId>& xs) {
  return fold_right(
      A, xs, [](FormulaArena& a, FormulaId l, FormulaId r) { return a.or_(l, r); }, A.bottom());
}

inline FormulaId xor_all(FormulaArena& A, const std::vector<FormulaId>& xs) {
  return fold_right(
      A, xs, [](FormulaArena& a, FormulaId l, FormulaId r) { return a.xor_(l, r); }, A.bottom());
}

}  // namespace detail

// adm(c): candidate c is admitted to the interview, i.e. somebody voted for
// them. Stored expanded, so base membership stays purely syntactic.
inline FormulaId adm(FormulaArena& A, const CommitteeConfig& cfg, std::size_t c) {
  std::vector<FormulaId> vs;
  for (std::size_t i = 1; i <= cfg.n; ++i) vs.push_back(vote(A, i, c));
  return detail::or_all(A, vs);
}

struct CommitteeRules {
  FormulaId a1, a2, a3;
};

// a1: everyone votes for at least one candidate; a2: nobody votes for two;
// a3: nobody votes for a co-author.
inline CommitteeRules rules(FormulaArena& A, const CommitteeConfig& cfg) {
  std::vector<FormulaId> ones;
  for (std::size_t i = 1; i <= cfg.n; ++i) {
    std::vector<FormulaId> vs;
    for (std::size_t c = 1; c <= cfg.m; ++c) vs.push_back(vote(A, i, c));
    ones.push_back(detail::or_all(A, vs));
  }
  std::vector<FormulaId> excl;
  for (std::size_t i = 1; i <= cfg.n; ++i)
    for (std::size_t c = 1; c <= cfg.m; ++c)
      for (std::size_t c2 = 1; c2 <= cfg.m; ++c2)
        if (c2 != c) excl.push_back(A.implies(vote(A, i, c), A.not_(vote(A, i, c2))));
  std::vector<FormulaId> bars;
  for (std::size_t i = 1; i <= cfg.n && i <= cfg.coauthors.size(); ++i)
    for (std::size_t c : cfg.coauthors[i - 1]) bars.push_back(A.not_(vote(A, i, c)));
  return {detail::and_all(A, ones), detail::and_all(A, excl), detail::and_all(A, bars)};
}

// Who member i actually votes for: the next candidate, wrapping the last
// member back to candidate n-1.
inline std::size_t vote_of(const CommitteeConfig& cfg, std::size_t i) {
  return i < cfg.n ? i + 1 : cfg.n - 1;
}

namespace detail {

inline void require_benchmark(const CommitteeConfig& cfg) {
  if (!cfg.is_benchmark_shape())
    throw std::invalid_argument(
        "committee scenario needs m = n > 2 with coauthors {i}: {c_i}");
}

// The formulas every member believes: who is admitted, and the three rules.
inline std::vector<FormulaId> shared_beliefs(FormulaArena& A, const CommitteeConfig& cfg) {
  std::vector<FormulaId> shared;
  shared.push_back(A.not_(adm(A, cfg, 1)));
  for (std::size_t c = 2; c <= cfg.n; ++c) shared.push_back(adm(A, cfg, c));
  CommitteeRules r = rules(A, cfg);
  shared.push_back(r.a1);
  shared.push_back(r.a2);
  shared.push_back(r.a3);
  return shared;
}

}  // namespace detail

inline std::vector<std::vector<FormulaId>> bases(FormulaArena& A, const CommitteeConfig& cfg,
                                                 CommitteeVariant variant) {
  detail::require_benchmark(cfg);
  std::vector<FormulaId> shared = detail::shared_beliefs(A, cfg);
  std::vector<std::vector<FormulaId>> B(cfg.n);
  for (std::size_t i = 1; i <= cfg.n; ++i) {
    B[i - 1].push_back(vote(A, i, vote_of(cfg, i)));
    B[i - 1].insert(B[i - 1].end(), shared.begin(), shared.end());
  }
  if (variant == CommitteeVariant::Second)
    for (FormulaId g : shared) B[0].push_back(A.explicit_belief(2, g));
  return B;
}

inline AtomTable atom_table(FormulaArena& A, const CommitteeConfig& cfg) {
  AtomTable t;
  for (std::size_t i = 1; i <= cfg.n; ++i)
    for (std::size_t c = 1; c <= cfg.m; ++c)
      t.add(A.atom_id("vote(" + std::to_string(i) + ",c" + std::to_string(c) + ")"));
  return t;
}

inline VocabularyProfile vocabulary(FormulaArena& A, const CommitteeConfig& cfg,
                                    CommitteeVariant variant) {
  std::vector<std::vector<FormulaId>> rows = bases(A, cfg, variant);
  for (auto& row : rows) {
    std::size_t k = row.size();
    for (std::size_t j = 0; j < k; ++j) row.push_back(A.not_(row[j]));
  }
  return VocabularyProfile::make(A, AgentSet::range(cfg.n), std::move(rows));
}

inline State initial_state(FormulaArena& A, const CommitteeConfig& cfg, const AtomTable& atoms,
                           CommitteeVariant variant) {
  State s;
  s.bases = bases(A, cfg, variant);
  s.valuation.assign(atoms.size(), false);
  for (std::size_t i = 1; i <= cfg.n; ++i) {
    int idx = atoms.index_of(A.atom_id(
        "vote(" + std::to_string(i) + ",c" + std::to_string(vote_of(cfg, i)) + ")"));
    if (idx < 0) throw std::logic_error("vote atom missing from the table");
    s.valuation[static_cast<std::size_t>(idx)] = true;
  }
  return s;
}

// block(i): the complete description of member i's actual ballot.
inline FormulaId ballot_block(FormulaArena& A, const CommitteeConfig& cfg, std::size_t i) {
  std::size_t voted = vote_of(cfg, i);
  std::vector<FormulaId> ls;
  ls.push_back(vote(A, i, voted));
  for (std::size_t c = 1; c <= cfg.m; ++c)
    if (c != voted) ls.push_back(A.not_(vote(A, i, c)));
  return detail::and_all(A, ls);
}

// The named benchmark queries. psi1 describes every ballot; psi2 leaves
// member 1's ballot open to exactly one alternative; phi0 says member 1 only
// believes psi1 while everyone else only believes psi2; the example2 query
// probes higher-order belief; chi0 says everybody only believes psi1;
// dynamic reaches chi0 after members 2..n privately learn member 1's ballot.
inline std::map<std::string, FormulaId> queries(FormulaArena& A, const CommitteeConfig& cfg,
                                                CommitteeVariant variant) {
  detail::require_benchmark(cfg);
  (void)variant;
  std::size_t n = cfg.n;

  std::vector<FormulaId> blocks;
  for (std::size_t i = 1; i <= n; ++i) blocks.push_back(ballot_block(A, cfg, i));
  FormulaId psi1 = detail::and_all(A, blocks);

  std::vector<FormulaId> alt;
  for (std::size_t c = 2; c <= n; ++c) alt.push_back(vote(A, 1, c));
  FormulaId x1 = detail::xor_all(A, alt);
  std::vector<FormulaId> parts;
  parts.push_back(A.and_(A.not_(vote(A, 1, 1)), x1));
  for (std::size_t i = 2; i <= n; ++i) parts.push_back(blocks[i - 1]);
  FormulaId psi2 = detail::and_all(A, parts);

  std::vector<FormulaId> onlys;
  onlys.push_back(A.only(1, psi1));
  for (std::size_t i = 2; i <= n; ++i)
    onlys.push_back(A.only(static_cast<AgentId>(i), psi2));
  FormulaId phi0 = detail::and_all(A, onlys);

  FormulaId example2 = detail::and_all(
      A, {A.only(2, psi2), A.at_least(1, A.at_least(2, psi2)),
          A.not_(A.at_least(1, A.only(2, psi2)))});

  std::vector<FormulaId> all_psi1;
  for (std::size_t i = 1; i <= n; ++i) all_psi1.push_back(A.only(static_cast<AgentId>(i), psi1));
  FormulaId chi0 = detail::and_all(A, all_psi1);

  FormulaId dynamic = chi0;
  for (std::size_t j = n; j >= 2; --j)
    dynamic = A.expand(static_cast<AgentId>(j), vote(A, 1, 2), dynamic);

  return {{"psi1", psi1},   {"psi2", psi2}, {"phi0", phi0},
          {"example2", example2}, {"chi0", chi0}, {"dynamic", dynamic}};
}

inline std::string default_query_name(CommitteeVariant variant) {
  return variant == CommitteeVariant::First ? "phi0" : "example2";
}

inline ProblemInstance make_instance(std::size_t n, CommitteeVariant variant,
                                     const std::string& query_name = "") {
  CommitteeConfig cfg = CommitteeConfig::benchmark(n);
  ProblemInstance inst;
  inst.atoms = atom_table(inst.arena, cfg);
  inst.vocab = vocabulary(inst.arena, cfg, variant);
  inst.initial = initial_state(inst.arena, cfg, inst.atoms, variant);
  auto qs = queries(inst.arena, cfg, variant);
  const std::string& name = query_name.empty() ? default_query_name(variant) : query_name;
  auto it = qs.find(name);
  if (it == qs.end()) throw std::invalid_argument("unknown committee query: " + name);
  inst.query = it->second;
  return inst;
}

}  // namespace committee

}  // namespace obmc
