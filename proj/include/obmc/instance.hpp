#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "obmc/parser.hpp"

namespace obmc {

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A state: one belief base per agent plus a propositional valuation.
// Base elements are L0 formulas; the stored order is the construction order
// and duplicates (by normal form) are dropped. After a dynamic expansion a
// base may contain formulas outside the agent's vocabulary.
struct State {
  std::vector<std::vector<FormulaId>> bases;  // by agent index
  std::vector<bool> valuation;                // by atom-table index
};

inline bool base_contains(FormulaArena& A, const State& s, std::size_t agent_idx,
                          FormulaId alpha) {
  FormulaId na = A.normalize(alpha);
  for (FormulaId e : s.bases.at(agent_idx))
    if (A.normalize(e) == na) return true;
  return false;
}

inline void base_insert(FormulaArena& A, State& s, std::size_t agent_idx, FormulaId alpha) {
  if (!A.is_l0(alpha))
    throw std::invalid_argument("belief base elements must be L0 formulas");
  if (!base_contains(A, s, agent_idx, alpha)) s.bases.at(agent_idx).push_back(alpha);
}

struct ProblemInstance {
  FormulaArena arena;
  AtomTable atoms;
  VocabularyProfile vocab;
  State initial;
  FormulaId query = kNoFormula;

  const AgentSet& agents() const { return vocab.agents(); }
};

namespace detail {

inline void collect_agents(const FormulaArena& A, FormulaId f, std::set<AgentId>& out) {
  const FormulaNode& n = A.node(f);
  if (is_modal(n.kind)) out.insert(n.agent);
  if (n.a != kNoFormula) collect_agents(A, n.a, out);
  if (n.b != kNoFormula) collect_agents(A, n.b, out);
}

inline void require_known_symbols(const ProblemInstance& inst, FormulaId f,
                                  const std::string& where) {
  std::set<AtomId> atoms;
  collect_atoms(inst.arena, f, atoms);
  for (AtomId a : atoms)
    if (!inst.atoms.contains(a))
      throw ValidationError(where + ": atom '" + inst.arena.atom_name(a) +
                            "' is not declared in the atoms list");
  std::set<AgentId> agents;
  collect_agents(inst.arena, f, agents);
  for (AgentId i : agents)
    if (!inst.agents().contains(i))
      throw ValidationError(where + ": unknown agent " + std::to_string(i));
}

inline AtomId parse_atom_name(FormulaArena& A, const std::string& text,
                              const std::string& where) {
  FormulaId f;
  try {
    f = parse_formula(A, text);
  } catch (const ParseError& e) {
    throw ValidationError(where + ": " + e.what());
  }
  if (A.kind(f) != Kind::Atom)
    throw ValidationError(where + ": '" + text + "' is not an atom");
  return A.node(f).atom;
}

}  // namespace detail

// Replaces the instance query, extending the atom table (and the valuation,
// with false entries) for atoms the new query introduces.
inline void set_query(ProblemInstance& inst, FormulaId q) {
  std::set<AgentId> agents;
  detail::collect_agents(inst.arena, q, agents);
  for (AgentId i : agents)
    if (!inst.agents().contains(i))
      throw ValidationError("query: unknown agent " + std::to_string(i));
  std::set<AtomId> atoms;
  collect_atoms(inst.arena, q, atoms);
  for (AtomId a : atoms) inst.atoms.add(a);
  inst.initial.valuation.resize(inst.atoms.size(), false);
  inst.query = q;
}

inline void set_query_text(ProblemInstance& inst, const std::string& text) {
  set_query(inst, parse_formula(inst.arena, text));
}

// Loads and fully validates an instance document:
//   { "agents": n,
//     "atoms": [...names...],
//     "gamma": {"1": [..formulas..], ...},
//     "base": {"1": [..formulas..], ...},
//     "valuation": [...names...],
//     "query": "formula" }
// Bases must lie inside the vocabulary (the model-checking problem requires
// the initial state to be drawn from the universal context).
inline ProblemInstance parse_instance(const std::string& document) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(document);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("instance file: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("instance file: top level must be an object");
  for (const char* field : {"agents", "atoms", "gamma", "base", "valuation", "query"})
    if (!doc.contains(field))
      throw ValidationError(std::string("instance file: missing field '") + field + "'");

  ProblemInstance inst;
  FormulaArena& A = inst.arena;

  if (!doc["agents"].is_number_integer() || doc["agents"].get<long>() < 1)
    throw ValidationError("agents: must be a positive integer");
  std::size_t n = doc["agents"].get<std::size_t>();
  AgentSet agents = AgentSet::range(n);

  if (!doc["atoms"].is_array()) throw ValidationError("atoms: must be an array of names");
  for (const auto& el : doc["atoms"]) {
    if (!el.is_string()) throw ValidationError("atoms: entries must be strings");
    inst.atoms.add(detail::parse_atom_name(A, el.get<std::string>(), "atoms"));
  }

  auto parse_rows = [&](const char* field, bool require_l0) {
    std::vector<std::vector<FormulaId>> rows(n);
    const auto& obj = doc[field];
    if (!obj.is_object())
      throw ValidationError(std::string(field) + ": must map agent ids to formula lists");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      std::size_t agent = 0;
      try {
        agent = std::stoul(it.key());
      } catch (...) {
        throw ValidationError(std::string(field) + ": bad agent key '" + it.key() + "'");
      }
      if (agent < 1 || agent > n)
        throw ValidationError(std::string(field) + ": unknown agent " + it.key());
      if (!it.value().is_array())
        throw ValidationError(std::string(field) + "[" + it.key() + "]: must be an array");
      for (const auto& el : it.value()) {
        if (!el.is_string())
          throw ValidationError(std::string(field) + "[" + it.key() +
                                "]: entries must be formula strings");
        FormulaId f;
        try {
          f = parse_formula(A, el.get<std::string>());
        } catch (const ParseError& e) {
          throw ValidationError(std::string(field) + "[" + it.key() + "]: " + e.what());
        }
        if (require_l0 && !A.is_l0(f))
          throw ValidationError(std::string(field) + "[" + it.key() + "]: '" +
                                el.get<std::string>() + "' is not an L0 formula");
        rows[agent - 1].push_back(f);
      }
    }
    return rows;
  };

  inst.vocab = VocabularyProfile::make(A, agents, parse_rows("gamma", true));

  auto base_rows = parse_rows("base", true);
  inst.initial.bases.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    for (FormulaId f : base_rows[i]) {
      if (!inst.vocab.contains_norm(i, A.normalize(f)))
        throw ValidationError("base[" + std::to_string(i + 1) + "]: formula '" +
                              print_formula(A, f) +
                              "' is outside the agent's vocabulary (the initial state "
                              "must lie in the universal context)");
      base_insert(A, inst.initial, i, f);
    }

  if (!doc["valuation"].is_array())
    throw ValidationError("valuation: must be an array of atom names");
  inst.initial.valuation.assign(inst.atoms.size(), false);
  for (const auto& el : doc["valuation"]) {
    if (!el.is_string()) throw ValidationError("valuation: entries must be strings");
    AtomId a = detail::parse_atom_name(A, el.get<std::string>(), "valuation");
    int idx = inst.atoms.index_of(a);
    if (idx < 0)
      throw ValidationError("valuation: atom '" + A.atom_name(a) +
                            "' is not declared in the atoms list");
    inst.initial.valuation[idx] = true;
  }

  if (!doc["query"].is_string()) throw ValidationError("query: must be a formula string");
  FormulaId q;
  try {
    q = parse_formula(A, doc["query"].get<std::string>());
  } catch (const ParseError& e) {
    throw ValidationError(std::string("query: ") + e.what());
  }
  detail::require_known_symbols(inst, q, "query");
  inst.query = q;

  // Everything mentioned anywhere must be declared.
  for (std::size_t i = 0; i < n; ++i)
    for (FormulaId f : inst.vocab.elements(i))
      detail::require_known_symbols(inst, f, "gamma[" + std::to_string(i + 1) + "]");

  return inst;
}

inline std::string print_instance(const ProblemInstance& inst) {
  nlohmann::ordered_json doc;
  doc["agents"] = inst.agents().size();
  auto& A = inst.arena;
  std::vector<std::string> atom_names;
  for (AtomId a : inst.atoms.atoms()) atom_names.push_back(A.atom_name(a));
  doc["atoms"] = atom_names;
  nlohmann::ordered_json gamma = nlohmann::ordered_json::object();
  nlohmann::ordered_json base = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < inst.agents().size(); ++i) {
    std::vector<std::string> gs, bs;
    for (FormulaId f : inst.vocab.elements(i)) gs.push_back(print_formula(A, f));
    for (FormulaId f : inst.initial.bases[i]) bs.push_back(print_formula(A, f));
    gamma[std::to_string(inst.agents().ids[i])] = gs;
    base[std::to_string(inst.agents().ids[i])] = bs;
  }
  doc["gamma"] = gamma;
  doc["base"] = base;
  std::vector<std::string> val;
  for (std::size_t j = 0; j < inst.atoms.size(); ++j)
    if (inst.initial.valuation[j]) val.push_back(A.atom_name(inst.atoms.atoms()[j]));
  doc["valuation"] = val;
  doc["query"] = inst.query == kNoFormula ? "" : print_formula(A, inst.query);
  return doc.dump(2) + "\n";
}

}  // namespace obmc
