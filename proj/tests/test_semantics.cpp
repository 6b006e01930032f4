#include <catch2/catch_amalgamated.hpp>

#include "gen.hpp"
#include "obmc/semantics.hpp"

using namespace obmc;

namespace {

// One agent with vocabulary {p}, atoms {p}: a four-state context.
ProblemInstance tiny() {
  ProblemInstance inst;
  FormulaId p = inst.arena.atom("p");
  inst.atoms.add(inst.arena.atom_id("p"));
  inst.vocab = VocabularyProfile::make(inst.arena, AgentSet::range(1), {{p}});
  inst.initial.bases = {{p}};
  inst.initial.valuation = {true};
  return inst;
}

}  // namespace

TEST_CASE("satisfaction of the base language", "[semantics]") {
  ProblemInstance inst = tiny();
  FormulaArena& A = inst.arena;
  FormulaId p = A.atom("p");
  const AgentSet& ag = inst.agents();

  CHECK(sat0(A, inst.atoms, ag, inst.initial, p));
  CHECK_FALSE(sat0(A, inst.atoms, ag, inst.initial, A.not_(p)));
  CHECK(sat0(A, inst.atoms, ag, inst.initial, A.top()));
  CHECK_FALSE(sat0(A, inst.atoms, ag, inst.initial, A.bottom()));
  CHECK(sat0(A, inst.atoms, ag, inst.initial, A.explicit_belief(1, p)));
  CHECK_FALSE(sat0(A, inst.atoms, ag, inst.initial, A.explicit_belief(1, A.not_(p))));
  // Unknown agents and undeclared atoms are simply false.
  CHECK_FALSE(sat0(A, inst.atoms, ag, inst.initial, A.explicit_belief(7, p)));
  CHECK_FALSE(sat0(A, inst.atoms, ag, inst.initial, A.atom("nope")));
  CHECK_THROWS_AS(sat0(A, inst.atoms, ag, inst.initial, A.at_least(1, p)),
                  std::invalid_argument);
}

TEST_CASE("belief membership is modulo the normal form", "[semantics]") {
  ProblemInstance inst;
  FormulaArena& A = inst.arena;
  FormulaId p = A.atom("p");
  FormulaId q = A.atom("q");
  inst.atoms.add(A.atom_id("p"));
  inst.atoms.add(A.atom_id("q"));
  FormulaId surface = A.or_(p, q);
  inst.vocab = VocabularyProfile::make(A, AgentSet::range(1), {{surface}});
  inst.initial.bases = {{surface}};
  inst.initial.valuation = {false, false};

  FormulaId desugared = A.not_(A.and_(A.not_(p), A.not_(q)));
  CHECK(sat0(A, inst.atoms, inst.agents(), inst.initial,
             A.explicit_belief(1, desugared)));
  CHECK(base_contains(A, inst.initial, 0, desugared));
  CHECK_FALSE(base_contains(A, inst.initial, 0, A.and_(p, q)));
}

TEST_CASE("the epistemic relation is computed from the base", "[semantics]") {
  ProblemInstance inst = tiny();
  FormulaArena& A = inst.arena;
  FormulaId p = A.atom("p");

  State sat_p{{{}}, {true}};
  State no_p{{{}}, {false}};
  CHECK(epistemic_related(A, inst.atoms, inst.agents(), inst.initial, sat_p, 1));
  CHECK_FALSE(epistemic_related(A, inst.atoms, inst.agents(), inst.initial, no_p, 1));
  // An empty base relates to everything.
  CHECK(epistemic_related(A, inst.atoms, inst.agents(), no_p, no_p, 1));
  CHECK_THROWS_AS(epistemic_related(A, inst.atoms, inst.agents(), inst.initial, no_p, 4),
                  std::invalid_argument);
}

TEST_CASE("expansion adds to one base and nothing else", "[semantics]") {
  ProblemInstance inst = tiny();
  FormulaArena& A = inst.arena;
  FormulaId q = A.atom("q");

  State s2 = expand_state(A, inst.agents(), inst.initial, 1, q);
  CHECK(s2.bases[0].size() == 2);
  CHECK(base_contains(A, s2, 0, q));
  CHECK(inst.initial.bases[0].size() == 1);
  CHECK(s2.valuation == inst.initial.valuation);
  // Members are sets: re-adding is a no-op, even through the normal form.
  State s3 = expand_state(A, inst.agents(), s2, 1, A.not_(A.not_(q)) /* distinct */);
  CHECK(s3.bases[0].size() == 3);
  State s4 = expand_state(A, inst.agents(), s3, 1, q);
  CHECK(s4.bases[0].size() == 3);
}

TEST_CASE("the universal context enumerates every state once", "[semantics]") {
  ProblemInstance inst = tiny();
  UniversalContext ctx(inst.vocab, inst.atoms);
  REQUIRE(ctx.bit_width() == 2);

  ContextEnumerator en(ctx);
  CHECK(en.state_count() == 4);
  std::set<std::pair<bool, bool>> seen;
  while (auto s = en.next())
    seen.insert({!s->bases[0].empty(), s->valuation[0]});
  CHECK(seen.size() == 4);

  CHECK_THROWS_AS(ContextEnumerator(ctx, 1), EnumerationCapExceeded);
}

TEST_CASE("explicit-state verdicts on a one-agent context", "[semantics]") {
  ProblemInstance inst = tiny();
  FormulaArena& A = inst.arena;
  FormulaId p = A.atom("p");
  UniversalContext ctx(inst.vocab, inst.atoms);

  // The base {p} relates exactly to the states where p holds.
  CHECK(check_direct(A, ctx, inst.initial, A.at_least(1, p)));
  CHECK(check_direct(A, ctx, inst.initial, A.at_most(1, A.not_(p))));
  CHECK(check_direct(A, ctx, inst.initial, A.only(1, p)));
  CHECK_FALSE(check_direct(A, ctx, inst.initial, A.only(1, A.top())));
  CHECK_FALSE(check_direct(A, ctx, inst.initial, A.at_least(1, A.explicit_belief(1, p))));

  // With an empty base every state is related.
  State open{{{}}, {true}};
  CHECK_FALSE(check_direct(A, ctx, open, A.at_least(1, p)));
  CHECK(check_direct(A, ctx, open, A.at_least(1, A.top())));
  CHECK(check_direct(A, ctx, open, A.only(1, A.top())));
  CHECK(check_direct(A, ctx, open, A.at_most(1, A.bottom())));
}

TEST_CASE("explicit-state checking covers expansions", "[semantics]") {
  ProblemInstance inst = tiny();
  FormulaArena& A = inst.arena;
  FormulaId p = A.atom("p");
  UniversalContext ctx(inst.vocab, inst.atoms);
  State open{{{}}, {true}};

  CHECK_FALSE(check_direct(A, ctx, open, A.explicit_belief(1, p)));
  CHECK(check_direct(A, ctx, open, A.expand(1, p, A.explicit_belief(1, p))));
  CHECK(check_direct(A, ctx, open, A.expand(1, p, A.at_least(1, p))));
  CHECK(check_direct(A, ctx, open, A.expand(1, p, A.only(1, p))));
  // Expanding with an undeclared atom empties the related set: no context
  // state satisfies it, so implicit belief becomes vacuous.
  FormulaId q = A.atom("q");
  CHECK(check_direct(A, ctx, open, A.expand(1, q, A.explicit_belief(1, q))));
  CHECK(check_direct(A, ctx, open, A.expand(1, q, A.at_least(1, A.bottom()))));
  CHECK_FALSE(check_direct(A, ctx, open, A.expand(1, q, A.explicit_belief(1, p))));
}

TEST_CASE("oversized contexts are refused up front", "[semantics]") {
  ProblemInstance inst;
  FormulaArena& A = inst.arena;
  std::vector<FormulaId> row;
  for (int i = 0; i < 30; ++i) {
    std::string name = "p" + std::to_string(i);
    inst.atoms.add(A.atom_id(name));
    row.push_back(A.atom(name));
  }
  inst.vocab = VocabularyProfile::make(A, AgentSet::range(1), {row});
  inst.initial.bases = {{}};
  inst.initial.valuation.assign(30, false);
  inst.query = A.at_least(1, A.atom("p0"));

  Budget b;
  b.enumeration_cap_bits = 24;
  CHECK_THROWS_AS(check_direct(inst, inst.query, b), EnumerationCapExceeded);
}

TEST_CASE("deadlines interrupt long enumerations", "[semantics]") {
  ProblemInstance inst;
  FormulaArena& A = inst.arena;
  std::vector<FormulaId> row;
  for (int i = 0; i < 10; ++i) {
    std::string name = "p" + std::to_string(i);
    inst.atoms.add(A.atom_id(name));
    row.push_back(A.atom(name));
  }
  inst.vocab = VocabularyProfile::make(A, AgentSet::range(1), {row});
  inst.initial.bases = {{}};
  inst.initial.valuation.assign(10, false);
  // Nested boxes with an irrefutable body over a 20-bit context: the sweeps
  // cannot short-circuit, so the deadline must fire.
  inst.query = A.at_least(1, A.at_least(1, A.top()));

  Budget b;
  b.timeout = std::chrono::milliseconds(30);
  CHECK_THROWS_AS(check_direct(inst, inst.query, b), ResourceExhausted);
}
