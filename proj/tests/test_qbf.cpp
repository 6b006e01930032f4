#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "gen.hpp"
#include "obmc/qbf.hpp"
#include "obmc/semantics.hpp"
#include "qdimacs_eval.hpp"

using namespace obmc;

namespace {

ProblemInstance two_agent() {
  ProblemInstance inst;
  FormulaArena& A = inst.arena;
  FormulaId p = A.atom("p");
  FormulaId q = A.atom("q");
  inst.atoms.add(A.atom_id("p"));
  inst.atoms.add(A.atom_id("q"));
  inst.vocab = VocabularyProfile::make(A, AgentSet::range(2), {{p, A.not_(q)}, {q}});
  inst.initial.bases = {{p}, {q}};
  inst.initial.valuation = {true, false};
  return inst;
}

}  // namespace

TEST_CASE("level blocks cover atoms and vocabulary slots", "[qbf]") {
  ProblemInstance inst = two_agent();
  QbfArena Q;
  Translator t(Q, inst.arena, inst.vocab, inst.atoms);

  auto b0 = t.level_block(0);
  auto b1 = t.level_block(1);
  REQUIRE(b0.size() == inst.atoms.size() + inst.vocab.total_width());
  REQUIRE(b1.size() == b0.size());
  std::set<QbfVarId> all(b0.begin(), b0.end());
  all.insert(b1.begin(), b1.end());
  CHECK(all.size() == b0.size() + b1.size());

  CHECK(var_name(inst.arena, Q, b0[0]) == "p@0");
  CHECK(var_name(inst.arena, Q, b0[1]) == "q@0");
  CHECK(var_name(inst.arena, Q, b0[2]) == "tri1:p@0");
  CHECK(var_name(inst.arena, Q, b1[3]) == "tri1:~q@1");
  CHECK(var_name(inst.arena, Q, b1[4]) == "tri2:q@1");
}

TEST_CASE("beliefs outside the vocabulary translate to false", "[qbf]") {
  ProblemInstance inst = two_agent();
  FormulaArena& A = inst.arena;
  QbfArena Q;
  Translator t(Q, A, inst.vocab, inst.atoms);

  QbfId out = t(A.explicit_belief(2, A.atom("p")));
  REQUIRE(Q.node(out).kind == QbfKind::Const);
  CHECK_FALSE(Q.node(out).value);

  QbfId in = t(A.explicit_belief(1, A.atom("p")));
  CHECK(Q.node(in).kind == QbfKind::Var);
  // A double negation is a different formula, hence outside the vocabulary.
  QbfId doubled = t(A.explicit_belief(1, A.not_(A.not_(A.atom("p")))));
  CHECK(Q.node(doubled).kind == QbfKind::Const);
  CHECK_FALSE(Q.node(doubled).value);
  // An undeclared atom is false at every context state.
  QbfId stray = t(A.at_least(1, A.atom("undeclared")));
  REQUIRE(Q.node(stray).kind == QbfKind::ForAll);

  CHECK_THROWS_AS(t(A.only(1, A.atom("p"))), std::invalid_argument);
  CHECK_THROWS_AS(t(A.expand(1, A.atom("p"), A.atom("p"))), std::invalid_argument);

  // Derived connectives do identify through the normal form.
  ProblemInstance other;
  FormulaArena& B = other.arena;
  FormulaId p = B.atom("p");
  FormulaId q = B.atom("q");
  other.atoms.add(B.atom_id("p"));
  other.atoms.add(B.atom_id("q"));
  other.vocab = VocabularyProfile::make(B, AgentSet::range(1), {{B.or_(p, q)}});
  QbfArena Q2;
  Translator t2(Q2, B, other.vocab, other.atoms);
  QbfId surface = t2(B.explicit_belief(1, B.or_(p, q)));
  QbfId desugared = t2(B.explicit_belief(1, B.not_(B.and_(B.not_(p), B.not_(q)))));
  REQUIRE(Q2.node(surface).kind == QbfKind::Var);
  REQUIRE(Q2.node(desugared).kind == QbfKind::Var);
  CHECK(Q2.node(surface).var == Q2.node(desugared).var);
}

TEST_CASE("grounded translation freezes the actual state", "[qbf]") {
  ProblemInstance inst = two_agent();
  FormulaArena& A = inst.arena;
  QbfArena Q;
  Translator t(Q, A, inst.vocab, inst.atoms, &inst.initial);

  auto value = [&](FormulaId f) {
    QbfId r = t(f);
    REQUIRE(Q.node(r).kind == QbfKind::Const);
    return Q.node(r).value;
  };
  CHECK(value(A.atom("p")));
  CHECK_FALSE(value(A.atom("q")));
  CHECK_FALSE(value(A.atom("undeclared")));
  CHECK(value(A.explicit_belief(1, A.atom("p"))));
  CHECK_FALSE(value(A.explicit_belief(1, A.atom("q"))));
  CHECK(value(A.and_(A.atom("p"), A.explicit_belief(2, A.atom("q")))));
}

TEST_CASE("state descriptions demand vocabulary membership", "[qbf]") {
  ProblemInstance inst = two_agent();
  FormulaArena& A = inst.arena;
  QbfArena Q;
  CHECK_NOTHROW(describe_state(Q, A, inst.vocab, inst.atoms, inst.initial));

  State stray = inst.initial;
  stray.bases[0].push_back(A.and_(A.atom("p"), A.atom("q")));
  CHECK_THROWS_AS(describe_state(Q, A, inst.vocab, inst.atoms, stray),
                  std::invalid_argument);
}

TEST_CASE("the reference solver handles quantifier order", "[qbf]") {
  // forall x exists y (x <-> y) holds; swapping the prefix refutes it.
  CHECK(qdimacs::evaluate("p cnf 2 2\na 1 0\ne 2 0\n1 -2 0\n-1 2 0\n"));
  CHECK_FALSE(qdimacs::evaluate("p cnf 2 2\ne 2 0\na 1 0\n1 -2 0\n-1 2 0\n"));
  // Free variables act as outermost existentials.
  CHECK(qdimacs::evaluate("p cnf 1 1\n1 -1 0\n"));
  CHECK_FALSE(qdimacs::evaluate("p cnf 1 2\n1 0\n-1 0\n"));
  CHECK_FALSE(qdimacs::evaluate("p cnf 1 1\na 1 0\n1 0\n"));

  qdimacs::Problem pb = qdimacs::parse("c map 1 x@0\np cnf 1 1\ne 1 0\n1 0\n");
  REQUIRE(pb.var_map.count(1) == 1);
  CHECK(pb.var_map.at(1) == "x@0");
  CHECK_THROWS(qdimacs::parse("e 1 0\n1 0\n"));
}

TEST_CASE("constant sentences export as degenerate files", "[qbf]") {
  FormulaArena A;
  QbfArena Q;
  CHECK(qdimacs::evaluate(export_qdimacs(Q, A, Q.constant(true))));
  CHECK_FALSE(qdimacs::evaluate(export_qdimacs(Q, A, Q.constant(false))));
}

TEST_CASE("exported files agree with explicit-state checking", "[qbf]") {
  gen::Rng rng(20240817);
  int checked = 0;
  for (int round = 0; round < 60; ++round) {
    ProblemInstance inst = gen::random_instance(rng, 6);
    gen::FormulaGen fg = gen::generator_for(inst, rng);
    FormulaId raw = fg.modal(2, 3);
    FormulaId query = inst.arena.expand_only(raw);

    bool ref = check_direct(inst, query);
    QbfArena Q;
    QbfId sentence = proposition1_sentence(Q, inst.arena, inst.vocab, inst.atoms,
                                           inst.initial, query);
    std::string text = export_qdimacs(Q, inst.arena, sentence);
    qdimacs::Problem pb = qdimacs::parse(text);

    // Audit the emitted file before trusting its verdict.
    std::set<int> quantified;
    for (const auto& [q, vars] : pb.prefix)
      for (int v : vars) {
        REQUIRE(v >= 1);
        REQUIRE(v <= pb.nvars);
        REQUIRE(quantified.insert(v).second);
      }
    for (const auto& [v, name] : pb.var_map) {
      REQUIRE(v >= 1);
      REQUIRE(v <= pb.nvars);
      REQUIRE(name.find('@') != std::string::npos);
    }

    INFO("round " << round << ": " << print_formula(inst.arena, query));
    bool qbf = qdimacs::evaluate(pb);
    REQUIRE(qbf == ref);
    ++checked;
  }
  CHECK(checked == 60);
}
