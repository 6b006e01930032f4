#include <catch2/catch_amalgamated.hpp>

#include "gen.hpp"
#include "obmc/formula.hpp"
#include "obmc/parser.hpp"

using namespace obmc;

TEST_CASE("arena hash-conses structurally equal formulas", "[formula]") {
  FormulaArena A;
  FormulaId p = A.atom("p");
  FormulaId q = A.atom("q");
  CHECK(p == A.atom("p"));
  CHECK(A.and_(p, q) == A.and_(p, q));
  CHECK(A.and_(p, q) != A.and_(q, p));
  CHECK(A.not_(p) == A.not_(A.atom("p")));
  CHECK(A.at_least(1, p) != A.at_least(2, p));
  CHECK(A.at_least(1, p) != A.at_most(1, p));
}

TEST_CASE("language levels are tracked", "[formula]") {
  FormulaArena A;
  FormulaId p = A.atom("p");
  FormulaId q = A.atom("q");
  CHECK(A.is_l0(p));
  CHECK(A.is_l0(A.xor_(p, A.not_(q))));
  CHECK(A.is_l0(A.explicit_belief(1, A.explicit_belief(2, p))));
  CHECK_FALSE(A.is_l0(A.at_least(1, p)));
  CHECK_FALSE(A.is_l0(A.only(1, p)));
  CHECK_FALSE(A.is_l0(A.expand(1, p, q)));

  CHECK_THROWS_AS(A.explicit_belief(1, A.at_least(2, p)), std::invalid_argument);
  CHECK_THROWS_AS(A.expand(1, A.only(2, p), q), std::invalid_argument);
}

TEST_CASE("modal depth counts nesting, not expansions", "[formula]") {
  FormulaArena A;
  FormulaId p = A.atom("p");
  CHECK(modal_depth(A, p) == 0);
  CHECK(modal_depth(A, A.explicit_belief(1, p)) == 0);
  CHECK(modal_depth(A, A.at_least(1, p)) == 1);
  CHECK(modal_depth(A, A.only(2, A.at_most(1, p))) == 2);
  CHECK(modal_depth(A, A.and_(A.at_least(1, p), p)) == 1);
  // The reduction principles push an expansion through without nesting.
  FormulaId dyn = A.expand(1, p, A.at_least(1, p));
  CHECK(modal_depth(A, dyn) == 1);
}

TEST_CASE("normalization rewrites derived connectives", "[formula]") {
  FormulaArena A;
  FormulaId p = A.atom("p");
  FormulaId q = A.atom("q");
  CHECK(A.normalize(A.or_(p, q)) == A.not_(A.and_(A.not_(p), A.not_(q))));
  CHECK(A.normalize(A.implies(p, q)) == A.not_(A.and_(p, A.not_(q))));
  CHECK(A.normalize(A.xor_(p, q)) ==
        A.and_(A.not_(A.and_(p, q)), A.not_(A.and_(A.not_(p), A.not_(q)))));

  gen::Rng rng(11);
  gen::FormulaGen fg(A, rng, {A.atom_id("p"), A.atom_id("q")}, {1, 2});
  for (int i = 0; i < 200; ++i) {
    FormulaId f = fg.modal(2, 3);
    FormulaId n = A.normalize(f);
    CHECK(A.normalize(n) == n);
    for (FormulaId g : subformulas(A, n)) {
      Kind k = A.kind(g);
      CHECK(k != Kind::Or);
      CHECK(k != Kind::Implies);
      CHECK(k != Kind::Iff);
      CHECK(k != Kind::Xor);
    }
  }
}

TEST_CASE("only-believing unfolds into the two implicit modalities", "[formula]") {
  FormulaArena A;
  FormulaId p = A.atom("p");
  FormulaId body = A.and_(p, A.atom("q"));
  FormulaId got = A.expand_only(A.only(3, body));
  CHECK(got == A.and_(A.at_least(3, body), A.at_most(3, A.not_(body))));

  gen::Rng rng(12);
  gen::FormulaGen fg(A, rng, {A.atom_id("p"), A.atom_id("q")}, {1, 2, 3});
  for (int i = 0; i < 200; ++i) {
    FormulaId f = A.expand_only(fg.dynamic(2, 3, 2));
    for (FormulaId g : subformulas(A, f)) CHECK(A.kind(g) != Kind::Only);
  }
}

TEST_CASE("subformula collection covers every child", "[formula]") {
  FormulaArena A;
  FormulaId p = A.atom("p");
  FormulaId q = A.atom("q");
  FormulaId f = A.expand(1, A.not_(p), A.at_least(2, A.implies(p, q)));
  auto subs = subformulas(A, f);
  auto has = [&](FormulaId g) {
    return std::find(subs.begin(), subs.end(), g) != subs.end();
  };
  CHECK(has(f));
  CHECK(has(A.not_(p)));
  CHECK(has(p));
  CHECK(has(q));
  CHECK(has(A.implies(p, q)));
  CHECK(has(A.at_least(2, A.implies(p, q))));

  std::set<AtomId> atoms;
  collect_atoms(A, f, atoms);
  CHECK(atoms == std::set<AtomId>{A.atom_id("p"), A.atom_id("q")});
}

TEST_CASE("vocabulary profiles deduplicate by normal form", "[formula]") {
  FormulaArena A;
  FormulaId p = A.atom("p");
  FormulaId q = A.atom("q");
  FormulaId surface = A.or_(p, q);
  FormulaId desugared = A.not_(A.and_(A.not_(p), A.not_(q)));
  auto vocab = VocabularyProfile::make(A, AgentSet::range(1), {{surface, desugared, p, p}});
  REQUIRE(vocab.elements(0).size() == 2);
  CHECK(vocab.elements(0)[0] == surface);  // first surface occurrence wins
  CHECK(vocab.elements(0)[1] == p);
  CHECK(vocab.slot_of_norm(0, A.normalize(desugared)) == 0);
  CHECK(vocab.slot_of_norm(0, A.normalize(q)) == -1);
  CHECK(vocab.total_width() == 2);

  CHECK_THROWS_AS(VocabularyProfile::make(A, AgentSet::range(1), {{A.at_least(1, p)}}),
                  std::invalid_argument);
}

TEST_CASE("pruning replaces out-of-vocabulary beliefs with falsity", "[formula]") {
  FormulaArena A;
  FormulaId p = A.atom("p");
  FormulaId q = A.atom("q");
  auto vocab = VocabularyProfile::make(A, AgentSet::range(2), {{p}, {}});
  // Agent 2 has an empty vocabulary, so believing q is impossible anywhere
  // in the context.
  FormulaId f = A.at_least(1, A.explicit_belief(2, q));
  CHECK(prune_to_vocabulary(A, f, vocab) == A.at_least(1, A.bottom()));
  CHECK(prune_to_vocabulary(A, A.explicit_belief(1, p), vocab) == A.explicit_belief(1, p));
  // A belief of a belief prunes bottom-up.
  FormulaId nested = A.explicit_belief(1, A.explicit_belief(2, q));
  CHECK(prune_to_vocabulary(A, nested, vocab) == A.bottom());
}

TEST_CASE("relevant-atom count on a small hand-checked instance", "[formula]") {
  FormulaArena A;
  FormulaId p = A.atom("p");
  FormulaId q = A.atom("q");
  auto vocab = VocabularyProfile::make(A, AgentSet::range(2), {{p}, {}});
  FormulaId query = A.at_least(1, A.and_(p, A.not_(q)));
  // Vocabulary formulas: {p}. Atoms: p, q. Induced belief atoms: tri(1,p),
  // tri(2,p). Query literals: p, ~q, q. One compound body: p & ~q.
  CHECK(ratoms(A, vocab, query) == 6);

  AtomTable atoms;
  atoms.add(A.atom_id("p"));
  atoms.add(A.atom_id("q"));
  CHECK(state_count_exponent(A, vocab, query, atoms) == 2 + 2 * 6);
}

TEST_CASE("agent sets reject duplicates and index by position", "[formula]") {
  AgentSet s = AgentSet::range(3);
  CHECK(s.size() == 3);
  CHECK(s.index_of(2) == 1);
  CHECK(s.index_of(9) == -1);
  CHECK(s.contains(3));
  CHECK_FALSE(s.contains(4));
  CHECK_THROWS_AS(AgentSet(std::vector<AgentId>{1, 1}), std::invalid_argument);
}
