#include <catch2/catch_amalgamated.hpp>

#include "gen.hpp"
#include "obmc/parser.hpp"

using namespace obmc;

namespace {
FormulaId parse(FormulaArena& A, const std::string& text) { return parse_formula(A, text); }
}  // namespace

TEST_CASE("connective precedence and associativity", "[parser]") {
  FormulaArena A;
  FormulaId p = A.atom("p"), q = A.atom("q"), r = A.atom("r");
  CHECK(parse(A, "p & q | r") == A.or_(A.and_(p, q), r));
  CHECK(parse(A, "p | q & r") == A.or_(p, A.and_(q, r)));
  CHECK(parse(A, "~p & q") == A.and_(A.not_(p), q));
  CHECK(parse(A, "p -> q -> r") == A.implies(p, A.implies(q, r)));
  CHECK(parse(A, "p <-> q <-> r") == A.iff(A.iff(p, q), r));
  CHECK(parse(A, "p ^ q | r") == A.xor_(p, A.or_(q, r)));
  CHECK(parse(A, "p ^ q & r") == A.xor_(p, A.and_(q, r)));
  CHECK(parse(A, "p -> q ^ r") == A.implies(p, A.xor_(q, r)));
  CHECK(parse(A, "(p | q) & r") == A.and_(A.or_(p, q), r));
  CHECK(parse(A, "~~p") == A.not_(A.not_(p)));
}

TEST_CASE("modal operators bind tighter than connectives", "[parser]") {
  FormulaArena A;
  FormulaId p = A.atom("p"), q = A.atom("q");
  CHECK(parse(A, "K 1 p & q") == A.and_(A.at_least(1, p), q));
  CHECK(parse(A, "W 2 ~p") == A.at_most(2, A.not_(p)));
  CHECK(parse(A, "O 1 p | q") == A.or_(A.only(1, p), q));
  CHECK(parse(A, "B 3 (p & q)") == A.explicit_belief(3, A.and_(p, q)));
  CHECK(parse(A, "K 1 K 2 p") == A.at_least(1, A.at_least(2, p)));
  CHECK(parse(A, "~K 1 p") == A.not_(A.at_least(1, p)));
}

TEST_CASE("dynamic expansion brackets", "[parser]") {
  FormulaArena A;
  FormulaId p = A.atom("p"), q = A.atom("q");
  CHECK(parse(A, "[+1 p] K 1 p") == A.expand(1, p, A.at_least(1, p)));
  CHECK(parse(A, "[+2 p & q] [+1 p] q") ==
        A.expand(2, A.and_(p, q), A.expand(1, p, q)));
  CHECK(parse(A, "[+1 p] q & p") == A.and_(A.expand(1, p, q), p));
}

TEST_CASE("functional atoms are opaque names", "[parser]") {
  FormulaArena A;
  FormulaId v = parse(A, "vote(1,c2)");
  REQUIRE(A.kind(v) == Kind::Atom);
  CHECK(A.atom_name(A.node(v).atom) == "vote(1,c2)");
  CHECK(parse(A, "vote( 1 , c2 )") == v);
  CHECK(parse(A, "vote(1,c2) & vote(2,c3)") ==
        A.and_(v, A.atom("vote(2,c3)")));
}

TEST_CASE("truth constants", "[parser]") {
  FormulaArena A;
  CHECK(parse(A, "true") == A.top());
  CHECK(parse(A, "false") == A.bottom());
  CHECK(parse(A, "true & ~false") == A.and_(A.top(), A.not_(A.bottom())));
}

TEST_CASE("parse errors carry positions", "[parser]") {
  FormulaArena A;
  CHECK_THROWS_AS(parse(A, "p &"), ParseError);
  CHECK_THROWS_AS(parse(A, "p q"), ParseError);
  CHECK_THROWS_AS(parse(A, "- p"), ParseError);
  CHECK_THROWS_AS(parse(A, "(p"), ParseError);
  CHECK_THROWS_AS(parse(A, "K p"), ParseError);
  CHECK_THROWS_AS(parse(A, "K 0 p"), ParseError);
  CHECK_THROWS_AS(parse(A, ""), ParseError);
  CHECK_THROWS_AS(parse(A, "B 1 K 2 p"), ParseError);       // belief body must be L0
  CHECK_THROWS_AS(parse(A, "[+1 K 1 p] q"), ParseError);    // expansion info must be L0
  CHECK_THROWS_AS(parse(A, "p @ q"), ParseError);
  try {
    parse(A, "p &\n& q");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
    CHECK(std::string(e.what()).find("2:") != std::string::npos);
  }
}

TEST_CASE("printing round-trips through the parser", "[parser]") {
  FormulaArena A;
  gen::Rng rng(21);
  gen::FormulaGen fg(A, rng, {A.atom_id("p"), A.atom_id("q"), A.atom_id("vote(1,c2)")},
                     {1, 2, 3});
  for (int i = 0; i < 500; ++i) {
    FormulaId f = fg.dynamic(3, 4, 2);
    std::string text = print_formula(A, f);
    CAPTURE(text);
    CHECK(parse_formula(A, text) == f);
  }
}

TEST_CASE("printer output for nested operators is readable", "[parser]") {
  FormulaArena A;
  FormulaId p = A.atom("p"), q = A.atom("q");
  CHECK(print_formula(A, A.and_(A.or_(p, q), q)) == "(p | q) & q");
  CHECK(print_formula(A, A.or_(A.and_(p, q), q)) == "p & q | q");
  CHECK(print_formula(A, A.at_least(1, A.implies(p, q))) == "K 1 (p -> q)");
  CHECK(print_formula(A, A.expand(2, p, A.at_least(1, q))) == "[+2 p] K 1 q");
  CHECK(print_formula(A, A.not_(A.at_least(1, p))) == "~K 1 p");
}
