#pragma once

#include <cctype>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "obmc/formula.hpp"

namespace obmc {

struct ParseError : std::runtime_error {
  int line;
  int col;
  ParseError(int line_, int col_, const std::string& what_)
      : std::runtime_error("parse error at " + std::to_string(line_) + ":" +
                           std::to_string(col_) + ": " + what_),
        line(line_),
        col(col_) {}
};

namespace detail {

enum class Tok {
  End,
  Ident,
  Int,
  True,
  False,
  KwB,
  KwK,
  KwW,
  KwO,
  Tilde,
  Amp,
  Pipe,
  Caret,
  Arrow,
  IffArrow,
  LParen,
  RParen,
  LBracket,
  RBracket,
  Plus,
  Comma,
};

inline const char* tok_name(Tok t) {
  switch (t) {
    case Tok::End: return "end of input";
    case Tok::Ident: return "identifier";
    case Tok::Int: return "integer";
    case Tok::True: return "'true'";
    case Tok::False: return "'false'";
    case Tok::KwB: return "'B'";
    case Tok::KwK: return "'K'";
    case Tok::KwW: return "'W'";
    case Tok::KwO: return "'O'";
    case Tok::Tilde: return "'~'";
    case Tok::Amp: return "'&'";
    case Tok::Pipe: return "'|'";
    case Tok::Caret: return "'^'";
    case Tok::Arrow: return "'->'";
    case Tok::IffArrow: return "'<->'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Plus: return "'+'";
    case Tok::Comma: return "','";
  }
  return "?";
}

struct Token {
  Tok kind;
  std::string text;
  long value = 0;
  int line = 1;
  int col = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_ws();
    Token t;
    t.line = line_;
    t.col = col_;
    if (pos_ >= src_.size()) {
      t.kind = Tok::End;
      return t;
    }
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        advance();
      t.text = std::string(src_.substr(start, pos_ - start));
      if (t.text == "true")
        t.kind = Tok::True;
      else if (t.text == "false")
        t.kind = Tok::False;
      else if (t.text == "B")
        t.kind = Tok::KwB;
      else if (t.text == "K")
        t.kind = Tok::KwK;
      else if (t.text == "W")
        t.kind = Tok::KwW;
      else if (t.text == "O")
        t.kind = Tok::KwO;
      else
        t.kind = Tok::Ident;
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
        advance();
      t.kind = Tok::Int;
      t.text = std::string(src_.substr(start, pos_ - start));
      t.value = std::stol(t.text);
      return t;
    }
    switch (c) {
      case '~': advance(); t.kind = Tok::Tilde; return t;
      case '&': advance(); t.kind = Tok::Amp; return t;
      case '|': advance(); t.kind = Tok::Pipe; return t;
      case '^': advance(); t.kind = Tok::Caret; return t;
      case '(': advance(); t.kind = Tok::LParen; return t;
      case ')': advance(); t.kind = Tok::RParen; return t;
      case '[': advance(); t.kind = Tok::LBracket; return t;
      case ']': advance(); t.kind = Tok::RBracket; return t;
      case '+': advance(); t.kind = Tok::Plus; return t;
      case ',': advance(); t.kind = Tok::Comma; return t;
      case '-':
        advance();
        if (pos_ < src_.size() && src_[pos_] == '>') {
          advance();
          t.kind = Tok::Arrow;
          return t;
        }
        throw ParseError(t.line, t.col, "expected '->'");
      case '<':
        advance();
        if (pos_ + 1 < src_.size() && src_[pos_] == '-' && src_[pos_ + 1] == '>') {
          advance();
          advance();
          t.kind = Tok::IffArrow;
          return t;
        }
        throw ParseError(t.line, t.col, "expected '<->'");
      default:
        throw ParseError(t.line, t.col, std::string("unexpected character '") + c + "'");
    }
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }
  void skip_ws() {
    while (pos_ < src_.size() &&
           std::isspace(static_cast<unsigned char>(src_[pos_])))
      advance();
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  Parser(FormulaArena& arena, std::string_view src) : A_(arena), lex_(src) { bump(); }

  FormulaId parse() {
    FormulaId f = parse_iff();
    expect(Tok::End, "end of input after formula");
    return f;
  }

 private:
  void bump() { cur_ = lex_.next(); }

  [[noreturn]] void fail(const std::string& expected) {
    throw ParseError(cur_.line, cur_.col,
                     "expected " + expected + ", found " + std::string(tok_name(cur_.kind)) +
                         (cur_.text.empty() ? "" : " '" + cur_.text + "'"));
  }

  void expect(Tok t, const std::string& what) {
    if (cur_.kind != t) fail(what);
    bump();
  }

  AgentId parse_agent() {
    if (cur_.kind != Tok::Int) fail("agent id (positive integer)");
    if (cur_.value <= 0) throw ParseError(cur_.line, cur_.col, "agent id must be positive");
    AgentId i = static_cast<AgentId>(cur_.value);
    bump();
    return i;
  }

  FormulaId parse_iff() {
    FormulaId l = parse_implies();
    while (cur_.kind == Tok::IffArrow) {
      bump();
      l = A_.iff(l, parse_implies());
    }
    return l;
  }

  FormulaId parse_implies() {
    FormulaId l = parse_xor();
    if (cur_.kind == Tok::Arrow) {
      bump();
      return A_.implies(l, parse_implies());
    }
    return l;
  }

  FormulaId parse_xor() {
    FormulaId l = parse_or();
    while (cur_.kind == Tok::Caret) {
      bump();
      l = A_.xor_(l, parse_or());
    }
    return l;
  }

  FormulaId parse_or() {
    FormulaId l = parse_and();
    while (cur_.kind == Tok::Pipe) {
      bump();
      l = A_.or_(l, parse_and());
    }
    return l;
  }

  FormulaId parse_and() {
    FormulaId l = parse_unary();
    while (cur_.kind == Tok::Amp) {
      bump();
      l = A_.and_(l, parse_unary());
    }
    return l;
  }

  FormulaId parse_unary() {
    switch (cur_.kind) {
      case Tok::Tilde:
        bump();
        return A_.not_(parse_unary());
      case Tok::KwB: {
        Token kw = cur_;
        bump();
        AgentId i = parse_agent();
        FormulaId body = parse_unary();
        if (!A_.is_l0(body))
          throw ParseError(kw.line, kw.col, "explicit belief body must be an L0 formula");
        return A_.explicit_belief(i, body);
      }
      case Tok::KwK: {
        bump();
        AgentId i = parse_agent();
        return A_.at_least(i, parse_unary());
      }
      case Tok::KwW: {
        bump();
        AgentId i = parse_agent();
        return A_.at_most(i, parse_unary());
      }
      case Tok::KwO: {
        bump();
        AgentId i = parse_agent();
        return A_.only(i, parse_unary());
      }
      case Tok::LBracket: {
        Token open = cur_;
        bump();
        expect(Tok::Plus, "'+' after '['");
        AgentId i = parse_agent();
        FormulaId info = parse_iff();
        if (!A_.is_l0(info))
          throw ParseError(open.line, open.col, "expansion info must be an L0 formula");
        expect(Tok::RBracket, "']' closing the expansion");
        return A_.expand(i, info, parse_unary());
      }
      default:
        return parse_primary();
    }
  }

  FormulaId parse_primary() {
    switch (cur_.kind) {
      case Tok::True:
        bump();
        return A_.top();
      case Tok::False:
        bump();
        return A_.bottom();
      case Tok::LParen: {
        bump();
        FormulaId f = parse_iff();
        expect(Tok::RParen, "')'");
        return f;
      }
      case Tok::Ident: {
        std::string name = cur_.text;
        bump();
        if (cur_.kind == Tok::LParen) {
          bump();
          name += '(';
          bool first = true;
          for (;;) {
            if (cur_.kind != Tok::Ident && cur_.kind != Tok::Int)
              fail("atom argument (identifier or integer)");
            if (!first) name += ',';
            name += cur_.text;
            first = false;
            bump();
            if (cur_.kind == Tok::Comma) {
              bump();
              continue;
            }
            break;
          }
          expect(Tok::RParen, "')' closing the atom arguments");
          name += ')';
        }
        return A_.atom(name);
      }
      default:
        fail("a formula");
    }
  }

  FormulaArena& A_;
  Lexer lex_;
  Token cur_;
};

inline int print_prec(Kind k) {
  switch (k) {
    case Kind::Iff: return 1;
    case Kind::Implies: return 2;
    case Kind::Xor: return 3;
    case Kind::Or: return 4;
    case Kind::And: return 5;
    case Kind::Not:
    case Kind::ExplicitBelief:
    case Kind::AtLeast:
    case Kind::AtMost:
    case Kind::Only:
    case Kind::Expand:
      return 6;
    default:
      return 7;
  }
}

inline void print_rec(const FormulaArena& A, FormulaId f, std::string& out) {
  const FormulaNode& n = A.node(f);
  auto child = [&](FormulaId c, bool parens) {
    if (parens) out += '(';
    print_rec(A, c, out);
    if (parens) out += ')';
  };
  int p = print_prec(n.kind);
  switch (n.kind) {
    case Kind::Atom:
      out += A.atom_name(n.atom);
      return;
    case Kind::Top:
      out += "true";
      return;
    case Kind::Bottom:
      out += "false";
      return;
    case Kind::Not:
      out += '~';
      child(n.a, print_prec(A.kind(n.a)) < 6);
      return;
    case Kind::And:
    case Kind::Or:
    case Kind::Xor:
    case Kind::Iff: {
      const char* op = n.kind == Kind::And ? " & "
                       : n.kind == Kind::Or ? " | "
                       : n.kind == Kind::Xor ? " ^ "
                                             : " <-> ";
      child(n.a, print_prec(A.kind(n.a)) < p);
      out += op;
      child(n.b, print_prec(A.kind(n.b)) <= p);
      return;
    }
    case Kind::Implies:
      child(n.a, print_prec(A.kind(n.a)) <= p);
      out += " -> ";
      child(n.b, print_prec(A.kind(n.b)) < p);
      return;
    case Kind::ExplicitBelief:
    case Kind::AtLeast:
    case Kind::AtMost:
    case Kind::Only: {
      const char* kw = n.kind == Kind::ExplicitBelief ? "B"
                       : n.kind == Kind::AtLeast      ? "K"
                       : n.kind == Kind::AtMost       ? "W"
                                                      : "O";
      out += kw;
      out += ' ';
      out += std::to_string(n.agent);
      out += ' ';
      child(n.a, print_prec(A.kind(n.a)) < 6);
      return;
    }
    case Kind::Expand:
      out += "[+";
      out += std::to_string(n.agent);
      out += ' ';
      print_rec(A, n.a, out);
      out += "] ";
      child(n.b, print_prec(A.kind(n.b)) < 6);
      return;
  }
  throw std::logic_error("unhandled kind");
}

}  // namespace detail

inline FormulaId parse_formula(FormulaArena& arena, std::string_view text) {
  return detail::Parser(arena, text).parse();
}

inline std::string print_formula(const FormulaArena& arena, FormulaId f) {
  std::string out;
  detail::print_rec(arena, f, out);
  return out;
}

}  // namespace obmc
