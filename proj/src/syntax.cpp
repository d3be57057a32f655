#include <cctype>

#include "umt/error.hpp"
#include "umt/logic.hpp"

namespace umt {

namespace {

enum class Tok {
  Ident, EntityLit, LParen, RParen, Comma, Dot, Eq, Neq,
  In, NotIn, Not, And, Or, Arrow, DArrow, Forall, Exists, End
};

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

class Lexer {
 public:
  explicit Lexer(const std::string& s) : s_(s) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      int l = line_, c = col_;
      if (pos_ >= s_.size()) {
        out.push_back({Tok::End, "", l, c});
        return out;
      }
      char ch = s_[pos_];
      if (ch == 'C' && s_.compare(pos_, 3, "C_{") == 0) {
        advance(2);
        std::size_t start = pos_;
        int level = 0;
        do {
          if (pos_ >= s_.size()) throw ParseError("unterminated entity constant", l, c);
          if (s_[pos_] == '{') ++level;
          if (s_[pos_] == '}') --level;
          advance(1);
        } while (level > 0);
        // Strip the outer braces of C_{...}.
        out.push_back({Tok::EntityLit, s_.substr(start + 1, pos_ - start - 2), l, c});
        continue;
      }
      if (ident_start(ch)) {
        std::size_t start = pos_;
        while (pos_ < s_.size() && ident_char(s_[pos_])) advance(1);
        std::string w = s_.substr(start, pos_ - start);
        Tok k = Tok::Ident;
        if (w == "forall") k = Tok::Forall;
        else if (w == "exists") k = Tok::Exists;
        else if (w == "in") k = Tok::In;
        else if (w == "notin") k = Tok::NotIn;
        else if (w == "not") k = Tok::Not;
        else if (w == "and") k = Tok::And;
        else if (w == "or") k = Tok::Or;
        out.push_back({k, w, l, c});
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(ch)))
        throw ParseError("identifiers must start with a letter", l, c);
      auto two = s_.substr(pos_, 3);
      if (two.rfind("<->", 0) == 0) {
        advance(3);
        out.push_back({Tok::DArrow, "<->", l, c});
        continue;
      }
      if (two.rfind("->", 0) == 0) {
        advance(2);
        out.push_back({Tok::Arrow, "->", l, c});
        continue;
      }
      if (two.rfind("!=", 0) == 0) {
        advance(2);
        out.push_back({Tok::Neq, "!=", l, c});
        continue;
      }
      Tok k;
      switch (ch) {
        case '(': k = Tok::LParen; break;
        case ')': k = Tok::RParen; break;
        case ',': k = Tok::Comma; break;
        case '.': k = Tok::Dot; break;
        case '=': k = Tok::Eq; break;
        default:
          throw ParseError(std::string("unexpected character '") + ch + "'", l, c);
      }
      advance(1);
      out.push_back({k, std::string(1, ch), l, c});
    }
  }

 private:
  void advance(std::size_t n) {
    for (std::size_t i = 0; i < n && pos_ < s_.size(); ++i) {
      if (s_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
  }
  void skip_space() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) advance(1);
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  Parser(const std::string& text, const Language& lang) : toks_(Lexer(text).run()), lang_(lang) {}

  Formula formula_all() {
    Formula f = iff();
    expect(Tok::End, "end of input");
    return f;
  }

  Term term_all() {
    Term t = term();
    expect(Tok::End, "end of input");
    return t;
  }

 private:
  const Token& cur() const { return toks_[pos_]; }
  bool at(Tok k) const { return cur().kind == k; }
  Token take() { return toks_[pos_++]; }

  [[noreturn]] void fail(const std::string& msg, const Token& t) const {
    throw ParseError(msg, t.line, t.column);
  }

  Token expect(Tok k, const std::string& what) {
    if (!at(k)) {
      std::string got = cur().kind == Tok::End ? "end of input" : "'" + cur().text + "'";
      fail("expected " + what + ", got " + got, cur());
    }
    return take();
  }

  Formula iff() {
    Formula f = implies();
    while (at(Tok::DArrow)) {
      take();
      f = Formula::iff(f, implies());
    }
    return f;
  }

  Formula implies() {
    Formula f = disj();
    if (at(Tok::Arrow)) {
      take();
      return Formula::implies(f, implies());
    }
    return f;
  }

  Formula disj() {
    Formula f = conj();
    while (at(Tok::Or)) {
      take();
      f = Formula::disj(f, conj());
    }
    return f;
  }

  Formula conj() {
    Formula f = unary();
    while (at(Tok::And)) {
      take();
      f = Formula::conj(f, unary());
    }
    return f;
  }

  Formula unary() {
    if (at(Tok::Not)) {
      take();
      return Formula::neg(unary());
    }
    if (at(Tok::Forall) || at(Tok::Exists)) return quantifier();
    if (at(Tok::LParen)) {
      take();
      Formula f = iff();
      expect(Tok::RParen, "')'");
      return f;
    }
    return atom();
  }

  Formula quantifier() {
    bool universal = take().kind == Tok::Forall;
    Token v = expect(Tok::Ident, "variable");
    check_variable(v);
    if (at(Tok::In)) {
      take();
      Term bound = term();
      expect(Tok::Dot, "'.'");
      Formula body = iff();
      return universal ? Formula::bforall(v.text, bound, body)
                       : Formula::bexists(v.text, bound, body);
    }
    expect(Tok::Dot, "'.' or 'in'");
    Formula body = iff();
    return universal ? Formula::forall(v.text, body) : Formula::exists(v.text, body);
  }

  void check_variable(const Token& t) const {
    if (lang_.has_relation(t.text) || lang_.has_function(t.text))
      fail("symbol '" + t.text + "' cannot be used as a variable", t);
  }

  Formula atom() {
    if (at(Tok::Ident) && lang_.has_relation(cur().text)) {
      Token r = take();
      std::vector<Term> args = arguments(r);
      int arity = lang_.relations.at(r.text);
      if (static_cast<int>(args.size()) != arity)
        fail("arity mismatch for '" + r.text + "': expected " + std::to_string(arity) +
                 ", got " + std::to_string(args.size()),
             r);
      return Formula::rel(r.text, std::move(args));
    }
    Term lhs = term();
    switch (cur().kind) {
      case Tok::Eq:
        take();
        return Formula::eq(lhs, term());
      case Tok::Neq:
        take();
        return Formula::neg(Formula::eq(lhs, term()));
      case Tok::In:
        take();
        return Formula::mem(lhs, term());
      case Tok::NotIn:
        take();
        return Formula::neg(Formula::mem(lhs, term()));
      default:
        fail("expected '=', '!=', 'in' or 'notin'", cur());
    }
  }

  std::vector<Term> arguments(const Token& head) {
    if (!at(Tok::LParen)) fail("expected '(' after '" + head.text + "'", cur());
    take();
    std::vector<Term> args;
    if (at(Tok::RParen)) {
      take();
      return args;
    }
    while (true) {
      args.push_back(term());
      if (at(Tok::Comma)) {
        take();
        continue;
      }
      expect(Tok::RParen, "',' or ')'");
      return args;
    }
  }

  Term term() {
    if (at(Tok::EntityLit)) {
      Token t = take();
      try {
        return Term::of(parse_entity(t.text));
      } catch (const ParseError& e) {
        fail(std::string("bad entity constant: ") + e.what(), t);
      }
    }
    Token t = expect(Tok::Ident, "term");
    if (lang_.has_relation(t.text)) fail("relation symbol '" + t.text + "' used as a term", t);
    if (at(Tok::LParen)) {
      if (!lang_.has_function(t.text)) fail("unknown symbol '" + t.text + "'", t);
      std::vector<Term> args = arguments(t);
      int arity = lang_.functions.at(t.text);
      if (static_cast<int>(args.size()) != arity)
        fail("arity mismatch for '" + t.text + "': expected " + std::to_string(arity) +
                 ", got " + std::to_string(args.size()),
             t);
      if (arity == 0) return Term::constant(t.text);
      return Term::apply(t.text, std::move(args));
    }
    if (lang_.has_function(t.text)) {
      int arity = lang_.functions.at(t.text);
      if (arity != 0)
        fail("arity mismatch for '" + t.text + "': expected " + std::to_string(arity) +
                 ", got 0",
             t);
      return Term::constant(t.text);
    }
    return Term::var(t.text);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const Language& lang_;
};

// Binding strength used by the printer; quantifiers extend as far right as
// possible, so they are parenthesized whenever they are an operand.
int precedence(const Formula& f) {
  switch (f.kind()) {
    case FKind::Iff: return 1;
    case FKind::Implies: return 2;
    case FKind::Or: return 3;
    case FKind::And: return 4;
    case FKind::Not: return 5;
    case FKind::Forall:
    case FKind::Exists:
    case FKind::BForall:
    case FKind::BExists: return 0;
    default: return 6;
  }
}

void print(const Formula& f, std::string& out);

void print_operand(const Formula& f, bool parens, std::string& out) {
  if (parens) out += '(';
  print(f, out);
  if (parens) out += ')';
}

void print(const Formula& f, std::string& out) {
  switch (f.kind()) {
    case FKind::Eq:
      out += to_string(f.terms()[0]) + " = " + to_string(f.terms()[1]);
      return;
    case FKind::Mem:
      out += to_string(f.terms()[0]) + " in " + to_string(f.terms()[1]);
      return;
    case FKind::Rel: {
      out += f.symbol() + "(";
      for (std::size_t i = 0; i < f.terms().size(); ++i) {
        if (i) out += ", ";
        out += to_string(f.terms()[i]);
      }
      out += ")";
      return;
    }
    case FKind::Not: {
      const Formula& g = f.left();
      if (g.kind() == FKind::Eq) {
        out += to_string(g.terms()[0]) + " != " + to_string(g.terms()[1]);
        return;
      }
      if (g.kind() == FKind::Mem) {
        out += to_string(g.terms()[0]) + " notin " + to_string(g.terms()[1]);
        return;
      }
      out += "not ";
      print_operand(g, precedence(g) < 5, out);
      return;
    }
    case FKind::And:
    case FKind::Or:
    case FKind::Implies:
    case FKind::Iff: {
      int p = precedence(f);
      const Formula& l = f.left();
      const Formula& r = f.right();
      bool same_l = l.kind() == f.kind();
      bool same_r = r.kind() == f.kind();
      bool right_assoc = f.kind() == FKind::Implies;
      bool lp = precedence(l) < p || (same_l && right_assoc);
      bool rp = precedence(r) < p || (same_r && !right_assoc);
      const char* op = f.kind() == FKind::And ? " and "
                       : f.kind() == FKind::Or ? " or "
                       : f.kind() == FKind::Implies ? " -> "
                                                    : " <-> ";
      print_operand(l, lp, out);
      out += op;
      print_operand(r, rp, out);
      return;
    }
    case FKind::Forall:
    case FKind::Exists:
      out += f.kind() == FKind::Forall ? "forall " : "exists ";
      out += f.symbol() + " . ";
      print(f.left(), out);
      return;
    case FKind::BForall:
    case FKind::BExists:
      out += f.kind() == FKind::BForall ? "forall " : "exists ";
      out += f.symbol() + " in " + to_string(f.bound()) + " . ";
      print(f.left(), out);
      return;
  }
}

}  // namespace

Formula parse_formula(const std::string& text, const Language& lang) {
  lang.validate();
  return Parser(text, lang).formula_all();
}

Term parse_term(const std::string& text, const Language& lang) {
  lang.validate();
  return Parser(text, lang).term_all();
}

std::string to_string(const Term& t) {
  switch (t.kind) {
    case Term::Kind::Var:
    case Term::Kind::Const:
      return t.name;
    case Term::Kind::Entity:
      return "C_{" + t.entity.str() + "}";
    case Term::Kind::Apply: {
      std::string s = t.name + "(";
      for (std::size_t i = 0; i < t.args.size(); ++i) {
        if (i) s += ", ";
        s += to_string(t.args[i]);
      }
      return s + ")";
    }
  }
  return {};
}

std::string to_string(const Formula& f) {
  std::string out;
  print(f, out);
  return out;
}

}  // namespace umt
