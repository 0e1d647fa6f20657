#include "pinchlab/expr.hpp"

#include <cctype>

#include "pinchlab/errors.hpp"

namespace pinchlab {

namespace {

struct Parser {
  const std::string& s;
  std::size_t pos = 0;

  explicit Parser(const std::string& text) : s(text) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw expr_error(msg + " at position " + std::to_string(pos) + " in '" + s + "'");
  }

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos < s.size() ? s[pos] : '\0';
  }

  QuadExt parse_expr() {
    QuadExt v = parse_term();
    while (true) {
      if (eat('+'))
        v += parse_term();
      else if (eat('-'))
        v -= parse_term();
      else
        return v;
    }
  }

  QuadExt parse_term() {
    QuadExt v = parse_factor();
    while (true) {
      if (eat('*'))
        v *= parse_factor();
      else if (eat('/')) {
        QuadExt d = parse_factor();
        if (d.is_zero()) fail("division by zero");
        v /= d;
      } else
        return v;
    }
  }

  QuadExt parse_factor() {
    if (eat('-')) return -parse_factor();
    if (eat('+')) return parse_factor();
    QuadExt base = parse_primary();
    if (eat('^')) {
      long e = parse_int_exponent();
      base = base.pow(e);
    }
    return base;
  }

  long parse_int_exponent() {
    skip_ws();
    bool neg = false;
    if (eat('-')) neg = true;
    skip_ws();
    if (pos >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos])))
      fail("exponent must be an integer literal");
    long v = 0;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
      v = v * 10 + (s[pos] - '0');
      if (v > 64) fail("exponent too large");
      ++pos;
    }
    return neg ? -v : v;
  }

  QuadExt parse_primary() {
    skip_ws();
    if (pos >= s.size()) fail("unexpected end of expression");
    char c = s[pos];
    if (c == '(') {
      ++pos;
      QuadExt v = parse_expr();
      if (!eat(')')) fail("expected ')'");
      return v;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return QuadExt(parse_number());
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string name = parse_ident();
      if (name == "sqrt") {
        if (!eat('(')) fail("expected '(' after sqrt");
        QuadExt arg = parse_expr();
        if (!eat(')')) fail("expected ')' after sqrt argument");
        if (!arg.is_rational()) fail("nested radicals are not supported");
        return QuadExt::sqrt_of(arg.rational_part());
      }
      return QuadExt(RatFunc(Poly::var(intern_symbol(name))));
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string parse_ident() {
    std::size_t start = pos;
    while (pos < s.size() &&
           (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
      ++pos;
    return s.substr(start, pos - start);
  }

  // integer or decimal literal, returned exactly (1.25 -> 5/4)
  Rational parse_number() {
    BigInt ip(0);
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
      ip = ip * 10 + (s[pos] - '0');
      ++pos;
    }
    Rational v(ip);
    if (pos < s.size() && s[pos] == '.') {
      ++pos;
      BigInt fp(0), scale(1);
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
        fp = fp * 10 + (s[pos] - '0');
        scale *= 10;
        ++pos;
      }
      v += Rational(fp, scale);
    }
    return v;
  }
};

} // namespace

QuadExt parse_scalar(const std::string& text) {
  Parser p(text);
  QuadExt v = p.parse_expr();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing input");
  return v;
}

RatFunc require_ratfunc(const QuadExt& v, const std::string& what) {
  if (!v.is_rational())
    throw expr_error(what + " must be rational (no radicals): " + v.str());
  return v.rational_part();
}

Poly require_poly(const QuadExt& v, const std::string& what) {
  RatFunc r = require_ratfunc(v, what);
  if (!r.is_polynomial())
    throw expr_error(what + " must be polynomial: " + r.str());
  return r.num();
}

Rational parse_rational(const std::string& text) {
  QuadExt v = parse_scalar(text);
  RatFunc r = require_ratfunc(v, "constant");
  if (!r.is_constant()) throw expr_error("constant expected: " + text);
  return r.constant_value();
}

} // namespace pinchlab
