#include <cctype>

#include "gblab/polynomial.hpp"

namespace gblab {

namespace {

// expr    := ['-'] term (('+'|'-') term)*
// term    := factor ('*' factor)*
// factor  := primary ['^' uint]
// primary := number | 'i' | var | '(' expr ')'
// number  := digits ['/' digits | '.' digits]
struct Parser {
  const std::string& s;
  int nvars;
  size_t pos = 0;

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }

  char peek() {
    skip_ws();
    return pos < s.size() ? s[pos] : '\0';
  }

  [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, pos); }

  std::string digits() {
    size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos == start) fail("expected digits");
    return s.substr(start, pos - start);
  }

  uint32_t parse_uint() {
    skip_ws();
    std::string d = digits();
    if (d.size() > 4) fail("exponent too large");
    return static_cast<uint32_t>(std::stoul(d));
  }

  Polynomial number() {
    std::string intpart = digits();
    if (pos < s.size() && s[pos] == '/') {
      ++pos;
      std::string den = digits();
      if (BigInt(den) == 0) fail("zero denominator");
      Rational q{BigInt(intpart), BigInt(den)};
      return Polynomial::constant(nvars, GaussianRational(q));
    }
    if (pos < s.size() && s[pos] == '.') {
      ++pos;
      std::string frac = digits();
      BigInt den = 1;
      for (size_t k = 0; k < frac.size(); ++k) den *= 10;
      Rational q(BigInt(intpart) * den + BigInt(frac), den);
      return Polynomial::constant(nvars, GaussianRational(q));
    }
    return Polynomial::constant(nvars, GaussianRational(Rational(BigInt(intpart))));
  }

  Polynomial primary() {
    char c = peek();
    if (c == '(') {
      ++pos;
      Polynomial e = expr();
      if (peek() != ')') fail("expected ')'");
      ++pos;
      return e;
    }
    if (c == 'i') {
      ++pos;
      if (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])))) fail("unexpected character after 'i'");
      return Polynomial::constant(nvars, GaussianRational(Rational(0), Rational(1)));
    }
    if (c == 'x') {
      ++pos;
      size_t at = pos;
      std::string d = digits();
      int idx = d.size() <= 4 ? std::stoi(d) : -1;
      if (idx < 0 || idx >= nvars) {
        pos = at;
        fail("variable index out of range (have x0..x" + std::to_string(nvars - 1) + ")");
      }
      return Polynomial::variable(nvars, idx);
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return number();
    fail("expected number, variable, 'i' or '('");
  }

  Polynomial factor() {
    Polynomial p = primary();
    if (peek() == '^') {
      ++pos;
      uint32_t k = parse_uint();
      Polynomial r = Polynomial::constant(nvars, GaussianRational(1));
      for (uint32_t j = 0; j < k; ++j) r = r * p;
      return r;
    }
    return p;
  }

  Polynomial term() {
    Polynomial p = factor();
    while (peek() == '*') {
      ++pos;
      p = p * factor();
    }
    // adjacency like "2x0" means an implicit product, which the grammar rejects
    char c = peek();
    if (c == 'x' || c == 'i' || c == '(' || std::isdigit(static_cast<unsigned char>(c)))
      fail("missing operator (implicit multiplication is not accepted)");
    return p;
  }

  Polynomial expr() {
    bool neg = false;
    if (peek() == '-') {
      ++pos;
      neg = true;
    }
    Polynomial p = term();
    if (neg) p = -p;
    for (;;) {
      char c = peek();
      if (c == '+') {
        ++pos;
        p = p + term();
      } else if (c == '-') {
        ++pos;
        p = p - term();
      } else {
        return p;
      }
    }
  }

  Polynomial run() {
    Polynomial p = expr();
    skip_ws();
    if (pos != s.size()) fail("trailing input");
    return p;
  }
};

}  // namespace

Polynomial parse_polynomial(const std::string& text, int num_vars) {
  if (num_vars < 0) throw std::invalid_argument("negative variable count");
  Parser p{text, num_vars};
  return p.run();
}

}  // namespace gblab
