#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "gblab/rational.hpp"

namespace gblab {

using Exponents = std::vector<uint32_t>;

inline uint32_t total_degree(const Exponents& e) {
  uint32_t d = 0;
  for (uint32_t k : e) d += k;
  return d;
}

// Display order: higher total degree first, then lex with x0 heaviest.
struct GradedLexBefore {
  bool operator()(const Exponents& a, const Exponents& b) const {
    uint32_t da = total_degree(a), db = total_degree(b);
    if (da != db) return da > db;
    return a > b;  // vector lex, larger leading exponent first
  }
};

// Sparse polynomial over Q(i) with a fixed variable count. Zero coefficients
// are never stored.
class Polynomial {
 public:
  using TermMap = std::map<Exponents, GaussianRational, GradedLexBefore>;

  explicit Polynomial(int num_vars = 0) : nvars_(num_vars) {}

  static Polynomial constant(int num_vars, GaussianRational c);
  static Polynomial variable(int num_vars, int index);
  static Polynomial monomial(int num_vars, Exponents e, GaussianRational c);

  int num_vars() const { return nvars_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;       // -1 for the zero polynomial
  int min_degree() const;   // order of vanishing at the origin
  bool is_homogeneous() const;

  void add_term(const Exponents& e, const GaussianRational& c);
  GaussianRational coefficient(const Exponents& e) const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator-() const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial scaled(const GaussianRational& c) const;
  bool operator==(const Polynomial& o) const { return nvars_ == o.nvars_ && terms_ == o.terms_; }

  Polynomial derivative(int var) const;
  // f(x + p), exact Taylor shift.
  Polynomial translated(const std::vector<GaussianRational>& p) const;
  // Substitute x_chart = 1; remaining variables keep ascending index order.
  Polynomial dehomogenized(int chart) const;
  // Drop every term of total degree > d.
  Polynomial truncated(int d) const;

  GaussianRational evaluate(const std::vector<GaussianRational>& x) const;
  cplx evaluate(const std::vector<cplx>& x) const;

  std::string to_string() const;  // graded-lex, reparses to the same polynomial

 private:
  int nvars_;
  TermMap terms_;
};

// Parse grammar: variables x0..x{n-1}, integer / p/q / decimal literals, the
// imaginary unit i, operators + - * ^ and parentheses. No implicit
// multiplication. Decimals become exact rationals. Errors carry a position.
Polynomial parse_polynomial(const std::string& text, int num_vars);

struct ParseError : std::runtime_error {
  size_t position;
  ParseError(const std::string& msg, size_t pos)
      : std::runtime_error(msg + " at position " + std::to_string(pos)), position(pos) {}
};

// F(A y): substitution of each x_i by the linear form sum_j A(i,j) y_j.
// A has F.num_vars() rows; the result has A.cols variables.
Polynomial substitute_linear(const Polynomial& f, const GaussMat& a);

// Invertible projective-linear change of coordinates on P^{n-1} given by an
// n x n matrix. Entries derived from doubles are dyadic rationals, so
// composition stays exact either way; `exact` records the provenance.
struct AffineMap {
  GaussMat m;
  bool exact = true;
  double condition = 1.0;

  static AffineMap from_exact(GaussMat m);
  static AffineMap from_complex(int n, const std::vector<cplx>& row_major);
  AffineMap inverse() const;
  int dim() const { return m.rows; }
};

Polynomial linear_substitute(const Polynomial& f, const AffineMap& a);

// Flat numeric mirror for evaluation-heavy paths. Exponents are capped at 8
// variables which covers every ambient dimension in scope.
struct CompiledPoly {
  struct Term {
    std::array<uint8_t, 8> e;
    int deg;
    cplx c;
  };
  int nvars = 0;
  int degree = 0;
  double coeff_scale = 0.0;  // max |c|
  std::vector<Term> terms;

  cplx eval(const cplx* x) const;
  void gradient(const cplx* x, cplx* out) const;
  CompiledPoly derivative(int var) const;
};

CompiledPoly compile(const Polynomial& f);

}  // namespace gblab
