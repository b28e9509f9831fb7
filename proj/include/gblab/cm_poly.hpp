#pragma once

#include <vector>

#include "gblab/rational.hpp"
#include "gblab/sampler.hpp"

namespace gblab {

// Polynomial in t with exact rational coefficients and a fixed formal degree:
// trailing zeros are retained so the degree always matches the variety
// dimension it describes.
struct DegreePolynomial {
  std::vector<Rational> c;  // size formal_degree + 1

  int formal_degree() const { return static_cast<int>(c.size()) - 1; }
  friend bool operator==(const DegreePolynomial& a, const DegreePolynomial& b) {
    return a.c == b.c;
  }
};

std::string to_string(const DegreePolynomial& p);

// (p(0) + t p(-1-t)) / (1+t), exact. The numerator always vanishes at t = -1,
// so the division is exact; a nonzero remainder is an internal error.
DegreePolynomial involution_I(const DegreePolynomial& p);

// sum_r betas[r] (-t)^r.
DegreePolynomial pf_from_betas(const std::vector<long>& betas);

// The involution exchanges the Pfaffian polynomial and the polynomial of
// Chern class degrees; the two directions are the same map.
DegreePolynomial cm_from_pf(const DegreePolynomial& pf);
DegreePolynomial pf_from_cm(const DegreePolynomial& cm);

// [h^j] (1+h)^{N+1}/(1+dh): coefficient of the tangent Chern series of a
// smooth degree-d hypersurface in P^N.
long chern_series_coefficient(int N, int d, int j);

// Degree polynomial of a smooth hypersurface: coefficient r is the degree of
// the r-dimensional Chern class component, d * gamma_{n-r}.
DegreePolynomial cm_smooth_degree_polynomial(int N, int d);

// Per-coefficient comparison of numeric degree estimates against the exact
// polynomial: z = |mean - exact| / stderr, pass at 3 sigma. A zero stderr
// demands agreement up to float rounding.
struct PipelineComparison {
  struct Row {
    int r = 0;
    double numeric = 0.0;
    double std_error = 0.0;
    double exact = 0.0;
    double z = 0.0;
    bool pass = false;
  };
  std::vector<Row> rows;
  bool all_pass = true;
};

PipelineComparison compare_pipelines(const std::vector<IntegralEstimate>& numeric,
                                     const DegreePolynomial& exact);

}  // namespace gblab
