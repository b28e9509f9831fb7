#pragma once

#include <array>

#include "gblab/rational.hpp"

namespace gblab {

// Complexified exterior algebra on 2n anticommuting generators, n <= 3.
// Bit j is dz_j, bit n+j is the conjugate generator. Coefficients are stored
// densely over all 4^n basis monomials with ascending-index orientation.
struct ExteriorForm {
  int n = 0;
  std::array<cplx, 64> c{};

  static ExteriorForm zero(int n);
  static ExteriorForm scalar(int n, cplx v);
  static ExteriorForm dz(int n, int j);
  static ExteriorForm dzbar(int n, int j);

  int size() const { return 1 << (2 * n); }

  ExteriorForm operator+(const ExteriorForm& o) const;
  ExteriorForm operator-(const ExteriorForm& o) const;
  ExteriorForm scaled(cplx s) const;
  ExteriorForm wedge(const ExteriorForm& o) const;
  // complex conjugation: conjugate coefficients, swap dz_j with its partner
  ExteriorForm conjugate() const;

  double norm() const;  // max coefficient magnitude
  // -1 when coefficients mix degrees, else the common generator count
  int homogeneous_degree() const;
  ExteriorForm degree_part(int k) const;
  bool is_real(double tol = 1e-10) const;
};

// in-place kernels for the sampling loop
void xf_clear(ExteriorForm& f);
void xf_wedge_accum(ExteriorForm& dst, const ExteriorForm& a, const ExteriorForm& b, cplx scale);

// Lebesgue density of a top-degree form: the coefficient of
// dz_0^dzbar_0^...^dz_{n-1}^dzbar_{n-1} times (-2i)^n. Throws unless every
// nonzero coefficient has top degree.
cplx top_density(const ExteriorForm& f);

}  // namespace gblab
