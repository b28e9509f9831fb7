#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gblab {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

using cplx = std::complex<double>;

// Exact element of Q(i). Arithmetic never rounds; conversion to cplx is the
// only lossy operation.
struct GaussianRational {
  Rational re;
  Rational im;

  GaussianRational() = default;
  GaussianRational(Rational r) : re(std::move(r)) {}
  GaussianRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}
  GaussianRational(long r) : re(r) {}

  bool is_zero() const { return re == 0 && im == 0; }
  bool is_real() const { return im == 0; }

  friend GaussianRational operator+(const GaussianRational& a, const GaussianRational& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend GaussianRational operator-(const GaussianRational& a, const GaussianRational& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend GaussianRational operator-(const GaussianRational& a) { return {-a.re, -a.im}; }
  friend GaussianRational operator*(const GaussianRational& a, const GaussianRational& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend GaussianRational operator/(const GaussianRational& a, const GaussianRational& b) {
    Rational n = b.re * b.re + b.im * b.im;
    if (n == 0) throw std::domain_error("division by zero in Q(i)");
    return {(a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n};
  }
  GaussianRational& operator+=(const GaussianRational& b) { return *this = *this + b; }
  GaussianRational& operator-=(const GaussianRational& b) { return *this = *this - b; }
  GaussianRational& operator*=(const GaussianRational& b) { return *this = *this * b; }
  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re == b.re && a.im == b.im;
  }

  GaussianRational conj() const { return {re, -im}; }

  cplx to_complex() const {
    return {static_cast<double>(re), static_cast<double>(im)};
  }
};

// IEEE doubles are dyadic rationals; the embedding is exact.
Rational rational_from_double(double x);
GaussianRational gaussian_from_complex(cplx z);

// "p", "-p/q"; digits only, optional sign.
Rational parse_rational(const std::string& s);

std::string to_string(const Rational& r);
std::string to_string(const GaussianRational& z);

// Dense matrix over Q(i), row major. Used for exact elimination at desk
// scale: AffineMap inverses and Jacobian-ideal ranks.
struct GaussMat {
  int rows = 0;
  int cols = 0;
  std::vector<GaussianRational> a;

  GaussMat() = default;
  GaussMat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c) {}
  GaussianRational& at(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  const GaussianRational& at(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }
};

// Row echelon rank; destroys m.
int exact_rank(GaussMat& m);

// Inverse of a square matrix; throws if singular.
GaussMat exact_inverse(const GaussMat& m);

GaussianRational exact_determinant(GaussMat m);

}  // namespace gblab
