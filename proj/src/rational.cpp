#include "gblab/rational.hpp"

#include <cmath>
#include <cstdlib>

namespace gblab {

Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw std::domain_error("non-finite double has no rational value");
  if (x == 0.0) return Rational(0);
  int exp = 0;
  double m = std::frexp(x, &exp);  // x = m * 2^exp, 0.5 <= |m| < 1
  // 53 doublings make the mantissa integral.
  long long mant = static_cast<long long>(std::ldexp(m, 53));
  exp -= 53;
  BigInt num = mant;
  if (exp >= 0) {
    return Rational(num << exp);
  }
  BigInt den = BigInt(1) << (-exp);
  return Rational(num, den);
}

GaussianRational gaussian_from_complex(cplx z) {
  return {rational_from_double(z.real()), rational_from_double(z.imag())};
}

Rational parse_rational(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("malformed rational: ''");
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rational(BigInt(s));
    BigInt num(s.substr(0, slash));
    BigInt den(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator");
    return Rational(num, den);
  } catch (const std::exception&) {
    throw std::invalid_argument("malformed rational: '" + s + "'");
  }
}

std::string to_string(const Rational& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

std::string to_string(const GaussianRational& z) {
  if (z.im == 0) return to_string(z.re);
  std::string im = to_string(z.im) + "*i";
  if (z.re == 0) return im;
  if (z.im > 0) return to_string(z.re) + "+" + im;
  return to_string(z.re) + im;  // im part already carries the minus sign
}

int exact_rank(GaussMat& m) {
  int rank = 0;
  for (int col = 0; col < m.cols && rank < m.rows; ++col) {
    int pivot = -1;
    for (int r = rank; r < m.rows; ++r) {
      if (!m.at(r, col).is_zero()) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) continue;
    if (pivot != rank) {
      for (int c = col; c < m.cols; ++c) std::swap(m.at(pivot, c), m.at(rank, c));
    }
    GaussianRational inv = GaussianRational(1) / m.at(rank, col);
    for (int c = col; c < m.cols; ++c) m.at(rank, c) *= inv;
    for (int r = 0; r < m.rows; ++r) {
      if (r == rank || m.at(r, col).is_zero()) continue;
      GaussianRational f = m.at(r, col);
      for (int c = col; c < m.cols; ++c) m.at(r, c) -= f * m.at(rank, c);
    }
    ++rank;
  }
  return rank;
}

GaussMat exact_inverse(const GaussMat& m) {
  if (m.rows != m.cols) throw std::invalid_argument("inverse of non-square matrix");
  int n = m.rows;
  GaussMat aug(n, 2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) aug.at(i, j) = m.at(i, j);
    aug.at(i, n + i) = GaussianRational(1);
  }
  // exact_rank reduces in place; [A | I] always has full row rank, so detect
  // singularity from the left block, which is the identity iff A is invertible
  exact_rank(aug);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!(aug.at(i, j) == GaussianRational(i == j ? 1 : 0)))
        throw std::domain_error("singular matrix");
  GaussMat inv(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inv.at(i, j) = aug.at(i, n + j);
  return inv;
}

GaussianRational exact_determinant(GaussMat m) {
  if (m.rows != m.cols) throw std::invalid_argument("determinant of non-square matrix");
  int n = m.rows;
  GaussianRational det(1);
  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    for (int r = col; r < n; ++r) {
      if (!m.at(r, col).is_zero()) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) return GaussianRational(0);
    if (pivot != col) {
      for (int c = 0; c < n; ++c) std::swap(m.at(pivot, c), m.at(col, c));
      det = -det;
    }
    det *= m.at(col, col);
    GaussianRational inv = GaussianRational(1) / m.at(col, col);
    for (int r = col + 1; r < n; ++r) {
      if (m.at(r, col).is_zero()) continue;
      GaussianRational f = m.at(r, col) * inv;
      for (int c = col; c < n; ++c) m.at(r, c) -= f * m.at(col, c);
    }
  }
  return det;
}

}  // namespace gblab
