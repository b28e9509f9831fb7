#include "gblab/cm_poly.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace gblab {

std::string to_string(const DegreePolynomial& p) {
  std::ostringstream os;
  for (int r = 0; r < static_cast<int>(p.c.size()); ++r) {
    if (r) os << " + ";
    os << "(" << to_string(p.c[r]) << ")";
    if (r == 1) os << "*t";
    if (r > 1) os << "*t^" << r;
  }
  return os.str();
}

DegreePolynomial involution_I(const DegreePolynomial& p) {
  const int n = p.formal_degree();
  if (n < 0) throw std::invalid_argument("involution of an empty polynomial");

  // numerator p(0) + t p(-1-t), degree at most n+1
  std::vector<Rational> num(n + 2, Rational(0));
  num[0] = p.c[0];
  // (-1-t)^k = (-1)^k (1+t)^k expanded by a running binomial
  for (int k = 0; k <= n; ++k) {
    Rational b = 1;
    for (int j = 0; j <= k; ++j) {
      const Rational term = p.c[k] * ((k % 2) ? -b : b);
      num[j + 1] += term;
      b = b * (k - j) / (j + 1);
    }
  }

  // exact division by (1+t): q[j] = num[j] - q[j-1]
  DegreePolynomial q;
  q.c.assign(n + 1, Rational(0));
  Rational carry = 0;
  for (int j = 0; j <= n; ++j) {
    q.c[j] = num[j] - carry;
    carry = q.c[j];
  }
  if (num[n + 1] != carry)
    throw std::logic_error("involution numerator was not divisible by 1+t");
  return q;
}

DegreePolynomial pf_from_betas(const std::vector<long>& betas) {
  if (betas.empty()) throw std::invalid_argument("pf_from_betas: empty list");
  DegreePolynomial p;
  p.c.reserve(betas.size());
  for (size_t r = 0; r < betas.size(); ++r)
    p.c.push_back((r % 2) ? Rational(-betas[r]) : Rational(betas[r]));
  return p;
}

DegreePolynomial cm_from_pf(const DegreePolynomial& pf) { return involution_I(pf); }
DegreePolynomial pf_from_cm(const DegreePolynomial& cm) { return involution_I(cm); }

long chern_series_coefficient(int N, int d, int j) {
  if (N < 1 || d < 1 || j < 0) throw std::invalid_argument("chern_series_coefficient: bad arguments");
  BigInt acc = 0, pw = 1, bin = 1;
  // binom(N+1, t) ascending, paired with (-d)^(j-t) descending
  std::vector<BigInt> binoms(j + 1);
  for (int t = 0; t <= j; ++t) {
    binoms[t] = (t <= N + 1) ? bin : BigInt(0);
    bin = bin * (N + 1 - t) / (t + 1);
  }
  for (int t = j; t >= 0; --t) {
    acc += binoms[t] * pw;
    pw *= -d;
  }
  if (acc > std::numeric_limits<long>::max() || acc < std::numeric_limits<long>::min())
    throw std::overflow_error("chern_series_coefficient: out of range");
  return static_cast<long>(acc);
}

DegreePolynomial cm_smooth_degree_polynomial(int N, int d) {
  if (N < 2 || d < 1) throw std::invalid_argument("cm_smooth_degree_polynomial: bad arguments");
  const int n = N - 1;
  DegreePolynomial p;
  p.c.resize(n + 1);
  for (int r = 0; r <= n; ++r) p.c[r] = Rational(d) * chern_series_coefficient(N, d, n - r);
  return p;
}

PipelineComparison compare_pipelines(const std::vector<IntegralEstimate>& numeric,
                                     const DegreePolynomial& exact) {
  if (static_cast<int>(numeric.size()) != exact.formal_degree() + 1)
    throw std::invalid_argument("compare_pipelines: coefficient count mismatch");
  PipelineComparison out;
  for (size_t r = 0; r < numeric.size(); ++r) {
    PipelineComparison::Row row;
    row.r = static_cast<int>(r);
    row.numeric = numeric[r].mean;
    row.std_error = numeric[r].std_error;
    row.exact = static_cast<double>(exact.c[r]);
    const double diff = std::abs(row.numeric - row.exact);
    // rounding floor: zero-variance estimators still carry float roundoff
    const double floor = 1e-9 * (1.0 + std::abs(row.exact));
    if (row.std_error > 0) {
      row.z = diff / row.std_error;
      row.pass = row.z <= 3.0 || diff <= floor;
    } else {
      row.z = (diff <= floor) ? 0.0 : std::numeric_limits<double>::infinity();
      row.pass = diff <= floor;
    }
    out.rows.push_back(row);
    out.all_pass = out.all_pass && row.pass;
  }
  return out;
}

}  // namespace gblab
