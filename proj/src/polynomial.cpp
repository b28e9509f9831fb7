#include "gblab/polynomial.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gblab {

Polynomial Polynomial::constant(int num_vars, GaussianRational c) {
  Polynomial p(num_vars);
  p.add_term(Exponents(num_vars, 0), c);
  return p;
}

Polynomial Polynomial::variable(int num_vars, int index) {
  if (index < 0 || index >= num_vars) throw std::out_of_range("variable index");
  Polynomial p(num_vars);
  Exponents e(num_vars, 0);
  e[index] = 1;
  p.add_term(e, GaussianRational(1));
  return p;
}

Polynomial Polynomial::monomial(int num_vars, Exponents e, GaussianRational c) {
  if (static_cast<int>(e.size()) != num_vars) throw std::invalid_argument("exponent arity");
  Polynomial p(num_vars);
  p.add_term(e, c);
  return p;
}

int Polynomial::degree() const {
  if (terms_.empty()) return -1;
  // map is ordered by descending total degree
  return static_cast<int>(total_degree(terms_.begin()->first));
}

int Polynomial::min_degree() const {
  if (terms_.empty()) return -1;
  return static_cast<int>(total_degree(terms_.rbegin()->first));
}

bool Polynomial::is_homogeneous() const {
  return terms_.empty() || degree() == min_degree();
}

void Polynomial::add_term(const Exponents& e, const GaussianRational& c) {
  if (static_cast<int>(e.size()) != nvars_) throw std::invalid_argument("exponent arity");
  if (c.is_zero()) return;
  auto it = terms_.find(e);
  if (it == terms_.end()) {
    terms_.emplace(e, c);
  } else {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

GaussianRational Polynomial::coefficient(const Exponents& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? GaussianRational(0) : it->second;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  if (nvars_ != o.nvars_) throw std::invalid_argument("arity mismatch");
  Polynomial r = *this;
  for (const auto& [e, c] : o.terms_) r.add_term(e, c);
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
  if (nvars_ != o.nvars_) throw std::invalid_argument("arity mismatch");
  Polynomial r = *this;
  for (const auto& [e, c] : o.terms_) r.add_term(e, -c);
  return r;
}

Polynomial Polynomial::operator-() const {
  Polynomial r(nvars_);
  for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
  return r;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  if (nvars_ != o.nvars_) throw std::invalid_argument("arity mismatch");
  Polynomial r(nvars_);
  for (const auto& [ea, ca] : terms_) {
    for (const auto& [eb, cb] : o.terms_) {
      Exponents e(nvars_);
      for (int k = 0; k < nvars_; ++k) e[k] = ea[k] + eb[k];
      r.add_term(e, ca * cb);
    }
  }
  return r;
}

Polynomial Polynomial::scaled(const GaussianRational& c) const {
  Polynomial r(nvars_);
  if (c.is_zero()) return r;
  for (const auto& [e, k] : terms_) r.terms_.emplace(e, k * c);
  return r;
}

Polynomial Polynomial::derivative(int var) const {
  if (var < 0 || var >= nvars_) throw std::out_of_range("variable index");
  Polynomial r(nvars_);
  for (const auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    Exponents d = e;
    d[var] -= 1;
    r.add_term(d, c * GaussianRational(Rational(e[var])));
  }
  return r;
}

namespace {

// Pascal row cache for exact Taylor shifts.
const std::vector<Rational>& binomial_row(uint32_t n) {
  static std::vector<std::vector<Rational>> rows;
  while (rows.size() <= n) {
    uint32_t m = rows.size();
    std::vector<Rational> row(m + 1);
    row[0] = 1;
    for (uint32_t k = 1; k <= m; ++k)
      row[k] = rows[m - 1][k - 1] + (k < m ? rows[m - 1][k] : Rational(0));
    rows.push_back(std::move(row));
  }
  return rows[n];
}

}  // namespace

Polynomial Polynomial::translated(const std::vector<GaussianRational>& p) const {
  if (static_cast<int>(p.size()) != nvars_) throw std::invalid_argument("point arity");
  Polynomial r(nvars_);
  // expand prod_i (x_i + p_i)^{e_i} term by term
  for (const auto& [e, c] : terms_) {
    std::vector<std::pair<Exponents, GaussianRational>> acc{{Exponents(nvars_, 0), c}};
    for (int v = 0; v < nvars_; ++v) {
      if (e[v] == 0) continue;
      const auto& row = binomial_row(e[v]);
      std::vector<std::pair<Exponents, GaussianRational>> next;
      std::vector<GaussianRational> ppow(e[v] + 1, GaussianRational(1));
      for (uint32_t k = 1; k <= e[v]; ++k) ppow[k] = ppow[k - 1] * p[v];
      for (const auto& [ae, ac] : acc) {
        for (uint32_t k = 0; k <= e[v]; ++k) {
          GaussianRational coef = ac * GaussianRational(row[k]) * ppow[e[v] - k];
          if (coef.is_zero()) continue;
          Exponents ne = ae;
          ne[v] += k;
          next.emplace_back(std::move(ne), std::move(coef));
        }
      }
      acc = std::move(next);
    }
    for (auto& [ae, ac] : acc) r.add_term(ae, ac);
  }
  return r;
}

Polynomial Polynomial::dehomogenized(int chart) const {
  if (chart < 0 || chart >= nvars_) throw std::out_of_range("chart index");
  Polynomial r(nvars_ - 1);
  for (const auto& [e, c] : terms_) {
    Exponents d;
    d.reserve(nvars_ - 1);
    for (int k = 0; k < nvars_; ++k)
      if (k != chart) d.push_back(e[k]);
    r.add_term(d, c);
  }
  return r;
}

Polynomial Polynomial::truncated(int d) const {
  Polynomial r(nvars_);
  for (const auto& [e, c] : terms_)
    if (static_cast<int>(total_degree(e)) <= d) r.terms_.emplace(e, c);
  return r;
}

GaussianRational Polynomial::evaluate(const std::vector<GaussianRational>& x) const {
  if (static_cast<int>(x.size()) != nvars_) throw std::invalid_argument("point arity");
  GaussianRational acc(0);
  for (const auto& [e, c] : terms_) {
    GaussianRational t = c;
    for (int v = 0; v < nvars_; ++v)
      for (uint32_t k = 0; k < e[v]; ++k) t *= x[v];
    acc += t;
  }
  return acc;
}

cplx Polynomial::evaluate(const std::vector<cplx>& x) const {
  std::vector<cplx> xx(x.begin(), x.end());
  CompiledPoly cp = compile(*this);
  return cp.eval(xx.data());
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    bool negative = false;
    std::string mag;
    bool mag_is_one = false;
    if (c.im == 0) {
      negative = c.re < 0;
      Rational a = negative ? Rational(-c.re) : c.re;
      mag_is_one = (a == 1);
      mag = gblab::to_string(a);
    } else if (c.re == 0) {
      negative = c.im < 0;
      Rational a = negative ? Rational(-c.im) : c.im;
      mag = (a == 1) ? "i" : gblab::to_string(a) + "*i";
    } else {
      mag = "(" + gblab::to_string(c) + ")";
    }
    std::string mono;
    for (int v = 0; v < nvars_; ++v) {
      if (e[v] == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += "x" + std::to_string(v);
      if (e[v] > 1) mono += "^" + std::to_string(e[v]);
    }
    std::string body;
    if (mono.empty()) {
      body = mag;
    } else if (mag_is_one) {
      body = mono;
    } else {
      body = mag + "*" + mono;
    }
    if (first) {
      out = (negative ? "-" : "") + body;
      first = false;
    } else {
      out += (negative ? " - " : " + ") + body;
    }
  }
  return out;
}

Polynomial substitute_linear(const Polynomial& f, const GaussMat& a) {
  if (a.rows != f.num_vars()) throw std::invalid_argument("substitution shape");
  int nout = a.cols;
  // linear forms for each input variable
  std::vector<Polynomial> forms;
  forms.reserve(a.rows);
  for (int i = 0; i < a.rows; ++i) {
    Polynomial l(nout);
    Exponents e(nout, 0);
    for (int j = 0; j < nout; ++j) {
      if (a.at(i, j).is_zero()) continue;
      e[j] = 1;
      l.add_term(e, a.at(i, j));
      e[j] = 0;
    }
    forms.push_back(std::move(l));
  }
  // memoized powers
  std::vector<std::vector<Polynomial>> pow(a.rows);
  auto power = [&](int i, uint32_t k) -> const Polynomial& {
    auto& cache = pow[i];
    if (cache.empty()) cache.push_back(Polynomial::constant(nout, GaussianRational(1)));
    while (cache.size() <= k) cache.push_back(cache.back() * forms[i]);
    return cache[k];
  };
  Polynomial r(nout);
  for (const auto& [e, c] : f.terms()) {
    Polynomial t = Polynomial::constant(nout, c);
    for (int i = 0; i < f.num_vars(); ++i)
      if (e[i] > 0) t = t * power(i, e[i]);
    r = r + t;
  }
  return r;
}

AffineMap AffineMap::from_exact(GaussMat m) {
  if (m.rows != m.cols) throw std::invalid_argument("AffineMap must be square");
  AffineMap a;
  a.m = std::move(m);
  a.exact = true;
  int n = a.m.rows;
  Eigen::MatrixXcd num(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) num(i, j) = a.m.at(i, j).to_complex();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(num);
  double smin = svd.singularValues()(n - 1);
  a.condition = smin > 0 ? svd.singularValues()(0) / smin : std::numeric_limits<double>::infinity();
  if (!(a.condition < 1e8)) throw std::domain_error("map condition number exceeds 1e8");
  if (exact_determinant(a.m).is_zero()) throw std::domain_error("singular map");
  return a;
}

AffineMap AffineMap::from_complex(int n, const std::vector<cplx>& row_major) {
  if (static_cast<int>(row_major.size()) != n * n) throw std::invalid_argument("matrix size");
  GaussMat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m.at(i, j) = gaussian_from_complex(row_major[i * n + j]);
  AffineMap a = from_exact(std::move(m));
  a.exact = false;
  return a;
}

AffineMap AffineMap::inverse() const {
  AffineMap r;
  r.m = exact_inverse(m);
  r.exact = exact;
  r.condition = condition;
  return r;
}

Polynomial linear_substitute(const Polynomial& f, const AffineMap& a) {
  return substitute_linear(f, a.m);
}

cplx CompiledPoly::eval(const cplx* x) const {
  cplx acc = 0.0;
  for (const auto& t : terms) {
    cplx v = t.c;
    for (int k = 0; k < nvars; ++k)
      for (int p = 0; p < t.e[k]; ++p) v *= x[k];
    acc += v;
  }
  return acc;
}

void CompiledPoly::gradient(const cplx* x, cplx* out) const {
  for (int k = 0; k < nvars; ++k) out[k] = 0.0;
  for (const auto& t : terms) {
    for (int k = 0; k < nvars; ++k) {
      if (t.e[k] == 0) continue;
      cplx v = t.c * static_cast<double>(t.e[k]);
      for (int m = 0; m < nvars; ++m) {
        int p = t.e[m] - (m == k ? 1 : 0);
        for (int q = 0; q < p; ++q) v *= x[m];
      }
      out[k] += v;
    }
  }
}

CompiledPoly CompiledPoly::derivative(int var) const {
  CompiledPoly d;
  d.nvars = nvars;
  d.degree = degree > 0 ? degree - 1 : 0;
  for (const auto& t : terms) {
    if (t.e[var] == 0) continue;
    Term nt = t;
    nt.c *= static_cast<double>(t.e[var]);
    nt.e[var] -= 1;
    nt.deg = t.deg - 1;
    d.terms.push_back(nt);
    d.coeff_scale = std::max(d.coeff_scale, std::abs(nt.c));
  }
  return d;
}

CompiledPoly compile(const Polynomial& f) {
  if (f.num_vars() > 8) throw std::invalid_argument("compile supports at most 8 variables");
  CompiledPoly cp;
  cp.nvars = f.num_vars();
  cp.degree = std::max(f.degree(), 0);
  for (const auto& [e, c] : f.terms()) {
    CompiledPoly::Term t{};
    t.e.fill(0);
    for (int k = 0; k < f.num_vars(); ++k) t.e[k] = static_cast<uint8_t>(e[k]);
    t.deg = static_cast<int>(total_degree(e));
    t.c = c.to_complex();
    cp.coeff_scale = std::max(cp.coeff_scale, std::abs(t.c));
    cp.terms.push_back(t);
  }
  return cp;
}

}  // namespace gblab
