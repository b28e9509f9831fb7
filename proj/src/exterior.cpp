#include "gblab/exterior.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace gblab {

namespace {

void check_dim(int n) {
  if (n < 1 || n > 3) throw std::invalid_argument("exterior algebra supports complex dimension 1..3");
}

// parity of crossings when concatenating sorted generator lists a, b
inline int wedge_sign(unsigned a, unsigned b) {
  int swaps = 0;
  while (b) {
    unsigned j = std::countr_zero(b);
    swaps += std::popcount(a >> (j + 1));
    b &= b - 1;
  }
  return (swaps & 1) ? -1 : 1;
}

}  // namespace

ExteriorForm ExteriorForm::zero(int n) {
  check_dim(n);
  ExteriorForm f;
  f.n = n;
  return f;
}

ExteriorForm ExteriorForm::scalar(int n, cplx v) {
  ExteriorForm f = zero(n);
  f.c[0] = v;
  return f;
}

ExteriorForm ExteriorForm::dz(int n, int j) {
  ExteriorForm f = zero(n);
  f.c[1u << j] = 1.0;
  return f;
}

ExteriorForm ExteriorForm::dzbar(int n, int j) {
  ExteriorForm f = zero(n);
  f.c[1u << (n + j)] = 1.0;
  return f;
}

ExteriorForm ExteriorForm::operator+(const ExteriorForm& o) const {
  if (n != o.n) throw std::invalid_argument("exterior dimension mismatch");
  ExteriorForm r = *this;
  for (int i = 0; i < size(); ++i) r.c[i] += o.c[i];
  return r;
}

ExteriorForm ExteriorForm::operator-(const ExteriorForm& o) const {
  if (n != o.n) throw std::invalid_argument("exterior dimension mismatch");
  ExteriorForm r = *this;
  for (int i = 0; i < size(); ++i) r.c[i] -= o.c[i];
  return r;
}

ExteriorForm ExteriorForm::scaled(cplx s) const {
  ExteriorForm r = *this;
  for (int i = 0; i < size(); ++i) r.c[i] *= s;
  return r;
}

ExteriorForm ExteriorForm::wedge(const ExteriorForm& o) const {
  if (n != o.n) throw std::invalid_argument("exterior dimension mismatch");
  ExteriorForm r = zero(n);
  xf_wedge_accum(r, *this, o, 1.0);
  return r;
}

ExteriorForm ExteriorForm::conjugate() const {
  ExteriorForm r = zero(n);
  for (int mask = 0; mask < size(); ++mask) {
    if (c[mask] == 0.0) continue;
    unsigned lo = static_cast<unsigned>(mask) & ((1u << n) - 1);
    unsigned hi = static_cast<unsigned>(mask) >> n;
    unsigned swapped = (lo << n) | hi;
    // sign of re-sorting the image sequence: generators of `mask` ascending
    // map to (g+n mod 2n); count inversions of the mapped list
    int gens[6];
    int cnt = 0;
    for (int g = 0; g < 2 * n; ++g)
      if (mask & (1 << g)) gens[cnt++] = (g + n) % (2 * n);
    int inv = 0;
    for (int i = 0; i < cnt; ++i)
      for (int j = i + 1; j < cnt; ++j)
        if (gens[i] > gens[j]) ++inv;
    r.c[swapped] += ((inv & 1) ? -1.0 : 1.0) * std::conj(c[mask]);
  }
  return r;
}

double ExteriorForm::norm() const {
  double m = 0.0;
  for (int i = 0; i < size(); ++i) m = std::max(m, std::abs(c[i]));
  return m;
}

int ExteriorForm::homogeneous_degree() const {
  int deg = -2;
  for (int i = 0; i < size(); ++i) {
    if (c[i] == 0.0) continue;
    int d = std::popcount(static_cast<unsigned>(i));
    if (deg == -2)
      deg = d;
    else if (deg != d)
      return -1;
  }
  return deg == -2 ? 0 : deg;
}

ExteriorForm ExteriorForm::degree_part(int k) const {
  ExteriorForm r = zero(n);
  for (int i = 0; i < size(); ++i)
    if (std::popcount(static_cast<unsigned>(i)) == k) r.c[i] = c[i];
  return r;
}

bool ExteriorForm::is_real(double tol) const {
  ExteriorForm d = *this - conjugate();
  double scale = std::max(norm(), 1e-300);
  return d.norm() <= tol * scale;
}

void xf_clear(ExteriorForm& f) { f.c.fill(0.0); }

void xf_wedge_accum(ExteriorForm& dst, const ExteriorForm& a, const ExteriorForm& b, cplx scale) {
  int sz = a.size();
  for (int i = 0; i < sz; ++i) {
    if (a.c[i] == 0.0) continue;
    cplx ai = a.c[i] * scale;
    for (int j = 0; j < sz; ++j) {
      if (b.c[j] == 0.0) continue;
      if (i & j) continue;  // repeated generator
      double s = wedge_sign(static_cast<unsigned>(i), static_cast<unsigned>(j));
      dst.c[i | j] += s * ai * b.c[j];
    }
  }
}

cplx top_density(const ExteriorForm& f) {
  int full = f.size() - 1;
  for (int i = 0; i < full; ++i)
    if (f.c[i] != 0.0) throw std::domain_error("density of a non-top-degree form");
  // reorder dz_0..dz_{n-1},dzbar_0..dzbar_{n-1} into interleaved pairs
  int swaps = f.n * (f.n - 1) / 2;
  cplx sign = (swaps & 1) ? -1.0 : 1.0;
  cplx factor = 1.0;
  for (int k = 0; k < f.n; ++k) factor *= cplx(0.0, -2.0);
  return f.c[full] * sign * factor;
}

}  // namespace gblab
