#pragma once

#include <span>

#include "gblab/polynomial.hpp"

namespace gblab {

inline constexpr int kDefaultJetOrder = 4;

// Dense layout for truncated power series in `vars` formal variables up to
// total degree `order`. Indices are grouped by degree, lex within a degree.
// Layouts are interned; pointers returned by get() are stable for the
// process lifetime.
struct JetLayout {
  int vars;
  int order;
  int count;
  std::vector<std::array<uint8_t, 8>> exps;
  std::vector<int> deg;

  struct ProdEntry {
    int32_t i, j, k;  // dst[k] += a[i] * b[j]
  };
  std::vector<ProdEntry> prod;

  // differentiation: dst[d] += factor * src[s], one list per variable
  struct DiffEntry {
    int32_t s, d;
    double factor;
  };
  std::vector<std::vector<DiffEntry>> diff;

  // paired layouts (vars even, m = vars/2): index of the exponent tuple with
  // holomorphic and antiholomorphic halves swapped
  std::vector<int> conj_perm;

  std::map<std::array<uint8_t, 8>, int> lookup;
  int index_of(const uint8_t* e) const;  // -1 if degree exceeds order

  static const JetLayout& get(int vars, int order);

  // paired layout truncated per side: holomorphic and antiholomorphic degrees
  // each at most cap; order reports 2*cap, the nilpotency bound
  static const JetLayout& get_paired_capped(int pairs, int cap);
};

// series kernels on raw coefficient arrays, all sized lay.count
void jl_clear(const JetLayout& lay, cplx* dst);
void jl_copy(const JetLayout& lay, cplx* dst, const cplx* src);
void jl_scale(const JetLayout& lay, cplx* dst, cplx s);
void jl_axpy(const JetLayout& lay, cplx* dst, cplx s, const cplx* a);
void jl_mul(const JetLayout& lay, cplx* dst, const cplx* a, const cplx* b);
// dst = 1/a, needs two scratch buffers
void jl_recip(const JetLayout& lay, cplx* dst, const cplx* a, cplx* t1, cplx* t2);
// dst = log(a); requires Re(a[0]) > 0 (every use here has a[0] >= 1)
void jl_log(const JetLayout& lay, cplx* dst, const cplx* a, cplx* t1, cplx* t2);

// Truncated Taylor expansion with complex coefficients. Formal variables come
// in conjugate pairs: u_0..u_{m-1} then their conjugates. Holomorphic objects
// simply have vanishing coefficients on the conjugate half.
class Jet {
 public:
  Jet() = default;
  Jet(int m, int order);
  static Jet constant(int m, int order, cplx c);
  // u_k as a jet
  static Jet variable(int m, int order, int k);

  int m() const { return m_; }
  int order() const { return lay_->order; }
  const JetLayout& layout() const { return *lay_; }
  std::span<const cplx> coeffs() const { return c_; }
  std::span<cplx> coeffs() { return c_; }

  // exponent split into holomorphic/antiholomorphic halves
  cplx coeff(const Exponents& holo, const Exponents& anti) const;
  void set_coeff(const Exponents& holo, const Exponents& anti, cplx v);

  Jet operator+(const Jet& o) const;
  Jet operator-(const Jet& o) const;
  Jet operator*(const Jet& o) const;
  Jet reciprocal() const;
  Jet log() const;
  Jet conjugate() const;
  // var in [0, 2m); result order drops by one
  Jet differentiate(int var) const;

  // value at a holomorphic point; conjugate slots take conj(u)
  cplx eval(std::span<const cplx> u) const;

  // max |coeff(a,b) - conj(coeff(b,a))| over all indices, relative to the
  // largest coefficient magnitude
  double reality_defect() const;

 private:
  friend Jet taylor_jet(const Polynomial&, const std::vector<cplx>&, int);
  const JetLayout* lay_ = nullptr;
  int m_ = 0;
  std::vector<cplx> c_;
};

// Jet of P(center + u) in u only.
Jet taylor_jet(const Polynomial& p, const std::vector<cplx>& center, int order = kDefaultJetOrder);

// Order-4 graph parametrization of {f = 0} near a point: the solved
// coordinate becomes a holomorphic jet phi(u) in the remaining ones.
struct ImplicitGraph {
  int solved = -1;
  std::vector<int> graph_vars;  // affine indices of the independent coordinates
  std::vector<cplx> point;      // after Newton refinement onto the surface
  Jet phi;                      // paired layout, holomorphic part only
  double residual = 0.0;        // relative, after back substitution
};

ImplicitGraph implicit_graph_jet(const CompiledPoly& f, std::vector<cplx> point, int solved,
                                 int order = kDefaultJetOrder);

}  // namespace gblab
