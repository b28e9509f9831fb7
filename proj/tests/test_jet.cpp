#include <cmath>
#include <complex>

#include "doctest.h"
#include "gblab/jet.hpp"

using namespace gblab;

namespace {

// finite-difference mixed partial d/du_k dbar/du_l of |f|^2-style functions is
// overkill here; we difference f(center + u) directly against jet coefficients
cplx fd_coeff(const Polynomial& f, const std::vector<cplx>& center, const Exponents& holo) {
  // Cauchy integral over a small polytorus, trapezoid rule, exact for
  // polynomials once the sample count clears the degree
  const int m = static_cast<int>(holo.size());
  const int samples = f.degree() + 5;
  const double r = 0.3;
  cplx acc = 0.0;
  std::vector<int> idx(m, 0);
  long total = 1;
  for (int g = 0; g < m; ++g) total *= samples;
  for (long t = 0; t < total; ++t) {
    long rest = t;
    std::vector<cplx> u(m);
    cplx phase = 1.0;
    for (int g = 0; g < m; ++g) {
      int ig = rest % samples;
      rest /= samples;
      double th = 2.0 * M_PI * ig / samples;
      u[g] = std::polar(r, th);
      for (uint32_t c = 0; c < holo[g]; ++c) phase *= std::polar(1.0, -th);
    }
    std::vector<cplx> x(center);
    for (int g = 0; g < m; ++g) x[g] += u[g];
    acc += f.evaluate(x) * phase;
  }
  double rpow = 1.0;
  for (int g = 0; g < m; ++g)
    for (uint32_t c = 0; c < holo[g]; ++c) rpow *= r;
  return acc / (static_cast<double>(total) * rpow);
}

}  // namespace

TEST_CASE("layout exponent bookkeeping") {
  const JetLayout& lay = JetLayout::get(2, 4);
  CHECK(lay.count == 15);  // C(2+4,4)
  for (int i = 0; i < lay.count; ++i) {
    int d = 0;
    for (int v = 0; v < lay.vars; ++v) d += lay.exps[i][v];
    CHECK(d == lay.deg[i]);
    CHECK(lay.index_of(lay.exps[i].data()) == i);
  }
}

TEST_CASE("jet ring laws") {
  const int m = 2, order = 4;
  Jet u = Jet::variable(m, order, 0);
  Jet v = Jet::variable(m, order, 1);
  Jet one = Jet::constant(m, order, 1.0);
  Jet a = one + u * v + u * u;
  Jet b = one - v;
  // associativity and distributivity at truncation order
  Jet lhs = (a * b) * a;
  Jet rhs = a * (b * a);
  for (size_t i = 0; i < lhs.coeffs().size(); ++i)
    CHECK(std::abs(lhs.coeffs()[i] - rhs.coeffs()[i]) < 1e-14);

  Jet r = a.reciprocal();
  Jet prod = a * r;
  CHECK(std::abs(prod.coeffs()[0] - 1.0) < 1e-13);
  for (size_t i = 1; i < prod.coeffs().size(); ++i) CHECK(std::abs(prod.coeffs()[i]) < 1e-12);

  // log(a*b) = log a + log b for unit-constant-term jets
  Jet la = a.log(), lb = b.log(), lab = (a * b).log();
  for (size_t i = 0; i < la.coeffs().size(); ++i)
    CHECK(std::abs(lab.coeffs()[i] - la.coeffs()[i] - lb.coeffs()[i]) < 1e-12);
}

TEST_CASE("taylor jet reproduces polynomial coefficients") {
  Polynomial f = parse_polynomial("x0^3 - 2*x0*x1^2 + i*x1 + 5", 2);
  std::vector<cplx> center = {{0.4, -0.1}, {-0.2, 0.3}};
  Jet j = taylor_jet(f, center, 4);

  for (Exponents e : {Exponents{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}, {3, 0}, {2, 1}}) {
    cplx want = fd_coeff(f, center, e);
    // taylor coefficients, not derivatives: no factorial
    cplx got = j.coeff(e, {0, 0});
    CHECK(std::abs(got - want) < 1e-12);
  }
  // value and first derivative read back through eval
  std::vector<cplx> du = {{0.05, 0.02}, {-0.03, 0.01}};
  std::vector<cplx> moved = {center[0] + du[0], center[1] + du[1]};
  CHECK(std::abs(j.eval(du) - f.evaluate(moved)) < 1e-12);
}

TEST_CASE("differentiate matches derivative polynomial") {
  Polynomial f = parse_polynomial("x0^2*x1 + x1^3", 2);
  std::vector<cplx> center = {{0.1, 0.2}, {0.5, -0.3}};
  Jet j = taylor_jet(f, center, 4);
  Jet dj = j.differentiate(0);
  Jet want = taylor_jet(f.derivative(0), center, 3);
  for (Exponents e : {Exponents{0, 0}, {1, 0}, {0, 1}, {1, 1}, {2, 0}})
    CHECK(std::abs(dj.coeff(e, {0, 0}) - want.coeff(e, {0, 0})) < 1e-12);
}

TEST_CASE("conjugation swaps halves") {
  Jet u = Jet::variable(2, 4, 0);
  Jet v = Jet::variable(2, 4, 1);
  Jet w = Jet::constant(2, 4, {0.0, 1.0}) * u + v * v;
  Jet wc = w.conjugate();
  CHECK(std::abs(wc.coeff({0, 0}, {1, 0}) - std::conj(w.coeff({1, 0}, {0, 0}))) < 1e-15);
  CHECK(std::abs(wc.coeff({0, 0}, {0, 2}) - std::conj(w.coeff({0, 2}, {0, 0}))) < 1e-15);
  // u * conj(u) is real: zero reality defect
  Jet mixed = u * u.conjugate() + Jet::constant(2, 4, 3.0);
  CHECK(mixed.reality_defect() < 1e-15);
}

TEST_CASE("capped paired layout agrees with the full one on retained indices") {
  const JetLayout& full = JetLayout::get(4, 4);          // 2 pairs, total order 4
  const JetLayout& capped = JetLayout::get_paired_capped(2, 2);
  CHECK(capped.vars == 4);
  CHECK(capped.order == 4);
  CHECK(capped.count < full.count);

  // a small series multiplied on both layouts: retained coefficients match
  std::vector<cplx> af(full.count, 0.0), bf(full.count, 0.0), cf(full.count, 0.0);
  std::vector<cplx> ac(capped.count, 0.0), bc(capped.count, 0.0), cc(capped.count, 0.0);
  auto put = [&](std::array<uint8_t, 8> e, cplx v) {
    int i = full.index_of(e.data());
    REQUIRE(i >= 0);
    af[i] = v;
    bf[i] = v * cplx{0.5, 1.0} + 1.0;
    int j = capped.index_of(e.data());
    if (j >= 0) {
      ac[j] = af[i];
      bc[j] = bf[i];
    }
  };
  put({0, 0, 0, 0}, {1.0, 0.0});
  put({1, 0, 0, 0}, {0.3, -0.2});
  put({0, 1, 1, 0}, {-0.7, 0.1});
  put({0, 0, 0, 1}, {0.2, 0.9});
  put({1, 1, 0, 0}, {0.0, -1.1});
  jl_mul(full, cf.data(), af.data(), bf.data());
  jl_mul(capped, cc.data(), ac.data(), bc.data());
  for (int j = 0; j < capped.count; ++j) {
    int i = full.index_of(capped.exps[j].data());
    REQUIRE(i >= 0);
    CHECK(std::abs(cc[j] - cf[i]) < 1e-14);
  }
}

TEST_CASE("implicit graph jet parametrizes the surface") {
  // conic x0*x2 = x1^2 in the chart x2 = 1: f(w0, w1) = w0 - w1^2
  Polynomial f = parse_polynomial("x0 - x1^2", 2);
  CompiledPoly cp = compile(f);
  ImplicitGraph ig = implicit_graph_jet(cp, {{0.25, 0.0}, {0.5, 0.0}}, 0);
  CHECK(ig.solved == 0);
  CHECK(ig.residual < 1e-12);
  // phi(u) should be the exact graph (0.5 + u)^2 = 0.25 + u + u^2
  CHECK(std::abs(ig.phi.coeff({0}, {0}) - cplx{0.25, 0.0}) < 1e-12);
  CHECK(std::abs(ig.phi.coeff({1}, {0}) - cplx{1.0, 0.0}) < 1e-12);
  CHECK(std::abs(ig.phi.coeff({2}, {0}) - cplx{1.0, 0.0}) < 1e-12);
  CHECK(std::abs(ig.phi.coeff({3}, {0})) < 1e-12);
}
