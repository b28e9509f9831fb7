#include <cmath>
#include <complex>

#include "doctest.h"
#include "gblab/curvature.hpp"
#include "gblab/sampler.hpp"

using namespace gblab;

namespace {

// hyperplane x1 = 0 in P^2 carries the standard P^1 metric in the chart x2
Polynomial line_in_p2() { return parse_polynomial("x1", 3); }

std::vector<cplx> hom(std::initializer_list<cplx> v) { return std::vector<cplx>(v); }

}  // namespace

TEST_CASE("line metric matches the closed form") {
  // P^1 inside P^2: g = 1/(1+|w|^2)^2 in the affine coordinate w = x0/x2
  Polynomial f = line_in_p2();

  MetricJet at0 = pullback_metric(f, hom({0.0, 0.0, 1.0}));
  CHECK(at0.n == 1);
  CHECK(std::abs(at0.g(0, 0) - cplx{1.0, 0.0}) < 1e-12);  // g(0) = 1

  MetricJet at1 = pullback_metric(f, hom({1.0, 0.0, 1.0}));
  CHECK(std::abs(at1.g(0, 0) - cplx{0.25, 0.0}) < 1e-12);  // g(|w|=1) = 1/4

  CHECK(at1.reality_defect < 1e-12);
  CHECK(at1.kahler_defect < 1e-12);
}

TEST_CASE("line curvature: constant c1 density 2/pi and omega density 1/pi") {
  Polynomial f = line_in_p2();
  for (cplx w : {cplx{0.0, 0.0}, cplx{0.7, -0.4}, cplx{-1.3, 2.2}}) {
    MetricJet m = pullback_metric(f, hom({w, 0.0, 1.0}));
    CurvatureMatrix th = chern_curvature(m);
    double c1 = density({chern_form(th, 1)});
    CHECK(std::abs(c1 / m.vol_density - 2.0 / M_PI) < 1e-9);
    double om = density({kahler_form(m)});
    CHECK(std::abs(om / m.vol_density - 1.0 / M_PI) < 1e-9);
  }
}

TEST_CASE("chart choice does not move the densities") {
  Polynomial f = parse_polynomial("x0*x2 - x1^2", 3);  // smooth conic
  std::vector<cplx> p = hom({0.25, 0.5, 1.0});         // on the conic
  MetricJet m2 = pullback_metric(f, p, 2);
  MetricJet m0 = pullback_metric(f, p, 0);
  CurvatureMatrix t2 = chern_curvature(m2);
  CurvatureMatrix t0 = chern_curvature(m0);
  // densities are per ambient Lebesgue measure of the chart, so compare the
  // chart-invariant ratio c1 / vol
  double r2 = density({chern_form(t2, 1)}) / m2.vol_density;
  double r0 = density({chern_form(t0, 1)}) / m0.vol_density;
  CHECK(std::abs(r2 - r0) < 1e-9 * (std::abs(r2) + 1.0));
}

TEST_CASE("scale invariance of the projective point") {
  Polynomial f = parse_polynomial("x0*x3 - x1*x2", 4);
  std::vector<cplx> p = hom({0.3, 0.5, 0.6, 1.0});
  std::vector<cplx> q = p;
  for (auto& x : q) x *= cplx{(-1.7), 2.9};
  MetricJet mp = pullback_metric(f, p, 3);
  MetricJet mq = pullback_metric(f, q, 3);
  CurvatureMatrix tp = chern_curvature(mp);
  CurvatureMatrix tq = chern_curvature(mq);
  double cp = density({chern_form(tp, 2)}) / mp.vol_density;
  double cq = density({chern_form(tq, 2)}) / mq.vol_density;
  CHECK(std::abs(cp - cq) < 1e-9 * (std::abs(cp) + 1.0));
}

TEST_CASE("pfaffian route agrees with the chern route") {
  // the cubic surface and the cone carry curvature with nonzero off-diagonal
  // entries in any frame, unlike the product-metric quadric
  for (auto [text, N] : {std::pair<const char*, int>{"x0*x3 - x1*x2", 4},
                         {"x0^3 + x1^3 + x2^3 + x3^3", 4},
                         {"x0*x1 - x2^2", 4},
                         {"x0^3 + x1^3 + x2^3", 3}}) {
    Polynomial f = parse_polynomial(text, N);
    CurvatureWorkspace ws(f);
    auto pts = sample_points(f, 20, 0xc0ffee11ULL);
    for (const auto& p : pts) {
      MetricJet m;
      std::string why;
      REQUIRE(ws.metric_at(p.data(), m, &why));
      CurvatureMatrix th = chern_curvature(m);
      PfaffianCheck pc = pfaffian_crosscheck(m, th);
      CHECK(pc.rel_err < 1e-9);
      CHECK(pc.skew_defect < 1e-8);
      double cn = density({chern_form(th, m.n)});
      CHECK(std::abs(pc.chern_density - cn) < 1e-9 * (1.0 + std::abs(cn)));
    }
  }
}

TEST_CASE("metric jet derivative consistency") {
  // dg and ddg against finite differences of g along the graph coordinates
  Polynomial f = parse_polynomial("x0^3 + x1^3 + x2^3 + x0*x1*x2", 3);
  auto pts = sample_points(f, 1, 0xabcdULL);
  CurvatureWorkspace ws(f);
  MetricJet base;
  REQUIRE(ws.metric_at(pts[0].data(), base));
  const int chart = base.chart, solved = base.solved;
  const double h = 1e-5;

  // rebuild the homogeneous point from affine coordinates shifted by h along
  // graph variable 0, keeping chart and solved pinned
  auto hom_from_affine = [&](cplx shift) {
    std::vector<cplx> w(3);
    int j = 0;
    for (int v = 0; v < 3; ++v) {
      if (v == chart) {
        w[v] = 1.0;
      } else {
        w[v] = base.point[j];
        ++j;
      }
    }
    // affine index of graph var 0 within the chart coordinates
    int g0 = base.graph_vars[0];
    int v_of_g0 = g0 < chart ? g0 : g0 + 1;
    w[v_of_g0] += shift;
    return w;
  };

  // the shifted points are off the variety; metric_at projects back via the
  // solved coordinate, so displace along the graph direction only
  MetricJet plus, minus;
  REQUIRE(ws.metric_at(hom_from_affine(h).data(), plus, nullptr, chart, solved));
  REQUIRE(ws.metric_at(hom_from_affine(-h).data(), minus, nullptr, chart, solved));
  for (int i = 0; i < base.n; ++i)
    for (int j = 0; j < base.n; ++j) {
      cplx fd = (plus.g(i, j) - minus.g(i, j)) / (2.0 * h);
      cplx an = base.dg[0](i, j) + base.dbarg[0](i, j);  // real-direction shift
      CHECK(std::abs(fd - an) < 5e-6 * (1.0 + std::abs(an)));
    }
}

TEST_CASE("rejects singular points") {
  Polynomial f = parse_polynomial("x0*x1", 3);
  CurvatureWorkspace ws(f);
  MetricJet m;
  std::string why;
  std::vector<cplx> sing = hom({0.0, 0.0, 1.0});
  CHECK_FALSE(ws.metric_at(sing.data(), m, &why));
  CHECK_FALSE(why.empty());
}

TEST_CASE("workspace rejects bad jet orders") {
  Polynomial f = line_in_p2();
  CHECK_THROWS_AS(CurvatureWorkspace(f, 3), std::invalid_argument);
  CHECK_THROWS_AS(CurvatureWorkspace(f, 10), std::invalid_argument);
}
