#include "doctest.h"
#include "gblab/invariants.hpp"
#include "gblab/sampler.hpp"

using namespace gblab;

namespace {

GermRecord germ(const char* text, int nv) { return make_germ(parse_polynomial(text, nv)); }

ProjPoint point(std::initializer_list<long> coords) {
  ProjPoint p;
  for (long c : coords) p.push_back(GaussianRational(c));
  return p;
}

}  // namespace

TEST_CASE("milnor numbers of the standard germs") {
  CHECK(milnor_number(germ("x0^2 + x1^2", 2)) == 1);          // node
  CHECK(milnor_number(germ("x0^2 - x1^3", 2)) == 2);          // cusp
  CHECK(milnor_number(germ("x0^2 - x1^5", 2)) == 4);          // A4
  CHECK(milnor_number(germ("x0^3 - x1^4", 2)) == 6);          // E6
  CHECK(milnor_number(germ("x0^2 + x1^2 + x2^2", 3)) == 1);   // 3-fold node
  CHECK(milnor_number(germ("x0^2 + x1^2 + x2^3", 3)) == 2);
  CHECK(milnor_number(germ("x0^3 + x1^3 + x2^3", 3)) == 8);
  CHECK(milnor_number(germ("x0^2*x1 + x1^4", 2)) == 5);       // D5, not quasi-homogeneous scale
}

TEST_CASE("quasi-homogeneous oracle agrees with the colength computation") {
  struct Case {
    const char* text;
    int nv;
    std::vector<Rational> w;
  };
  for (const Case& c : {Case{"x0^2 - x1^3", 2, {Rational(1, 2), Rational(1, 3)}},
                        Case{"x0^2 - x1^5", 2, {Rational(1, 2), Rational(1, 5)}},
                        Case{"x0^3 - x1^4", 2, {Rational(1, 3), Rational(1, 4)}},
                        Case{"x0^3 + x1^3 + x2^3", 3,
                             {Rational(1, 3), Rational(1, 3), Rational(1, 3)}}}) {
    Polynomial f = parse_polynomial(c.text, c.nv);
    CHECK(milnor_quasi_homogeneous(f, c.w) == milnor_number(make_germ(f)));
  }
  // wrong weights are rejected
  CHECK_THROWS(milnor_quasi_homogeneous(parse_polynomial("x0^2 - x1^3", 2),
                                        {Rational(1, 2), Rational(1, 2)}));
}

TEST_CASE("milnor number is invariant under exact linear changes") {
  Polynomial f = parse_polynomial("x0^2 - x1^3", 2);
  long mu0 = milnor_number(make_germ(f));
  Rng rng(0x11223344ULL);
  int done = 0;
  for (int t = 0; done < 10 && t < 30; ++t) {
    GaussMat a(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        a.at(i, j) = GaussianRational(Rational(static_cast<long>(rng.next_u64() % 11) - 5,
                                               1 + static_cast<long>(rng.next_u64() % 4)));
    GaussMat chk = a;
    if (exact_rank(chk) < 2) continue;
    CHECK(milnor_number(make_germ(substitute_linear(f, a))) == mu0);
    ++done;
  }
  CHECK(done == 10);
}

TEST_CASE("sectional milnor numbers") {
  // generic plane section of the 3-fold node is a plane node
  CHECK(sectional_milnor(germ("x0^2 + x1^2 + x2^2", 3), 1) == 1);
  // sections of plane-curve germs by a generic line: multiplicity - 1
  CHECK(sectional_milnor(germ("x0^2 - x1^3", 2), 1) == 1);
  CHECK(sectional_milnor(germ("x0^3 - x1^4", 2), 1) == 2);
  // codimension must cut something and leave a curve
  CHECK_THROWS(sectional_milnor(germ("x0^2 - x1^3", 2), 0));
  CHECK_THROWS(sectional_milnor(germ("x0^2 - x1^3", 2), 2));
}

TEST_CASE("multiplicity and euler obstruction") {
  CHECK(multiplicity(germ("x0^2 - x1^3", 2)) == 2);
  CHECK(multiplicity(germ("x0^3 - x1^4", 2)) == 3);
  // plane curves: Eu equals the multiplicity
  for (const char* text : {"x0^2 + x1^2", "x0^2 - x1^3", "x0^2 - x1^5", "x0^3 - x1^4",
                           "x0^3 + x1^3"}) {
    GermRecord g = germ(text, 2);
    CHECK(euler_obstruction(g) == multiplicity(g));
  }
  // tacnode x0^2 - x1^4: Eu = m = 2
  CHECK(euler_obstruction(germ("x0^2 - x1^4", 2)) == 2);
  // ordinary triple point
  CHECK(euler_obstruction(germ("x0^3 + x1^3", 2)) == 3);
  // cone vertex in 3 variables: mu_section = 1, Eu = 1 - mu_section = 0
  CHECK(euler_obstruction(germ("x0*x1 - x2^2", 3)) == 0);
}

TEST_CASE("specialization defect") {
  CHECK(specialization_sigma(germ("x0^2 + x1^2", 2)) == 0);    // node: 1 - 1
  CHECK(specialization_sigma(germ("x0^2 - x1^3", 2)) == -1);   // cusp: 1 - 2
  CHECK(specialization_sigma(germ("x0*x1 - x2^2", 3)) == 2);   // cone: 1 + 1
}

TEST_CASE("euler characteristics of smooth hypersurfaces") {
  CHECK(chi_smooth_hypersurface(2, 1) == 2);   // line
  CHECK(chi_smooth_hypersurface(2, 2) == 2);   // conic
  CHECK(chi_smooth_hypersurface(2, 3) == 0);   // elliptic curve
  CHECK(chi_smooth_hypersurface(2, 4) == -4);  // genus 3
  CHECK(chi_smooth_hypersurface(3, 2) == 4);   // quadric surface
  CHECK(chi_smooth_hypersurface(3, 3) == 9);   // cubic surface
  CHECK(chi_smooth_hypersurface(3, 4) == 24);  // quartic K3
  CHECK(chi_smooth_hypersurface(4, 2) == 4);   // quadric 3-fold
}

TEST_CASE("chern numbers of smooth hypersurfaces") {
  CHECK(chern_number_smooth(3, 2, {1, 1}) == 8);   // quadric c1^2
  CHECK(chern_number_smooth(3, 2, {2}) == 4);      // quadric c2 = chi
  CHECK(chern_number_smooth(3, 3, {1, 1}) == 3);   // cubic surface K^2
  CHECK(chern_number_smooth(3, 3, {2}) == 9);
  CHECK(chern_number_smooth(3, 4, {1, 1}) == 0);   // K3
  CHECK(chern_number_smooth(2, 3, {1}) == 0);      // elliptic curve
  CHECK_THROWS(chern_number_smooth(3, 2, {1}));    // partition does not sum to n
}

TEST_CASE("singularity analysis at a projective point") {
  Polynomial F = parse_polynomial("x2^2*x0 - x1^3", 3);  // cuspidal cubic
  SingularityRecord rec = analyze_singularity(F, point({1, 0, 0}));
  CHECK(rec.mu == 2);
  CHECK(rec.m == 2);
  CHECK(rec.mu_section == 1);
  CHECK(rec.eu == 2);
  CHECK(rec.sigma == -1);

  // a smooth point is rejected
  CHECK_THROWS(analyze_singularity(F, point({1, 1, 1})));
}

TEST_CASE("gauss bonnet predictions") {
  CHECK(gauss_bonnet_prediction(parse_polynomial("x2^2*x0 - x1^3 - x0*x1^2", 3),
                                {point({1, 0, 0})}) == 2);  // nodal cubic
  CHECK(gauss_bonnet_prediction(parse_polynomial("x2^2*x0 - x1^3", 3),
                                {point({1, 0, 0})}) == 3);  // cuspidal cubic
  CHECK(gauss_bonnet_prediction(parse_polynomial("x0*x1", 3),
                                {point({0, 0, 1})}) == 4);  // crossing lines
  CHECK(gauss_bonnet_prediction(parse_polynomial("x0*x1 - x2^2", 4),
                                {point({0, 0, 0, 1})}) == 2);  // quadric cone
  // smooth: no singular points declared
  CHECK(gauss_bonnet_prediction(parse_polynomial("x0*x2 - x1^2", 3), {}) == 2);
  // a non-reduced polynomial fails the smoothness sweep or the sampler budget
  CHECK_THROWS(gauss_bonnet_prediction(parse_polynomial("x0^2", 3), {}));
  // a declared point that is not singular must be rejected
  CHECK_THROWS(gauss_bonnet_prediction(parse_polynomial("x0*x2 - x1^2", 3),
                                       {point({0, 0, 1})}));
  // repeated declarations are rejected even when scaled
  CHECK_THROWS(gauss_bonnet_prediction(parse_polynomial("x0*x1", 3),
                                       {point({0, 0, 1}), point({0, 0, 3})}));
}

TEST_CASE("tube and telescoping predictions") {
  CHECK(tube_prediction(parse_polynomial("x0*x1", 3), {point({0, 0, 1})}) == -2);
  CHECK(tube_prediction(parse_polynomial("x2^2*x0 - x1^3 - x0*x1^2", 3),
                        {point({1, 0, 0})}) == -2);
  CHECK(tube_prediction(parse_polynomial("x0*x1 - x2^2", 4), {point({0, 0, 0, 1})}) == 2);

  CHECK(telescoping_prediction(germ("x0^2 + x1^2", 2)) == -2);  // node: -1 - 2 + 1
  CHECK(telescoping_prediction(germ("x0^2 - x1^3", 2)) == -3);  // cusp: -2 - 2 + 1
  CHECK(telescoping_prediction(germ("x0*x1 - x2^2", 3)) == 0);  // cone: 1 - 2 + 1
}

TEST_CASE("combinatorial section profile") {
  Polynomial cone = parse_polynomial("x0*x1 - x2^2", 4);
  std::vector<ProjPoint> sing = {point({0, 0, 0, 1})};
  CHECK(beta_combinatorial(cone, sing, 0) == 2);
  CHECK(beta_combinatorial(cone, sing, 1) == 2);
  CHECK(beta_combinatorial(cone, sing, 2) == 2);

  Polynomial quadric = parse_polynomial("x0*x3 - x1*x2", 4);
  CHECK(beta_combinatorial(quadric, {}, 0) == 4);
  CHECK(beta_combinatorial(quadric, {}, 1) == 2);
  CHECK(beta_combinatorial(quadric, {}, 2) == 2);

  Polynomial nodal = parse_polynomial("x2^2*x0 - x1^3 - x0*x1^2", 3);
  CHECK(beta_combinatorial(nodal, {point({1, 0, 0})}, 0) == 2);
  CHECK(beta_combinatorial(nodal, {point({1, 0, 0})}, 1) == 3);
}

TEST_CASE("germ construction rejects bad input") {
  // min degree below two means the origin is a smooth point
  CHECK_THROWS(make_germ(parse_polynomial("x0 + x1^2", 2)));
  CHECK_THROWS(make_germ(Polynomial(2)));
  // germ at a projective point with a nonzero coordinate scale
  Polynomial F = parse_polynomial("x2^2*x0 - x1^3", 3);
  ProjPoint p = {GaussianRational(Rational(5)), GaussianRational(0), GaussianRational(0)};
  GermRecord g = germ_at(F, p);
  CHECK(g.num_vars == 2);
  CHECK(milnor_number(g) == 2);
}

TEST_CASE("non isolated singularities are refused") {
  // x0^2 has a whole singular line: truncation never stabilizes and the
  // isolation spot check trips first
  CHECK_THROWS(milnor_number(germ("x0^2", 2)));
}
