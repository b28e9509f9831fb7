#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "gblab/sampler.hpp"

using namespace gblab;

TEST_CASE("rng determinism and moments") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  Rng r(7);
  double s = 0, s2 = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    double x = r.normal();
    s += x;
    s2 += x * x;
  }
  CHECK(std::abs(s / n) < 0.03);
  CHECK(std::abs(s2 / n - 1.0) < 0.05);

  // mix_seed decorrelates consecutive indices
  CHECK(mix_seed(1, 2) != mix_seed(1, 3));
  CHECK(mix_seed(1, 2) != mix_seed(2, 2));
}

TEST_CASE("projective volumes") {
  CHECK(projective_volume(1) == doctest::Approx(M_PI).epsilon(1e-14));
  CHECK(projective_volume(2) == doctest::Approx(M_PI * M_PI / 2).epsilon(1e-14));
  CHECK(projective_volume(3) == doctest::Approx(std::pow(M_PI, 3) / 6).epsilon(1e-14));
}

TEST_CASE("haar line frames are orthonormal") {
  Rng rng(123);
  for (int N : {2, 3}) {
    for (int t = 0; t < 50; ++t) {
      ProjectiveLine l = haar_line(rng, N);
      cplx na = 0, nb = 0, ab = 0;
      for (int i = 0; i <= N; ++i) {
        na += l.a[i] * std::conj(l.a[i]);
        nb += l.b[i] * std::conj(l.b[i]);
        ab += l.a[i] * std::conj(l.b[i]);
      }
      CHECK(std::abs(na - 1.0) < 1e-12);
      CHECK(std::abs(nb - 1.0) < 1e-12);
      CHECK(std::abs(ab) < 1e-12);
    }
  }
}

TEST_CASE("haar line direction is uniform") {
  // |<a, e0>|^2 of a Haar-random unit vector in C^{N+1} is Beta(1, N):
  // P(|<a,e0>|^2 <= t) = 1 - (1-t)^N. Kolmogorov-Smirnov at 1%.
  const int N = 2;
  const int n = 4000;
  std::vector<double> u(n);
  Rng rng(777);
  for (int i = 0; i < n; ++i) {
    ProjectiveLine l = haar_line(rng, N);
    double t = std::norm(l.a[0]);
    u[i] = 1.0 - std::pow(1.0 - t, N);
  }
  std::sort(u.begin(), u.end());
  double ks = 0.0;
  for (int i = 0; i < n; ++i) {
    ks = std::max(ks, std::abs(u[i] - (i + 1.0) / n));
    ks = std::max(ks, std::abs(u[i] - static_cast<double>(i) / n));
  }
  // 1% critical value 1.63 / sqrt(n)
  CHECK(ks < 1.63 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("fs distance properties") {
  std::vector<cplx> p = {1.0, 0.0, 0.0};
  std::vector<cplx> q = {0.0, 1.0, 0.0};
  std::vector<cplx> p2 = {{2.0, 1.0}, 0.0, 0.0};
  for (auto& x : p2) x *= cplx{2.0, 1.0};
  CHECK(fs_distance(p.data(), p.data(), 2) == doctest::Approx(0.0).epsilon(1e-12));
  // orthogonal points sit at the diameter, a quarter turn
  CHECK(fs_distance(p.data(), q.data(), 2) == doctest::Approx(M_PI / 2).epsilon(1e-12));
  CHECK(fs_distance(p.data(), p2.data(), 2) < 1e-12);  // scale invariant
}

TEST_CASE("volume of a plane curve is d * pi") {
  // Crofton with the volume integrand: expectation d * vol(P^1) per line
  for (auto [text, d] : {std::pair<const char*, int>{"x0 + x1 + x2", 1},
                         {"x0*x2 - x1^2", 2}}) {
    Polynomial f = parse_polynomial(text, 3);
    IntegralEstimate est = crofton_integral(f, FormIntegrand::volume(), 40000, 99);
    // the per-line count is constant, so only float rounding is left
    CHECK(std::abs(est.mean - d * M_PI) <= std::max(3.5 * est.std_error, 1e-9));
    CHECK(est.std_error < 0.05 * d * M_PI);
  }
}

TEST_CASE("conic euler estimate is unbiased") {
  // curvature integrands carry a line-dependent incidence weight, so the
  // estimator has variance even on a homogeneous variety
  Polynomial f = parse_polynomial("x0*x2 - x1^2", 3);
  IntegralEstimate est = crofton_integral(f, FormIntegrand::euler(1), 20000, 5);
  CHECK(est.std_error > 0.0);
  CHECK(est.std_error < 0.02);
  CHECK(std::abs(est.mean - 2.0) <= 3.5 * est.std_error);
}

TEST_CASE("quadric surface chern integrals have zero variance") {
  Polynomial f = parse_polynomial("x0*x3 - x1*x2", 4);
  CroftonRequest req;
  req.f = f;
  req.integrands = {FormIntegrand::chern({2}), FormIntegrand::chern({1, 1}),
                    FormIntegrand::chern({1}, 1)};
  req.lines = 500;
  req.seed = 17;
  auto est = crofton(req)[0];
  CHECK(std::abs(est[0].mean - 4.0) < 1e-9);
  CHECK(std::abs(est[1].mean - 8.0) < 1e-9);
  CHECK(std::abs(est[2].mean - 4.0) < 1e-9);
  for (const auto& e : est) CHECK(e.std_error < 1e-9);
}

TEST_CASE("inside plus outside equals unfiltered") {
  Polynomial f = parse_polynomial("x2^2*x0 - x1^3 - x0*x1^2", 3);
  TubeSpec tube;
  tube.shape = TubeSpec::Shape::FsBall;
  tube.centers = {{1.0, 0.0, 0.0}};
  tube.radius = 0.4;
  CroftonRequest req;
  req.f = f;
  req.integrands = {FormIntegrand::volume()};
  req.filters = {RegionFilter::all(), RegionFilter::inside(tube), RegionFilter::outside(tube)};
  req.lines = 20000;
  req.seed = 31;
  auto est = crofton(req);
  const double all = est[0][0].mean, in = est[1][0].mean, out = est[2][0].mean;
  CHECK(std::abs(all - in - out) < 1e-11 * (1.0 + std::abs(all)));
}

TEST_CASE("estimates do not depend on the worker count") {
  Polynomial f = parse_polynomial("x0^3 + x1^3 + x2^3", 3);
  IntegralEstimate w1 = crofton_integral(f, FormIntegrand::euler(1), 30000, 21, 1);
  IntegralEstimate w4 = crofton_integral(f, FormIntegrand::euler(1), 30000, 21, 4);
  IntegralEstimate w16 = crofton_integral(f, FormIntegrand::euler(1), 30000, 21, 16);
  // bitwise equality: the block reduction order is fixed by line index
  CHECK(w1.mean == w4.mean);
  CHECK(w1.std_error == w4.std_error);
  CHECK(w1.mean == w16.mean);
  CHECK(w1.std_error == w16.std_error);
}

TEST_CASE("linear sections stay smooth and drop dimension") {
  Polynomial f = parse_polynomial("x0*x3 - x1*x2", 4);
  Rng rng(0x5ec71055ULL);
  Polynomial sec = linear_section(f, 2, rng);
  CHECK(sec.num_vars() == 3);
  CHECK(sec.degree() == 2);
  CHECK(sec.is_homogeneous());
  CHECK_FALSE(smoothness_spot_check(sec, 64, 2024).has_value());
}

TEST_CASE("sampled variety points satisfy the equation") {
  Polynomial f = parse_polynomial("x0^3 + x1^3 + x2^3 + x0*x1*x2", 3);
  auto pts = sample_points(f, 32, 0xbeefULL);
  CHECK(pts.size() == 32);
  for (const auto& p : pts) {
    double nn = 0.0;
    for (cplx x : p) nn += std::norm(x);
    CHECK(std::abs(nn - 1.0) < 1e-12);
    CHECK(std::abs(f.evaluate(p)) < 1e-10);
  }
}

TEST_CASE("generic line point count recovers the degree") {
  CHECK(generic_line_point_count(parse_polynomial("x0 + 2*x1 - x2", 3), 1) == 1);
  CHECK(generic_line_point_count(parse_polynomial("x0*x2 - x1^2", 3), 2) == 2);
  CHECK(generic_line_point_count(parse_polynomial("x0*x1 - x2^2", 4), 3) == 2);
  CHECK(generic_line_point_count(parse_polynomial("x2^2*x0 - x1^3", 3), 4) == 3);
}

TEST_CASE("weighted least squares recovers a planted model") {
  // y = 3 - 2 x + 0.5 x^2 exactly; wls must reproduce it through the normal
  // equations regardless of weights
  std::vector<double> xs = {0.1, 0.2, 0.3, 0.5, 0.8};
  std::vector<std::vector<double>> cols(3);
  std::vector<double> y, w;
  for (double x : xs) {
    cols[0].push_back(1.0);
    cols[1].push_back(x);
    cols[2].push_back(x * x);
    y.push_back(3.0 - 2.0 * x + 0.5 * x * x);
    w.push_back(1.0 / (0.01 + x));
  }
  WlsFit fit = weighted_least_squares(cols, y, w);
  CHECK(fit.coeffs[0] == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(fit.coeffs[1] == doctest::Approx(-2.0).epsilon(1e-9));
  CHECK(fit.coeffs[2] == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("tube scan on a family finds the plateau and the limit") {
  // conic family x0*x1 - delta*x2^2: the outside-tube integral extrapolates
  // to the curvature integral over the two crossing lines, 2 + 2 = 4
  TubeScanConfig cfg;
  cfg.f0 = parse_polynomial("x0*x1", 3);
  cfg.g = parse_polynomial("-x2^2", 3);
  cfg.deltas = {1e-2, 1e-3, 1e-4};
  cfg.epsilons = {0.15, 0.2, 0.3};
  cfg.tube.shape = TubeSpec::Shape::Polydisk;
  cfg.tube.chart = 2;
  cfg.tube.centers = {{0.0, 0.0, 1.0}};
  cfg.integrand = FormIntegrand::euler(1);
  cfg.lines_per_cell = 60000;
  cfg.seed = 2;
  TubeScanResult ts = family_tube_scan(cfg);
  REQUIRE(ts.cells.size() == 9);
  REQUIRE(ts.rows.size() == 3);
  CHECK(std::isfinite(ts.extrapolated));
  CHECK(std::abs(ts.extrapolated - 4.0) < std::max(3.0 * ts.extrapolated_err, 0.08));

  // worker independence extends through the scan
  cfg.workers = 4;
  TubeScanResult ts4 = family_tube_scan(cfg);
  CHECK(ts.extrapolated == ts4.extrapolated);
  for (size_t i = 0; i < ts.cells.size(); ++i) CHECK(ts.cells[i].mean == ts4.cells[i].mean);
}
