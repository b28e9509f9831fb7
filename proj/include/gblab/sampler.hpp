#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gblab/curvature.hpp"
#include "gblab/polynomial.hpp"

namespace gblab {

// Deterministic counter-style generator. Every projective line drawn by the
// sampler gets its own stream keyed by the global line index, so estimates do
// not depend on the worker count.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}
  uint64_t next_u64();
  double uniform();  // [0,1)
  double normal();
  cplx gaussian();  // independent standard normal real and imaginary parts

 private:
  uint64_t state_;
  double cache_ = 0.0;
  bool has_cache_ = false;
};

uint64_t mix_seed(uint64_t seed, uint64_t index);

double projective_volume(int n);  // pi^n / n!

// Orthonormal spanning pair of a line in P^N, N <= 7.
struct ProjectiveLine {
  int N = 0;
  std::array<cplx, 8> a{}, b{};
};

ProjectiveLine haar_line(Rng& rng, int ambient_dim);

// Chordal (Fubini-Study) distance between homogeneous points.
double fs_distance(const cplx* p, const cplx* q, int ambient_dim);

struct TubeSpec {
  enum class Shape { FsBall, Polydisk };
  Shape shape = Shape::FsBall;
  std::vector<std::vector<cplx>> centers;  // homogeneous coordinates
  double radius = 0.0;
  int chart = -1;  // polydisk only
  bool contains(const cplx* p, int ambient_dim) const;
};

struct RegionFilter {
  enum class Kind { All, InsideTube, OutsideTube };
  Kind kind = Kind::All;
  TubeSpec tube;
  static RegionFilter all() { return {}; }
  static RegionFilter inside(TubeSpec t) { return {Kind::InsideTube, std::move(t)}; }
  static RegionFilter outside(TubeSpec t) { return {Kind::OutsideTube, std::move(t)}; }
  bool accepts(const cplx* p, int ambient_dim) const;
};

// Product of Chern form factors and Kahler form powers; total form degree
// must equal the variety dimension. volume() integrates the metric volume.
struct FormIntegrand {
  std::vector<int> degrees;  // Chern degrees, each in [1, n]
  int omega_power = 0;
  bool is_volume = false;
  std::string label;

  static FormIntegrand volume();
  static FormIntegrand chern(std::vector<int> degrees, int omega_power = 0);
  static FormIntegrand euler(int n) { return chern({n}); }
  int form_degree() const;
};

struct IntegralEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long lines = 0;
  long resampled = 0;
  uint64_t seed = 0;
};

struct CroftonRequest {
  Polynomial f;
  std::vector<FormIntegrand> integrands;
  std::vector<RegionFilter> filters;  // defaults to a single All filter
  long lines = 100000;
  uint64_t seed = 1;
  int workers = 1;
};

// Monte-Carlo Crofton integration over the smooth locus: one shared sampling
// pass evaluates every (filter, integrand) pair. result[filter][integrand].
std::vector<std::vector<IntegralEstimate>> crofton(const CroftonRequest& req);

// Single integrand, no filter convenience form.
IntegralEstimate crofton_integral(const Polynomial& f, const FormIntegrand& integrand, long lines,
                                  uint64_t seed, int workers = 1);

// Restriction of f to a Haar-random linear subspace of the given projective
// dimension, with a sampled smoothness check. Throws after repeated failures.
Polynomial linear_section(const Polynomial& f, int target_dim, Rng& rng, int spot_checks = 100);

// Samples points on the variety and runs the metric pipeline at each; returns
// the first failure reason, if any.
std::optional<std::string> smoothness_spot_check(const Polynomial& f, long points, uint64_t seed);

// Unit-norm homogeneous points on the variety drawn by random line sections.
// Throws when the line budget runs out (e.g. for a non-reduced polynomial).
std::vector<std::vector<cplx>> sample_points(const Polynomial& f, long count, uint64_t seed);

// Number of intersection points with a generic line, checked for agreement
// across independent trials. For a reduced hypersurface this is the degree.
int generic_line_point_count(const Polynomial& f, uint64_t seed, int trials = 32);

// Weighted least squares with explicit design columns. Returns coefficients
// and their standard errors from the inverse normal matrix.
struct WlsFit {
  std::vector<double> coeffs;
  std::vector<double> errors;
};
WlsFit weighted_least_squares(const std::vector<std::vector<double>>& columns,
                              const std::vector<double>& y, const std::vector<double>& weights);

// Excision scan of the family f0 + delta * g. For every delta a single
// sampling pass evaluates the integrand outside tubes of every radius in
// epsilons. Per epsilon, estimates are averaged over the detected small-delta
// plateau, then the epsilon -> 0 limit is extrapolated by weighted least
// squares in epsilon^2 (optionally with a linear epsilon term, for excision
// boundaries with cusp-like tails).
struct TubeScanConfig {
  Polynomial f0;
  Polynomial g;                 // ignored when deltas == {0}
  std::vector<double> deltas;   // descending; {0} scans f0 itself
  std::vector<double> epsilons;  // ascending
  TubeSpec tube;                 // radius field is overridden per epsilon
  bool inside = false;           // integrate inside the tubes instead of outside
  FormIntegrand integrand;
  long lines_per_cell = 100000;
  uint64_t seed = 1;
  int workers = 1;
  double fit_cutoff = 0.35;  // epsilons above this are excluded from the fit
  bool linear_eps_term = false;
};

struct TubeScanResult {
  struct Cell {
    double delta = 0.0, epsilon = 0.0, mean = 0.0, std_error = 0.0;
    long lines = 0, resampled = 0;
  };
  std::vector<Cell> cells;  // delta-major, epsilon-minor
  struct EpsRow {
    double epsilon = 0.0, value = 0.0, std_error = 0.0;
    int plateau_from = 0;  // index into deltas
  };
  std::vector<EpsRow> rows;
  std::vector<double> fit_coeffs;
  std::vector<double> fit_errors;
  double extrapolated = 0.0;
  double extrapolated_err = 0.0;
};

TubeScanResult family_tube_scan(const TubeScanConfig& cfg);

}  // namespace gblab
