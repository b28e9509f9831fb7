#pragma once

#include <vector>

#include "gblab/polynomial.hpp"

namespace gblab {

// Exact homogeneous coordinates of a point in P^N.
using ProjPoint = std::vector<GaussianRational>;

// Isolated hypersurface singularity germ: an exact affine polynomial with
// the base point translated to the origin. f(0) = 0 and grad f(0) = 0 hold
// by construction.
struct GermRecord {
  Polynomial f;
  int num_vars = 0;  // ambient affine dimension N; the germ cuts out dim N-1
};

// Validates the singular-germ conditions after translating base to the origin.
GermRecord make_germ(const Polynomial& f, const std::vector<GaussianRational>& base = {});

// Germ of the hypersurface F = 0 in the affine chart around an exact
// projective point. Throws if the point is not singular on the hypersurface.
GermRecord germ_at(const Polynomial& F, const ProjPoint& p);

// Order of vanishing at the base point.
long multiplicity(const GermRecord& g);

// Colength of the Jacobian ideal, computed by exact rational elimination on
// degree-truncated multiples of the partials. The value must agree over
// three consecutive truncation degrees; degrees are capped at 20. Isolation
// of the critical point is spot-checked numerically on two spheres first.
long milnor_number(const GermRecord& g);

// Independent oracle prod(1/w_i - 1) for a germ that is weighted-homogeneous
// of weight-degree 1. The weight condition is verified termwise, exactly.
long milnor_quasi_homogeneous(const Polynomial& f, const std::vector<Rational>& weights);

// Milnor number of the restriction to a generic codimension-k linear
// subspace through the base point. Three independent exact-rational draws
// must agree; disagreeing rounds are redrawn up to 9 times.
long sectional_milnor(const GermRecord& g, int k);

// 1 - (-1)^n mu_section with n = num_vars - 1.
long euler_obstruction(const GermRecord& g);

// 1 + (-1)^n mu.
long specialization_sigma(const GermRecord& g);

// Euler characteristic of a smooth degree-d hypersurface in P^N:
// d [h^n] (1+h)^{N+1}/(1+dh), n = N-1.
long chi_smooth_hypersurface(int N, int d);

// Chern number c_{i_1} ... c_{i_r} of a smooth degree-d hypersurface in P^N.
// The partition entries must sum to n = N-1.
long chern_number_smooth(int N, int d, const std::vector<int>& partition);

struct SingularityRecord {
  ProjPoint point;
  long mu = 0;
  long mu_section = 0;
  long m = 0;
  long eu = 0;
  long sigma = 0;
};

// Full exact profile of a declared isolated singular point of V(F).
SingularityRecord analyze_singularity(const Polynomial& F, const ProjPoint& p);

// Predicted value of the curvature integral over the smooth locus:
// chi_smooth(N, d) - sum sigma_p + sum Eu_p. Every declared point is
// verified singular exactly; smoothness away from the declared points is
// spot-checked on 1000 sampled points.
long gauss_bonnet_prediction(const Polynomial& F, const std::vector<ProjPoint>& sings);

// Mass captured by shrinking tubes around the singular points in any
// smoothing family: sum (sigma_p - Eu_p) = (-1)^n sum (mu_p + mu_p^section).
long tube_prediction(const Polynomial& F, const std::vector<ProjPoint>& sings);

// Per-point tube mass against the section through the same point:
// (-1)^n mu - m + 1.
long telescoping_prediction(const GermRecord& g);

// Predicted curvature integral over a generic codimension-r linear section:
// r = 0 the full prediction, 0 < r < n the smooth-section chi, r = n the
// degree (point count).
long beta_combinatorial(const Polynomial& F, const std::vector<ProjPoint>& sings, int r);

}  // namespace gblab
