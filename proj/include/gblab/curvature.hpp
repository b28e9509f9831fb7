#pragma once

#include <Eigen/Dense>
#include <string>

#include "gblab/exterior.hpp"
#include "gblab/jet.hpp"

namespace gblab {

// complex matrices capped at 3x3, stack allocated
using SmallMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 3, 3>;

// Second-order germ of the induced Fubini-Study metric at a smooth point of a
// projective hypersurface, in graph coordinates. Indices are unbarred then
// barred: dg[k](i,j) = d_k g_{i jbar}, dbarg[l](i,j) = dbar_l g_{i jbar},
// ddg[k][l](i,j) = d_k dbar_l g_{i jbar}.
struct MetricJet {
  int n = 0;
  int chart = -1;   // homogeneous coordinate fixed to 1
  int solved = -1;  // affine coordinate carried by the graph jet
  std::vector<int> graph_vars;
  std::vector<cplx> point;  // affine coordinates after Newton refinement
  SmallMat g;
  std::array<SmallMat, 3> dg;
  std::array<SmallMat, 3> dbarg;
  std::array<std::array<SmallMat, 3>, 3> ddg;
  double vol_density = 0.0;  // det g
  double reality_defect = 0.0;
  double kahler_defect = 0.0;
};

// Chern curvature as an endomorphism-valued (1,1)-form: theta[i][j] is the
// component acting from dz_j to dz_i directions.
struct CurvatureMatrix {
  int n = 0;
  std::array<std::array<ExteriorForm, 3>, 3> theta;
};

// Evaluation engine for one defining polynomial. Owns compiled charts and all
// jet scratch space so repeated point evaluations do not allocate. One
// instance per thread.
class CurvatureWorkspace {
 public:
  explicit CurvatureWorkspace(const Polynomial& f, int order = kDefaultJetOrder);

  int ambient_dim() const { return N_; }  // P^N
  int dim() const { return n_; }          // n = N-1

  // hom is a length N+1 homogeneous coordinate vector. chart/solved of -1
  // pick the largest modulus coordinate and gradient component. Returns
  // false (with a reason) at points failing the smoothness or residual
  // thresholds.
  bool metric_at(const cplx* hom, MetricJet& out, std::string* why = nullptr, int chart = -1,
                 int solved = -1);

 private:
  void eval_at_jets(const CompiledPoly& cp, cplx* acc);
  void build_phi_powers(int maxdeg);

  int N_;
  int n_;
  int cap_;  // derivative order kept per side (holomorphic / antiholomorphic)
  const JetLayout* lh_;  // holomorphic graph variables
  const JetLayout* lp_;  // paired with conjugates
  std::vector<CompiledPoly> chart_;                 // dehomogenized per chart
  std::vector<std::vector<CompiledPoly>> dchart_;   // their first derivatives
  std::vector<int> embed_;              // holo index -> paired index
  std::vector<std::vector<int>> upow_;  // upow_[g][t] = index of u_g^t, holo layout
  std::vector<int> punit_, aunit_, puu_;  // paired indices of u_g, conj u_g, u_g conj u_g
  std::vector<std::vector<double>> binom_;
  int newton_iters_ = 4;

  // paired-layout read tables
  std::vector<int> idx_g_, idx_dg_, idx_dbarg_, idx_ddg_;
  std::vector<double> fac_dg_, fac_dbarg_, fac_ddg_;

  // scratch, sized lh_->count
  std::vector<std::vector<std::vector<cplx>>> linpow_;  // [affine coord][power]
  std::vector<std::vector<cplx>> phipow_;
  std::vector<cplx> phi_, num_, den_, rden_, ta_, tb_, tc_, td_;
  int solved_now_ = -1;
  std::vector<int> graph_now_;
  // scratch, sized lp_->count
  std::vector<cplx> w_, wc_, s_, pk_, p1_, p2_;
};

// Convenience wrapper for one-shot use in tests and reports.
MetricJet pullback_metric(const Polynomial& f, const std::vector<cplx>& hom_point, int chart = -1,
                          int solved = -1);

// Curvature of the Chern connection from the metric germ alone. The out
// variant clears only the n x n active block and is allocation free.
void chern_curvature(const MetricJet& m, CurvatureMatrix& out);
CurvatureMatrix chern_curvature(const MetricJet& m);

// Total Chern form pieces of degree 2r, normalization (i/2pi)^r included.
// chern_forms writes c^0 .. c^n into out[0..n] without allocating.
void chern_forms(const CurvatureMatrix& th, ExteriorForm* out);
ExteriorForm chern_form(const CurvatureMatrix& th, int r);
std::vector<ExteriorForm> chern_forms_all(const CurvatureMatrix& th);

// Normalized Kahler form: integrates to 1 on a line.
ExteriorForm kahler_form(const MetricJet& m);

// Wedge the factors and return the Lebesgue density of the resulting
// top-degree form. Throws on a degree mismatch or a material imaginary part.
double density(const std::vector<ExteriorForm>& factors);

struct PfaffianCheck {
  double pfaffian_density = 0.0;
  double chern_density = 0.0;
  double rel_err = 0.0;
  double skew_defect = 0.0;
};

// Independent route to the top Chern density: unitary frame via Cholesky,
// real antisymmetric representation, recursive Pfaffian, (2pi)^{-n} scale.
PfaffianCheck pfaffian_crosscheck(const MetricJet& m, const CurvatureMatrix& th);

}  // namespace gblab
