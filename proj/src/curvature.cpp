#include "gblab/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gblab {

namespace {
constexpr double kPi = std::numbers::pi;
}

CurvatureWorkspace::CurvatureWorkspace(const Polynomial& f, int order)
    : N_(f.num_vars() - 1), n_(f.num_vars() - 2), cap_(order / 2) {
  if (f.degree() < 1) throw std::invalid_argument("defining polynomial must be nonconstant");
  if (!f.is_homogeneous()) throw std::invalid_argument("defining polynomial must be homogeneous");
  if (n_ < 1 || n_ > 3) throw std::invalid_argument("variety dimension must be 1, 2 or 3");
  if (order < 4 || order > 8 || order % 2 != 0)
    throw std::invalid_argument("jet order must be even, between 4 and 8");
  const int d = f.degree();
  if (d > 32) throw std::invalid_argument("degree too large");

  // the metric tensor and its first two derivative levels read coefficients
  // of bidegree at most (2,2), so per-side truncation loses nothing
  lh_ = &JetLayout::get(n_, cap_);
  lp_ = &JetLayout::get_paired_capped(n_, cap_);

  chart_.reserve(N_ + 1);
  dchart_.resize(N_ + 1);
  for (int c = 0; c <= N_; ++c) {
    chart_.push_back(compile(f.dehomogenized(c)));
    dchart_[c].reserve(N_);
    for (int v = 0; v < N_; ++v) dchart_[c].push_back(chart_[c].derivative(v));
  }

  embed_.resize(lh_->count);
  for (int ih = 0; ih < lh_->count; ++ih) embed_[ih] = lp_->index_of(lh_->exps[ih].data());

  upow_.assign(n_, std::vector<int>(cap_ + 1));
  punit_.resize(n_);
  aunit_.resize(n_);
  puu_.resize(n_);
  for (int g = 0; g < n_; ++g) {
    std::array<uint8_t, 8> e{};
    for (int t = 0; t <= cap_; ++t) {
      e[g] = static_cast<uint8_t>(t);
      upow_[g][t] = lh_->index_of(e.data());
    }
    e = {};
    e[g] = 1;
    punit_[g] = lp_->index_of(e.data());
    e = {};
    e[n_ + g] = 1;
    aunit_[g] = lp_->index_of(e.data());
    e = {};
    e[g] = 1;
    e[n_ + g] = 1;
    puu_[g] = lp_->index_of(e.data());
  }

  const int n = n_;
  idx_g_.resize(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      std::array<uint8_t, 8> e{};
      e[i] += 1;
      e[n + j] += 1;
      idx_g_[i * n + j] = lp_->index_of(e.data());
    }
  idx_dg_.resize(n * n * n);
  fac_dg_.resize(n * n * n);
  idx_dbarg_.resize(n * n * n);
  fac_dbarg_.resize(n * n * n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        std::array<uint8_t, 8> e{};
        e[k] += 1;
        e[i] += 1;
        e[n + j] += 1;
        idx_dg_[(k * n + i) * n + j] = lp_->index_of(e.data());
        fac_dg_[(k * n + i) * n + j] = (k == i) ? 2.0 : 1.0;
        e = {};
        e[i] += 1;
        e[n + k] += 1;
        e[n + j] += 1;
        idx_dbarg_[(k * n + i) * n + j] = lp_->index_of(e.data());
        fac_dbarg_[(k * n + i) * n + j] = (k == j) ? 2.0 : 1.0;
      }
  idx_ddg_.resize(n * n * n * n);
  fac_ddg_.resize(n * n * n * n);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          std::array<uint8_t, 8> e{};
          e[k] += 1;
          e[i] += 1;
          e[n + l] += 1;
          e[n + j] += 1;
          const int a = ((k * n + l) * n + i) * n + j;
          idx_ddg_[a] = lp_->index_of(e.data());
          fac_ddg_[a] = ((k == i) ? 2.0 : 1.0) * ((l == j) ? 2.0 : 1.0);
        }

  binom_.assign(d + 1, std::vector<double>(d + 1, 0.0));
  for (int t = 0; t <= d; ++t) {
    binom_[t][0] = 1.0;
    for (int s = 1; s <= t; ++s)
      binom_[t][s] = binom_[t - 1][s - 1] + ((s <= t - 1) ? binom_[t - 1][s] : 0.0);
  }

  linpow_.resize(N_);
  for (int v = 0; v < N_; ++v) linpow_[v].assign(d + 1, std::vector<cplx>(lh_->count));
  phipow_.assign(d + 1, std::vector<cplx>(lh_->count));
  phi_.resize(lh_->count);
  num_.resize(lh_->count);
  den_.resize(lh_->count);
  rden_.resize(lh_->count);
  ta_.resize(lh_->count);
  tb_.resize(lh_->count);
  tc_.resize(lh_->count);
  td_.resize(lh_->count);
  w_.resize(lp_->count);
  wc_.resize(lp_->count);
  s_.resize(lp_->count);
  pk_.resize(lp_->count);
  p1_.resize(lp_->count);
  p2_.resize(lp_->count);
  newton_iters_ = static_cast<int>(std::ceil(std::log2(cap_ + 1.0)));
}

void CurvatureWorkspace::build_phi_powers(int maxdeg) {
  jl_clear(*lh_, phipow_[0].data());
  phipow_[0][0] = 1.0;
  if (maxdeg >= 1) jl_copy(*lh_, phipow_[1].data(), phi_.data());
  for (int t = 2; t <= maxdeg; ++t)
    jl_mul(*lh_, phipow_[t].data(), phipow_[t - 1].data(), phi_.data());
}

void CurvatureWorkspace::eval_at_jets(const CompiledPoly& cp, cplx* acc) {
  jl_clear(*lh_, acc);
  for (const auto& t : cp.terms) {
    cplx* cur = nullptr;
    for (int v = 0; v < cp.nvars; ++v) {
      const int k = t.e[v];
      if (k == 0) continue;
      const cplx* pw = (v == solved_now_) ? phipow_[k].data() : linpow_[v][k].data();
      if (cur == nullptr) {
        jl_copy(*lh_, td_.data(), pw);
        cur = td_.data();
      } else {
        cplx* dst = (cur == td_.data()) ? tc_.data() : td_.data();
        jl_mul(*lh_, dst, cur, pw);
        cur = dst;
      }
    }
    if (cur == nullptr)
      acc[0] += t.c;
    else
      jl_axpy(*lh_, acc, t.c, cur);
  }
}

bool CurvatureWorkspace::metric_at(const cplx* hom, MetricJet& out, std::string* why, int chart,
                                   int solved) {
  auto fail = [&](const char* msg) {
    if (why) *why = msg;
    return false;
  };
  if (chart < 0) {
    double best = -1.0;
    for (int i = 0; i <= N_; ++i) {
      const double a = std::abs(hom[i]);
      if (a > best) {
        best = a;
        chart = i;
      }
    }
  }
  if (chart > N_) return fail("chart index out of range");
  if (std::abs(hom[chart]) == 0.0) return fail("degenerate chart coordinate");
  const cplx cinv = 1.0 / hom[chart];
  cplx w[8] = {};
  {
    int a = 0;
    for (int i = 0; i <= N_; ++i)
      if (i != chart) w[a++] = hom[i] * cinv;
  }

  const CompiledPoly& fcp = chart_[chart];
  const int fdeg = fcp.degree;
  double pscale = 1.0;
  for (int v = 0; v < N_; ++v) pscale = std::max(pscale, std::abs(w[v]));
  const double cs = std::max(1.0, fcp.coeff_scale);
  const double fscale = cs * std::pow(pscale, fdeg);
  const double gscale = cs * std::max(1, fdeg) * std::pow(pscale, std::max(0, fdeg - 1));

  cplx grad[8];
  fcp.gradient(w, grad);
  if (solved < 0) {
    double best = -1.0;
    for (int v = 0; v < N_; ++v) {
      const double a = std::abs(grad[v]);
      if (a > best) {
        best = a;
        solved = v;
      }
    }
  }
  if (solved >= N_) return fail("solved index out of range");
  if (std::abs(grad[solved]) <= 1e-8 * gscale)
    return fail("gradient pivot below smoothness threshold");

  const CompiledPoly& dcp = dchart_[chart][solved];
  for (int step = 0; step < 2; ++step) {
    const cplx fv = fcp.eval(w);
    const cplx gv = dcp.eval(w);
    if (std::abs(gv) <= 1e-12 * gscale) break;
    w[solved] -= fv / gv;
  }
  if (std::abs(fcp.eval(w)) > 1e-9 * fscale) return fail("residual not reduced by refinement");

  solved_now_ = solved;
  graph_now_.clear();
  for (int v = 0; v < N_; ++v)
    if (v != solved) graph_now_.push_back(v);

  // powers of the affine graph coordinates w_v + u_g
  for (int gi = 0; gi < n_; ++gi) {
    const int v = graph_now_[gi];
    auto& pows = linpow_[v];
    jl_clear(*lh_, pows[0].data());
    pows[0][0] = 1.0;
    cplx wpow[33];
    wpow[0] = 1.0;
    for (int q = 1; q <= fdeg; ++q) wpow[q] = wpow[q - 1] * w[v];
    for (int t = 1; t <= fdeg; ++t) {
      cplx* dst = pows[t].data();
      jl_clear(*lh_, dst);
      const int smax = std::min(t, cap_);
      for (int s = 0; s <= smax; ++s) dst[upow_[gi][s]] = binom_[t][s] * wpow[t - s];
    }
  }

  // Newton iteration for the solved coordinate as a jet in the graph variables
  jl_clear(*lh_, phi_.data());
  phi_[0] = w[solved];
  for (int it = 0; it < newton_iters_; ++it) {
    build_phi_powers(fdeg);
    eval_at_jets(fcp, num_.data());
    eval_at_jets(dcp, den_.data());
    jl_recip(*lh_, rden_.data(), den_.data(), ta_.data(), tb_.data());
    jl_mul(*lh_, ta_.data(), num_.data(), rden_.data());
    for (int idx = 0; idx < lh_->count; ++idx) phi_[idx] -= ta_[idx];
  }
  build_phi_powers(fdeg);
  eval_at_jets(fcp, num_.data());
  double resid = 0.0;
  for (int idx = 0; idx < lh_->count; ++idx) resid = std::max(resid, std::abs(num_[idx]));
  if (resid > 1e-9 * fscale) return fail("implicit graph residual above tolerance");
  w[solved] = phi_[0];

  // potential jet: log(1 + sum over affine coordinates of |W_v|^2)
  jl_clear(*lp_, s_.data());
  s_[0] = 1.0;
  for (int gi = 0; gi < n_; ++gi) {
    const int v = graph_now_[gi];
    s_[0] += w[v] * std::conj(w[v]);
    s_[punit_[gi]] += std::conj(w[v]);
    s_[aunit_[gi]] += w[v];
    s_[puu_[gi]] += 1.0;
  }
  {
    jl_clear(*lp_, w_.data());
    for (int ih = 0; ih < lh_->count; ++ih) w_[embed_[ih]] = phi_[ih];
    const auto& cp = lp_->conj_perm;
    for (int idx = 0; idx < lp_->count; ++idx) wc_[cp[idx]] = std::conj(w_[idx]);
    jl_mul(*lp_, p1_.data(), w_.data(), wc_.data());
    for (int idx = 0; idx < lp_->count; ++idx) s_[idx] += p1_[idx];
  }
  jl_log(*lp_, pk_.data(), s_.data(), p1_.data(), p2_.data());

  double kmax = 0.0, rdef = 0.0;
  for (int idx = 0; idx < lp_->count; ++idx) kmax = std::max(kmax, std::abs(pk_[idx]));
  for (int idx = 0; idx < lp_->count; ++idx)
    rdef = std::max(rdef, std::abs(std::conj(pk_[idx]) - pk_[lp_->conj_perm[idx]]));

  const int n = n_;
  out.n = n;
  out.chart = chart;
  out.solved = solved;
  out.graph_vars = graph_now_;
  out.point.assign(w, w + N_);
  out.reality_defect = rdef / std::max(1.0, kmax);
  out.g.resize(n, n);
  for (int k = 0; k < n; ++k) {
    out.dg[k].resize(n, n);
    out.dbarg[k].resize(n, n);
    for (int l = 0; l < n; ++l) out.ddg[k][l].resize(n, n);
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out.g(i, j) = pk_[idx_g_[i * n + j]];
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const int a = (k * n + i) * n + j;
        out.dg[k](i, j) = fac_dg_[a] * pk_[idx_dg_[a]];
        out.dbarg[k](i, j) = fac_dbarg_[a] * pk_[idx_dbarg_[a]];
      }
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const int a = ((k * n + l) * n + i) * n + j;
          out.ddg[k][l](i, j) = fac_ddg_[a] * pk_[idx_ddg_[a]];
        }

  const cplx det = out.g.determinant();
  if (std::abs(det.imag()) > 1e-8 * std::max(1.0, std::abs(det.real())))
    return fail("volume density has material imaginary part");
  if (!(det.real() > 0.0)) return fail("volume density not positive");
  out.vol_density = det.real();

  double dmax = 0.0, kdef = 0.0;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        dmax = std::max(dmax, std::abs(out.dg[k](i, j)));
        kdef = std::max(kdef, std::abs(out.dg[k](i, j) - out.dg[i](k, j)));
      }
  out.kahler_defect = kdef / std::max(1.0, dmax);
  return true;
}

MetricJet pullback_metric(const Polynomial& f, const std::vector<cplx>& hom_point, int chart,
                          int solved) {
  CurvatureWorkspace ws(f);
  if (static_cast<int>(hom_point.size()) != ws.ambient_dim() + 1)
    throw std::invalid_argument("pullback_metric: point dimension mismatch");
  MetricJet m;
  std::string why;
  if (!ws.metric_at(hom_point.data(), m, &why, chart, solved))
    throw std::runtime_error("pullback_metric: " + why);
  return m;
}

void chern_curvature(const MetricJet& m, CurvatureMatrix& out) {
  const int n = m.n;
  out.n = n;
  SmallMat ginv = m.g.inverse();
  SmallMat a[3], b[3];
  for (int l = 0; l < n; ++l) a[l] = m.dbarg[l] * ginv;
  for (int k = 0; k < n; ++k) b[k] = m.dg[k] * ginv;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      out.theta[i][j].n = n;
      xf_clear(out.theta[i][j]);
    }
  SmallMat r;
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      // r(j,i) carries the component sending dz_j to dz_i on dz_k wedge conj dz_l
      r = b[k] * a[l] - m.ddg[k][l] * ginv;
      const int mask = (1 << k) | (1 << (n + l));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out.theta[i][j].c[mask] += r(j, i);
    }
}

CurvatureMatrix chern_curvature(const MetricJet& m) {
  CurvatureMatrix out;
  chern_curvature(m, out);
  return out;
}

void chern_forms(const CurvatureMatrix& th, ExteriorForm* out) {
  const int n = th.n;
  const cplx s = cplx(0.0, 1.0) / (2.0 * kPi);
  ExteriorForm e[3][3];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      e[i][j] = th.theta[i][j].scaled(s);
      if (i == j) e[i][j].c[0] += 1.0;
    }
  ExteriorForm det = ExteriorForm::zero(n);
  int p[3] = {0, 1, 2};
  do {
    int inv = 0;
    for (int x = 0; x < n; ++x)
      for (int y = x + 1; y < n; ++y)
        if (p[x] > p[y]) ++inv;
    ExteriorForm term = e[0][p[0]];
    for (int r = 1; r < n; ++r) term = term.wedge(e[r][p[r]]);
    det = (inv & 1) ? det - term : det + term;
  } while (std::next_permutation(p, p + n));
  for (int r = 0; r <= n; ++r) out[r] = det.degree_part(2 * r);
}

ExteriorForm chern_form(const CurvatureMatrix& th, int r) {
  if (r < 0 || r > th.n) throw std::invalid_argument("chern_form: degree out of range");
  ExteriorForm out[4];
  chern_forms(th, out);
  return out[r];
}

std::vector<ExteriorForm> chern_forms_all(const CurvatureMatrix& th) {
  ExteriorForm out[4];
  chern_forms(th, out);
  return std::vector<ExteriorForm>(out, out + th.n + 1);
}

ExteriorForm kahler_form(const MetricJet& m) {
  ExteriorForm w = ExteriorForm::zero(m.n);
  const cplx s = cplx(0.0, 1.0) / (2.0 * kPi);
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j) w.c[(1 << i) | (1 << (m.n + j))] += s * m.g(i, j);
  return w;
}

double density(const std::vector<ExteriorForm>& factors) {
  if (factors.empty()) throw std::invalid_argument("density: empty factor list");
  ExteriorForm acc = factors[0];
  for (size_t i = 1; i < factors.size(); ++i) acc = acc.wedge(factors[i]);
  const cplx d = top_density(acc);
  if (std::abs(d.imag()) > 1e-9 * std::max(1.0, std::abs(d.real())))
    throw std::runtime_error("density: material imaginary part");
  return d.real();
}

namespace {

// Pfaffian over the even commutative subalgebra, expansion along the first
// active row. idx holds the active indices in increasing order.
ExteriorForm pf_recurse(const ExteriorForm m[6][6], const int* idx, int cnt, int n) {
  if (cnt == 0) return ExteriorForm::scalar(n, 1.0);
  ExteriorForm acc = ExteriorForm::zero(n);
  const int a = idx[0];
  int sub[6];
  for (int t = 1; t < cnt; ++t) {
    int c = 0;
    for (int q = 1; q < cnt; ++q)
      if (q != t) sub[c++] = idx[q];
    const ExteriorForm term = m[a][idx[t]].wedge(pf_recurse(m, sub, cnt - 2, n));
    acc = (t & 1) ? acc + term : acc - term;
  }
  return acc;
}

}  // namespace

PfaffianCheck pfaffian_crosscheck(const MetricJet& m, const CurvatureMatrix& th) {
  const int n = m.n;
  PfaffianCheck out;
  Eigen::LLT<SmallMat> llt(m.g);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("pfaffian_crosscheck: metric is not positive definite");
  SmallMat lfac = llt.matrixL();
  SmallMat linv = lfac.inverse();

  // curvature in the unitary frame u = e L^{-T}: with g(i,j) = <e_i, e_j>
  // conjugate-linear in the second slot, S^T g conj(S) = 1 forces the plain
  // transpose sandwich, not the adjoint
  ExteriorForm tp[3][3];
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      tp[a][b] = ExteriorForm::zero(n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const cplx cf = lfac(i, a) * linv(b, j);
          if (cf == cplx(0.0)) continue;
          tp[a][b] = tp[a][b] + th.theta[i][j].scaled(cf);
        }
    }

  double mx = 0.0, df = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) mx = std::max(mx, tp[a][b].norm());
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      df = std::max(df, (tp[a][b] + tp[b][a].conjugate()).norm());
  out.skew_defect = df / std::max(1.0, mx);

  // real antisymmetric representation in the interleaved basis x_0 y_0 x_1 y_1 ...
  ExteriorForm mm[6][6];
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const ExteriorForm re = (tp[a][b] + tp[a][b].conjugate()).scaled(0.5);
      const ExteriorForm im = (tp[a][b] - tp[a][b].conjugate()).scaled(cplx(0.0, -0.5));
      mm[2 * a][2 * b] = re;
      mm[2 * a][2 * b + 1] = im.scaled(-1.0);
      mm[2 * a + 1][2 * b] = im;
      mm[2 * a + 1][2 * b + 1] = re;
    }
  int idx[6];
  for (int q = 0; q < 2 * n; ++q) idx[q] = q;
  const ExteriorForm pf = pf_recurse(mm, idx, 2 * n, n);
  const cplx pfd = top_density(pf) * std::pow(2.0 * kPi, -n);

  ExteriorForm cf[4];
  chern_forms(th, cf);
  const cplx cnd = top_density(cf[n]);
  out.pfaffian_density = pfd.real();
  out.chern_density = cnd.real();
  out.rel_err = std::abs(pfd - cnd) / std::max(std::abs(cnd), 1e-12);
  return out;
}

}  // namespace gblab
