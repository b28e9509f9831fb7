#include "gblab/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <limits>
#include <thread>

namespace gblab {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr long kBlock = 4096;
constexpr int kMaxAttempts = 64;
}  // namespace

uint64_t Rng::next_u64() {
  state_ += 0x9E3779B97F4A7C15ull;
  uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (has_cache_) {
    has_cache_ = false;
    return cache_;
  }
  double u1 = uniform();
  const double u2 = uniform();
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * kPi * u2;
  cache_ = r * std::sin(t);
  has_cache_ = true;
  return r * std::cos(t);
}

cplx Rng::gaussian() {
  const double re = normal();
  const double im = normal();
  return {re, im};
}

uint64_t mix_seed(uint64_t seed, uint64_t index) {
  uint64_t z = seed ^ (0x9E3779B97F4A7C15ull * (index + 0x632BE59BD9B4E019ull));
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double projective_volume(int n) {
  double v = 1.0;
  for (int k = 1; k <= n; ++k) v *= kPi / k;
  return v;
}

ProjectiveLine haar_line(Rng& rng, int ambient_dim) {
  const int N = ambient_dim;
  if (N < 1 || N > 7) throw std::invalid_argument("haar_line: ambient dimension out of range");
  ProjectiveLine L;
  L.N = N;
  for (;;) {
    for (int i = 0; i <= N; ++i) L.a[i] = rng.gaussian();
    for (int i = 0; i <= N; ++i) L.b[i] = rng.gaussian();
    double na = 0.0;
    for (int i = 0; i <= N; ++i) na += std::norm(L.a[i]);
    na = std::sqrt(na);
    if (na < 1e-6) continue;
    for (int i = 0; i <= N; ++i) L.a[i] /= na;
    cplx ip = 0.0;
    for (int i = 0; i <= N; ++i) ip += L.b[i] * std::conj(L.a[i]);
    for (int i = 0; i <= N; ++i) L.b[i] -= ip * L.a[i];
    double nb = 0.0;
    for (int i = 0; i <= N; ++i) nb += std::norm(L.b[i]);
    nb = std::sqrt(nb);
    if (nb < 1e-6) continue;
    for (int i = 0; i <= N; ++i) L.b[i] /= nb;
    return L;
  }
}

double fs_distance(const cplx* p, const cplx* q, int ambient_dim) {
  cplx ip = 0.0;
  double np = 0.0, nq = 0.0;
  for (int i = 0; i <= ambient_dim; ++i) {
    ip += p[i] * std::conj(q[i]);
    np += std::norm(p[i]);
    nq += std::norm(q[i]);
  }
  const double c = std::abs(ip) / std::sqrt(np * nq);
  return std::acos(std::min(1.0, c));
}

bool TubeSpec::contains(const cplx* p, int ambient_dim) const {
  for (const auto& c : centers) {
    if (static_cast<int>(c.size()) != ambient_dim + 1)
      throw std::invalid_argument("tube center dimension mismatch");
    if (shape == Shape::FsBall) {
      if (fs_distance(p, c.data(), ambient_dim) < radius) return true;
    } else {
      if (chart < 0 || chart > ambient_dim)
        throw std::invalid_argument("polydisk tube needs a chart index");
      if (std::abs(p[chart]) == 0.0) continue;  // chart hyperplane, away from the center
      if (std::abs(c[chart]) == 0.0)
        throw std::invalid_argument("polydisk tube center not visible in its chart");
      bool in = true;
      for (int i = 0; i <= ambient_dim && in; ++i) {
        if (i == chart) continue;
        if (std::abs(p[i] / p[chart] - c[i] / c[chart]) >= radius) in = false;
      }
      if (in) return true;
    }
  }
  return false;
}

bool RegionFilter::accepts(const cplx* p, int ambient_dim) const {
  switch (kind) {
    case Kind::All:
      return true;
    case Kind::InsideTube:
      return tube.contains(p, ambient_dim);
    case Kind::OutsideTube:
      return !tube.contains(p, ambient_dim);
  }
  return false;
}

FormIntegrand FormIntegrand::volume() {
  FormIntegrand g;
  g.is_volume = true;
  g.label = "vol";
  return g;
}

FormIntegrand FormIntegrand::chern(std::vector<int> degrees, int omega_power) {
  FormIntegrand g;
  g.degrees = std::move(degrees);
  g.omega_power = omega_power;
  for (int d : g.degrees) {
    if (d < 1) throw std::invalid_argument("chern factor degree must be positive");
    g.label += "c" + std::to_string(d);
  }
  if (omega_power < 0) throw std::invalid_argument("negative omega power");
  for (int k = 0; k < omega_power; ++k) g.label += "w";
  if (g.label.empty()) g.label = "vol";
  return g;
}

int FormIntegrand::form_degree() const {
  int s = omega_power;
  for (int d : degrees) s += d;
  return s;
}

namespace {

double binom_table(int n, int k) {
  static const auto table = [] {
    std::array<std::array<double, 33>, 33> t{};
    for (int i = 0; i < 33; ++i) {
      t[i][0] = 1.0;
      for (int j = 1; j <= i; ++j) t[i][j] = t[i - 1][j - 1] + ((j <= i - 1) ? t[i - 1][j] : 0.0);
    }
    return t;
  }();
  return table[n][k];
}

struct BinaryForm {
  int d = 0;
  std::array<cplx, 40> q{};  // q[k] multiplies u^k along a + u b
};

void binary_restrict(const CompiledPoly& f, const ProjectiveLine& line, BinaryForm& out) {
  const int d = f.degree;
  out.d = d;
  for (int k = 0; k <= d; ++k) out.q[k] = 0.0;
  std::array<cplx, 40> acc, tmp;
  for (const auto& t : f.terms) {
    int alen = 1;
    acc[0] = t.c;
    for (int v = 0; v < f.nvars; ++v) {
      const int e = t.e[v];
      if (e == 0) continue;
      cplx coef[33];
      const cplx a = line.a[v], b = line.b[v];
      cplx apow = 1.0;
      // fill b-heavy side first so a powers build once
      cplx bpow[33];
      bpow[0] = 1.0;
      for (int j = 1; j <= e; ++j) bpow[j] = bpow[j - 1] * b;
      for (int j = e; j >= 0; --j) {
        coef[j] = binom_table(e, j) * apow * bpow[j];
        apow *= a;
      }
      const int plen = e + 1;
      for (int k = 0; k < alen + plen - 1; ++k) tmp[k] = 0.0;
      for (int i = 0; i < alen; ++i)
        for (int j = 0; j < plen; ++j) tmp[i + j] += acc[i] * coef[j];
      alen += e;
      for (int k = 0; k < alen; ++k) acc[k] = tmp[k];
    }
    for (int k = 0; k < alen; ++k) out.q[k] += acc[k];
  }
}

cplx horner(const cplx* q, int d, cplx u) {
  cplx v = q[d];
  for (int k = d - 1; k >= 0; --k) v = v * u + q[k];
  return v;
}

// All d affine roots along the line, or false to request a line resample:
// the leading coefficient vanishing, failed convergence, a large residual or
// nearly coincident roots (tangency) all disqualify the line.
bool solve_binary_roots(const BinaryForm& bf, cplx* roots) {
  const int d = bf.d;
  const cplx* q = bf.q.data();
  double qmax = 0.0;
  for (int k = 0; k <= d; ++k) qmax = std::max(qmax, std::abs(q[k]));
  if (qmax == 0.0) return false;
  if (std::abs(q[d]) < 1e-10 * qmax) return false;
  if (d == 1) {
    roots[0] = -q[0] / q[1];
  } else if (d == 2) {
    const cplx sq = std::sqrt(q[1] * q[1] - 4.0 * q[2] * q[0]);
    const cplx t1 = -q[1] + sq, t2 = -q[1] - sq;
    const cplx big = (std::abs(t1) >= std::abs(t2)) ? t1 : t2;
    if (std::abs(big) == 0.0) {
      roots[0] = roots[1] = 0.0;
    } else {
      roots[0] = big / (2.0 * q[2]);
      roots[1] = (2.0 * q[0]) / big;
    }
  } else {
    // Durand-Kerner on the monic form
    cplx m[40];
    for (int k = 0; k < d; ++k) m[k] = q[k] / q[d];
    const cplx base(0.4, 0.9);
    cplx seed = base;
    for (int j = 0; j < d; ++j) {
      roots[j] = seed;
      seed *= base;
    }
    double maxrel = 1.0;
    for (int iter = 0; iter < 120 && maxrel > 1e-13; ++iter) {
      maxrel = 0.0;
      for (int j = 0; j < d; ++j) {
        cplx pv = 1.0;
        for (int k = d - 1; k >= 0; --k) pv = pv * roots[j] + m[k];
        cplx den = 1.0;
        for (int k = 0; k < d; ++k)
          if (k != j) den *= roots[j] - roots[k];
        if (std::abs(den) < 1e-300) {
          roots[j] += cplx(1e-6, 1e-6);
          maxrel = 1.0;
          continue;
        }
        const cplx delta = pv / den;
        roots[j] -= delta;
        maxrel = std::max(maxrel, std::abs(delta) / (1.0 + std::abs(roots[j])));
      }
    }
    if (maxrel > 1e-10) return false;
  }
  // Newton polish on the full form
  for (int j = 0; j < d; ++j) {
    for (int step = 0; step < 2; ++step) {
      cplx pv = q[d], dv = 0.0;
      for (int k = d - 1; k >= 0; --k) {
        dv = dv * roots[j] + pv;
        pv = pv * roots[j] + q[k];
      }
      if (std::abs(dv) < 1e-250) break;
      roots[j] -= pv / dv;
    }
  }
  for (int j = 0; j < d; ++j) {
    const double rel =
        std::abs(horner(q, d, roots[j])) / (qmax * std::pow(1.0 + std::abs(roots[j]), d));
    if (!(rel <= 1e-7)) return false;
  }
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      const double sep =
          std::abs(roots[i] - roots[j]) /
          std::sqrt((1.0 + std::norm(roots[i])) * (1.0 + std::norm(roots[j])));
      if (sep < 1e-6) return false;
    }
  return true;
}

class LineWorker {
 public:
  explicit LineWorker(const CroftonRequest& req)
      : req_(req), ws_(req.f), fcp_(compile(req.f)) {
    N_ = ws_.ambient_dim();
    n_ = ws_.dim();
    F_ = static_cast<int>(req.filters.size());
    I_ = static_cast<int>(req.integrands.size());
    for (const auto& g : req.integrands) {
      if (!g.is_volume && !g.degrees.empty()) need_curv_ = true;
      if (!g.is_volume && g.omega_power > 0) need_omega_ = true;
    }
    flags_.resize(F_);
    hv_.resize(I_);
  }

  // fills s with the per-line sums; false means resampling was exhausted
  bool line(uint64_t index, double* s, long& resampled) {
    Rng rng(mix_seed(req_.seed, index));
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
      const ProjectiveLine L = haar_line(rng, N_);
      binary_restrict(fcp_, L, bf_);
      if (!solve_binary_roots(bf_, roots_)) {
        ++resampled;
        continue;
      }
      for (int k = 0; k < F_ * I_; ++k) s[k] = 0.0;
      bool ok = true;
      for (int r = 0; r < bf_.d && ok; ++r) {
        cplx p[8];
        double pn = 0.0;
        for (int i = 0; i <= N_; ++i) {
          p[i] = L.a[i] + roots_[r] * L.b[i];
          pn += std::norm(p[i]);
        }
        pn = std::sqrt(pn);
        for (int i = 0; i <= N_; ++i) p[i] /= pn;
        bool any = false;
        for (int fi = 0; fi < F_; ++fi) {
          flags_[fi] = req_.filters[fi].accepts(p, N_);
          any = any || flags_[fi];
        }
        if (!any) continue;
        if (!point_values(p)) {
          ok = false;
          break;
        }
        for (int fi = 0; fi < F_; ++fi) {
          if (!flags_[fi]) continue;
          for (int ii = 0; ii < I_; ++ii) s[fi * I_ + ii] += hv_[ii];
        }
      }
      if (!ok) {
        ++resampled;
        continue;
      }
      return true;
    }
    return false;
  }

 private:
  bool point_values(const cplx* p) {
    if (!ws_.metric_at(p, mj_)) return false;
    if (need_curv_) {
      chern_curvature(mj_, th_);
      chern_forms(th_, cf_);
    }
    if (need_omega_) om_ = kahler_form(mj_);
    for (int ii = 0; ii < I_; ++ii) {
      const FormIntegrand& g = req_.integrands[ii];
      if (g.is_volume) {
        hv_[ii] = 1.0;
        continue;
      }
      ExteriorForm acc;
      bool have = false;
      for (int dgr : g.degrees) {
        acc = have ? acc.wedge(cf_[dgr]) : cf_[dgr];
        have = true;
      }
      for (int k = 0; k < g.omega_power; ++k) {
        acc = have ? acc.wedge(om_) : om_;
        have = true;
      }
      hv_[ii] = top_density(acc).real() / mj_.vol_density;
    }
    return true;
  }

  const CroftonRequest& req_;
  CurvatureWorkspace ws_;
  CompiledPoly fcp_;
  int N_ = 0, n_ = 0, F_ = 0, I_ = 0;
  bool need_curv_ = false, need_omega_ = false;
  BinaryForm bf_;
  cplx roots_[40];
  std::vector<char> flags_;
  std::vector<double> hv_;
  MetricJet mj_;
  CurvatureMatrix th_;
  ExteriorForm cf_[4];
  ExteriorForm om_;
};

}  // namespace

std::vector<std::vector<IntegralEstimate>> crofton(const CroftonRequest& req0) {
  CroftonRequest req = req0;
  if (req.filters.empty()) req.filters.push_back(RegionFilter::all());
  if (req.integrands.empty()) throw std::invalid_argument("crofton: no integrands");
  if (req.lines < 2) throw std::invalid_argument("crofton: need at least two lines");
  const int n = req.f.num_vars() - 2;
  for (const auto& g : req.integrands)
    if (!g.is_volume && g.form_degree() != n)
      throw std::invalid_argument("crofton: integrand degree does not match the variety dimension");

  const int F = static_cast<int>(req.filters.size());
  const int I = static_cast<int>(req.integrands.size());
  const long nlines = req.lines;
  const long nblocks = (nlines + kBlock - 1) / kBlock;

  struct Block {
    std::vector<double> s, s2;
    long resampled = 0;
    bool failed = false;
  };
  std::vector<Block> blocks(nblocks);
  std::atomic<long> next{0};
  std::atomic<bool> dead{false};

  auto work = [&]() {
    LineWorker lw(req);
    std::vector<double> s(F * I);
    for (;;) {
      const long b = next.fetch_add(1);
      if (b >= nblocks || dead.load()) break;
      Block& blk = blocks[b];
      blk.s.assign(F * I, 0.0);
      blk.s2.assign(F * I, 0.0);
      const long lo = b * kBlock;
      const long hi = std::min(nlines, lo + kBlock);
      for (long gl = lo; gl < hi; ++gl) {
        if (!lw.line(static_cast<uint64_t>(gl), s.data(), blk.resampled)) {
          blk.failed = true;
          dead.store(true);
          break;
        }
        for (int k = 0; k < F * I; ++k) {
          blk.s[k] += s[k];
          blk.s2[k] += s[k] * s[k];
        }
      }
    }
  };

  const int W = std::max(1, req.workers);
  if (W == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(W);
    for (int t = 0; t < W; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (const auto& blk : blocks)
    if (blk.failed)
      throw std::runtime_error(
          "crofton: line resampling exhausted; the variety is likely non-reduced or the "
          "configuration is degenerate");

  std::vector<double> S(F * I, 0.0), S2(F * I, 0.0);
  long resampled = 0;
  for (const auto& blk : blocks) {  // fixed order keeps results worker-count independent
    for (int k = 0; k < F * I; ++k) {
      S[k] += blk.s[k];
      S2[k] += blk.s2[k];
    }
    resampled += blk.resampled;
  }

  const double vol = projective_volume(n);
  std::vector<std::vector<IntegralEstimate>> out(F, std::vector<IntegralEstimate>(I));
  for (int fi = 0; fi < F; ++fi)
    for (int ii = 0; ii < I; ++ii) {
      const int k = fi * I + ii;
      const double mean = S[k] / static_cast<double>(nlines);
      double var = (S2[k] - S[k] * mean) / static_cast<double>(nlines - 1);
      if (var < 0.0) var = 0.0;
      IntegralEstimate& e = out[fi][ii];
      e.mean = vol * mean;
      e.std_error = vol * std::sqrt(var / static_cast<double>(nlines));
      e.lines = nlines;
      e.resampled = resampled;
      e.seed = req.seed;
    }
  return out;
}

IntegralEstimate crofton_integral(const Polynomial& f, const FormIntegrand& integrand, long lines,
                                  uint64_t seed, int workers) {
  CroftonRequest req;
  req.f = f;
  req.integrands = {integrand};
  req.lines = lines;
  req.seed = seed;
  req.workers = workers;
  return crofton(req)[0][0];
}

Polynomial linear_section(const Polynomial& f, int target_dim, Rng& rng, int spot_checks) {
  const int N = f.num_vars() - 1;
  if (target_dim < 1 || target_dim >= N)
    throw std::invalid_argument("linear_section: target dimension out of range");
  for (int attempt = 0; attempt < 24; ++attempt) {
    // Haar frame: gaussian columns, Gram-Schmidt
    std::vector<std::vector<cplx>> cols(target_dim + 1, std::vector<cplx>(N + 1));
    bool degenerate = false;
    for (auto& c : cols) {
      for (auto& x : c) x = rng.gaussian();
    }
    for (int j = 0; j <= target_dim && !degenerate; ++j) {
      for (int k = 0; k < j; ++k) {
        cplx ip = 0.0;
        for (int i = 0; i <= N; ++i) ip += cols[j][i] * std::conj(cols[k][i]);
        for (int i = 0; i <= N; ++i) cols[j][i] -= ip * cols[k][i];
      }
      double nn = 0.0;
      for (int i = 0; i <= N; ++i) nn += std::norm(cols[j][i]);
      nn = std::sqrt(nn);
      if (nn < 1e-6) {
        degenerate = true;
        break;
      }
      for (int i = 0; i <= N; ++i) cols[j][i] /= nn;
    }
    if (degenerate) continue;
    GaussMat gm(N + 1, target_dim + 1);
    for (int i = 0; i <= N; ++i)
      for (int j = 0; j <= target_dim; ++j) gm.at(i, j) = gaussian_from_complex(cols[j][i]);
    Polynomial sec = substitute_linear(f, gm);
    if (sec.degree() != f.degree()) continue;
    if (target_dim >= 2) {
      if (smoothness_spot_check(sec, spot_checks, rng.next_u64())) continue;
    } else {
      // a binary form is smooth when its roots are simple
      BinaryForm bf;
      ProjectiveLine axis;
      axis.N = 1;
      axis.a[0] = 1.0;
      axis.b[1] = 1.0;
      binary_restrict(compile(sec), axis, bf);
      cplx roots[40];
      if (!solve_binary_roots(bf, roots)) continue;
    }
    return sec;
  }
  throw std::runtime_error("linear_section: no smooth section found");
}

std::optional<std::string> smoothness_spot_check(const Polynomial& f, long points, uint64_t seed) {
  CurvatureWorkspace ws(f);
  const CompiledPoly fc = compile(f);
  const int N = ws.ambient_dim();
  MetricJet mj;
  BinaryForm bf;
  cplx roots[40];
  long done = 0;
  uint64_t li = 0;
  const uint64_t budget = 64 + 4 * static_cast<uint64_t>(points);
  while (done < points) {
    if (li > budget) return "line sampling exhausted before enough points were seen";
    Rng rng(mix_seed(seed, li++));
    const ProjectiveLine L = haar_line(rng, N);
    binary_restrict(fc, L, bf);
    if (!solve_binary_roots(bf, roots)) continue;
    for (int r = 0; r < bf.d && done < points; ++r) {
      cplx p[8];
      double pn = 0.0;
      for (int i = 0; i <= N; ++i) {
        p[i] = L.a[i] + roots[r] * L.b[i];
        pn += std::norm(p[i]);
      }
      pn = std::sqrt(pn);
      for (int i = 0; i <= N; ++i) p[i] /= pn;
      std::string why;
      if (!ws.metric_at(p, mj, &why)) return why;
      ++done;
    }
  }
  return std::nullopt;
}

std::vector<std::vector<cplx>> sample_points(const Polynomial& f, long count, uint64_t seed) {
  if (f.degree() < 1) throw std::invalid_argument("sample_points: nonconstant polynomial required");
  if (f.num_vars() < 3) throw std::invalid_argument("sample_points: ambient dimension too small");
  const CompiledPoly fc = compile(f);
  const int N = f.num_vars() - 1;
  std::vector<std::vector<cplx>> out;
  out.reserve(static_cast<size_t>(count));
  BinaryForm bf;
  cplx roots[40];
  uint64_t li = 0;
  const uint64_t budget = 64 + 4 * static_cast<uint64_t>(count);
  while (static_cast<long>(out.size()) < count) {
    if (li > budget) throw std::runtime_error("sample_points: line budget exhausted");
    Rng rng(mix_seed(seed, li++));
    const ProjectiveLine L = haar_line(rng, N);
    binary_restrict(fc, L, bf);
    if (!solve_binary_roots(bf, roots)) continue;
    for (int r = 0; r < bf.d && static_cast<long>(out.size()) < count; ++r) {
      std::vector<cplx> p(N + 1);
      double pn = 0.0;
      for (int i = 0; i <= N; ++i) {
        p[i] = L.a[i] + roots[r] * L.b[i];
        pn += std::norm(p[i]);
      }
      pn = std::sqrt(pn);
      for (int i = 0; i <= N; ++i) p[i] /= pn;
      out.push_back(std::move(p));
    }
  }
  return out;
}

int generic_line_point_count(const Polynomial& f, uint64_t seed, int trials) {
  if (f.degree() < 1) throw std::invalid_argument("generic_line_point_count: nonconstant polynomial required");
  const CompiledPoly fc = compile(f);
  const int N = f.num_vars() - 1;
  BinaryForm bf;
  cplx roots[40];
  int count = -1;
  uint64_t li = 0;
  const uint64_t budget = 64 + 8 * static_cast<uint64_t>(trials);
  int done = 0;
  while (done < trials) {
    if (li > budget)
      throw std::runtime_error("generic_line_point_count: line budget exhausted");
    Rng rng(mix_seed(seed, li++));
    const ProjectiveLine L = haar_line(rng, N);
    binary_restrict(fc, L, bf);
    if (!solve_binary_roots(bf, roots)) continue;
    if (count < 0)
      count = bf.d;
    else if (count != bf.d)
      throw std::runtime_error("generic_line_point_count: trials disagree");
    ++done;
  }
  return count;
}

WlsFit weighted_least_squares(const std::vector<std::vector<double>>& columns,
                              const std::vector<double>& y, const std::vector<double>& weights) {
  const int m = static_cast<int>(columns.size());
  const int nr = static_cast<int>(y.size());
  if (m == 0 || nr < m) throw std::invalid_argument("weighted_least_squares: underdetermined");
  for (const auto& c : columns)
    if (static_cast<int>(c.size()) != nr)
      throw std::invalid_argument("weighted_least_squares: ragged columns");
  if (static_cast<int>(weights.size()) != nr)
    throw std::invalid_argument("weighted_least_squares: weight size mismatch");
  Eigen::MatrixXd xtx(m, m);
  Eigen::VectorXd xty(m);
  for (int a = 0; a < m; ++a) {
    xty(a) = 0.0;
    for (int r = 0; r < nr; ++r) xty(a) += weights[r] * columns[a][r] * y[r];
    for (int b = 0; b < m; ++b) {
      double s = 0.0;
      for (int r = 0; r < nr; ++r) s += weights[r] * columns[a][r] * columns[b][r];
      xtx(a, b) = s;
    }
  }
  const Eigen::MatrixXd cov = xtx.inverse();
  const Eigen::VectorXd beta = cov * xty;
  WlsFit fit;
  fit.coeffs.resize(m);
  fit.errors.resize(m);
  for (int a = 0; a < m; ++a) {
    fit.coeffs[a] = beta(a);
    fit.errors[a] = std::sqrt(std::max(0.0, cov(a, a)));
  }
  return fit;
}

TubeScanResult family_tube_scan(const TubeScanConfig& cfg) {
  if (cfg.epsilons.empty()) throw std::invalid_argument("tube scan: no epsilons");
  if (cfg.deltas.empty()) throw std::invalid_argument("tube scan: no deltas");
  if (cfg.tube.centers.empty()) throw std::invalid_argument("tube scan: no tube centers");
  for (size_t i = 1; i < cfg.epsilons.size(); ++i)
    if (!(cfg.epsilons[i] > cfg.epsilons[i - 1]))
      throw std::invalid_argument("tube scan: epsilons must ascend");
  for (size_t i = 1; i < cfg.deltas.size(); ++i)
    if (!(cfg.deltas[i] < cfg.deltas[i - 1]))
      throw std::invalid_argument("tube scan: deltas must descend");

  const int E = static_cast<int>(cfg.epsilons.size());
  const int D = static_cast<int>(cfg.deltas.size());
  TubeScanResult out;
  out.cells.reserve(static_cast<size_t>(E) * D);

  for (int di = 0; di < D; ++di) {
    const double dl = cfg.deltas[di];
    Polynomial fd = (dl == 0.0)
                        ? cfg.f0
                        : cfg.f0 + cfg.g.scaled(gaussian_from_complex(cplx(dl, 0.0)));
    CroftonRequest req;
    req.f = fd;
    req.integrands = {cfg.integrand};
    for (double eps : cfg.epsilons) {
      TubeSpec t = cfg.tube;
      t.radius = eps;
      req.filters.push_back(cfg.inside ? RegionFilter::inside(std::move(t))
                                       : RegionFilter::outside(std::move(t)));
    }
    req.lines = cfg.lines_per_cell;
    req.seed = mix_seed(cfg.seed, 1000 + static_cast<uint64_t>(di));
    req.workers = cfg.workers;
    const auto est = crofton(req);
    for (int ei = 0; ei < E; ++ei) {
      const IntegralEstimate& e = est[ei][0];
      out.cells.push_back({dl, cfg.epsilons[ei], e.mean, e.std_error, e.lines, e.resampled});
    }
  }

  // plateau in delta per epsilon, growing from the smallest delta
  auto sigma_floor = [](const TubeScanResult::Cell& c) {
    return std::max(c.std_error, 1e-12 * (1.0 + std::abs(c.mean)));
  };
  for (int ei = 0; ei < E; ++ei) {
    auto cell = [&](int di) -> const TubeScanResult::Cell& { return out.cells[di * E + ei]; };
    int from = D - 1;
    while (from > 0) {
      const auto& a = cell(from);
      const auto& b = cell(from - 1);
      const double tol = 2.0 * std::hypot(sigma_floor(a), sigma_floor(b));
      if (std::abs(a.mean - b.mean) <= tol)
        --from;
      else
        break;
    }
    double wsum = 0.0, vsum = 0.0;
    for (int di = from; di < D; ++di) {
      const double sg = sigma_floor(cell(di));
      const double w = 1.0 / (sg * sg);
      wsum += w;
      vsum += w * cell(di).mean;
    }
    out.rows.push_back({cfg.epsilons[ei], vsum / wsum, std::sqrt(1.0 / wsum), from});
  }

  // epsilon -> 0 extrapolation over the rows below the fit cutoff
  std::vector<double> ones, lin, sq, y, w;
  for (const auto& r : out.rows) {
    if (r.epsilon > cfg.fit_cutoff + 1e-12) continue;
    ones.push_back(1.0);
    lin.push_back(r.epsilon);
    sq.push_back(r.epsilon * r.epsilon);
    y.push_back(r.value);
    const double sg = std::max(r.std_error, 1e-12 * (1.0 + std::abs(r.value)));
    w.push_back(1.0 / (sg * sg));
  }
  std::vector<std::vector<double>> cols;
  cols.push_back(ones);
  if (cfg.linear_eps_term) cols.push_back(lin);
  cols.push_back(sq);
  if (y.size() < cols.size()) {
    // too few usable radii for an extrapolation; per-epsilon rows stand alone
    out.extrapolated = std::numeric_limits<double>::quiet_NaN();
    out.extrapolated_err = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  const WlsFit fit = weighted_least_squares(cols, y, w);
  out.fit_coeffs = fit.coeffs;
  out.fit_errors = fit.errors;
  out.extrapolated = fit.coeffs[0];
  out.extrapolated_err = fit.errors[0];
  return out;
}

}  // namespace gblab
