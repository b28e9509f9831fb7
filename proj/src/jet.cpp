#include "gblab/jet.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>

namespace gblab {

namespace {

void enumerate_degree(int vars, int d, std::vector<std::array<uint8_t, 8>>& out) {
  std::array<uint8_t, 8> e{};
  // positions filled left to right, leading exponent largest first
  auto rec = [&](auto&& self, int pos, int rem) -> void {
    if (pos == vars - 1) {
      e[pos] = static_cast<uint8_t>(rem);
      out.push_back(e);
      return;
    }
    for (int k = rem; k >= 0; --k) {
      e[pos] = static_cast<uint8_t>(k);
      self(self, pos + 1, rem - k);
    }
  };
  if (vars == 0) {
    if (d == 0) out.push_back(e);
    return;
  }
  rec(rec, 0, d);
}

// fills every derived table once exps and vars are set
void build_tables(JetLayout& lay) {
  lay.count = static_cast<int>(lay.exps.size());
  lay.deg.resize(lay.count);
  for (int i = 0; i < lay.count; ++i) {
    int d = 0;
    for (int k = 0; k < lay.vars; ++k) d += lay.exps[i][k];
    lay.deg[i] = d;
    lay.lookup.emplace(lay.exps[i], i);
  }

  for (int i = 0; i < lay.count; ++i) {
    for (int j = 0; j < lay.count; ++j) {
      std::array<uint8_t, 8> s{};
      for (int k = 0; k < lay.vars; ++k) s[k] = lay.exps[i][k] + lay.exps[j][k];
      auto it = lay.lookup.find(s);
      if (it == lay.lookup.end()) continue;  // product falls outside the truncation
      lay.prod.push_back({i, j, it->second});
    }
  }

  lay.diff.resize(lay.vars);
  for (int v = 0; v < lay.vars; ++v) {
    for (int i = 0; i < lay.count; ++i) {
      if (lay.exps[i][v] == 0) continue;
      std::array<uint8_t, 8> s = lay.exps[i];
      s[v] -= 1;
      // degree-prefix property: indices of lower-order tuples agree across
      // layouts of the same variable count
      int tgt = lay.lookup.at(s);
      lay.diff[v].push_back({i, tgt, static_cast<double>(lay.exps[i][v])});
    }
  }

  if (lay.vars % 2 == 0 && lay.vars > 0) {
    int m = lay.vars / 2;
    lay.conj_perm.resize(lay.count);
    for (int i = 0; i < lay.count; ++i) {
      std::array<uint8_t, 8> s{};
      for (int k = 0; k < m; ++k) {
        s[k] = lay.exps[i][m + k];
        s[m + k] = lay.exps[i][k];
      }
      lay.conj_perm[i] = lay.lookup.at(s);
    }
  }
}

}  // namespace

int JetLayout::index_of(const uint8_t* e) const {
  std::array<uint8_t, 8> key{};
  for (int k = 0; k < vars; ++k) key[k] = e[k];
  auto it = lookup.find(key);
  return it == lookup.end() ? -1 : it->second;
}

const JetLayout& JetLayout::get(int vars, int order) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<JetLayout>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(vars, order);
  auto it = cache.find(key);
  if (it != cache.end()) return *it->second;
  if (vars < 0 || vars > 8) throw std::invalid_argument("jet layout supports up to 8 variables");
  if (order < 0 || order > 8) throw std::invalid_argument("jet order out of range");

  auto lay = std::make_unique<JetLayout>();
  lay->vars = vars;
  lay->order = order;
  for (int d = 0; d <= order; ++d) enumerate_degree(vars, d, lay->exps);
  build_tables(*lay);

  const JetLayout& ref = *lay;
  cache.emplace(key, std::move(lay));
  return ref;
}

const JetLayout& JetLayout::get_paired_capped(int pairs, int cap) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<JetLayout>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(pairs, cap);
  auto it = cache.find(key);
  if (it != cache.end()) return *it->second;
  if (pairs < 1 || 2 * pairs > 8)
    throw std::invalid_argument("paired layout supports up to 4 coordinate pairs");
  if (cap < 1 || 2 * cap > 8) throw std::invalid_argument("jet cap out of range");

  auto lay = std::make_unique<JetLayout>();
  lay->vars = 2 * pairs;
  lay->order = 2 * cap;  // nilpotency bound for the series kernels
  std::vector<std::array<uint8_t, 8>> all;
  for (int d = 0; d <= 2 * cap; ++d) enumerate_degree(lay->vars, d, all);
  for (const auto& e : all) {
    int hs = 0, as = 0;
    for (int k = 0; k < pairs; ++k) {
      hs += e[k];
      as += e[pairs + k];
    }
    if (hs <= cap && as <= cap) lay->exps.push_back(e);
  }
  build_tables(*lay);

  const JetLayout& ref = *lay;
  cache.emplace(key, std::move(lay));
  return ref;
}

void jl_clear(const JetLayout& lay, cplx* dst) {
  for (int i = 0; i < lay.count; ++i) dst[i] = 0.0;
}

void jl_copy(const JetLayout& lay, cplx* dst, const cplx* src) {
  for (int i = 0; i < lay.count; ++i) dst[i] = src[i];
}

void jl_scale(const JetLayout& lay, cplx* dst, cplx s) {
  for (int i = 0; i < lay.count; ++i) dst[i] *= s;
}

void jl_axpy(const JetLayout& lay, cplx* dst, cplx s, const cplx* a) {
  for (int i = 0; i < lay.count; ++i) dst[i] += s * a[i];
}

void jl_mul(const JetLayout& lay, cplx* dst, const cplx* a, const cplx* b) {
  jl_clear(lay, dst);
  for (const auto& p : lay.prod) dst[p.k] += a[p.i] * b[p.j];
}

void jl_recip(const JetLayout& lay, cplx* dst, const cplx* a, cplx* t1, cplx* t2) {
  cplx c = a[0];
  if (std::abs(c) < 1e-300) throw std::domain_error("reciprocal of jet with zero constant term");
  // a = c (1 - y); 1/a = (1/c) sum y^k
  t1[0] = 0.0;
  for (int i = 1; i < lay.count; ++i) t1[i] = -a[i] / c;
  cplx* cur = dst;
  cplx* alt = t2;
  jl_copy(lay, cur, t1);
  cur[0] += 1.0;
  for (int step = 1; step < lay.order; ++step) {
    jl_mul(lay, alt, t1, cur);
    alt[0] += 1.0;
    std::swap(cur, alt);
  }
  if (cur != dst) jl_copy(lay, dst, cur);
  jl_scale(lay, dst, 1.0 / c);
}

void jl_log(const JetLayout& lay, cplx* dst, const cplx* a, cplx* t1, cplx* t2) {
  cplx c = a[0];
  if (!(c.real() > 0.0)) throw std::domain_error("log of jet with constant term off the right half plane");
  if (lay.order == 0) {
    dst[0] = std::log(c);
    return;
  }
  // a = c (1 + y); log a = log c + sum (-1)^{k+1} y^k / k
  t1[0] = 0.0;
  for (int i = 1; i < lay.count; ++i) t1[i] = a[i] / c;
  cplx* cur = dst;
  cplx* alt = t2;
  jl_clear(lay, cur);
  cur[0] = (lay.order % 2 == 0 ? -1.0 : 1.0) / static_cast<double>(lay.order);
  for (int k = lay.order - 1; k >= 1; --k) {
    jl_mul(lay, alt, t1, cur);
    alt[0] += (k % 2 == 1 ? 1.0 : -1.0) / static_cast<double>(k);
    std::swap(cur, alt);
  }
  jl_mul(lay, alt, t1, cur);
  if (alt != dst) jl_copy(lay, dst, alt);
  dst[0] += std::log(c);
}

Jet::Jet(int m, int order) : lay_(&JetLayout::get(2 * m, order)), m_(m), c_(lay_->count, 0.0) {}

Jet Jet::constant(int m, int order, cplx c) {
  Jet j(m, order);
  j.c_[0] = c;
  return j;
}

Jet Jet::variable(int m, int order, int k) {
  if (k < 0 || k >= 2 * m) throw std::out_of_range("jet variable index");
  Jet j(m, order);
  std::array<uint8_t, 8> e{};
  e[k] = 1;
  j.c_[j.lay_->index_of(e.data())] = 1.0;
  return j;
}

cplx Jet::coeff(const Exponents& holo, const Exponents& anti) const {
  std::array<uint8_t, 8> e{};
  for (int k = 0; k < m_; ++k) e[k] = static_cast<uint8_t>(holo[k]);
  for (int k = 0; k < m_; ++k) e[m_ + k] = static_cast<uint8_t>(anti[k]);
  int idx = lay_->index_of(e.data());
  if (idx < 0) throw std::out_of_range("jet coefficient beyond order");
  return c_[idx];
}

void Jet::set_coeff(const Exponents& holo, const Exponents& anti, cplx v) {
  std::array<uint8_t, 8> e{};
  for (int k = 0; k < m_; ++k) e[k] = static_cast<uint8_t>(holo[k]);
  for (int k = 0; k < m_; ++k) e[m_ + k] = static_cast<uint8_t>(anti[k]);
  int idx = lay_->index_of(e.data());
  if (idx < 0) throw std::out_of_range("jet coefficient beyond order");
  c_[idx] = v;
}

Jet Jet::operator+(const Jet& o) const {
  if (lay_ != o.lay_) throw std::invalid_argument("jet layout mismatch");
  Jet r = *this;
  for (int i = 0; i < lay_->count; ++i) r.c_[i] += o.c_[i];
  return r;
}

Jet Jet::operator-(const Jet& o) const {
  if (lay_ != o.lay_) throw std::invalid_argument("jet layout mismatch");
  Jet r = *this;
  for (int i = 0; i < lay_->count; ++i) r.c_[i] -= o.c_[i];
  return r;
}

Jet Jet::operator*(const Jet& o) const {
  if (lay_ != o.lay_) throw std::invalid_argument("jet layout mismatch");
  Jet r(m_, lay_->order);
  jl_mul(*lay_, r.c_.data(), c_.data(), o.c_.data());
  return r;
}

Jet Jet::reciprocal() const {
  Jet r(m_, lay_->order);
  std::vector<cplx> t1(lay_->count), t2(lay_->count);
  jl_recip(*lay_, r.c_.data(), c_.data(), t1.data(), t2.data());
  return r;
}

Jet Jet::log() const {
  Jet r(m_, lay_->order);
  std::vector<cplx> t1(lay_->count), t2(lay_->count);
  jl_log(*lay_, r.c_.data(), c_.data(), t1.data(), t2.data());
  return r;
}

Jet Jet::conjugate() const {
  Jet r(m_, lay_->order);
  for (int i = 0; i < lay_->count; ++i) r.c_[lay_->conj_perm[i]] = std::conj(c_[i]);
  return r;
}

Jet Jet::differentiate(int var) const {
  if (var < 0 || var >= 2 * m_) throw std::out_of_range("jet variable index");
  if (lay_->order == 0) throw std::domain_error("cannot differentiate an order-0 jet");
  Jet r(m_, lay_->order - 1);
  for (const auto& d : lay_->diff[var]) r.c_[d.d] = d.factor * c_[d.s];
  return r;
}

cplx Jet::eval(std::span<const cplx> u) const {
  if (static_cast<int>(u.size()) != m_) throw std::invalid_argument("evaluation point arity");
  cplx acc = 0.0;
  for (int i = 0; i < lay_->count; ++i) {
    if (c_[i] == 0.0) continue;
    cplx t = c_[i];
    for (int k = 0; k < m_; ++k) {
      for (int p = 0; p < lay_->exps[i][k]; ++p) t *= u[k];
      for (int p = 0; p < lay_->exps[i][m_ + k]; ++p) t *= std::conj(u[k]);
    }
    acc += t;
  }
  return acc;
}

double Jet::reality_defect() const {
  double scale = 0.0;
  for (const cplx& v : c_) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return 0.0;
  double worst = 0.0;
  for (int i = 0; i < lay_->count; ++i)
    worst = std::max(worst, std::abs(c_[i] - std::conj(c_[lay_->conj_perm[i]])));
  return worst / scale;
}

Jet taylor_jet(const Polynomial& p, const std::vector<cplx>& center, int order) {
  int m = p.num_vars();
  if (static_cast<int>(center.size()) != m) throw std::invalid_argument("center arity");
  Jet out(m, order);
  const JetLayout& lay = out.layout();

  std::vector<std::pair<std::array<uint8_t, 8>, cplx>> acc, next;
  for (const auto& [e, c] : p.terms()) {
    acc.clear();
    acc.push_back({std::array<uint8_t, 8>{}, c.to_complex()});
    for (int v = 0; v < m; ++v) {
      if (e[v] == 0) continue;
      next.clear();
      // binomial expansion of (center_v + u_v)^{e_v}
      std::vector<double> binom(e[v] + 1);
      binom[0] = 1.0;
      for (uint32_t k = 1; k <= e[v]; ++k) binom[k] = binom[k - 1] * (e[v] - k + 1) / k;
      std::vector<cplx> cpow(e[v] + 1, 1.0);
      for (uint32_t k = 1; k <= e[v]; ++k) cpow[k] = cpow[k - 1] * center[v];
      for (const auto& [ae, ac] : acc) {
        int used = 0;
        for (int k = 0; k < m; ++k) used += ae[k];
        uint32_t kmax = std::min<uint32_t>(e[v], order - used);
        for (uint32_t k = 0; k <= kmax; ++k) {
          auto ne = ae;
          ne[v] = static_cast<uint8_t>(ne[v] + k);
          next.push_back({ne, ac * binom[k] * cpow[e[v] - k]});
        }
      }
      acc.swap(next);
    }
    for (const auto& [ae, ac] : acc) {
      int idx = lay.index_of(ae.data());
      if (idx >= 0) out.coeffs()[idx] += ac;
    }
  }
  return out;
}

namespace {

// Evaluate a polynomial at jet-valued coordinates, all jets sharing a layout.
Jet eval_poly_at_jets(const CompiledPoly& f, const std::vector<Jet>& coord, int m, int order) {
  Jet acc = Jet::constant(m, order, 0.0);
  const JetLayout& lay = acc.layout();
  std::vector<cplx> tmp(lay.count), term(lay.count);
  // power cache per coordinate
  std::vector<std::vector<std::vector<cplx>>> pw(coord.size());
  auto power = [&](int v, int k) -> const cplx* {
    auto& cache = pw[v];
    if (cache.empty()) {
      cache.emplace_back(lay.count, 0.0);
      cache[0][0] = 1.0;
    }
    while (static_cast<int>(cache.size()) <= k) {
      cache.emplace_back(lay.count, 0.0);
      size_t last = cache.size() - 1;
      jl_mul(lay, cache[last].data(), cache[last - 1].data(), coord[v].coeffs().data());
    }
    return cache[k].data();
  };
  for (const auto& t : f.terms) {
    bool started = false;
    for (int v = 0; v < f.nvars; ++v) {
      if (t.e[v] == 0) continue;
      const cplx* p = power(v, t.e[v]);
      if (!started) {
        jl_copy(lay, term.data(), p);
        started = true;
      } else {
        jl_mul(lay, tmp.data(), term.data(), p);
        term.swap(tmp);
      }
    }
    if (!started) {
      acc.coeffs()[0] += t.c;
    } else {
      jl_axpy(lay, acc.coeffs().data(), t.c, term.data());
    }
  }
  return acc;
}

}  // namespace

ImplicitGraph implicit_graph_jet(const CompiledPoly& f, std::vector<cplx> point, int solved, int order) {
  int nv = f.nvars;
  if (solved < 0 || solved >= nv) throw std::out_of_range("solved index");
  if (static_cast<int>(point.size()) != nv) throw std::invalid_argument("point arity");
  int n = nv - 1;

  double pscale = 1.0;
  for (cplx w : point) pscale = std::max(pscale, std::abs(w));
  double fscale = std::max(1.0, f.coeff_scale) * std::pow(pscale, f.degree);

  CompiledPoly df = f.derivative(solved);
  std::vector<cplx> grad(nv);

  // push the base point onto the surface before expanding
  for (int step = 0; step < 2; ++step) {
    cplx val = f.eval(point.data());
    cplx piv = df.eval(point.data());
    if (std::abs(piv) < 1e-300) throw std::domain_error("implicit solve pivot vanished");
    point[solved] -= val / piv;
  }
  f.gradient(point.data(), grad.data());
  double gnorm = 0.0;
  for (cplx g : grad) gnorm += std::norm(g);
  gnorm = std::sqrt(gnorm);
  if (std::abs(grad[solved]) <= 1e-8 * gnorm)
    throw std::domain_error("pivot derivative too small for the requested solved index");
  if (std::abs(f.eval(point.data())) > 1e-10 * fscale)
    throw std::domain_error("base point is not on the variety");

  ImplicitGraph out;
  out.solved = solved;
  out.point = point;
  for (int v = 0; v < nv; ++v)
    if (v != solved) out.graph_vars.push_back(v);

  // coordinate jets in the graph variables; Newton runs on the holomorphic half
  std::vector<Jet> coord;
  coord.reserve(nv);
  for (int v = 0, g = 0; v < nv; ++v) {
    if (v == solved) {
      coord.push_back(Jet::constant(n, order, point[v]));
    } else {
      Jet j = Jet::variable(n, order, g++);
      j.coeffs()[0] = point[v];
      coord.push_back(j);
    }
  }

  int iters = static_cast<int>(std::ceil(std::log2(order + 1.0))) + 1;
  for (int it = 0; it < iters; ++it) {
    Jet num = eval_poly_at_jets(f, coord, n, order);
    Jet den = eval_poly_at_jets(df, coord, n, order);
    coord[solved] = coord[solved] - num * den.reciprocal();
  }

  Jet resid = eval_poly_at_jets(f, coord, n, order);
  double worst = 0.0;
  for (cplx v : resid.coeffs()) worst = std::max(worst, std::abs(v));
  out.residual = worst / fscale;
  if (out.residual > 1e-9)
    throw std::domain_error("implicit graph residual did not converge");
  out.phi = coord[solved];
  return out;
}

}  // namespace gblab
