#include "gblab/invariants.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>

#include "gblab/sampler.hpp"

namespace gblab {

namespace {

// exponent tuples with total degree <= d, ascending degree then lex
void monomials_up_to(int nv, int d, std::vector<Exponents>& out) {
  out.clear();
  Exponents e(nv, 0);
  std::vector<Exponents> flat;
  while (true) {
    if (static_cast<int>(total_degree(e)) <= d) flat.push_back(e);
    int k = 0;
    while (k < nv) {
      if (static_cast<int>(e[k]) < d) {
        ++e[k];
        break;
      }
      e[k] = 0;
      ++k;
    }
    if (k == nv) break;
  }
  std::sort(flat.begin(), flat.end(), [](const Exponents& a, const Exponents& b) {
    uint32_t da = total_degree(a), db = total_degree(b);
    if (da != db) return da < db;
    return a < b;
  });
  out = std::move(flat);
}

// colength of the degree-truncated Jacobian span at truncation degree D
long truncated_colength(const Polynomial& f, int D) {
  const int nv = f.num_vars();
  std::vector<Exponents> basis;
  monomials_up_to(nv, D, basis);
  std::map<Exponents, int> col;
  for (int j = 0; j < static_cast<int>(basis.size()); ++j) col.emplace(basis[j], j);

  std::vector<Polynomial> parts;
  for (int i = 0; i < nv; ++i) {
    Polynomial di = f.derivative(i);
    if (!di.is_zero()) parts.push_back(std::move(di));
  }
  if (parts.empty()) throw std::invalid_argument("milnor_number: zero gradient");

  long rows = 0;
  std::vector<std::vector<Exponents>> mults(parts.size());
  for (size_t t = 0; t < parts.size(); ++t) {
    const int room = D - parts[t].min_degree();
    if (room >= 0) monomials_up_to(nv, room, mults[t]);
    rows += static_cast<long>(mults[t].size());
  }
  const long cols = static_cast<long>(basis.size());
  if (rows * cols > 4'000'000)
    throw std::runtime_error(
        "milnor_number: truncation matrix too large before stabilization "
        "(non-isolated singularity?)");

  GaussMat m(static_cast<int>(rows), static_cast<int>(cols));
  int r = 0;
  Exponents sum(nv);
  for (size_t t = 0; t < parts.size(); ++t) {
    for (const Exponents& mo : mults[t]) {
      for (const auto& [e, c] : parts[t].terms()) {
        uint32_t deg = 0;
        for (int v = 0; v < nv; ++v) {
          sum[v] = e[v] + mo[v];
          deg += sum[v];
        }
        if (static_cast<int>(deg) > D) continue;
        m.at(r, col.at(sum)) += c;
      }
      ++r;
    }
  }
  return cols - exact_rank(m);
}

// numeric spot check that the origin is the only critical point nearby:
// |grad f| sampled on spheres of radius 0.1 and 1
void isolated_critical_spot_check(const Polynomial& f) {
  const CompiledPoly fc = compile(f);
  const int nv = f.num_vars();
  const int d = std::max(1, f.degree());
  Rng rng(0x15013a7edULL);
  std::vector<cplx> x(nv), grad(nv);
  for (double radius : {0.1, 1.0}) {
    const double tol = 1e-8 * fc.coeff_scale * d * std::pow(radius, d - 1);
    for (int s = 0; s < 32; ++s) {
      double nn = 0.0;
      for (auto& xi : x) {
        xi = rng.gaussian();
        nn += std::norm(xi);
      }
      nn = radius / std::sqrt(nn);
      for (auto& xi : x) xi *= nn;
      fc.gradient(x.data(), grad.data());
      double gn = 0.0;
      for (const auto& gi : grad) gn += std::norm(gi);
      if (std::sqrt(gn) < tol)
        throw std::runtime_error(
            "milnor_number: near-critical point sampled away from the origin "
            "(radius " + std::to_string(radius) + ")");
    }
  }
}

BigInt binom_big(int n, int k) {
  if (k < 0 || k > n) return 0;
  BigInt r = 1;
  for (int j = 1; j <= k; ++j) {
    r *= (n - j + 1);
    r /= j;
  }
  return r;
}

// [h^j] (1+h)^{N+1} / (1+dh)
BigInt chern_series_coeff(int N, int d, int j) {
  BigInt acc = 0;
  BigInt pw = 1;  // (-d)^(j-t) built backwards
  for (int t = j; t >= 0; --t) {
    acc += binom_big(N + 1, t) * pw;
    pw *= -d;
  }
  return acc;
}

long to_long_checked(const BigInt& v, const char* what) {
  if (v > std::numeric_limits<long>::max() || v < std::numeric_limits<long>::min())
    throw std::overflow_error(std::string(what) + ": value out of range");
  return static_cast<long>(v);
}

bool same_projective_point(const ProjPoint& p, const ProjPoint& q) {
  if (p.size() != q.size()) return false;
  for (size_t i = 0; i < p.size(); ++i)
    for (size_t j = i + 1; j < p.size(); ++j)
      if (!(p[i] * q[j] == p[j] * q[i])) return false;
  return true;
}

}  // namespace

GermRecord make_germ(const Polynomial& f, const std::vector<GaussianRational>& base) {
  if (f.num_vars() < 1) throw std::invalid_argument("germ needs at least one variable");
  Polynomial g = base.empty() ? f : f.translated(base);
  if (g.is_zero()) throw std::invalid_argument("zero germ");
  if (g.min_degree() < 2)
    throw std::invalid_argument("germ must vanish to order >= 2 at the base point");
  return GermRecord{std::move(g), f.num_vars()};
}

GermRecord germ_at(const Polynomial& F, const ProjPoint& p) {
  if (!F.is_homogeneous() || F.degree() < 1)
    throw std::invalid_argument("germ_at: homogeneous nonconstant polynomial required");
  if (static_cast<int>(p.size()) != F.num_vars())
    throw std::invalid_argument("germ_at: point has the wrong coordinate count");
  int chart = -1;
  double best = -1.0;
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i].is_zero()) continue;
    double mag = std::abs(p[i].to_complex());
    if (mag > best) {
      best = mag;
      chart = static_cast<int>(i);
    }
  }
  if (chart < 0) throw std::invalid_argument("germ_at: zero point");
  std::vector<GaussianRational> base;
  base.reserve(p.size() - 1);
  for (size_t i = 0; i < p.size(); ++i)
    if (static_cast<int>(i) != chart) base.push_back(p[i] / p[chart]);
  return make_germ(F.dehomogenized(chart), base);
}

long multiplicity(const GermRecord& g) {
  if (g.f.is_zero()) throw std::invalid_argument("multiplicity: zero germ");
  return g.f.min_degree();
}

long milnor_number(const GermRecord& g) {
  isolated_critical_spot_check(g.f);
  long prev2 = -1, prev1 = -2;
  for (int D = 2; D <= 20; ++D) {
    const long mu = truncated_colength(g.f, D);
    if (mu == prev1 && mu == prev2) return mu;
    prev2 = prev1;
    prev1 = mu;
  }
  throw std::runtime_error(
      "milnor_number: colength did not stabilize by degree 20 "
      "(non-isolated singularity?)");
}

long milnor_quasi_homogeneous(const Polynomial& f, const std::vector<Rational>& weights) {
  if (f.is_zero()) throw std::invalid_argument("zero germ");
  if (static_cast<int>(weights.size()) != f.num_vars())
    throw std::invalid_argument("weight count must match the variable count");
  for (const Rational& w : weights)
    if (w <= 0 || w > 1) throw std::invalid_argument("weights must lie in (0, 1]");
  for (const auto& [e, c] : f.terms()) {
    Rational wd = 0;
    for (int v = 0; v < f.num_vars(); ++v) wd += Rational(e[v]) * weights[v];
    if (wd != 1)
      throw std::invalid_argument("germ is not weighted-homogeneous of weight-degree 1");
  }
  Rational prod = 1;
  for (const Rational& w : weights) prod *= (1 / w - 1);
  if (denominator(prod) != 1)
    throw std::runtime_error("weighted-homogeneous product is not an integer");
  return to_long_checked(numerator(prod), "milnor_quasi_homogeneous");
}

long sectional_milnor(const GermRecord& g, int k) {
  const int N = g.num_vars;
  if (k < 1 || k > N - 1) throw std::invalid_argument("sectional_milnor: codimension out of range");
  for (int round = 0; round < 9; ++round) {
    long vals[3];
    bool ok = true;
    for (int t = 0; t < 3 && ok; ++t) {
      Rng rng(mix_seed(0xa11ce5ecULL, static_cast<uint64_t>(round) * 3 + t));
      // first k variables become small random rational combinations of the rest
      GaussMat a(N, N - k);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < N - k; ++j) {
          long num = 1 + static_cast<long>(rng.next_u64() % 12);
          if (rng.next_u64() & 1) num = -num;
          a.at(i, j) = GaussianRational(Rational(num, 8));
        }
      for (int j = 0; j < N - k; ++j) a.at(k + j, j) = GaussianRational(1);
      try {
        vals[t] = milnor_number(make_germ(substitute_linear(g.f, a)));
      } catch (const std::exception&) {
        ok = false;  // degenerate draw, redraw the round
      }
    }
    if (ok && vals[0] == vals[1] && vals[1] == vals[2]) return vals[0];
  }
  throw std::runtime_error("sectional_milnor: independent draws never agreed");
}

long euler_obstruction(const GermRecord& g) {
  const int n = g.num_vars - 1;
  const long ms = sectional_milnor(g, 1);
  return 1 - ((n % 2 == 0) ? ms : -ms);
}

long specialization_sigma(const GermRecord& g) {
  const int n = g.num_vars - 1;
  const long mu = milnor_number(g);
  return 1 + ((n % 2 == 0) ? mu : -mu);
}

long chi_smooth_hypersurface(int N, int d) {
  if (N < 2 || d < 1) throw std::invalid_argument("chi_smooth_hypersurface: bad arguments");
  BigInt chi = BigInt(d) * chern_series_coeff(N, d, N - 1);
  return to_long_checked(chi, "chi_smooth_hypersurface");
}

long chern_number_smooth(int N, int d, const std::vector<int>& partition) {
  if (N < 2 || d < 1) throw std::invalid_argument("chern_number_smooth: bad arguments");
  const int n = N - 1;
  int sum = 0;
  for (int i : partition) {
    if (i < 1 || i > n) throw std::invalid_argument("chern_number_smooth: invalid partition entry");
    sum += i;
  }
  if (sum != n) throw std::invalid_argument("chern_number_smooth: partition must sum to n");
  BigInt prod = d;
  for (int i : partition) prod *= chern_series_coeff(N, d, i);
  return to_long_checked(prod, "chern_number_smooth");
}

SingularityRecord analyze_singularity(const Polynomial& F, const ProjPoint& p) {
  SingularityRecord rec;
  rec.point = p;
  const GermRecord g = germ_at(F, p);
  const int n = g.num_vars - 1;
  rec.m = multiplicity(g);
  rec.mu = milnor_number(g);
  rec.mu_section = (n == 0) ? 0 : sectional_milnor(g, 1);
  rec.eu = 1 - ((n % 2 == 0) ? rec.mu_section : -rec.mu_section);
  rec.sigma = 1 + ((n % 2 == 0) ? rec.mu : -rec.mu);
  if (rec.m < 2) throw std::logic_error("analyze_singularity: multiplicity below 2");
  return rec;
}

long gauss_bonnet_prediction(const Polynomial& F, const std::vector<ProjPoint>& sings) {
  if (!F.is_homogeneous() || F.degree() < 1)
    throw std::invalid_argument("gauss_bonnet_prediction: homogeneous polynomial required");
  const int N = F.num_vars() - 1;
  const int d = F.degree();

  for (size_t i = 0; i < sings.size(); ++i)
    for (size_t j = i + 1; j < sings.size(); ++j)
      if (same_projective_point(sings[i], sings[j]))
        throw std::invalid_argument("gauss_bonnet_prediction: repeated singular point");

  // exact verification that every declared point is singular
  for (const ProjPoint& p : sings) {
    if (static_cast<int>(p.size()) != N + 1)
      throw std::invalid_argument("gauss_bonnet_prediction: point dimension mismatch");
    if (!F.evaluate(p).is_zero())
      throw std::invalid_argument("gauss_bonnet_prediction: declared point is not on the variety");
    for (int v = 0; v <= N; ++v)
      if (!F.derivative(v).evaluate(p).is_zero())
        throw std::invalid_argument("gauss_bonnet_prediction: declared point is not singular");
  }

  // smoothness elsewhere, spot-checked away from small balls at the
  // declared points
  const CompiledPoly fc = compile(F);
  std::vector<std::vector<cplx>> centers;
  for (const ProjPoint& p : sings) {
    std::vector<cplx> c(N + 1);
    double nn = 0.0;
    for (int i = 0; i <= N; ++i) {
      c[i] = p[i].to_complex();
      nn += std::norm(c[i]);
    }
    nn = std::sqrt(nn);
    for (auto& ci : c) ci /= nn;
    centers.push_back(std::move(c));
  }
  const double grad_floor = 1e-5 * fc.coeff_scale * d;
  std::vector<cplx> grad(N + 1);
  for (const auto& pt : sample_points(F, 1000, 0x600d5eedULL)) {
    bool excluded = false;
    for (const auto& c : centers)
      if (fs_distance(pt.data(), c.data(), N) < 0.05) {
        excluded = true;
        break;
      }
    if (excluded) continue;
    fc.gradient(pt.data(), grad.data());
    double gn = 0.0;
    for (const auto& gi : grad) gn += std::norm(gi);
    if (std::sqrt(gn) < grad_floor)
      throw std::runtime_error(
          "gauss_bonnet_prediction: sampled point looks singular away from "
          "the declared set");
  }

  long acc = chi_smooth_hypersurface(N, d);
  for (const ProjPoint& p : sings) {
    const SingularityRecord rec = analyze_singularity(F, p);
    acc += rec.eu - rec.sigma;
  }
  return acc;
}

long tube_prediction(const Polynomial& F, const std::vector<ProjPoint>& sings) {
  long acc = 0;
  for (const ProjPoint& p : sings) {
    const SingularityRecord rec = analyze_singularity(F, p);
    acc += rec.sigma - rec.eu;
  }
  return acc;
}

long telescoping_prediction(const GermRecord& g) {
  const int n = g.num_vars - 1;
  const long mu = milnor_number(g);
  return ((n % 2 == 0) ? mu : -mu) - multiplicity(g) + 1;
}

long beta_combinatorial(const Polynomial& F, const std::vector<ProjPoint>& sings, int r) {
  if (!F.is_homogeneous() || F.degree() < 1)
    throw std::invalid_argument("beta_combinatorial: homogeneous polynomial required");
  const int N = F.num_vars() - 1;
  const int n = N - 1;
  if (r < 0 || r > n) throw std::invalid_argument("beta_combinatorial: section codimension out of range");
  if (r == 0) return gauss_bonnet_prediction(F, sings);
  if (r == n) return F.degree();  // points of a zero-dimensional section
  return chi_smooth_hypersurface(N - r, F.degree());
}

}  // namespace gblab
