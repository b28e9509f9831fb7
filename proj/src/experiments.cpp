#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>

#include <Eigen/Dense>

#include "gblab/cm_poly.hpp"
#include "gblab/scenario.hpp"

namespace gblab {

namespace {

long effective_lines(const ScenarioConfig& cfg) {
  if (cfg.sampling.lines > 0) return cfg.sampling.lines;
  return (cfg.variety.ambient_dim - 1 >= 2) ? 2'000'000 : 1'000'000;
}

std::vector<cplx> numeric_point(const ProjPoint& p) {
  std::vector<cplx> c(p.size());
  double nn = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    c[i] = p[i].to_complex();
    nn += std::norm(c[i]);
  }
  nn = std::sqrt(nn);
  for (auto& x : c) x /= nn;
  return c;
}

TubeSpec build_tube(const ScenarioConfig& cfg, const std::vector<ProjPoint>& centers) {
  TubeSpec t;
  t.shape = cfg.tube.shape;
  t.chart = cfg.tube.chart;
  for (const auto& p : centers) t.centers.push_back(numeric_point(p));
  return t;
}

Quantity observed_quantity(std::string name, double mean, double std_error) {
  Quantity q;
  q.name = std::move(name);
  q.mean = mean;
  q.std_error = std_error;
  return q;
}

void add_scan_tables(Report& rep, const std::string& prefix, const TubeScanResult& ts) {
  Table cells;
  cells.name = prefix + "_scan";
  cells.columns = {"epsilon", "delta", "mean", "stderr", "lines", "resampled"};
  for (const auto& c : ts.cells)
    cells.rows.push_back({c.epsilon, c.delta, c.mean, c.std_error, static_cast<double>(c.lines),
                          static_cast<double>(c.resampled)});
  rep.tables.push_back(std::move(cells));

  Table rows;
  rows.name = prefix + "_rows";
  rows.columns = {"epsilon", "value", "stderr", "plateau_from"};
  for (const auto& r : ts.rows)
    rows.rows.push_back({r.epsilon, r.value, r.std_error, static_cast<double>(r.plateau_from)});
  rep.tables.push_back(std::move(rows));
}

long count_resampled(const TubeScanResult& ts) {
  long acc = 0;
  for (const auto& c : ts.cells) acc += c.resampled;
  return acc;
}

// largest stretch of the projective map x -> a x at the unit-norm center q,
// the top singular value of its differential between the tangent planes
double projective_stretch(const AffineMap& a, const std::vector<cplx>& q) {
  const int m = static_cast<int>(q.size());
  Eigen::MatrixXcd am(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) am(i, j) = a.m.at(i, j).to_complex();
  Eigen::VectorXcd qv(m);
  for (int i = 0; i < m; ++i) qv(i) = q[i];
  Eigen::VectorXcd pv = am * qv;
  const double nrm = pv.norm();
  pv /= nrm;
  Eigen::MatrixXcd diff = (Eigen::MatrixXcd::Identity(m, m) - pv * pv.adjoint()) * am *
                          (Eigen::MatrixXcd::Identity(m, m) - qv * qv.adjoint()) / nrm;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(diff);
  return svd.singularValues()(0);
}

// excision scan of the variety itself: deltas = {0}. eps_scale shrinks the
// radii when the variety is a linear image whose local features contracted.
TubeScanResult scan_variety(const ScenarioConfig& cfg, const FormIntegrand& ig,
                            const Polynomial& f, const TubeSpec& tube, long lines,
                            uint64_t seed, double eps_scale = 1.0) {
  TubeScanConfig t;
  t.f0 = f;
  t.g = Polynomial(f.num_vars());
  t.deltas = {0.0};
  t.epsilons = cfg.tube.epsilons;
  if (eps_scale != 1.0)
    for (double& e : t.epsilons) e *= eps_scale;
  t.tube = tube;
  t.inside = false;
  t.integrand = ig;
  t.lines_per_cell = lines;
  t.seed = seed;
  t.workers = cfg.sampling.workers;
  t.fit_cutoff = cfg.tube.fit_cutoff;
  t.linear_eps_term = cfg.tube.linear_eps_term;
  return family_tube_scan(t);
}

// deg c_i^M integrand: c^{n-i} wedge omega^i
FormIntegrand degree_integrand(int n, int i) {
  if (i == n) return FormIntegrand::chern({}, n);
  return FormIntegrand::chern({n - i}, i);
}

std::string partition_label(const std::vector<int>& part) {
  std::string s;
  for (int i : part) s += "c" + std::to_string(i);
  return s;
}

void run_gauss_bonnet(const ScenarioConfig& cfg, Report& rep) {
  const Polynomial& F = cfg.variety.F;
  const int n = cfg.variety.ambient_dim - 1;
  const long lines = effective_lines(cfg);
  const double exact =
      static_cast<double>(gauss_bonnet_prediction(F, cfg.variety.singular_points));
  long resampled = 0;
  if (cfg.variety.singular_points.empty()) {
    const IntegralEstimate est = crofton_integral(F, FormIntegrand::euler(n), lines,
                                                  cfg.sampling.seed, cfg.sampling.workers);
    rep.quantities.push_back(
        compare_quantity("gauss_bonnet", est.mean, est.std_error, exact, cfg.sigma_level));
    resampled = est.resampled;
  } else {
    const TubeScanResult ts = scan_variety(cfg, FormIntegrand::euler(n), F,
                                           build_tube(cfg, cfg.variety.singular_points), lines,
                                           cfg.sampling.seed);
    rep.quantities.push_back(compare_quantity("gauss_bonnet_extrapolated", ts.extrapolated,
                                              ts.extrapolated_err, exact, cfg.sigma_level));
    add_scan_tables(rep, "excision", ts);
    resampled = count_resampled(ts);
  }
  rep.diagnostics.emplace_back("lines", std::to_string(lines));
  rep.diagnostics.emplace_back("resampled", std::to_string(resampled));
}

void run_chern_numbers(const ScenarioConfig& cfg, Report& rep) {
  const Polynomial& F = cfg.variety.F;
  const int N = cfg.variety.ambient_dim;
  const int n = N - 1;
  const int d = F.degree();
  const long lines = effective_lines(cfg);

  std::vector<std::vector<int>> partitions;
  if (n == 2) partitions = {{2}, {1, 1}};
  if (n == 3) partitions = {{3}, {2, 1}, {1, 1, 1}};

  CroftonRequest req;
  req.f = F;
  for (const auto& part : partitions) req.integrands.push_back(FormIntegrand::chern(part));
  for (int i = 0; i <= n; ++i) req.integrands.push_back(degree_integrand(n, i));
  req.lines = lines;
  req.seed = cfg.sampling.seed;
  req.workers = cfg.sampling.workers;
  const auto est = crofton(req)[0];

  long resampled = 0;
  for (const auto& e : est) resampled = std::max(resampled, e.resampled);
  size_t at = 0;
  for (const auto& part : partitions) {
    const double exact = static_cast<double>(chern_number_smooth(N, d, part));
    rep.quantities.push_back(compare_quantity(partition_label(part), est[at].mean,
                                              est[at].std_error, exact, cfg.sigma_level));
    ++at;
  }
  const DegreePolynomial cm = cm_smooth_degree_polynomial(N, d);
  for (int i = 0; i <= n; ++i) {
    rep.quantities.push_back(compare_quantity("deg_cm_" + std::to_string(i), est[at].mean,
                                              est[at].std_error, static_cast<double>(cm.c[i]),
                                              cfg.sigma_level));
    ++at;
  }
  rep.diagnostics.emplace_back("lines", std::to_string(lines));
  rep.diagnostics.emplace_back("resampled", std::to_string(resampled));
}

void run_degree_profile(const ScenarioConfig& cfg, Report& rep) {
  const Polynomial& F = cfg.variety.F;
  const int N = cfg.variety.ambient_dim;
  const int n = N - 1;
  const long lines = effective_lines(cfg);

  std::vector<long> betas;
  for (int r = 0; r <= n; ++r)
    betas.push_back(beta_combinatorial(F, cfg.variety.singular_points, r));
  const DegreePolynomial cm = cm_from_pf(pf_from_betas(betas));

  std::vector<IntegralEstimate> numeric(n + 1);
  long resampled = 0;
  if (cfg.variety.singular_points.empty()) {
    CroftonRequest req;
    req.f = F;
    for (int i = 0; i <= n; ++i) req.integrands.push_back(degree_integrand(n, i));
    req.lines = lines;
    req.seed = cfg.sampling.seed;
    req.workers = cfg.sampling.workers;
    const auto est = crofton(req)[0];
    for (int i = 0; i <= n; ++i) numeric[i] = est[i];
    for (const auto& e : est) resampled = std::max(resampled, e.resampled);
  } else {
    const TubeSpec tube = build_tube(cfg, cfg.variety.singular_points);
    for (int i = 0; i < n; ++i) {
      const TubeScanResult ts = scan_variety(cfg, degree_integrand(n, i), F, tube, lines,
                                             mix_seed(cfg.sampling.seed, 500 + i));
      numeric[i].mean = ts.extrapolated;
      numeric[i].std_error = ts.extrapolated_err;
      numeric[i].lines = lines;
      add_scan_tables(rep, "deg_cm_" + std::to_string(i), ts);
      resampled += count_resampled(ts);
    }
    // the top power carries no curvature factor, so the integral converges
    // over the whole smooth locus and needs no excision
    numeric[n] = crofton_integral(F, degree_integrand(n, n), lines,
                                  mix_seed(cfg.sampling.seed, 500 + n), cfg.sampling.workers);
    resampled += numeric[n].resampled;
  }

  const PipelineComparison cmp = compare_pipelines(numeric, cm);
  for (const auto& row : cmp.rows)
    rep.quantities.push_back(compare_quantity("deg_cm_" + std::to_string(row.r), row.numeric,
                                              row.std_error, row.exact, cfg.sigma_level));
  rep.diagnostics.emplace_back("lines", std::to_string(lines));
  rep.diagnostics.emplace_back("resampled", std::to_string(resampled));
}

void run_sections_involution(const ScenarioConfig& cfg, Report& rep) {
  const Polynomial& F = cfg.variety.F;
  const int N = cfg.variety.ambient_dim;
  const int n = N - 1;
  const long lines = effective_lines(cfg);

  std::vector<long> betas;
  for (int r = 0; r <= n; ++r)
    betas.push_back(beta_combinatorial(F, cfg.variety.singular_points, r));

  std::vector<IntegralEstimate> bnum(n + 1);
  long resampled = 0;
  // beta_0 over the full variety
  if (cfg.variety.singular_points.empty()) {
    bnum[0] = crofton_integral(F, FormIntegrand::euler(n), lines, cfg.sampling.seed,
                               cfg.sampling.workers);
    resampled += bnum[0].resampled;
  } else {
    const TubeScanResult ts =
        scan_variety(cfg, FormIntegrand::euler(n), F,
                     build_tube(cfg, cfg.variety.singular_points), lines, cfg.sampling.seed);
    bnum[0].mean = ts.extrapolated;
    bnum[0].std_error = ts.extrapolated_err;
    add_scan_tables(rep, "beta_0", ts);
    resampled += count_resampled(ts);
  }
  // generic sections are smooth: direct estimates
  for (int r = 1; r < n; ++r) {
    Rng rng(mix_seed(cfg.sampling.seed, 7000 + static_cast<uint64_t>(r)));
    const Polynomial sec = linear_section(F, N - r, rng);
    bnum[r] = crofton_integral(sec, FormIntegrand::euler(n - r), lines,
                               mix_seed(cfg.sampling.seed, 7100 + static_cast<uint64_t>(r)),
                               cfg.sampling.workers);
    resampled += bnum[r].resampled;
  }
  // zero-dimensional section: point count
  bnum[n].mean = generic_line_point_count(F, mix_seed(cfg.sampling.seed, 7900));
  bnum[n].std_error = 0.0;

  for (int r = 0; r <= n; ++r)
    rep.quantities.push_back(compare_quantity("beta_" + std::to_string(r), bnum[r].mean,
                                              bnum[r].std_error, static_cast<double>(betas[r]),
                                              cfg.sigma_level));

  // push the numeric betas through the involution; the map is linear in the
  // coefficients, so the errors propagate by the square matrix of the basis
  // images
  const DegreePolynomial cm_exact = cm_from_pf(pf_from_betas(betas));
  std::vector<std::vector<double>> m(n + 1, std::vector<double>(n + 1, 0.0));
  for (int j = 0; j <= n; ++j) {
    DegreePolynomial ej;
    ej.c.assign(n + 1, Rational(0));
    ej.c[j] = 1;
    const DegreePolynomial img = involution_I(ej);
    for (int i = 0; i <= n; ++i) m[i][j] = static_cast<double>(img.c[i]);
  }
  for (int i = 0; i <= n; ++i) {
    double mean = 0.0, var = 0.0;
    for (int j = 0; j <= n; ++j) {
      const double pj = ((j % 2) ? -1.0 : 1.0) * bnum[j].mean;
      mean += m[i][j] * pj;
      var += m[i][j] * m[i][j] * bnum[j].std_error * bnum[j].std_error;
    }
    rep.quantities.push_back(compare_quantity("deg_cm_" + std::to_string(i), mean,
                                              std::sqrt(var),
                                              static_cast<double>(cm_exact.c[i]),
                                              cfg.sigma_level));
  }
  rep.diagnostics.emplace_back("lines", std::to_string(lines));
  rep.diagnostics.emplace_back("resampled", std::to_string(resampled));
}

void run_tube_scan(const ScenarioConfig& cfg, Report& rep) {
  const Polynomial& F = cfg.variety.F;
  const int n = cfg.variety.ambient_dim - 1;
  const long lines = effective_lines(cfg);

  TubeScanConfig t;
  t.f0 = F;
  t.g = cfg.family.G;
  t.deltas = cfg.family.deltas;
  t.epsilons = cfg.tube.epsilons;
  t.tube = build_tube(cfg, cfg.variety.singular_points);
  t.inside = cfg.tube.inside;
  t.integrand = FormIntegrand::euler(n);
  t.lines_per_cell = lines;
  t.seed = cfg.sampling.seed;
  t.workers = cfg.sampling.workers;
  t.fit_cutoff = cfg.tube.fit_cutoff;
  t.linear_eps_term = cfg.tube.linear_eps_term;
  const TubeScanResult ts = family_tube_scan(t);

  const double exact = static_cast<double>(
      cfg.tube.inside ? tube_prediction(F, cfg.variety.singular_points)
                      : gauss_bonnet_prediction(F, cfg.variety.singular_points));
  rep.quantities.push_back(compare_quantity(
      cfg.tube.inside ? "tube_mass_extrapolated" : "excised_extrapolated", ts.extrapolated,
      ts.extrapolated_err, exact, cfg.sigma_level));
  add_scan_tables(rep, "tube", ts);
  rep.diagnostics.emplace_back("lines", std::to_string(lines));
  rep.diagnostics.emplace_back("resampled", std::to_string(count_resampled(ts)));
}

void run_milnor_suite(const ScenarioConfig& cfg, Report& rep) {
  const Polynomial& F = cfg.variety.F;
  const int n = cfg.variety.ambient_dim - 1;
  for (size_t k = 0; k < cfg.variety.singular_points.size(); ++k) {
    const ProjPoint& p = cfg.variety.singular_points[k];
    const SingularityRecord rec = analyze_singularity(F, p);
    const GermRecord germ = germ_at(F, p);
    const std::string tag = "sing" + std::to_string(k) + ".";

    Quantity mu = observed_quantity(tag + "mu", static_cast<double>(rec.mu), 0.0);
    if (!cfg.variety.weights[k].empty()) {
      const long oracle = milnor_quasi_homogeneous(germ.f, cfg.variety.weights[k]);
      mu = compare_quantity(tag + "mu", static_cast<double>(rec.mu), 0.0,
                            static_cast<double>(oracle), cfg.sigma_level);
    }
    rep.quantities.push_back(std::move(mu));

    Quantity m = observed_quantity(tag + "m", static_cast<double>(rec.m), 0.0);
    rep.quantities.push_back(std::move(m));
    rep.quantities.push_back(
        observed_quantity(tag + "mu_section", static_cast<double>(rec.mu_section), 0.0));
    // plane-curve germs have an independent check: Eu equals the multiplicity
    Quantity eu = (n == 1)
                      ? compare_quantity(tag + "eu", static_cast<double>(rec.eu), 0.0,
                                         static_cast<double>(rec.m), cfg.sigma_level)
                      : observed_quantity(tag + "eu", static_cast<double>(rec.eu), 0.0);
    rep.quantities.push_back(std::move(eu));
    rep.quantities.push_back(observed_quantity(tag + "sigma", static_cast<double>(rec.sigma), 0.0));
    rep.quantities.push_back(observed_quantity(
        tag + "telescoping", static_cast<double>(telescoping_prediction(germ)), 0.0));
  }
  rep.diagnostics.emplace_back("lines", "0");
  rep.diagnostics.emplace_back("resampled", "0");
}

void run_embedding_invariance(const ScenarioConfig& cfg, Report& rep) {
  const Polynomial& F = cfg.variety.F;
  const int N = cfg.variety.ambient_dim;
  const int n = N - 1;
  const long lines = effective_lines(cfg);
  const bool singular = !cfg.variety.singular_points.empty();
  if (singular && cfg.tube.shape != TubeSpec::Shape::FsBall)
    throw ScenarioError("tube.shape",
                        "embedding_invariance needs an fs_ball tube: charts are not preserved");
  const double exact =
      static_cast<double>(gauss_bonnet_prediction(F, cfg.variety.singular_points));

  std::vector<double> means, errs;
  long resampled = 0;
  for (int k = 0; k <= 3; ++k) {
    Polynomial Fk = F;
    std::vector<ProjPoint> sings_k = cfg.variety.singular_points;
    std::optional<AffineMap> fwd;
    if (k > 0) {
      Rng rng(mix_seed(cfg.sampling.seed, 9000 + static_cast<uint64_t>(k)));
      std::vector<cplx> entries(static_cast<size_t>(N + 1) * (N + 1));
      for (auto& e : entries) e = rng.gaussian();
      const AffineMap a = AffineMap::from_complex(N + 1, entries);
      const AffineMap ainv = a.inverse();
      Fk = linear_substitute(F, a);
      if (Fk.degree() != F.degree())
        throw std::runtime_error("embedding draw degenerated the polynomial");
      sings_k.clear();
      for (const ProjPoint& p : cfg.variety.singular_points) {
        ProjPoint q(N + 1);
        for (int i = 0; i <= N; ++i) {
          GaussianRational acc;
          for (int j = 0; j <= N; ++j) acc += ainv.m.at(i, j) * p[j];
          q[i] = acc;
        }
        sings_k.push_back(std::move(q));
      }
      fwd = a;
    }
    double mk, ek;
    if (!singular) {
      const IntegralEstimate est =
          crofton_integral(Fk, FormIntegrand::euler(n), lines,
                           mix_seed(cfg.sampling.seed, 9100 + static_cast<uint64_t>(k)),
                           cfg.sampling.workers);
      mk = est.mean;
      ek = est.std_error;
      resampled += est.resampled;
    } else {
      TubeSpec tube;
      tube.shape = TubeSpec::Shape::FsBall;
      for (const auto& q : sings_k) tube.centers.push_back(numeric_point(q));
      // the map stretches the geometry near its centers, so the excision
      // radii shrink by the worst stretch to keep the quadratic fit window
      double eps_scale = 1.0;
      if (fwd) {
        double stretch = 1.0;
        for (const auto& c : tube.centers) stretch = std::max(stretch, projective_stretch(*fwd, c));
        eps_scale = std::max(1.0 / stretch, 0.02);
        char buf[32];
        snprintf(buf, sizeof buf, "%.6g", eps_scale);
        rep.diagnostics.emplace_back("embed" + std::to_string(k) + "_eps_scale", buf);
      }
      const TubeScanResult ts =
          scan_variety(cfg, FormIntegrand::euler(n), Fk, tube, lines,
                       mix_seed(cfg.sampling.seed, 9100 + static_cast<uint64_t>(k)), eps_scale);
      add_scan_tables(rep, "embed" + std::to_string(k), ts);
      mk = ts.extrapolated;
      ek = ts.extrapolated_err;
      resampled += count_resampled(ts);
    }
    means.push_back(mk);
    errs.push_back(ek);
    rep.quantities.push_back(compare_quantity("gauss_bonnet_embed" + std::to_string(k), mk, ek,
                                              exact, cfg.sigma_level));
  }
  for (int k = 1; k <= 3; ++k) {
    const double se = std::hypot(errs[0], errs[static_cast<size_t>(k)]);
    rep.quantities.push_back(compare_quantity("embed" + std::to_string(k) + "_minus_base",
                                              means[static_cast<size_t>(k)] - means[0], se, 0.0,
                                              cfg.sigma_level));
  }
  rep.diagnostics.emplace_back("lines", std::to_string(lines));
  rep.diagnostics.emplace_back("resampled", std::to_string(resampled));
}

}  // namespace

Report run_scenario(const ScenarioConfig& cfg) {
  Report rep;
  rep.scenario_hash = hash_hex(fnv1a64(cfg.raw));
  rep.seed = cfg.sampling.seed;
  rep.diagnostics.emplace_back("experiment", experiment_name(cfg.experiment));
  if (!cfg.name.empty()) rep.diagnostics.emplace_back("scenario", cfg.name);
  rep.diagnostics.emplace_back("variety", cfg.variety.polynomial_text);

  switch (cfg.experiment) {
    case ExperimentKind::GaussBonnet: run_gauss_bonnet(cfg, rep); break;
    case ExperimentKind::ChernNumbers: run_chern_numbers(cfg, rep); break;
    case ExperimentKind::DegreeProfile: run_degree_profile(cfg, rep); break;
    case ExperimentKind::SectionsInvolution: run_sections_involution(cfg, rep); break;
    case ExperimentKind::TubeScan: run_tube_scan(cfg, rep); break;
    case ExperimentKind::MilnorSuite: run_milnor_suite(cfg, rep); break;
    case ExperimentKind::EmbeddingInvariance: run_embedding_invariance(cfg, rep); break;
  }
  return rep;
}

}  // namespace gblab
