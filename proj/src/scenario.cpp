#include "gblab/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace gblab {

using nlohmann::json;

const char* experiment_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::GaussBonnet: return "gauss_bonnet";
    case ExperimentKind::ChernNumbers: return "chern_numbers";
    case ExperimentKind::DegreeProfile: return "degree_profile";
    case ExperimentKind::SectionsInvolution: return "sections_involution";
    case ExperimentKind::TubeScan: return "tube_scan";
    case ExperimentKind::MilnorSuite: return "milnor_suite";
    case ExperimentKind::EmbeddingInvariance: return "embedding_invariance";
  }
  return "?";
}

std::vector<std::string> experiment_names() {
  return {"gauss_bonnet",  "chern_numbers", "degree_profile",      "sections_involution",
          "tube_scan",     "milnor_suite",  "embedding_invariance"};
}

namespace {

ExperimentKind experiment_from_name(const std::string& s) {
  const auto names = experiment_names();
  for (size_t i = 0; i < names.size(); ++i)
    if (names[i] == s) return static_cast<ExperimentKind>(i);
  throw ScenarioError("experiment", "unknown experiment '" + s + "'");
}

const json* find(const json& o, const char* key) {
  auto it = o.find(key);
  return it == o.end() ? nullptr : &*it;
}

const json& need(const json& o, const char* key, const std::string& path) {
  const json* p = find(o, key);
  if (!p) throw ScenarioError(path + "." + key, "missing required field");
  return *p;
}

GaussianRational parse_exact_coordinate(const json& v, const std::string& path) {
  if (v.is_number_integer()) return GaussianRational(Rational(v.get<long>()));
  if (v.is_string()) {
    try {
      return GaussianRational(parse_rational(v.get<std::string>()));
    } catch (const std::exception& e) {
      throw ScenarioError(path, e.what());
    }
  }
  throw ScenarioError(path, "exact coordinates must be integers or rational strings");
}

std::vector<double> positive_grid(const json& v, const std::string& path, bool ascending) {
  if (!v.is_array() || v.empty()) throw ScenarioError(path, "need a nonempty array");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ScenarioError(path, "entries must be numbers");
    out.push_back(x.get<double>());
    if (out.back() <= 0) throw ScenarioError(path, "entries must be positive");
  }
  for (size_t i = 1; i < out.size(); ++i) {
    if (ascending && out[i] <= out[i - 1]) throw ScenarioError(path, "must be strictly ascending");
    if (!ascending && out[i] >= out[i - 1]) throw ScenarioError(path, "must be strictly descending");
  }
  return out;
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const std::exception& e) {
    throw ScenarioError("(file)", std::string("invalid json: ") + e.what());
  }
  if (!root.is_object()) throw ScenarioError("(file)", "scenario must be a json object");

  ScenarioConfig cfg;
  cfg.raw = json_text;
  if (const json* p = find(root, "name")) cfg.name = p->get<std::string>();
  cfg.experiment = experiment_from_name(need(root, "experiment", "").get<std::string>());

  // variety
  const json& var = need(root, "variety", "");
  cfg.variety.ambient_dim = need(var, "ambient_dim", "variety").get<int>();
  const int N = cfg.variety.ambient_dim;
  if (N < 2 || N > 4) throw ScenarioError("variety.ambient_dim", "supported range is 2..4");
  cfg.variety.polynomial_text = need(var, "polynomial", "variety").get<std::string>();
  try {
    cfg.variety.F = parse_polynomial(cfg.variety.polynomial_text, N + 1);
  } catch (const std::exception& e) {
    throw ScenarioError("variety.polynomial", e.what());
  }
  if (!cfg.variety.F.is_homogeneous() || cfg.variety.F.degree() < 1)
    throw ScenarioError("variety.polynomial", "must be homogeneous and nonconstant");

  if (const json* pts = find(var, "singular_points")) {
    if (!pts->is_array()) throw ScenarioError("variety.singular_points", "must be an array");
    int k = 0;
    for (const auto& pt : *pts) {
      const std::string path = "variety.singular_points[" + std::to_string(k) + "]";
      if (!pt.is_array() || static_cast<int>(pt.size()) != N + 1)
        throw ScenarioError(path, "need ambient_dim + 1 exact coordinates");
      ProjPoint p;
      for (size_t i = 0; i < pt.size(); ++i)
        p.push_back(parse_exact_coordinate(pt[i], path + "[" + std::to_string(i) + "]"));
      bool nonzero = false;
      for (const auto& c : p) nonzero = nonzero || !c.is_zero();
      if (!nonzero) throw ScenarioError(path, "point is identically zero");
      // exact singularity check
      if (!cfg.variety.F.evaluate(p).is_zero())
        throw ScenarioError(path, "point does not lie on the variety");
      for (int v = 0; v <= N; ++v)
        if (!cfg.variety.F.derivative(v).evaluate(p).is_zero())
          throw ScenarioError(path, "gradient does not vanish at the declared point");
      cfg.variety.singular_points.push_back(std::move(p));
      ++k;
    }
  }

  if (const json* ws = find(var, "weights")) {
    if (!ws->is_array() || ws->size() != cfg.variety.singular_points.size())
      throw ScenarioError("variety.weights", "need one weight list per singular point");
    int k = 0;
    for (const auto& wl : *ws) {
      const std::string path = "variety.weights[" + std::to_string(k) + "]";
      std::vector<Rational> weights;
      if (!wl.is_array()) throw ScenarioError(path, "must be an array");
      for (const auto& w : wl) {
        if (!w.is_string()) throw ScenarioError(path, "weights are rational strings");
        try {
          weights.push_back(parse_rational(w.get<std::string>()));
        } catch (const std::exception& e) {
          throw ScenarioError(path, e.what());
        }
      }
      if (!weights.empty() && static_cast<int>(weights.size()) != N)
        throw ScenarioError(path, "need one weight per germ variable");
      cfg.variety.weights.push_back(std::move(weights));
      ++k;
    }
  } else {
    cfg.variety.weights.assign(cfg.variety.singular_points.size(), {});
  }

  // family
  if (const json* fam = find(root, "family")) {
    cfg.family.present = true;
    cfg.family.deformation_text = need(*fam, "deformation", "family").get<std::string>();
    try {
      cfg.family.G = parse_polynomial(cfg.family.deformation_text, N + 1);
    } catch (const std::exception& e) {
      throw ScenarioError("family.deformation", e.what());
    }
    if (!cfg.family.G.is_homogeneous() || cfg.family.G.degree() != cfg.variety.F.degree())
      throw ScenarioError("family.deformation",
                          "must be homogeneous of the same degree as the variety");
    cfg.family.deltas = positive_grid(need(*fam, "deltas", "family"), "family.deltas", false);
  }

  // tube
  if (const json* tb = find(root, "tube")) {
    cfg.tube.present = true;
    const std::string shape = need(*tb, "shape", "tube").get<std::string>();
    if (shape == "fs_ball") {
      cfg.tube.shape = TubeSpec::Shape::FsBall;
    } else if (shape == "polydisk") {
      cfg.tube.shape = TubeSpec::Shape::Polydisk;
      cfg.tube.chart = need(*tb, "chart", "tube").get<int>();
      if (cfg.tube.chart < 0 || cfg.tube.chart > N)
        throw ScenarioError("tube.chart", "chart index out of range");
    } else {
      throw ScenarioError("tube.shape", "expected 'fs_ball' or 'polydisk'");
    }
    cfg.tube.epsilons = positive_grid(need(*tb, "epsilons", "tube"), "tube.epsilons", true);
    if (const json* p = find(*tb, "side")) {
      const std::string side = p->get<std::string>();
      if (side == "inside")
        cfg.tube.inside = true;
      else if (side == "outside")
        cfg.tube.inside = false;
      else
        throw ScenarioError("tube.side", "expected 'inside' or 'outside'");
    }
    if (const json* p = find(*tb, "linear_eps_term")) cfg.tube.linear_eps_term = p->get<bool>();
    if (const json* p = find(*tb, "fit_cutoff")) {
      cfg.tube.fit_cutoff = p->get<double>();
      if (cfg.tube.fit_cutoff <= 0) throw ScenarioError("tube.fit_cutoff", "must be positive");
    }
  }

  // sampling
  if (const json* sm = find(root, "sampling")) {
    if (const json* p = find(*sm, "lines")) {
      cfg.sampling.lines = p->get<long>();
      if (cfg.sampling.lines < 2) throw ScenarioError("sampling.lines", "need at least 2 lines");
    }
    if (const json* p = find(*sm, "seed")) cfg.sampling.seed = p->get<uint64_t>();
    if (const json* p = find(*sm, "workers")) {
      cfg.sampling.workers = p->get<int>();
      if (cfg.sampling.workers < 1) throw ScenarioError("sampling.workers", "must be >= 1");
    }
  }

  // tolerances
  if (const json* tol = find(root, "tolerances")) {
    if (const json* p = find(*tol, "sigma_level")) {
      cfg.sigma_level = p->get<double>();
      if (cfg.sigma_level <= 0) throw ScenarioError("tolerances.sigma_level", "must be positive");
    }
  }

  // experiment-specific requirements
  const bool singular = !cfg.variety.singular_points.empty();
  switch (cfg.experiment) {
    case ExperimentKind::TubeScan:
      if (!cfg.family.present) throw ScenarioError("family", "tube_scan needs a family");
      if (!cfg.tube.present) throw ScenarioError("tube", "tube_scan needs a tube");
      if (!singular) throw ScenarioError("variety.singular_points", "tube_scan needs the singular points of the central fiber");
      break;
    case ExperimentKind::MilnorSuite:
      if (!singular)
        throw ScenarioError("variety.singular_points", "milnor_suite needs singular points");
      break;
    case ExperimentKind::ChernNumbers:
      if (singular)
        throw ScenarioError("variety.singular_points",
                            "chern_numbers compares against smooth-variety values only");
      break;
    case ExperimentKind::GaussBonnet:
    case ExperimentKind::DegreeProfile:
    case ExperimentKind::SectionsInvolution:
    case ExperimentKind::EmbeddingInvariance:
      if (singular && !cfg.tube.present)
        throw ScenarioError("tube",
                            "singular varieties need an excision tube for this experiment");
      break;
  }
  if (cfg.tube.present && !singular)
    throw ScenarioError("tube", "a tube needs declared singular points as centers");

  return cfg;
}

ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ScenarioError("(file)", "cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_scenario(ss.str());
}

}  // namespace gblab
