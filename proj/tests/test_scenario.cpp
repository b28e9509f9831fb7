#include <cstdio>

#include "doctest.h"
#include "gblab/report.hpp"
#include "gblab/scenario.hpp"

using namespace gblab;

namespace {

const char* kConic = R"({
  "name": "conic",
  "experiment": "gauss_bonnet",
  "variety": { "ambient_dim": 2, "polynomial": "x0*x2 - x1^2" },
  "sampling": { "lines": 4000, "seed": 9 }
})";

const char* kNodal = R"({
  "experiment": "gauss_bonnet",
  "variety": {
    "ambient_dim": 2,
    "polynomial": "x2^2*x0 - x1^3 - x0*x1^2",
    "singular_points": [[1, 0, 0]]
  },
  "tube": { "shape": "fs_ball", "epsilons": [0.15, 0.2, 0.3] },
  "sampling": { "lines": 4000, "seed": 9 }
})";

std::string field_of(const std::string& json) {
  try {
    parse_scenario(json);
  } catch (const ScenarioError& e) {
    return e.field;
  }
  return "";
}

}  // namespace

TEST_CASE("well-formed scenarios parse") {
  ScenarioConfig cfg = parse_scenario(kConic);
  CHECK(cfg.name == "conic");
  CHECK(cfg.experiment == ExperimentKind::GaussBonnet);
  CHECK(cfg.variety.ambient_dim == 2);
  CHECK(cfg.variety.F.degree() == 2);
  CHECK(cfg.sampling.lines == 4000);
  CHECK(cfg.sigma_level == 3.0);
  CHECK(cfg.raw == kConic);

  ScenarioConfig sing = parse_scenario(kNodal);
  CHECK(sing.variety.singular_points.size() == 1);
  CHECK(sing.tube.present);
  CHECK(sing.tube.epsilons.size() == 3);
}

TEST_CASE("validation errors carry field paths") {
  // inhomogeneous polynomial
  CHECK(field_of(R"({"experiment":"gauss_bonnet",
    "variety":{"ambient_dim":2,"polynomial":"x0^2 + x1"}})") == "variety.polynomial");
  // unknown experiment
  CHECK(field_of(R"({"experiment":"frobnicate",
    "variety":{"ambient_dim":2,"polynomial":"x0"}})") == "experiment");
  // declared point with nonzero gradient: exact rejection
  CHECK(field_of(R"({"experiment":"gauss_bonnet",
    "variety":{"ambient_dim":2,"polynomial":"x0*x2 - x1^2",
               "singular_points":[[0,0,1]]},
    "tube":{"shape":"fs_ball","epsilons":[0.2]}})") == "variety.singular_points[0]");
  // declared point off the variety
  CHECK(field_of(R"({"experiment":"gauss_bonnet",
    "variety":{"ambient_dim":2,"polynomial":"x0*x1",
               "singular_points":[[1,1,1]]},
    "tube":{"shape":"fs_ball","epsilons":[0.2]}})") == "variety.singular_points[0]");
  // singular variety without a tube
  CHECK(field_of(R"({"experiment":"gauss_bonnet",
    "variety":{"ambient_dim":2,"polynomial":"x0*x1",
               "singular_points":[[0,0,1]]}})") == "tube");
  // tube without singular points to center on
  CHECK(field_of(R"({"experiment":"gauss_bonnet",
    "variety":{"ambient_dim":2,"polynomial":"x0*x2 - x1^2"},
    "tube":{"shape":"fs_ball","epsilons":[0.2]}})") == "tube");
  // polydisk needs a chart
  CHECK(field_of(R"({"experiment":"gauss_bonnet",
    "variety":{"ambient_dim":2,"polynomial":"x0*x1","singular_points":[[0,0,1]]},
    "tube":{"shape":"polydisk","epsilons":[0.2]}})") == "tube.chart");
  // epsilons must ascend
  CHECK(field_of(R"({"experiment":"gauss_bonnet",
    "variety":{"ambient_dim":2,"polynomial":"x0*x1","singular_points":[[0,0,1]]},
    "tube":{"shape":"fs_ball","epsilons":[0.3,0.2]}})") == "tube.epsilons");
  // deltas must descend
  CHECK(field_of(R"({"experiment":"tube_scan",
    "variety":{"ambient_dim":2,"polynomial":"x0*x1","singular_points":[[0,0,1]]},
    "family":{"deformation":"-x2^2","deltas":[0.001,0.01]},
    "tube":{"shape":"fs_ball","epsilons":[0.2]}})") == "family.deltas");
  // tube_scan needs a family
  CHECK(field_of(R"({"experiment":"tube_scan",
    "variety":{"ambient_dim":2,"polynomial":"x0*x1","singular_points":[[0,0,1]]},
    "tube":{"shape":"fs_ball","epsilons":[0.2]}})") == "family");
  // chern_numbers is smooth-only
  CHECK(field_of(R"({"experiment":"chern_numbers",
    "variety":{"ambient_dim":2,"polynomial":"x0*x1","singular_points":[[0,0,1]]},
    "tube":{"shape":"fs_ball","epsilons":[0.2]}})") == "variety.singular_points");
  // milnor_suite needs singular points
  CHECK(field_of(R"({"experiment":"milnor_suite",
    "variety":{"ambient_dim":2,"polynomial":"x0*x2 - x1^2"}})") == "variety.singular_points");
  // weights arity
  CHECK(field_of(R"({"experiment":"milnor_suite",
    "variety":{"ambient_dim":2,"polynomial":"x2^2*x0 - x1^3",
               "singular_points":[[1,0,0]],"weights":[["1/2"]]}})") ==
        "variety.weights[0]");
  // rational coordinate strings parse; malformed ones carry the path
  CHECK(field_of(R"({"experiment":"milnor_suite",
    "variety":{"ambient_dim":2,"polynomial":"x2^2*x0 - x1^3",
               "singular_points":[["1/0",0,0]]}})") == "variety.singular_points[0][0]");
  // ambient dimension bounds
  CHECK(field_of(R"({"experiment":"gauss_bonnet",
    "variety":{"ambient_dim":5,"polynomial":"x0"}})") == "variety.ambient_dim");
}

TEST_CASE("exact rational coordinates are honored") {
  // (3 : 0 : 0) is the cusp scaled by 3; the exact checks see through scaling
  ScenarioConfig cfg = parse_scenario(R"({
    "experiment": "milnor_suite",
    "variety": {
      "ambient_dim": 2,
      "polynomial": "x2^2*x0 - x1^3",
      "singular_points": [["3", "0", "0"]]
    }
  })");
  CHECK(cfg.variety.singular_points[0][0] == GaussianRational(3));
  Report rep = run_scenario(cfg);
  CHECK(rep.all_pass());
}

TEST_CASE("reports serialize byte-stably and worker-independently") {
  ScenarioConfig cfg = parse_scenario(kConic);
  Report r1 = run_scenario(cfg);
  std::string j1 = to_json(r1);

  ScenarioConfig cfg4 = parse_scenario(kConic);
  cfg4.sampling.workers = 4;
  Report r4 = run_scenario(cfg4);
  CHECK(j1 == to_json(r4));

  ScenarioConfig cfg16 = parse_scenario(kConic);
  cfg16.sampling.workers = 16;
  CHECK(j1 == to_json(run_scenario(cfg16)));

  // rerun in-process: bytes again
  CHECK(j1 == to_json(run_scenario(parse_scenario(kConic))));

  // the scenario hash pins the raw text
  CHECK(r1.scenario_hash.size() == 16);
  CHECK(r1.scenario_hash == hash_hex(fnv1a64(kConic)));
}

TEST_CASE("report json carries oracle-free quantities as nulls") {
  Report rep;
  rep.scenario_hash = "0123456789abcdef";
  rep.seed = 5;
  Quantity q;
  q.name = "thing";
  q.mean = 1.5;
  q.std_error = 0.25;
  rep.quantities.push_back(q);
  rep.quantities.push_back(compare_quantity("checked", 2.0, 0.1, 2.05, 3.0));
  std::string js = to_json(rep);
  CHECK(js.find("\"exact\": null") != std::string::npos);
  CHECK(js.find("\"checked\"") != std::string::npos);
  CHECK(js.find("\"pass\": true") != std::string::npos);
}

TEST_CASE("compare_quantity pass rules") {
  CHECK(compare_quantity("a", 2.0, 0.1, 2.25, 3.0).pass);
  CHECK_FALSE(compare_quantity("a", 2.0, 0.1, 2.35, 3.0).pass);
  // zero stderr: rounding-level slack only
  CHECK(compare_quantity("a", 2.0 + 1e-12, 0.0, 2.0, 3.0).pass);
  CHECK_FALSE(compare_quantity("a", 2.001, 0.0, 2.0, 3.0).pass);
  // sigma level is configurable
  CHECK(compare_quantity("a", 2.0, 0.1, 2.35, 4.0).pass);
}

TEST_CASE("scan csv export") {
  Report rep;
  Table t;
  t.name = "tube_scan";
  t.columns = {"epsilon", "delta", "mean", "stderr", "lines", "resampled"};
  t.rows = {{0.2, 0.01, -1.5, 0.01, 1000, 0}, {0.3, 0.01, -1.2, 0.01, 1000, 0}};
  rep.tables.push_back(t);
  std::string csv = scan_table_csv(rep);
  CHECK(csv.rfind("epsilon,delta,mean,stderr,lines,resampled\n", 0) == 0);
  CHECK(csv.find("0.2,0.01,-1.5,0.01,1000,0\n") != std::string::npos);
}
