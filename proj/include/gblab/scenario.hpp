#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gblab/invariants.hpp"
#include "gblab/polynomial.hpp"
#include "gblab/report.hpp"
#include "gblab/sampler.hpp"

namespace gblab {

enum class ExperimentKind {
  GaussBonnet,
  ChernNumbers,
  DegreeProfile,
  SectionsInvolution,
  TubeScan,
  MilnorSuite,
  EmbeddingInvariance,
};

const char* experiment_name(ExperimentKind k);
std::vector<std::string> experiment_names();

struct VarietySpec {
  int ambient_dim = 0;  // P^N
  std::string polynomial_text;
  Polynomial F;
  std::vector<ProjPoint> singular_points;
  // optional quasi-homogeneous weights, one list per singular point (empty
  // list means no oracle for that point); weights refer to the germ chart
  // variables in ascending original index order
  std::vector<std::vector<Rational>> weights;
};

struct FamilySpec {
  bool present = false;
  std::string deformation_text;
  Polynomial G;
  std::vector<double> deltas;  // descending
};

struct TubeConfig {
  bool present = false;
  TubeSpec::Shape shape = TubeSpec::Shape::FsBall;
  int chart = -1;  // polydisk only
  std::vector<double> epsilons;  // ascending
  bool inside = false;
  bool linear_eps_term = false;
  double fit_cutoff = 0.35;
};

struct SamplingSpec {
  long lines = 0;  // 0 resolves to the per-dimension default at run time
  uint64_t seed = 1;
  int workers = 1;
};

struct ScenarioConfig {
  std::string name;
  ExperimentKind experiment = ExperimentKind::GaussBonnet;
  VarietySpec variety;
  FamilySpec family;
  TubeConfig tube;
  SamplingSpec sampling;
  double sigma_level = 3.0;
  std::string raw;  // original scenario text, the content-hash input
};

struct ScenarioError : std::runtime_error {
  std::string field;
  ScenarioError(const std::string& fld, const std::string& msg)
      : std::runtime_error(fld + ": " + msg), field(fld) {}
};

// Parses and fully validates a scenario: the polynomial must be homogeneous
// in ambient_dim + 1 variables and every declared singular point must
// satisfy F = 0 and grad F = 0 exactly.
ScenarioConfig parse_scenario(const std::string& json_text);
ScenarioConfig load_scenario_file(const std::string& path);

// Dispatches the configured experiment and assembles the report.
Report run_scenario(const ScenarioConfig& cfg);

}  // namespace gblab
