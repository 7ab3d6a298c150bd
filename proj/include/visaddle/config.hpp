#pragma once

#include <optional>
#include <string>
#include <vector>

#include "visaddle/common.hpp"
#include "visaddle/constants.hpp"
#include "visaddle/geometry.hpp"
#include "visaddle/operators.hpp"
#include "visaddle/regularization.hpp"
#include "visaddle/solvers.hpp"

namespace visaddle {

// Config-level convex set descriptor with scalar bounds broadcast over the
// block dimension: "all", "box:<lo>:<hi>", "ball:<radius>" (center 0).
struct SetSpec {
  enum class Kind { all, box, ball };
  Kind kind = Kind::all;
  double lo = 0.0, hi = 0.0;
  double radius = 0.0;

  ConvexSet build(Index dim) const;
  std::string str() const;
  static SetSpec parse(const std::string& text, const std::string& where);
};

struct ProblemConfig {
  std::string kind = "bilinear";  // bilinear | affine | gan

  double a = 1.0;  // bilinear drift

  Matrix affine_m;      // rows separated by ';', entries by ','
  Vector affine_c;
  Index affine_d_theta = 1;

  std::string features = "identity";  // identity | tanh
  std::string link = "linear";        // linear | softplus
  Index d_x = 1, d_z = 1, d_phi = 1;
  Index n_real = 256, n_latent = 256;
  std::string samples = "gaussian";  // gaussian | toy

  double mu_theta = 0.0;
  double mu_phi = 0.0;

  std::vector<double> theta0, phi0;  // empty = all-ones start
  SetSpec theta_set, phi_set;
};

struct SolverEntry {
  std::string method = "eftp";
  std::optional<double> eta;  // unset = auto stepsize
  double rho = 0.9;
  std::string eftp_rule = "quarter";  // quarter | half
  int max_iter = 10000;
  double tol = 1e-8;
  int record_every = 1;
};

struct SweepConfig {
  std::vector<double> gammas;                // empty = use [penalty] gamma
  std::vector<std::optional<double>> etas;   // empty = use solver eta; "auto" ok
};

struct OutputConfig {
  std::string dir;  // empty = VISADDLE_OUT or ./out
  std::string prefix = "run";
  std::uint64_t seed = 12345;
  int workers = 0;  // 0 = all hardware threads
  std::string plot = "residual_iter";  // trajectory | residual_iter | residual_evals
};

struct ConstantsConfig {
  int n_samples = 200;
  double half_width = 5.0;
};

struct ExperimentConfig {
  ProblemConfig problem;
  PenaltyConfig penalty;
  std::vector<SolverEntry> solvers;  // at least one after validation
  SweepConfig sweep;
  OutputConfig output;
  ConstantsConfig constants;
};

// Parses the sectioned key=value format. Throws ConfigError with
// line/field diagnostics on syntax or type errors.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Canonical serialization; parse(serialize(parse(x))) is the identity.
std::string serialize_config(const ExperimentConfig& cfg);

// Semantic validation. Hard errors throw ConfigError; the return value
// lists warnings (for example fb + auto stepsize on a mu = 0 instance,
// which run_experiment later records as a skipped cell).
std::vector<std::string> validate_config(const ExperimentConfig& cfg);

// Instantiation helpers shared by the CLI and the experiment driver.
SaddleOperator build_operator(const ProblemConfig& p, std::uint64_t seed);
FeasibleSet build_feasible_set(const ProblemConfig& p, const SaddleOperator& F);
ParameterPoint build_start(const ProblemConfig& p, const SaddleOperator& F);
// Analytic solution when one is known (bilinear origin; affine linear solve),
// for distance telemetry and trajectory markers.
std::optional<ParameterPoint> known_solution(const ProblemConfig& p,
                                             const SaddleOperator& F,
                                             const PenaltyConfig& penalty);

}  // namespace visaddle
