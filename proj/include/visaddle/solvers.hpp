#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "visaddle/common.hpp"
#include "visaddle/constants.hpp"
#include "visaddle/geometry.hpp"
#include "visaddle/regularization.hpp"

namespace visaddle {

struct SolverConfig {
  Method method = Method::eftp;
  // Explicit preconditioner; unset means "auto": derive a scalar stepsize
  // from a ConstantsReport via resolve_preconditioner.
  std::optional<Preconditioner> precond;
  StepsizeRule auto_rule{};

  int max_iter = 10000;
  double tol = 1e-8;
  int record_every = 1;
  double divergence_threshold = 1e12;

  void validate() const;
};

enum class SolveStatus { converged, max_iter, diverged };
const char* status_name(SolveStatus s);

// Uniform per-run telemetry. Base-operator evaluations that drive steps are
// counted in oracle_calls; evaluations spent only on residual checks are
// counted separately in residual_calls. Per completed loop iteration the
// step counts are fb: 1, eg: 2, eftp: 1 after a one-call warm start.
struct SolveTrace {
  std::vector<int> iterations;            // recorded iteration indices
  std::vector<ParameterPoint> iterates;   // decimated by record_every
  std::vector<double> residual_norms;     // ||R_P|| at the recorded iterates
  std::vector<double> distances;          // ||w_k - w*||, empty if w* unknown
  std::vector<std::int64_t> oracle_calls_at;  // cumulative step calls

  std::int64_t oracle_calls = 0;
  std::int64_t residual_calls = 0;
  int loop_iterations = 0;
  SolveStatus status = SolveStatus::max_iter;
  std::string stop_reason;

  double final_residual() const {
    return residual_norms.empty() ? 0.0 : residual_norms.back();
  }
  const ParameterPoint& final_iterate() const { return iterates.back(); }
};

// Resolves the auto stepsize rule against a ConstantsReport. Throws
// ConfigError for fb when mu = 0 (Theorem 1.1 needs strong monotonicity).
Preconditioner resolve_preconditioner(const SolverConfig& cfg,
                                      const ConstantsReport& report);

SolveTrace solve_fb(const RegularizedOperator& R, const FeasibleSet& S,
                    const Preconditioner& P, const SolverConfig& cfg,
                    const ParameterPoint& start,
                    const std::optional<ParameterPoint>& solution = {});

SolveTrace solve_eg(const RegularizedOperator& R, const FeasibleSet& S,
                    const Preconditioner& P, const SolverConfig& cfg,
                    const ParameterPoint& start,
                    const std::optional<ParameterPoint>& solution = {});

SolveTrace solve_eftp(const RegularizedOperator& R, const FeasibleSet& S,
                      const Preconditioner& P, const SolverConfig& cfg,
                      const ParameterPoint& start,
                      const std::optional<ParameterPoint>& solution = {});

SolveTrace solve(const RegularizedOperator& R, const FeasibleSet& S,
                 const Preconditioner& P, const SolverConfig& cfg,
                 const ParameterPoint& start,
                 const std::optional<ParameterPoint>& solution = {});

}  // namespace visaddle
