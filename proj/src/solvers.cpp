#include "visaddle/solvers.hpp"

#include <cmath>
#include <limits>

namespace visaddle {

void SolverConfig::validate() const {
  require(max_iter >= 1, "solver: max_iter must be >= 1");
  require(tol > 0, "solver: tol must be > 0");
  require(record_every >= 1, "solver: record_every must be >= 1");
  require(divergence_threshold > 0, "solver: divergence threshold must be > 0");
}

const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iter: return "max_iter";
    case SolveStatus::diverged: return "diverged";
  }
  return "?";
}

Preconditioner resolve_preconditioner(const SolverConfig& cfg,
                                      const ConstantsReport& report) {
  if (cfg.precond) return *cfg.precond;
  StepsizeRule rule = cfg.auto_rule;
  rule.method = cfg.method;
  return Preconditioner(admissible_stepsize(rule, report.L, report.mu));
}

namespace {

class Run {
 public:
  Run(const RegularizedOperator& R, const FeasibleSet& S, const Preconditioner& P,
      const SolverConfig& cfg, const ParameterPoint& start,
      const std::optional<ParameterPoint>& solution)
      : R_(R), S_(S), P_(P), cfg_(cfg), solution_(solution) {
    cfg.validate();
    require(start.d_theta() == R.d_theta() && start.d_phi() == R.d_phi(),
            "solver: start point dimension mismatch");
    S.check_dims(R.d_theta(), R.d_phi());
    require(start.all_finite(), "solver: start point must be finite");
    w_ = S.project(start);
  }

  const ParameterPoint& current() const { return w_; }

  bool due(int k) const { return k % cfg_.record_every == 0; }

  void record(int k, const ParameterPoint& w, double rn) {
    if (!trace_.iterations.empty() && trace_.iterations.back() == k) return;
    trace_.iterations.push_back(k);
    trace_.iterates.push_back(w);
    trace_.residual_norms.push_back(rn);
    trace_.oracle_calls_at.push_back(trace_.oracle_calls);
    if (solution_) trace_.distances.push_back(distance(w, *solution_));
  }

  // Residual norm divergence / non-finiteness test.
  bool diverged(double rn) const {
    return !std::isfinite(rn) || rn > cfg_.divergence_threshold;
  }

  void finish_converged(int k) {
    trace_.status = SolveStatus::converged;
    trace_.stop_reason = "residual <= tol";
    trace_.loop_iterations = k;
  }

  void finish_diverged(int k, const char* why) {
    trace_.status = SolveStatus::diverged;
    trace_.stop_reason = why;
    trace_.loop_iterations = k;
  }

  // Exact residual at w, spending one counted residual evaluation.
  double exact_residual(const ParameterPoint& w) {
    trace_.residual_calls += 1;
    return residual_from_field(P_, R_.eval(w), S_, w).norm;
  }

  // Records the final point after a max_iter exit, paying one residual call.
  SolveTrace finish_max_iter(const ParameterPoint& w) {
    trace_.status = SolveStatus::max_iter;
    trace_.stop_reason = "max_iter reached";
    trace_.loop_iterations = cfg_.max_iter;
    record(cfg_.max_iter, w, exact_residual(w));
    return take();
  }

  SolveTrace take() { return std::move(trace_); }

  const RegularizedOperator& R_;
  const FeasibleSet& S_;
  const Preconditioner& P_;
  const SolverConfig& cfg_;
  std::optional<ParameterPoint> solution_;
  ParameterPoint w_;
  SolveTrace trace_;
};

}  // namespace

SolveTrace solve_fb(const RegularizedOperator& R, const FeasibleSet& S,
                    const Preconditioner& P, const SolverConfig& cfg,
                    const ParameterPoint& start,
                    const std::optional<ParameterPoint>& solution) {
  Run run(R, S, P, cfg, start, solution);
  ParameterPoint w = run.current();
  const Index dt = R.d_theta();

  for (int k = 0; k < cfg.max_iter; ++k) {
    Vector f;
    try {
      f = R.eval(w);
    } catch (const NumericalError&) {
      run.trace_.residual_calls += 1;
      run.record(k, w, std::numeric_limits<double>::infinity());
      run.finish_diverged(k, "non-finite operator value");
      return run.take();
    }
    // The FB step is the projection inside R_P, so the residual at w_k is a
    // byproduct of the update.
    const ParameterPoint next =
        S.project(ParameterPoint::from_joint(w.joint() - P.apply(f), dt));
    const Vector rvec = P.solve(w.joint() - next.joint());
    const double rn = rvec.norm();

    if (run.due(k)) {
      run.record(k, w, rn);
      if (rn <= cfg.tol) {
        run.trace_.residual_calls += 1;  // f only served the check
        run.finish_converged(k);
        return run.take();
      }
    }
    if (run.diverged(rn)) {
      run.trace_.residual_calls += 1;
      run.record(k, w, rn);
      run.finish_diverged(k, "residual above divergence threshold");
      return run.take();
    }
    run.trace_.oracle_calls += 1;
    w = next;
  }
  return run.finish_max_iter(w);
}

SolveTrace solve_eg(const RegularizedOperator& R, const FeasibleSet& S,
                    const Preconditioner& P, const SolverConfig& cfg,
                    const ParameterPoint& start,
                    const std::optional<ParameterPoint>& solution) {
  Run run(R, S, P, cfg, start, solution);
  ParameterPoint w = run.current();
  const Index dt = R.d_theta();

  for (int k = 0; k < cfg.max_iter; ++k) {
    Vector f0;
    try {
      f0 = R.eval(w);
    } catch (const NumericalError&) {
      run.trace_.residual_calls += 1;
      run.record(k, w, std::numeric_limits<double>::infinity());
      run.finish_diverged(k, "non-finite operator value");
      return run.take();
    }
    // Look-ahead point doubles as the residual projection at w_k.
    const ParameterPoint look =
        S.project(ParameterPoint::from_joint(w.joint() - P.apply(f0), dt));
    const double rn = P.solve(w.joint() - look.joint()).norm();

    if (run.due(k)) {
      run.record(k, w, rn);
      if (rn <= cfg.tol) {
        run.trace_.residual_calls += 1;
        run.finish_converged(k);
        return run.take();
      }
    }
    if (run.diverged(rn)) {
      run.trace_.residual_calls += 1;
      run.record(k, w, rn);
      run.finish_diverged(k, "residual above divergence threshold");
      return run.take();
    }
    run.trace_.oracle_calls += 1;  // f0 drives the look-ahead

    Vector f1;
    try {
      f1 = R.eval(look);
      run.trace_.oracle_calls += 1;
    } catch (const NumericalError&) {
      run.trace_.oracle_calls += 1;
      run.record(k, w, std::numeric_limits<double>::infinity());
      run.finish_diverged(k, "non-finite operator value at look-ahead");
      return run.take();
    }
    w = S.project(ParameterPoint::from_joint(w.joint() - P.apply(f1), dt));
  }
  return run.finish_max_iter(w);
}

SolveTrace solve_eftp(const RegularizedOperator& R, const FeasibleSet& S,
                      const Preconditioner& P, const SolverConfig& cfg,
                      const ParameterPoint& start,
                      const std::optional<ParameterPoint>& solution) {
  Run run(R, S, P, cfg, start, solution);
  ParameterPoint w = run.current();
  const Index dt = R.d_theta();

  // Warm start: y_0 = w_0, F_hat = F(y_0), one oracle call.
  Vector f_hat;
  try {
    f_hat = R.eval(w);
    run.trace_.oracle_calls += 1;
  } catch (const NumericalError&) {
    run.trace_.oracle_calls += 1;
    run.record(0, w, std::numeric_limits<double>::infinity());
    run.finish_diverged(0, "non-finite operator value at warm start");
    return run.take();
  }

  for (int k = 0; k < cfg.max_iter; ++k) {
    const ParameterPoint next =
        S.project(ParameterPoint::from_joint(w.joint() - P.apply(f_hat), dt));
    // Residual from the stored evaluation; an approximation, since F_hat was
    // taken at y_k, not w_k. The exact residual is only computed (one extra
    // call) when this surrogate signals candidate convergence.
    const double approx_rn = P.solve(w.joint() - next.joint()).norm();

    if (run.due(k) && approx_rn <= cfg.tol) {
      const double exact_rn = run.exact_residual(w);
      run.record(k, w, exact_rn);
      if (exact_rn <= cfg.tol) {
        run.finish_converged(k);
        return run.take();
      }
    } else if (run.due(k)) {
      run.record(k, w, approx_rn);
    }
    if (run.diverged(approx_rn)) {
      run.record(k, w, approx_rn);
      run.finish_diverged(k, "residual above divergence threshold");
      return run.take();
    }

    const ParameterPoint y_next =
        S.project(ParameterPoint::from_joint(next.joint() - P.apply(f_hat), dt));
    try {
      f_hat = R.eval(y_next);
      run.trace_.oracle_calls += 1;
    } catch (const NumericalError&) {
      run.trace_.oracle_calls += 1;
      run.record(k, w, std::numeric_limits<double>::infinity());
      run.finish_diverged(k, "non-finite operator value at extrapolation point");
      return run.take();
    }
    w = next;
  }
  return run.finish_max_iter(w);
}

SolveTrace solve(const RegularizedOperator& R, const FeasibleSet& S,
                 const Preconditioner& P, const SolverConfig& cfg,
                 const ParameterPoint& start,
                 const std::optional<ParameterPoint>& solution) {
  switch (cfg.method) {
    case Method::fb: return solve_fb(R, S, P, cfg, start, solution);
    case Method::eg: return solve_eg(R, S, P, cfg, start, solution);
    case Method::eftp: return solve_eftp(R, S, P, cfg, start, solution);
  }
  throw ConfigError("solve: unknown method");
}

}  // namespace visaddle
