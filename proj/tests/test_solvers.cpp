#include <doctest.h>

#include <Eigen/LU>

#include <cmath>
#include <limits>
#include <sstream>

#include "oracles.hpp"
#include "visaddle/solvers.hpp"
#include "visaddle/trace_io.hpp"

using namespace visaddle;

namespace {

ParameterPoint pt(double t, double p) {
  return {Vector::Constant(1, t), Vector::Constant(1, p)};
}

RegularizedOperator toy(double gamma) {
  return {SaddleOperator::bilinear(1.0), {PenaltyKind::tik_disc, gamma, {}}};
}

SolverConfig cfg(Method m, int max_iter = 20000, double tol = 1e-8,
                 int record_every = 1) {
  SolverConfig c;
  c.method = m;
  c.max_iter = max_iter;
  c.tol = tol;
  c.record_every = record_every;
  return c;
}

const FeasibleSet kWhole = FeasibleSet::whole_space();

RegularizedOperator affine_instance(double gamma = 0.0, Vector c = Vector::Zero(2)) {
  Matrix M(2, 2);
  M << 1, 2, -2, 3;
  return {SaddleOperator::affine(M, std::move(c), 1),
          {gamma > 0 ? PenaltyKind::tik_disc : PenaltyKind::none, gamma, {}}};
}

}  // namespace

TEST_CASE("fb blows up on the unregularized toy") {
  const SolveTrace t = solve_fb(toy(0.0), kWhole, Preconditioner(0.2),
                                cfg(Method::fb), pt(1, 0));
  CHECK(t.status == SolveStatus::diverged);
  // ||w+||^2 = (1 + eta^2 a^2) ||w||^2 = 1.04 ||w||^2 after every step
  for (std::size_t k = 0; k + 1 < t.iterates.size(); ++k) {
    const double r = t.iterates[k + 1].joint().squaredNorm() /
                     t.iterates[k].joint().squaredNorm();
    CHECK(std::abs(r - 1.04) <= 1e-10);
  }
  CHECK(t.iterates.size() > 100);
}

TEST_CASE("fb contracts on the gamma = 2 toy with the exact factor") {
  const SolveTrace t = solve_fb(toy(2.0), kWhole, Preconditioner(0.2),
                                cfg(Method::fb, 300), pt(1, 1));
  REQUIRE(t.status == SolveStatus::converged);
  CHECK(t.loop_iterations <= 200);
  CHECK(t.final_residual() <= 1e-8);
  // the update matrix [[1,-0.2],[0.2,0.6]] has the double eigenvalue 0.8
  const std::size_t n = t.iterates.size();
  for (std::size_t k = n - 20; k + 1 < n; ++k) {
    const double r =
        t.iterates[k + 1].joint().norm() / t.iterates[k].joint().norm();
    CHECK(std::abs(r - 0.8) <= 0.02);
  }
  // iterates follow the explicit recursion
  Matrix A(2, 2);
  A << 1, -0.2, 0.2, 0.6;
  Vector w(2);
  w << 1, 1;
  for (std::size_t k = 0; k < n; ++k) {
    CHECK((t.iterates[k].joint() - w).norm() <= 1e-13 * std::max(1.0, w.norm()));
    w = A * w;
  }
}

TEST_CASE("eg on the unregularized toy contracts by sqrt(0.8125) each step") {
  const SolveTrace t = solve_eg(toy(0.0), kWhole, Preconditioner(0.5),
                                cfg(Method::eg, 200, 1e-12), pt(1, 1));
  const double factor = std::sqrt(0.8125);
  for (std::size_t k = 0; k + 1 < t.iterates.size(); ++k) {
    const double r =
        t.iterates[k + 1].joint().norm() / t.iterates[k].joint().norm();
    CHECK(std::abs(r - factor) <= 1e-9);
  }
}

TEST_CASE("eg converges on the gamma = 2 toy with the Assumption-6 step") {
  // L = 3 so the auto stepsize with rho = 0.9 is 0.3
  const ConstantsReport rep = compute_constants(toy(2.0), {0.0, 0.0});
  SolverConfig c = cfg(Method::eg);
  const Preconditioner P = resolve_preconditioner(c, rep);
  CHECK(P.scalar() == doctest::Approx(0.3));
  const SolveTrace t = solve_eg(toy(2.0), kWhole, P, c, pt(1, 1));
  REQUIRE(t.status == SolveStatus::converged);
  // residual decreases monotonically after burn-in on this instance
  for (std::size_t k = 5; k + 1 < t.residual_norms.size(); ++k)
    CHECK(t.residual_norms[k + 1] <= t.residual_norms[k] * (1.0 + 1e-12));
}

TEST_CASE("eftp converges on the gamma = 2 toy at eta = 1/12") {
  const SolveTrace t = solve_eftp(toy(2.0), kWhole, Preconditioner(1.0 / 12.0),
                                  cfg(Method::eftp), pt(1, 1));
  REQUIRE(t.status == SolveStatus::converged);
  CHECK(t.final_iterate().joint().norm() <= 1e-7);
  // one warm-start call plus one call per loop iteration
  CHECK(t.oracle_calls == t.loop_iterations + 1);
}

TEST_CASE("solver oracle accounting") {
  // run exactly k loop iterations by disabling the tolerance
  const int k = 37;
  for (const auto& R : {toy(2.0), affine_instance()}) {
    const SolveTrace fb = solve_fb(R, kWhole, Preconditioner(0.01),
                                   cfg(Method::fb, k, 1e-300), pt(1, 1));
    CHECK(fb.loop_iterations == k);
    CHECK(fb.oracle_calls == k);

    const SolveTrace eg = solve_eg(R, kWhole, Preconditioner(0.01),
                                   cfg(Method::eg, k, 1e-300), pt(1, 1));
    CHECK(eg.oracle_calls == 2 * k);

    const SolveTrace ef = solve_eftp(R, kWhole, Preconditioner(0.01),
                                     cfg(Method::eftp, k, 1e-300), pt(1, 1));
    CHECK(ef.oracle_calls == k + 1);
  }
}

TEST_CASE("starting at the solution converges at iteration zero") {
  const ParameterPoint star = pt(0, 0);
  const SolveTrace fb =
      solve_fb(toy(2.0), kWhole, Preconditioner(0.2), cfg(Method::fb), star);
  CHECK(fb.status == SolveStatus::converged);
  CHECK(fb.loop_iterations == 0);
  CHECK(fb.oracle_calls == 0);
  CHECK(fb.residual_calls == 1);

  const SolveTrace eg =
      solve_eg(toy(2.0), kWhole, Preconditioner(0.2), cfg(Method::eg), star);
  CHECK(eg.status == SolveStatus::converged);
  CHECK(eg.loop_iterations == 0);
  CHECK(eg.oracle_calls == 0);

  const SolveTrace ef =
      solve_eftp(toy(2.0), kWhole, Preconditioner(0.2), cfg(Method::eftp), star);
  CHECK(ef.status == SolveStatus::converged);
  CHECK(ef.loop_iterations == 0);
  CHECK(ef.oracle_calls == 1);  // warm start only
}

TEST_CASE("eftp contraction rate on the strongly monotone affine instance") {
  const double L = 1.0 + 2.0 * std::sqrt(2.0);
  const double q = 1.0 - 1.0 / (4.0 * L);  // mu = 1
  const RegularizedOperator R = affine_instance();
  const SolveTrace t =
      solve_eftp(R, kWhole, Preconditioner(1.0 / (4.0 * L)),
                 cfg(Method::eftp, 2000, 1e-12), pt(3, 2), pt(0, 0));
  REQUIRE(t.status == SolveStatus::converged);
  REQUIRE(t.distances.size() == t.iterates.size());
  for (std::size_t k = 5; k + 1 < t.distances.size(); ++k) {
    if (t.distances[k] < 1e-13) break;
    CHECK(t.distances[k + 1] / t.distances[k] <= q + 0.02);
  }
}

TEST_CASE("fb is q-linear on the strongly monotone affine instance") {
  // admissible scalar step 2 mu / L^2 with mu = 1
  const double L = 1.0 + 2.0 * std::sqrt(2.0);
  const StepsizeRule rule{Method::fb, 0.9, EftpRule::quarter};
  const double eta = admissible_stepsize(rule, L, 1.0);
  const SolveTrace t = solve_fb(affine_instance(), kWhole, Preconditioner(eta),
                                cfg(Method::fb, 5000, 1e-10), pt(3, 2), pt(0, 0));
  REQUIRE(t.status == SolveStatus::converged);
  for (std::size_t k = 5; k + 1 < t.distances.size(); ++k) {
    if (t.distances[k] < 1e-12) break;
    CHECK(t.distances[k + 1] / t.distances[k] < 1.0);
  }
}

TEST_CASE("eg is Fejer monotone on the toy with admissible steps") {
  for (double gamma : {0.0, 2.0}) {
    const RegularizedOperator R = toy(gamma);
    const ConstantsReport rep = compute_constants(R, {0.0, 0.0});
    SolverConfig c = cfg(Method::eg, 3000, 1e-10);
    const Preconditioner P = resolve_preconditioner(c, rep);
    const SolveTrace t = solve_eg(R, kWhole, P, c, pt(1, 1), pt(0, 0));
    REQUIRE(t.distances.size() == t.iterates.size());
    for (std::size_t k = 0; k + 1 < t.distances.size(); ++k)
      CHECK(t.distances[k + 1] <= t.distances[k] + 1e-12);
  }
}

TEST_CASE("auto stepsize refuses fb on a merely monotone instance") {
  const ConstantsReport rep = compute_constants(toy(2.0), {0.0, 0.0});
  SolverConfig c = cfg(Method::fb);
  CHECK_THROWS_WITH_AS(resolve_preconditioner(c, rep),
                       doctest::Contains("strong monotonicity"), ConfigError);
  c.precond = Preconditioner(0.2);  // explicit eta bypasses the refusal
  CHECK_NOTHROW(resolve_preconditioner(c, rep));
}

TEST_CASE("projected runs stay feasible and converge on the boxed toy") {
  FeasibleSet S;
  S.theta_set = ConvexSet::box(Vector::Constant(1, -1.0), Vector::Constant(1, 1.0));
  S.phi_set = ConvexSet::box(Vector::Constant(1, -1.0), Vector::Constant(1, 1.0));
  // start outside the box; the first projection pulls it in
  for (Method m : {Method::fb, Method::eg, Method::eftp}) {
    SolverConfig c = cfg(m);
    const Preconditioner P(m == Method::fb ? 0.2 : 0.15);
    const SolveTrace t = solve(toy(2.0), S, P, c, pt(4, -3), pt(0, 0));
    REQUIRE(t.status == SolveStatus::converged);
    for (const auto& w : t.iterates) {
      CHECK(w.theta.cwiseAbs().maxCoeff() <= 1.0 + 1e-15);
      CHECK(w.phi.cwiseAbs().maxCoeff() <= 1.0 + 1e-15);
    }
  }
}

TEST_CASE("record_every decimates the trace") {
  const SolveTrace t = solve_fb(toy(2.0), kWhole, Preconditioner(0.2),
                                cfg(Method::fb, 100, 1e-300, 10), pt(1, 1));
  CHECK(t.status == SolveStatus::max_iter);
  REQUIRE(t.iterations.size() >= 2);
  for (std::size_t i = 0; i + 1 < t.iterations.size() - 1; ++i)
    CHECK(t.iterations[i + 1] - t.iterations[i] == 10);
  // final record lands on max_iter
  CHECK(t.iterations.back() == 100);
}

TEST_CASE("identical configurations give bitwise-identical traces") {
  const auto run = [] {
    return solve_eftp(toy(2.0), kWhole, Preconditioner(0.075),
                      cfg(Method::eftp), pt(1, 1), pt(0, 0));
  };
  const SolveTrace a = run();
  const SolveTrace b = run();
  REQUIRE(a.iterates.size() == b.iterates.size());
  for (std::size_t k = 0; k < a.iterates.size(); ++k) {
    CHECK(a.iterates[k].theta == b.iterates[k].theta);
    CHECK(a.iterates[k].phi == b.iterates[k].phi);
    CHECK(a.residual_norms[k] == b.residual_norms[k]);
    CHECK(a.distances[k] == b.distances[k]);
  }
}

TEST_CASE("solution continuity as gamma vanishes") {
  // gamma-shifted solutions of the strongly monotone affine instance approach
  // the unregularized solution monotonically; EFTP agrees with a direct solve
  Vector c(2);
  c << 1, 1;
  Matrix M(2, 2);
  M << 1, 2, -2, 3;
  const Vector base_solution = M.fullPivLu().solve(-c);

  double prev_gap = std::numeric_limits<double>::infinity();
  double gamma = 1.0;
  for (int step = 0; step < 11; ++step) {
    const RegularizedOperator R = affine_instance(gamma, c);
    Matrix Mg = M;
    Mg(1, 1) += gamma;
    const Vector direct = Mg.fullPivLu().solve(-c);

    const ConstantsReport rep = compute_constants(R, {1.0, 3.0});
    SolverConfig sc = cfg(Method::eftp, 100000, 1e-10);
    const Preconditioner P = resolve_preconditioner(sc, rep);
    const SolveTrace t = solve_eftp(R, kWhole, P, sc, pt(3, 2));
    REQUIRE(t.status == SolveStatus::converged);
    const Vector via_solver = t.final_iterate().joint();

    CHECK((via_solver - direct).norm() <= 1e-8);
    const double gap = (direct - base_solution).norm();
    CHECK(gap < prev_gap);
    prev_gap = gap;
    gamma *= 0.5;
  }
  CHECK(prev_gap < 1e-3);
}

TEST_CASE("gan toy with a clamped bias reproduces the bilinear trajectories") {
  const double a = 1.0;
  const SaddleOperator gan_base = SaddleOperator::gan(
      Discriminator(FeatureMap::identity(1)), Generator(1, 1),
      SampleSet::bilinear_toy(a), Link::linear);
  // clamp the generator bias to zero so the (w, phi) slice is the 2-d toy
  FeasibleSet S3;
  Vector lo(2), hi(2);
  lo << -1e30, 0.0;
  hi << 1e30, 0.0;
  S3.theta_set = ConvexSet::box(lo, hi);

  for (double gamma : {0.0, 2.0}) {
    for (Method m : {Method::fb, Method::eg, Method::eftp}) {
      const double eta = m == Method::fb ? 0.2 : 0.15;
      SolverConfig c = cfg(m, 60, 1e-300);

      const RegularizedOperator bil(SaddleOperator::bilinear(a),
                                    {PenaltyKind::tik_disc, gamma, {}});
      const SolveTrace t2 =
          solve(bil, kWhole, Preconditioner(eta), c, pt(1, 1));

      // sgp on the model-backed instance, tik_disc on the analytic one:
      // identical by the linear-discriminator equivalence
      const RegularizedOperator gan_reg(gan_base, {PenaltyKind::sgp, gamma, {}});
      ParameterPoint start3{Vector::Zero(2), Vector::Ones(1)};
      start3.theta(0) = 1.0;
      const SolveTrace t3 = solve(gan_reg, S3, Preconditioner(eta), c, start3);

      REQUIRE(t2.iterates.size() == t3.iterates.size());
      for (std::size_t k = 0; k < t2.iterates.size(); ++k) {
        CHECK(std::abs(t3.iterates[k].theta(0) - t2.iterates[k].theta(0)) <= 1e-12);
        CHECK(std::abs(t3.iterates[k].theta(1)) == 0.0);
        CHECK(std::abs(t3.iterates[k].phi(0) - t2.iterates[k].phi(0)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("trace csv layout") {
  const SolveTrace t = solve_fb(toy(2.0), kWhole, Preconditioner(0.2),
                                cfg(Method::fb, 50, 1e-6), pt(1, 1), pt(0, 0));
  const std::string csv = trace_csv_string(t, {"# run echo"});
  CHECK(csv.find("# run echo\n") != std::string::npos);
  CHECK(csv.find("iter,theta_0,phi_0,residual,distance,oracle_calls\n") !=
        std::string::npos);
  CHECK(csv.find("\n0,1,1,") != std::string::npos);

  // distance column is omitted when the solution is unknown
  const SolveTrace t2 = solve_fb(toy(2.0), kWhole, Preconditioner(0.2),
                                 cfg(Method::fb, 50, 1e-6), pt(1, 1));
  const std::string csv2 = trace_csv_string(t2, {});
  CHECK(csv2.find("iter,theta_0,phi_0,residual,oracle_calls\n") != std::string::npos);
}

TEST_CASE("solver configuration guards") {
  SolverConfig bad = cfg(Method::fb);
  bad.tol = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg(Method::fb);
  bad.max_iter = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg(Method::fb);
  bad.record_every = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK_THROWS_AS(solve_fb(toy(0.0), kWhole, Preconditioner(0.2), cfg(Method::fb),
                           {Vector::Constant(2, 1.0), Vector::Constant(1, 1.0)}),
                  ConfigError);
}
