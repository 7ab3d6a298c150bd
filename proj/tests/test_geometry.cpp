#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <random>

#include "oracles.hpp"
#include "visaddle/geometry.hpp"
#include "visaddle/operators.hpp"

using namespace visaddle;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

ConvexSet random_set(std::mt19937_64& rng, Index dim) {
  std::uniform_int_distribution<int> pick(0, 2);
  switch (pick(rng)) {
    case 0: return ConvexSet::whole_space();
    case 1: {
      Vector lo = oracles::random_vector(rng, dim);
      Vector hi = lo + oracles::random_vector(rng, dim).cwiseAbs();
      return ConvexSet::box(lo, hi);
    }
    default:
      return ConvexSet::ball(oracles::random_vector(rng, dim),
                             0.1 + std::abs(oracles::random_vector(rng, 1)(0)));
  }
}

}  // namespace

TEST_CASE("projection closed forms") {
  CHECK(ConvexSet::whole_space().project(vec2(3.2, -1.1)) == vec2(3.2, -1.1));

  const ConvexSet box = ConvexSet::box(vec2(-1, -1), vec2(1, 1));
  CHECK(box.project(vec2(1.5, -0.3)) == vec2(1.0, -0.3));

  const ConvexSet ball = ConvexSet::ball(Vector::Zero(2), 1.0);
  const Vector p = ball.project(vec2(3, 4));
  CHECK(p(0) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(p(1) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(p.norm() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("malformed sets are configuration errors") {
  CHECK_THROWS_AS(ConvexSet::box(vec2(1, 0), vec2(0, 1)), ConfigError);
  CHECK_THROWS_AS(ConvexSet::ball(Vector::Zero(2), 0.0), ConfigError);
  CHECK_THROWS_AS(ConvexSet::ball(Vector::Zero(2), -1.0), ConfigError);
}

TEST_CASE("projection idempotence and nonexpansiveness") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const Index dim = 1 + static_cast<Index>(trial % 5);
    const ConvexSet set = random_set(rng, dim);
    const Vector u = oracles::random_vector(rng, dim, 3.0);
    const Vector v = oracles::random_vector(rng, dim, 3.0);
    const Vector pu = set.project(u);
    CHECK((set.project(pu) - pu).norm() <= 1e-14 * std::max(1.0, pu.norm()));
    CHECK((set.project(u) - set.project(v)).norm() <= (u - v).norm() + 1e-14);
  }
}

TEST_CASE("blockwise feasible-set projection") {
  FeasibleSet S;
  S.theta_set = ConvexSet::box(Vector::Constant(1, -1.0), Vector::Constant(1, 1.0));
  S.phi_set = ConvexSet::whole_space();
  const ParameterPoint w{Vector::Constant(1, 2.0), Vector::Constant(1, -7.0)};
  const ParameterPoint p = S.project(w);
  CHECK(p.theta(0) == 1.0);
  CHECK(p.phi(0) == -7.0);
}

TEST_CASE("preconditioner apply and solve") {
  const Preconditioner half(0.5);
  CHECK(half.apply(vec2(2, 4)) == vec2(1, 2));
  CHECK(half.solve(vec2(1, 2)) == vec2(2, 4));
  CHECK(half.lambda_min() == 0.5);
  CHECK(half.norm() == 0.5);

  const Preconditioner ident(Matrix::Identity(2, 2));
  CHECK(ident.apply(vec2(0.3, -9)) == vec2(0.3, -9));

  Matrix D = Matrix::Zero(2, 2);
  D(0, 0) = 1;
  D(1, 1) = 2;
  const Preconditioner diag(D);
  CHECK(diag.apply(vec2(3, 3)) == vec2(3, 6));
  CHECK(diag.lambda_min() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(diag.lambda_max() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("preconditioner eigenvalue cache matches a direct eigen-solve") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 2 + trial % 4;
    Matrix B(n, n);
    for (Index i = 0; i < n; ++i) B.col(i) = oracles::random_vector(rng, n);
    const Matrix P = B.transpose() * B + Matrix::Identity(n, n);
    const Preconditioner pre(P);
    Eigen::SelfAdjointEigenSolver<Matrix> es(P);
    CHECK(std::abs(pre.lambda_min() - es.eigenvalues().minCoeff()) <= 1e-10);
    CHECK(std::abs(pre.lambda_max() - es.eigenvalues().maxCoeff()) <= 1e-10);
  }
}

TEST_CASE("indefinite or singular preconditioners are rejected") {
  Matrix bad = Matrix::Identity(2, 2);
  bad(1, 1) = -1;
  CHECK_THROWS_AS(Preconditioner{bad}, ConfigError);
  CHECK_THROWS_AS(Preconditioner{Matrix::Zero(2, 2)}, ConfigError);
  CHECK_THROWS_AS(Preconditioner(0.0), ConfigError);
  CHECK_THROWS_AS(Preconditioner(-0.1), ConfigError);
}

TEST_CASE("residual closed forms on the bilinear toy") {
  const SaddleOperator F = SaddleOperator::bilinear(1.0);
  const OperatorFn fn = [&](const ParameterPoint& w) { return F.eval(w); };
  const FeasibleSet whole = FeasibleSet::whole_space();

  // zero exactly at the equilibrium, for any eta > 0
  for (double eta : {0.1, 1.0, 7.5}) {
    const Residual r = residual(Preconditioner(eta), fn, whole,
                                {Vector::Zero(1), Vector::Zero(1)});
    CHECK(r.norm == 0.0);
  }

  // on the whole space the residual reduces to F(w)
  const ParameterPoint w{Vector::Constant(1, 1.0), Vector::Zero(1)};
  const Residual r = residual(Preconditioner(0.7), fn, whole, w);
  CHECK(r.value(0) == doctest::Approx(0.0));
  CHECK(r.value(1) == doctest::Approx(-1.0));
  CHECK(r.norm == doctest::Approx(1.0));
}

TEST_CASE("projection shrinks the residual when the box is engaged") {
  const SaddleOperator F = SaddleOperator::bilinear(1.0);
  const OperatorFn fn = [&](const ParameterPoint& w) { return F.eval(w); };
  FeasibleSet S;
  S.theta_set = ConvexSet::box(Vector::Constant(1, -1.0), Vector::Constant(1, 1.0));
  S.phi_set = ConvexSet::box(Vector::Constant(1, -1.0), Vector::Constant(1, 1.0));
  const ParameterPoint w{Vector::Zero(1), Vector::Constant(1, 2.0)};
  const Residual r = residual(Preconditioner(1.0), fn, S, w);
  CHECK(r.norm < F.eval(w).norm());
  CHECK(r.norm == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("residual vanishes only at the solution on a known instance") {
  Matrix M(2, 2);
  M << 1, 2, -2, 3;
  Vector c(2);
  c << 1, -1;
  const SaddleOperator F = SaddleOperator::affine(M, c, 1);
  const OperatorFn fn = [&](const ParameterPoint& w) { return F.eval(w); };
  const Vector sol = M.fullPivLu().solve(-c);
  const FeasibleSet whole = FeasibleSet::whole_space();
  const Preconditioner P(0.2);

  const Residual at_sol = residual(P, fn, whole, ParameterPoint::from_joint(sol, 1));
  CHECK(at_sol.norm <= 1e-14);

  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    const Vector off = sol + oracles::random_vector(rng, 2);
    if ((off - sol).norm() < 1e-6) continue;
    CHECK(residual(P, fn, whole, ParameterPoint::from_joint(off, 1)).norm > 1e-8);
  }
}

TEST_CASE("joint split round-trip") {
  std::mt19937_64 rng(5);
  const Vector w = oracles::random_vector(rng, 7);
  const ParameterPoint p = ParameterPoint::from_joint(w, 3);
  CHECK(p.d_theta() == 3);
  CHECK(p.d_phi() == 4);
  CHECK(p.joint() == w);
}
