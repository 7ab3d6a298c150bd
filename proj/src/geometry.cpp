#include "visaddle/geometry.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace visaddle {

Vector ParameterPoint::joint() const {
  Vector w(dim());
  w.head(theta.size()) = theta;
  w.tail(phi.size()) = phi;
  return w;
}

ParameterPoint ParameterPoint::from_joint(const Vector& w, Index d_theta) {
  require(d_theta >= 0 && d_theta <= w.size(),
          "from_joint: theta block size out of range");
  return {w.head(d_theta), w.tail(w.size() - d_theta)};
}

double distance(const ParameterPoint& a, const ParameterPoint& b) {
  return std::sqrt((a.theta - b.theta).squaredNorm() +
                   (a.phi - b.phi).squaredNorm());
}

ConvexSet ConvexSet::whole_space() {
  ConvexSet s;
  s.kind_ = Kind::whole_space;
  return s;
}

ConvexSet ConvexSet::box(Vector lo, Vector hi) {
  require(lo.size() == hi.size(), "box: lo and hi must have equal length");
  require(lo.size() > 0, "box: empty bounds");
  require((lo.array() <= hi.array()).all(), "box: requires lo <= hi elementwise");
  ConvexSet s;
  s.kind_ = Kind::box;
  s.lo_ = std::move(lo);
  s.hi_ = std::move(hi);
  return s;
}

ConvexSet ConvexSet::centered_box(Index dim, double half_width) {
  require(half_width >= 0, "box: negative half-width");
  return box(Vector::Constant(dim, -half_width), Vector::Constant(dim, half_width));
}

ConvexSet ConvexSet::ball(Vector center, double radius) {
  require(center.size() > 0, "ball: empty center");
  require(radius > 0, "ball: requires radius > 0");
  ConvexSet s;
  s.kind_ = Kind::ball;
  s.center_ = std::move(center);
  s.radius_ = radius;
  return s;
}

bool ConvexSet::accepts_dim(Index d) const {
  switch (kind_) {
    case Kind::whole_space: return true;
    case Kind::box: return lo_.size() == d;
    case Kind::ball: return center_.size() == d;
  }
  return false;
}

Vector ConvexSet::project(const Vector& v) const {
  switch (kind_) {
    case Kind::whole_space:
      return v;
    case Kind::box:
      require(v.size() == lo_.size(), "box projection: dimension mismatch");
      return v.cwiseMax(lo_).cwiseMin(hi_);
    case Kind::ball: {
      require(v.size() == center_.size(), "ball projection: dimension mismatch");
      const Vector diff = v - center_;
      const double n = diff.norm();
      if (n <= radius_) return v;
      return center_ + (radius_ / n) * diff;
    }
  }
  throw ConfigError("project: unknown set kind");
}

bool ConvexSet::contains(const Vector& v, double tol) const {
  switch (kind_) {
    case Kind::whole_space: return true;
    case Kind::box:
      return (v.array() >= lo_.array() - tol).all() &&
             (v.array() <= hi_.array() + tol).all();
    case Kind::ball: return (v - center_).norm() <= radius_ + tol;
  }
  return false;
}

std::string ConvexSet::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::whole_space: os << "all"; break;
    case Kind::box:
      os << "box[" << lo_.minCoeff() << "," << hi_.maxCoeff() << "]^" << lo_.size();
      break;
    case Kind::ball: os << "ball(r=" << radius_ << ")^" << center_.size(); break;
  }
  return os.str();
}

ParameterPoint FeasibleSet::project(const ParameterPoint& w) const {
  return {theta_set.project(w.theta), phi_set.project(w.phi)};
}

void FeasibleSet::check_dims(Index d_theta, Index d_phi) const {
  require(theta_set.accepts_dim(d_theta),
          "feasible set: theta block dimension mismatch");
  require(phi_set.accepts_dim(d_phi),
          "feasible set: phi block dimension mismatch");
}

Preconditioner::Preconditioner(double eta) : scalar_(eta) {
  require(std::isfinite(eta) && eta > 0, "preconditioner: scalar eta must be > 0");
  lambda_min_ = lambda_max_ = eta;
}

Preconditioner::Preconditioner(const Matrix& P) {
  require(P.rows() == P.cols() && P.rows() > 0, "preconditioner: P must be square");
  require(P.isApprox(P.transpose(), 1e-12), "preconditioner: P must be symmetric");
  mat_ = 0.5 * (P + P.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(mat_, Eigen::EigenvaluesOnly);
  require(es.info() == Eigen::Success, "preconditioner: eigen-decomposition failed");
  lambda_min_ = es.eigenvalues().minCoeff();
  lambda_max_ = es.eigenvalues().maxCoeff();
  require(lambda_min_ > 0, "preconditioner: P must be positive definite");
  ldlt_ = std::make_shared<Eigen::LDLT<Matrix>>(mat_);
  require(ldlt_->info() == Eigen::Success, "preconditioner: factorization failed");
}

double Preconditioner::scalar() const {
  require(scalar_.has_value(), "preconditioner: not in scalar form");
  return *scalar_;
}

Vector Preconditioner::apply(const Vector& v) const {
  if (scalar_) return *scalar_ * v;
  require(v.size() == mat_.rows(), "preconditioner apply: dimension mismatch");
  return mat_ * v;
}

Vector Preconditioner::solve(const Vector& v) const {
  if (scalar_) return v / *scalar_;
  require(v.size() == mat_.rows(), "preconditioner solve: dimension mismatch");
  return ldlt_->solve(v);
}

std::string Preconditioner::describe() const {
  std::ostringstream os;
  if (scalar_) {
    os << "eta=" << *scalar_;
  } else {
    os << "matrix " << mat_.rows() << "x" << mat_.cols()
       << " (lmin=" << lambda_min_ << ", lmax=" << lambda_max_ << ")";
  }
  return os.str();
}

Residual residual_from_field(const Preconditioner& P, const Vector& field,
                             const FeasibleSet& S, const ParameterPoint& w) {
  const Index dt = w.d_theta();
  const Vector stepped = w.joint() - P.apply(field);
  const ParameterPoint projected = S.project(ParameterPoint::from_joint(stepped, dt));
  Residual r;
  r.value = P.solve(w.joint() - projected.joint());
  r.norm = r.value.norm();
  return r;
}

Residual residual(const Preconditioner& P, const OperatorFn& F,
                  const FeasibleSet& S, const ParameterPoint& w) {
  return residual_from_field(P, F(w), S, w);
}

}  // namespace visaddle
