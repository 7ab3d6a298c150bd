#include "visaddle/operators.hpp"

#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace visaddle {

SaddleOperator SaddleOperator::bilinear(double a) {
  require(a > 0, "bilinear operator: requires a > 0");
  SaddleOperator F;
  F.kind_ = OperatorKind::bilinear;
  F.a_ = a;
  F.d_theta_ = F.d_phi_ = 1;
  return F;
}

SaddleOperator SaddleOperator::affine(Matrix M, Vector c, Index d_theta) {
  require(M.rows() == M.cols() && M.rows() > 0, "affine operator: M must be square");
  require(c.size() == M.rows(), "affine operator: c size mismatch");
  require(d_theta >= 1 && d_theta < M.rows(),
          "affine operator: d_theta must split the dimension");
  SaddleOperator F;
  F.kind_ = OperatorKind::affine;
  F.M_ = std::move(M);
  F.c_ = std::move(c);
  F.d_theta_ = d_theta;
  F.d_phi_ = F.M_.rows() - d_theta;
  return F;
}

SaddleOperator SaddleOperator::gan(Discriminator disc, Generator gen,
                                   SampleSet samples, Link link) {
  samples.validate();
  require(samples.d_x() == disc.d_x(), "gan operator: samples vs discriminator d_x");
  require(samples.d_z() == gen.d_z(), "gan operator: samples vs generator d_z");
  require(gen.d_x() == disc.d_x(), "gan operator: generator output dimension");
  SaddleOperator F;
  F.kind_ = OperatorKind::gan;
  F.d_theta_ = gen.d_theta();
  F.d_phi_ = disc.d_phi();
  F.gan_ = std::make_shared<const GanParts>(
      GanParts{std::move(disc), std::move(gen), std::move(samples), link});
  return F;
}

void SaddleOperator::check_point(const ParameterPoint& w) const {
  require(w.theta.size() == d_theta_, "operator eval: theta dimension mismatch");
  require(w.phi.size() == d_phi_, "operator eval: phi dimension mismatch");
}

Vector SaddleOperator::eval(const ParameterPoint& w) const {
  check_point(w);
  Vector out(dim());
  switch (kind_) {
    case OperatorKind::bilinear:
      out(0) = a_ * w.phi(0);
      out(1) = -a_ * w.theta(0);
      break;
    case OperatorKind::affine:
      out = M_ * w.joint() + c_;
      break;
    case OperatorKind::gan: {
      const GanLoss l =
          gan_loss_and_grads(gan_->disc, gan_->gen, w, gan_->samples, gan_->link);
      out.head(d_theta_) = l.grad_theta;
      out.tail(d_phi_) = -l.grad_phi;
      break;
    }
  }
  if (!out.head(d_theta_).allFinite())
    throw NumericalError("operator eval: non-finite value in theta block");
  if (!out.tail(d_phi_).allFinite())
    throw NumericalError("operator eval: non-finite value in phi block");
  return out;
}

double SaddleOperator::bilinear_a() const {
  require(kind_ == OperatorKind::bilinear, "not a bilinear operator");
  return a_;
}

const Matrix& SaddleOperator::affine_matrix() const {
  require(kind_ == OperatorKind::affine, "not an affine operator");
  return M_;
}

const Vector& SaddleOperator::affine_offset() const {
  require(kind_ == OperatorKind::affine, "not an affine operator");
  return c_;
}

const Discriminator& SaddleOperator::discriminator() const {
  require(gan_ != nullptr, "operator has no discriminator");
  return gan_->disc;
}

const Generator& SaddleOperator::generator() const {
  require(gan_ != nullptr, "operator has no generator");
  return gan_->gen;
}

const SampleSet& SaddleOperator::samples() const {
  require(gan_ != nullptr, "operator has no sample set");
  return gan_->samples;
}

Link SaddleOperator::link() const {
  require(gan_ != nullptr, "operator has no objective link");
  return gan_->link;
}

std::string SaddleOperator::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case OperatorKind::bilinear: os << "bilinear(a=" << a_ << ")"; break;
    case OperatorKind::affine: os << "affine(d=" << dim() << ")"; break;
    case OperatorKind::gan:
      os << "gan(" << link_name(gan_->link) << ", d_theta=" << d_theta_
         << ", d_phi=" << d_phi_ << ")";
      break;
  }
  return os.str();
}

JacobianEstimate jacobian_fd(const OperatorFn& F, const ParameterPoint& w, double h) {
  require(h > 0, "jacobian_fd: step must be positive");
  const Index dt = w.d_theta();
  const Index d = w.dim();
  const Vector base = w.joint();
  Matrix J(d, d);
  for (Index j = 0; j < d; ++j) {
    Vector up = base, dn = base;
    up(j) += h;
    dn(j) -= h;
    const Vector fp = F(ParameterPoint::from_joint(up, dt));
    const Vector fm = F(ParameterPoint::from_joint(dn, dt));
    J.col(j) = (fp - fm) / (2.0 * h);
  }
  if (!J.allFinite()) throw NumericalError("jacobian_fd: non-finite entries");

  JacobianEstimate est;
  est.jacobian = J;
  est.symmetric_part = 0.5 * (J + J.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(est.symmetric_part, Eigen::EigenvaluesOnly);
  est.sym_eig_min = es.eigenvalues().minCoeff();
  est.sym_eig_max = es.eigenvalues().maxCoeff();
  est.sigma_max = J.jacobiSvd().singularValues()(0);
  return est;
}

JacobianEstimate jacobian_fd(const SaddleOperator& F, const ParameterPoint& w,
                             double h) {
  return jacobian_fd([&F](const ParameterPoint& p) { return F.eval(p); }, w, h);
}

}  // namespace visaddle
