#pragma once

#include <memory>
#include <string>

#include "visaddle/common.hpp"
#include "visaddle/geometry.hpp"
#include "visaddle/models.hpp"

namespace visaddle {

enum class OperatorKind { gan, bilinear, affine };

// Saddle operator F. Three constructions:
//   gan:      F(w) = (grad_theta L, -grad_phi L) for the empirical GAN loss
//   bilinear: F(w) = (a*phi, -a*theta), the unregularized toy field
//   affine:   F(w) = M w + c, for strongly monotone rate tests
class SaddleOperator {
 public:
  static SaddleOperator bilinear(double a);
  static SaddleOperator affine(Matrix M, Vector c, Index d_theta);
  static SaddleOperator gan(Discriminator disc, Generator gen, SampleSet samples,
                            Link link);

  OperatorKind kind() const { return kind_; }
  Index d_theta() const { return d_theta_; }
  Index d_phi() const { return d_phi_; }
  Index dim() const { return d_theta_ + d_phi_; }

  // Joint field vector [theta block; phi block]. Throws NumericalError with
  // the offending block named if the result is non-finite.
  Vector eval(const ParameterPoint& w) const;

  double bilinear_a() const;
  const Matrix& affine_matrix() const;
  const Vector& affine_offset() const;

  bool is_model_backed() const { return kind_ == OperatorKind::gan; }
  const Discriminator& discriminator() const;
  const Generator& generator() const;
  const SampleSet& samples() const;
  Link link() const;

  std::string describe() const;

 private:
  SaddleOperator() = default;
  void check_point(const ParameterPoint& w) const;

  OperatorKind kind_ = OperatorKind::bilinear;
  Index d_theta_ = 0, d_phi_ = 0;
  double a_ = 1.0;
  Matrix M_;
  Vector c_;
  struct GanParts {
    Discriminator disc;
    Generator gen;
    SampleSet samples;
    Link link;
  };
  std::shared_ptr<const GanParts> gan_;
};

// Central-difference Jacobian and the spectral data used by the constants
// module: the explicitly symmetrized part, its eigenvalue range, and the
// spectral norm of J itself.
struct JacobianEstimate {
  Matrix jacobian;
  Matrix symmetric_part;
  double sym_eig_min = 0.0;
  double sym_eig_max = 0.0;
  double sigma_max = 0.0;
};

JacobianEstimate jacobian_fd(const OperatorFn& F, const ParameterPoint& w, double h);
JacobianEstimate jacobian_fd(const SaddleOperator& F, const ParameterPoint& w,
                             double h = 1e-6);

}  // namespace visaddle
