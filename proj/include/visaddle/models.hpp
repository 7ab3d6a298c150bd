#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "visaddle/common.hpp"
#include "visaddle/geometry.hpp"

namespace visaddle {

// Feature map psi: R^{d_x} -> R^{d_phi} with analytic first and second input
// derivatives. Two choices: identity (requires d_phi == d_x) and frozen
// random affine-tanh features psi_j(x) = tanh(w_j'x + b_j).
class FeatureMap {
 public:
  enum class Kind { identity, tanh_random };

  static FeatureMap identity(Index d_x);
  static FeatureMap tanh_features(Index d_x, Index d_phi, std::uint64_t seed);
  // Explicit weights, mostly for tests.
  static FeatureMap tanh_features(Matrix weights, Vector biases);

  Kind kind() const { return kind_; }
  Index d_x() const { return d_x_; }
  Index d_phi() const { return d_phi_; }

  Vector eval(const Vector& x) const;
  // d_phi x d_x, rows are grad psi_j(x)'.
  Matrix jacobian(const Vector& x) const;
  // H_xx(x) = sum_j phi_j * hess psi_j(x); exact for both kinds.
  Matrix weighted_input_hessian(const Vector& phi, const Vector& x) const;

  const Matrix& weights() const { return weights_; }
  const Vector& biases() const { return biases_; }

 private:
  FeatureMap() = default;
  Kind kind_ = Kind::identity;
  Index d_x_ = 0, d_phi_ = 0;
  Matrix weights_;  // d_phi x d_x (tanh kind)
  Vector biases_;   // d_phi
};

// Everything disc_eval_and_derivs returns, from closed-form formulas.
struct DiscDerivs {
  double value = 0.0;     // D_phi(x) = phi' psi(x)
  Vector grad_phi;        // psi(x)
  Vector input_grad;      // g(x; phi) = Jpsi(x)' phi
  Matrix mixed_hessian;   // H_phi(x), d_x x d_phi, column j = grad_x psi_j
  Matrix input_hessian;   // H_xx(x) = sum_j phi_j hess psi_j
};

// Linear-in-parameters discriminator D_phi(x) = phi' psi(x). Twice
// continuously differentiable in x and phi by construction.
class Discriminator {
 public:
  explicit Discriminator(FeatureMap psi) : psi_(std::move(psi)) {}

  Index d_x() const { return psi_.d_x(); }
  Index d_phi() const { return psi_.d_phi(); }
  const FeatureMap& features() const { return psi_; }

  double value(const Vector& phi, const Vector& x) const;
  Vector input_grad(const Vector& phi, const Vector& x) const;
  // H_phi(x) = Jpsi(x)', independent of phi for this model family.
  Matrix mixed_hessian(const Vector& x) const;
  DiscDerivs eval_and_derivs(const Vector& phi, const Vector& x) const;

 private:
  FeatureMap psi_;
};

// Affine generator G_theta(z) = W z + b with theta = [vec(W); b]
// (column-major vec). The Jacobian is constant in theta and assembled
// exactly from z.
class Generator {
 public:
  Generator(Index d_x, Index d_z);

  Index d_x() const { return d_x_; }
  Index d_z() const { return d_z_; }
  Index d_theta() const { return d_x_ * d_z_ + d_x_; }

  Vector eval(const Vector& theta, const Vector& z) const;
  // d_x x d_theta; entry (i, col(W_ij)) = z_j, entry (i, col(b_i)) = 1.
  Matrix jacobian(const Vector& z) const;

  Vector pack(const Matrix& W, const Vector& b) const;
  std::pair<Matrix, Vector> unpack(const Vector& theta) const;

 private:
  Index d_x_, d_z_;
};

// Finite collections standing in for the expectations over p_D and p_Z.
// Fixed for the lifetime of a problem instance; expectations are
// deterministic empirical means.
struct SampleSet {
  std::vector<Vector> reals;    // x in R^{d_x}
  std::vector<Vector> latents;  // z in R^{d_z}
  std::uint64_t seed = 0;

  Index d_x() const { return reals.empty() ? 0 : reals.front().size(); }
  Index d_z() const { return latents.empty() ? 0 : latents.front().size(); }
  Index n_real() const { return static_cast<Index>(reals.size()); }
  Index n_latent() const { return static_cast<Index>(latents.size()); }

  void validate() const;

  static SampleSet gaussian(Index d_x, Index d_z, Index n_real, Index n_latent,
                            std::uint64_t seed);
  // Single-point set {x = 0}, {z = -a}: the empirical means that make a
  // one-dimensional affine generator reproduce the bilinear toy drift.
  static SampleSet bilinear_toy(double a);

  // CSV, one point per row; header x_0..x_{d-1} resp. z_0..z_{d-1}.
  void reals_to_csv(std::ostream& os) const;
  void latents_to_csv(std::ostream& os) const;
  static std::vector<Vector> points_from_csv(std::istream& is, char prefix);
  static SampleSet from_csv(std::istream& reals_csv, std::istream& latents_csv,
                            std::uint64_t seed = 0);
};

// Objective link Psi. softplus_log is Psi(t) = -log(1 + e^{-t}), evaluated in
// a numerically stable form; linear is Psi(t) = t and recovers the bilinear
// toy exactly.
enum class Link { softplus_log, linear };

double link_value(Link link, double t);
double link_deriv(Link link, double t);
const char* link_name(Link link);

struct GanLoss {
  double value = 0.0;
  Vector grad_theta;
  Vector grad_phi;
};

// Empirical GAN objective L(theta, phi) = mean_x Psi(D(x)) + mean_z Psi(-D(G(z)))
// with exact chain-rule gradients. OpenMP kernel with a deterministic
// chunk-ordered reduction; see reference_kernels.hpp for the serial twin.
GanLoss gan_loss_and_grads(const Discriminator& D, const Generator& G,
                           const ParameterPoint& w, const SampleSet& samples,
                           Link link);

}  // namespace visaddle
