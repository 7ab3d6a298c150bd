#include "visaddle/reference_kernels.hpp"

namespace visaddle::reference {

GanLoss gan_loss_and_grads(const Discriminator& D, const Generator& G,
                           const ParameterPoint& w, const SampleSet& samples,
                           Link link) {
  samples.validate();
  GanLoss out;
  out.grad_theta = Vector::Zero(G.d_theta());
  out.grad_phi = Vector::Zero(D.d_phi());

  double real_value = 0.0;
  Vector real_grad_phi = Vector::Zero(D.d_phi());
  for (const Vector& x : samples.reals) {
    const Vector psi = D.features().eval(x);
    const double d = w.phi.dot(psi);
    real_value += link_value(link, d);
    real_grad_phi += link_deriv(link, d) * psi;
  }

  double gen_value = 0.0;
  Vector gen_grad_phi = Vector::Zero(D.d_phi());
  Vector gen_grad_theta = Vector::Zero(G.d_theta());
  for (const Vector& z : samples.latents) {
    const Vector xg = G.eval(w.theta, z);
    const Vector psi = D.features().eval(xg);
    const double d = w.phi.dot(psi);
    const double dpsi = link_deriv(link, -d);
    gen_value += link_value(link, -d);
    gen_grad_phi -= dpsi * psi;
    gen_grad_theta -= dpsi * (G.jacobian(z).transpose() * D.input_grad(w.phi, xg));
  }

  const double nr = static_cast<double>(samples.n_real());
  const double nz = static_cast<double>(samples.n_latent());
  out.value = real_value / nr + gen_value / nz;
  out.grad_phi = real_grad_phi / nr + gen_grad_phi / nz;
  out.grad_theta = gen_grad_theta / nz;
  return out;
}

PenaltyEval sgp_penalty(double gamma, const Discriminator& D, const Generator& G,
                        const ParameterPoint& w, const SampleSet& samples) {
  samples.validate();
  double real_sq = 0.0;
  Vector real_gp = Vector::Zero(D.d_phi());
  for (const Vector& x : samples.reals) {
    const Matrix H = D.mixed_hessian(x);
    const Vector g = H * w.phi;
    real_sq += g.squaredNorm();
    real_gp += H.transpose() * g;
  }

  double gen_sq = 0.0;
  Vector gen_gp = Vector::Zero(D.d_phi());
  Vector gen_gt = Vector::Zero(G.d_theta());
  for (const Vector& z : samples.latents) {
    const Vector xg = G.eval(w.theta, z);
    const DiscDerivs dd = D.eval_and_derivs(w.phi, xg);
    gen_sq += dd.input_grad.squaredNorm();
    gen_gp += dd.mixed_hessian.transpose() * dd.input_grad;
    gen_gt += G.jacobian(z).transpose() *
              (dd.input_hessian.transpose() * dd.input_grad);
  }

  const double nr = static_cast<double>(samples.n_real());
  const double nz = static_cast<double>(samples.n_latent());
  PenaltyEval out;
  out.value = 0.25 * gamma * (real_sq / nr + gen_sq / nz);
  out.grad_phi = 0.5 * gamma * (real_gp / nr + gen_gp / nz);
  out.grad_theta = 0.5 * gamma * (gen_gt / nz);
  return out;
}

Matrix gramian(const Discriminator& D, const Generator& G,
               const ParameterPoint& w, const SampleSet& samples) {
  samples.validate();
  const Index dp = D.d_phi();
  Matrix real_sum = Matrix::Zero(dp, dp);
  for (const Vector& x : samples.reals) {
    const Matrix H = D.mixed_hessian(x);
    real_sum += H.transpose() * H;
  }
  Matrix gen_sum = Matrix::Zero(dp, dp);
  for (const Vector& z : samples.latents) {
    const Matrix H = D.mixed_hessian(G.eval(w.theta, z));
    gen_sum += H.transpose() * H;
  }
  return real_sum / static_cast<double>(samples.n_real()) +
         gen_sum / static_cast<double>(samples.n_latent());
}

}  // namespace visaddle::reference
