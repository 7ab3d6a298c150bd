#include "visaddle/regularization.hpp"

#include <cmath>
#include <sstream>

#include "visaddle/parallel.hpp"

namespace visaddle {

const char* penalty_name(PenaltyKind kind) {
  switch (kind) {
    case PenaltyKind::none: return "none";
    case PenaltyKind::tik_disc: return "tik_disc";
    case PenaltyKind::tik_full: return "tik_full";
    case PenaltyKind::sgp: return "sgp";
  }
  return "?";
}

std::optional<PenaltyKind> penalty_from_name(const std::string& name) {
  if (name == "none") return PenaltyKind::none;
  if (name == "tik_disc") return PenaltyKind::tik_disc;
  if (name == "tik_full") return PenaltyKind::tik_full;
  if (name == "sgp") return PenaltyKind::sgp;
  return std::nullopt;
}

void PenaltyConfig::validate() const {
  require(gamma >= 0, "penalty: gamma must be >= 0");
  if (tau) {
    require(kind == PenaltyKind::tik_full, "penalty: tau only applies to tik_full");
    require(*tau >= 0, "penalty: tau must be >= 0");
  }
}

namespace {

struct SgpAcc {
  double sq = 0.0;     // sum ||g||^2
  Vector grad_phi;     // sum H' g
  Vector grad_theta;   // sum J_G' H_xx' g (generated support only)

  SgpAcc& operator+=(const SgpAcc& o) {
    sq += o.sq;
    grad_phi += o.grad_phi;
    grad_theta += o.grad_theta;
    return *this;
  }
};

PenaltyEval sgp_eval(double gamma, const SaddleOperator& base,
                     const ParameterPoint& w) {
  const Discriminator& D = base.discriminator();
  const Generator& G = base.generator();
  const SampleSet& samples = base.samples();

  const SgpAcc zero{0.0, Vector::Zero(D.d_phi()), Vector::Zero(G.d_theta())};

  const SgpAcc real_sum = par::chunked_sum(
      samples.n_real(), zero, [&](SgpAcc& acc, std::ptrdiff_t i) {
        const Matrix H = D.mixed_hessian(samples.reals[i]);
        const Vector g = H * w.phi;
        acc.sq += g.squaredNorm();
        acc.grad_phi += H.transpose() * g;
      });

  const SgpAcc gen_sum = par::chunked_sum(
      samples.n_latent(), zero, [&](SgpAcc& acc, std::ptrdiff_t i) {
        const Vector xg = G.eval(w.theta, samples.latents[i]);
        const DiscDerivs dd = D.eval_and_derivs(w.phi, xg);
        acc.sq += dd.input_grad.squaredNorm();
        acc.grad_phi += dd.mixed_hessian.transpose() * dd.input_grad;
        acc.grad_theta += G.jacobian(samples.latents[i]).transpose() *
                          (dd.input_hessian.transpose() * dd.input_grad);
      });

  const double nr = static_cast<double>(samples.n_real());
  const double nz = static_cast<double>(samples.n_latent());

  // Both supports carry equal weight 1/2, so a discriminator that is linear
  // in its input reproduces the Tikhonov penalty exactly.
  PenaltyEval out;
  out.value = 0.25 * gamma * (real_sum.sq / nr + gen_sum.sq / nz);
  out.grad_phi = 0.5 * gamma * (real_sum.grad_phi / nr + gen_sum.grad_phi / nz);
  out.grad_theta = 0.5 * gamma * (gen_sum.grad_theta / nz);
  return out;
}

}  // namespace

PenaltyEval penalty_value_and_grads(const PenaltyConfig& pc,
                                    const SaddleOperator& base,
                                    const ParameterPoint& w) {
  pc.validate();
  require(w.theta.size() == base.d_theta() && w.phi.size() == base.d_phi(),
          "penalty: point dimension mismatch");
  PenaltyEval out;
  out.grad_theta = Vector::Zero(base.d_theta());
  out.grad_phi = Vector::Zero(base.d_phi());
  switch (pc.kind) {
    case PenaltyKind::none:
      break;
    case PenaltyKind::tik_disc:
      out.value = 0.5 * pc.gamma * w.phi.squaredNorm();
      out.grad_phi = pc.gamma * w.phi;
      break;
    case PenaltyKind::tik_full: {
      const double tau = pc.tau_or_default();
      out.value = 0.5 * pc.gamma * w.phi.squaredNorm() +
                  0.5 * tau * w.theta.squaredNorm();
      out.grad_phi = pc.gamma * w.phi;
      out.grad_theta = tau * w.theta;
      break;
    }
    case PenaltyKind::sgp:
      if (!base.is_model_backed())
        throw ConfigError(
            "penalty: sgp needs the model-backed operator (H_phi, H_xx, J_G); "
            "for the bilinear toy use the gan kind with identity features and "
            "the linear link, which reproduces it exactly");
      out = sgp_eval(pc.gamma, base, w);
      break;
  }
  return out;
}

Matrix gramian(const Discriminator& D, const Generator& G,
               const ParameterPoint& w, const SampleSet& samples) {
  samples.validate();
  require(w.theta.size() == G.d_theta(), "gramian: theta dimension mismatch");
  const Index dp = D.d_phi();
  const Matrix zero = Matrix::Zero(dp, dp);

  const Matrix real_sum = par::chunked_sum(
      samples.n_real(), zero, [&](Matrix& acc, std::ptrdiff_t i) {
        const Matrix H = D.mixed_hessian(samples.reals[i]);
        acc += H.transpose() * H;
      });
  const Matrix gen_sum = par::chunked_sum(
      samples.n_latent(), zero, [&](Matrix& acc, std::ptrdiff_t i) {
        const Matrix H = D.mixed_hessian(G.eval(w.theta, samples.latents[i]));
        acc += H.transpose() * H;
      });

  return real_sum / static_cast<double>(samples.n_real()) +
         gen_sum / static_cast<double>(samples.n_latent());
}

Matrix gramian(const SaddleOperator& F, const ParameterPoint& w) {
  require(F.is_model_backed(), "gramian: needs a model-backed operator");
  return gramian(F.discriminator(), F.generator(), w, F.samples());
}

RegularizedOperator::RegularizedOperator(SaddleOperator base, PenaltyConfig penalty)
    : base_(std::move(base)), penalty_(penalty) {
  penalty_.validate();
  if (penalty_.kind == PenaltyKind::sgp && !base_.is_model_backed())
    throw ConfigError(
        "regularized operator: sgp needs the model-backed operator; for the "
        "bilinear toy use the gan kind with identity features and the linear "
        "link, which reproduces it exactly");
}

Vector RegularizedOperator::eval(const ParameterPoint& w) const {
  Vector field = base_.eval(w);
  if (!penalty_.active()) return field;

  const Index dt = base_.d_theta();
  switch (penalty_.kind) {
    case PenaltyKind::none:
      break;
    case PenaltyKind::tik_disc:
      field.tail(base_.d_phi()) += penalty_.gamma * w.phi;
      break;
    case PenaltyKind::tik_full:
      field.head(dt) += penalty_.tau_or_default() * w.theta;
      field.tail(base_.d_phi()) += penalty_.gamma * w.phi;
      break;
    case PenaltyKind::sgp: {
      const PenaltyEval p = penalty_value_and_grads(penalty_, base_, w);
      field.head(dt) -= p.grad_theta;
      field.tail(base_.d_phi()) += p.grad_phi;
      break;
    }
  }
  if (!field.allFinite())
    throw NumericalError("regularized operator: non-finite field value");
  return field;
}

OperatorFn RegularizedOperator::fn() const {
  return [this](const ParameterPoint& w) { return eval(w); };
}

std::string RegularizedOperator::describe() const {
  std::ostringstream os;
  os << base_.describe() << " + " << penalty_name(penalty_.kind)
     << "(gamma=" << penalty_.gamma;
  if (penalty_.kind == PenaltyKind::tik_full)
    os << ", tau=" << penalty_.tau_or_default();
  os << ")";
  return os.str();
}

}  // namespace visaddle
