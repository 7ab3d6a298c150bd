#pragma once

#include <optional>
#include <string>

#include "visaddle/common.hpp"
#include "visaddle/geometry.hpp"
#include "visaddle/operators.hpp"

namespace visaddle {

// The penalty menu. tik_disc and sgp act on the discriminator side only;
// tik_full additionally puts quadratic curvature on the generator with an
// independent weight tau (default tau = gamma).
enum class PenaltyKind { none, tik_disc, tik_full, sgp };

const char* penalty_name(PenaltyKind kind);
std::optional<PenaltyKind> penalty_from_name(const std::string& name);

struct PenaltyConfig {
  PenaltyKind kind = PenaltyKind::none;
  double gamma = 0.0;
  std::optional<double> tau;  // tik_full generator weight

  double tau_or_default() const { return tau.value_or(gamma); }
  bool active() const { return kind != PenaltyKind::none && gamma != 0.0; }
  void validate() const;
};

// Scalar penalty value and its true gradients (the gradients of the
// reported value; the field assembly applies the game-side signs):
//   tik_disc: B = (gamma/2)||phi||^2
//   tik_full: + (tau/2)||theta||^2
//   sgp:      B = (gamma/2) * mean over the pooled real/generated supports
//             of ||grad_x D(xi)||^2, each support weighted 1/2
struct PenaltyEval {
  double value = 0.0;
  Vector grad_theta;
  Vector grad_phi;
};

PenaltyEval penalty_value_and_grads(const PenaltyConfig& pc,
                                    const SaddleOperator& base,
                                    const ParameterPoint& w);

// Gauss-Newton Gramian J_G(w) = mean_x[H' H] + mean_z[H' H], the PSD
// surrogate for the sgp curvature on the discriminator block.
Matrix gramian(const Discriminator& D, const Generator& G,
               const ParameterPoint& w, const SampleSet& samples);
Matrix gramian(const SaddleOperator& model_backed, const ParameterPoint& w);

// Regularized saddle field F_gamma. The discriminator-side penalty enters
// the phi block with +grad and, being subtracted from the maximizer's
// payoff in a zero-sum game, the theta block with -grad. The tik_full
// generator term is a cost on the minimizer and enters theta with +tau*theta.
// With kind none or gamma = 0 the base field is returned bitwise.
class RegularizedOperator {
 public:
  RegularizedOperator(SaddleOperator base, PenaltyConfig penalty);

  Vector eval(const ParameterPoint& w) const;
  OperatorFn fn() const;

  const SaddleOperator& base() const { return base_; }
  const PenaltyConfig& penalty() const { return penalty_; }
  Index d_theta() const { return base_.d_theta(); }
  Index d_phi() const { return base_.d_phi(); }
  Index dim() const { return base_.dim(); }

  std::string describe() const;

 private:
  SaddleOperator base_;
  PenaltyConfig penalty_;
};

}  // namespace visaddle
