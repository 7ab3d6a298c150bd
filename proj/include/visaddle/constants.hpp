#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "visaddle/common.hpp"
#include "visaddle/geometry.hpp"
#include "visaddle/regularization.hpp"

namespace visaddle {

enum class Method { fb, eg, eftp };
const char* method_name(Method m);
std::optional<Method> method_from_name(const std::string& name);

// Axis-aligned sampling box for the estimated constants. Defaults to
// half-width 5 around the origin, which contains the toy trajectories.
struct Region {
  Vector lo, hi;

  static Region centered_box(Index dim, double half_width = 5.0);
  Index dim() const { return lo.size(); }
  ParameterPoint sample(std::mt19937_64& rng, Index d_theta) const;
  std::string describe() const;
};

enum class Provenance { certified, sampled, declared };
const char* provenance_name(Provenance p);

struct ReportedValue {
  double value = 0.0;
  Provenance prov = Provenance::certified;
};

// User-declared curvature moduli of the saddle objective (they are a
// hypothesis about the instance, not computable in general; the verify
// operation cross-checks them by sampling).
struct CurvatureDeclaration {
  double mu_theta = 0.0;
  double mu_phi = 0.0;
};

// Certified bounds and sampled estimates for the regularized operator:
//   L  = L0 + gamma * kappa_tot        (upper end kappa_tot = kappa + ktilde)
//   mu = min(mu_theta [+ tau], mu_phi + gamma * lambda_eff)
// lambda_eff is 1 for the Tikhonov kinds and lambda0/2 for sgp, matching the
// exact discriminator-block curvature of the half-weighted penalty.
struct ConstantsReport {
  std::string problem;
  Region region;
  int n_samples = 0;
  std::uint64_t seed = 0;
  double gamma = 0.0;
  PenaltyKind penalty_kind = PenaltyKind::none;
  double tau = 0.0;

  ReportedValue L0;
  std::optional<ReportedValue> C_H;      // model-backed operators only
  ReportedValue kappa;                   // 1 tik kinds, 2*C_H^2 sgp, 0 none
  ReportedValue kappa_theta_tilde;       // per-gamma rate of grad_theta B
  double kappa_tot = 0.0;
  std::optional<ReportedValue> lambda0;  // min sampled eig of J_G (sgp)
  // true when lambda0 > 0 on the sampled region; nullopt when not applicable
  std::optional<bool> gn_identifiable;
  ReportedValue mu_theta, mu_phi;

  double L = 0.0;
  Provenance L_prov = Provenance::certified;
  double mu = 0.0;

  std::optional<double> step_bound_fb;   // 2 mu / L^2, absent when mu = 0
  double step_bound_eg = 0.0;            // 1 / L
  double step_bound_eftp_quarter = 0.0;  // 1 / (4L)
  double step_bound_eftp_half = 0.0;     // 1 / (2L)

  std::string to_text() const;
  std::vector<std::string> to_comment_lines() const;
};

struct ConstantsOptions {
  std::optional<Region> region;  // default: centered box, half-width 5
  int n_samples = 200;
  std::uint64_t seed = 0;
  double fd_step = 1e-6;
};

ConstantsReport compute_constants(const RegularizedOperator& R,
                                  const CurvatureDeclaration& curv,
                                  const ConstantsOptions& opt = {});

// Base-operator Lipschitz estimate: exact spectral norm of the constant
// Jacobian for affine/bilinear kinds (certified); max sampled sigma_max of
// the finite-difference Jacobian otherwise (a lower bound, flagged sampled).
double estimate_L0(const SaddleOperator& F, const Region& region, int n_samples,
                   std::uint64_t seed, Provenance* prov = nullptr,
                   double fd_step = 1e-6);

// L = L0 + gamma * (kappa + kappa_theta_tilde), the conservative end of the
// kappa_tot interval.
double compute_L(double L0, double gamma, double kappa, double kappa_theta_tilde);

// mu = min(mu_theta [+ tau for tik_full], mu_phi + gamma * lambda_eff).
// lambda0 is required for sgp; a nonpositive lambda0 drops the gamma term
// (identifiability not established).
double compute_mu(double mu_theta, double mu_phi, double gamma, PenaltyKind kind,
                  double tau = 0.0, std::optional<double> lambda0 = {});

enum class EftpRule { quarter, half };

struct StepsizeRule {
  Method method = Method::eftp;
  double rho = 0.9;  // safety factor in (0, 1]
  EftpRule eftp_rule = EftpRule::quarter;
};

// Scalar stepsize eta = rho * bound with the scalar-case bounds
// (fb: 2mu/L^2, eg: 1/L, eftp: 1/(4L) or 1/(2L)). fb with mu <= 0 refuses.
double admissible_stepsize(const StepsizeRule& rule, double L, double mu);
// Admissible bound on ||P|| for a matrix preconditioner with the given
// lambda_min(P); same rules, fb becomes sqrt(2 mu lambda_min(P)) / L.
double admissible_norm_bound(const StepsizeRule& rule, double L, double mu,
                             double lambda_min_P);

struct MonotonicityReport {
  double mu_bound = 0.0;
  double min_eig_observed = 0.0;
  ParameterPoint argmin;
  int n_samples = 0;
  double tol = 0.0;
  bool pass = false;
  std::string to_text() const;
};

// Samples the region, symmetrizes finite-difference Jacobians of F_gamma and
// checks lambda_min >= mu - tol. Failures are reported, not thrown.
MonotonicityReport verify_monotonicity_bound(const RegularizedOperator& R,
                                             const ConstantsReport& report,
                                             int n_samples, std::uint64_t seed,
                                             double tol = 1e-8);

// Max of ||F(u)-F(v)|| / ||u-v|| over random pairs in the region; the
// certified L must upper-bound it.
double max_lipschitz_ratio(const RegularizedOperator& R, const Region& region,
                           int n_pairs, std::uint64_t seed);

}  // namespace visaddle
