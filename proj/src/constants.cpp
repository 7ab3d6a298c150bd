#include "visaddle/constants.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "visaddle/operators.hpp"
#include "visaddle/parallel.hpp"

namespace visaddle {

const char* method_name(Method m) {
  switch (m) {
    case Method::fb: return "fb";
    case Method::eg: return "eg";
    case Method::eftp: return "eftp";
  }
  return "?";
}

std::optional<Method> method_from_name(const std::string& name) {
  if (name == "fb") return Method::fb;
  if (name == "eg") return Method::eg;
  if (name == "eftp") return Method::eftp;
  return std::nullopt;
}

Region Region::centered_box(Index dim, double half_width) {
  require(dim > 0, "region: dimension must be positive");
  require(half_width > 0, "region: half-width must be positive");
  return {Vector::Constant(dim, -half_width), Vector::Constant(dim, half_width)};
}

ParameterPoint Region::sample(std::mt19937_64& rng, Index d_theta) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector w(dim());
  for (Index i = 0; i < dim(); ++i) w(i) = lo(i) + (hi(i) - lo(i)) * unit(rng);
  return ParameterPoint::from_joint(w, d_theta);
}

std::string Region::describe() const {
  std::ostringstream os;
  os << "box[" << lo.minCoeff() << "," << hi.maxCoeff() << "]^" << dim();
  return os.str();
}

const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::certified: return "certified";
    case Provenance::sampled: return "sampled";
    case Provenance::declared: return "declared";
  }
  return "?";
}

namespace {

double spectral_norm(const Matrix& A) { return A.jacobiSvd().singularValues()(0); }

std::vector<ParameterPoint> draw_points(const Region& region, Index d_theta, int n,
                                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<ParameterPoint> pts;
  pts.reserve(n);
  for (int i = 0; i < n; ++i) pts.push_back(region.sample(rng, d_theta));
  return pts;
}

// Evaluates score(pts[i]) into a slot per draw (parallel, deterministic for
// any thread count), then reduces serially.
template <class Score>
std::vector<double> per_draw(const std::vector<ParameterPoint>& pts, Score&& score) {
  std::vector<double> vals(pts.size());
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(pts.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (par::enabled() && n > 1)
#endif
  for (std::ptrdiff_t i = 0; i < n; ++i) vals[i] = score(pts[i]);
  return vals;
}

}  // namespace

double estimate_L0(const SaddleOperator& F, const Region& region, int n_samples,
                   std::uint64_t seed, Provenance* prov, double fd_step) {
  if (F.kind() == OperatorKind::bilinear) {
    if (prov) *prov = Provenance::certified;
    // constant Jacobian [[0, a], [-a, 0]] has sigma_max = a
    return F.bilinear_a();
  }
  if (F.kind() == OperatorKind::affine) {
    if (prov) *prov = Provenance::certified;
    return spectral_norm(F.affine_matrix());
  }
  require(n_samples >= 2, "estimate_L0: needs n_samples >= 2 for sampling");
  require(region.dim() == F.dim(), "estimate_L0: region dimension mismatch");
  if (prov) *prov = Provenance::sampled;
  const auto pts = draw_points(region, F.d_theta(), n_samples, seed);
  const auto vals = per_draw(
      pts, [&](const ParameterPoint& w) { return jacobian_fd(F, w, fd_step).sigma_max; });
  return *std::max_element(vals.begin(), vals.end());
}

double compute_L(double L0, double gamma, double kappa, double kappa_theta_tilde) {
  require(L0 >= 0 && gamma >= 0 && kappa >= 0 && kappa_theta_tilde >= 0,
          "compute_L: inputs must be nonnegative");
  return L0 + gamma * (kappa + kappa_theta_tilde);
}

double compute_mu(double mu_theta, double mu_phi, double gamma, PenaltyKind kind,
                  double tau, std::optional<double> lambda0) {
  require(mu_theta >= 0 && mu_phi >= 0, "compute_mu: moduli must be nonnegative");
  require(gamma >= 0, "compute_mu: gamma must be nonnegative");
  switch (kind) {
    case PenaltyKind::none:
      return std::min(mu_theta, mu_phi);
    case PenaltyKind::tik_disc:
      return std::min(mu_theta, mu_phi + gamma);
    case PenaltyKind::tik_full:
      require(tau >= 0, "compute_mu: tau must be nonnegative");
      return std::min(mu_theta + tau, mu_phi + gamma);
    case PenaltyKind::sgp: {
      require(lambda0.has_value(), "compute_mu: sgp needs lambda0");
      if (*lambda0 <= 0) return std::min(mu_theta, mu_phi);
      // the exact phi-block curvature of the half-weighted penalty is
      // (gamma/2) J_G, hence the factor 1/2 on lambda0
      return std::min(mu_theta, mu_phi + 0.5 * gamma * *lambda0);
    }
  }
  throw ConfigError("compute_mu: unknown penalty kind");
}

double admissible_stepsize(const StepsizeRule& rule, double L, double mu) {
  require(rule.rho > 0 && rule.rho <= 1, "stepsize: rho must be in (0, 1]");
  require(L > 0, "stepsize: L must be positive");
  switch (rule.method) {
    case Method::fb:
      if (mu <= 0)
        throw ConfigError(
            "FB stepsize rule requires strong monotonicity (mu > 0); supply "
            "eta explicitly or switch to eg/eftp");
      return rule.rho * 2.0 * mu / (L * L);
    case Method::eg:
      return rule.rho / L;
    case Method::eftp:
      return rule.rho / ((rule.eftp_rule == EftpRule::quarter ? 4.0 : 2.0) * L);
  }
  throw ConfigError("stepsize: unknown method");
}

double admissible_norm_bound(const StepsizeRule& rule, double L, double mu,
                             double lambda_min_P) {
  require(rule.rho > 0 && rule.rho <= 1, "stepsize: rho must be in (0, 1]");
  require(L > 0, "stepsize: L must be positive");
  require(lambda_min_P > 0, "stepsize: lambda_min(P) must be positive");
  if (rule.method == Method::fb) {
    if (mu <= 0)
      throw ConfigError(
          "FB stepsize rule requires strong monotonicity (mu > 0); supply "
          "P explicitly or switch to eg/eftp");
    return rule.rho * std::sqrt(2.0 * mu * lambda_min_P) / L;
  }
  return admissible_stepsize(rule, L, mu);
}

namespace {

// Max sampled ||H_phi(xi)|| over the real support and, per drawn theta, the
// generated support.
double sample_C_H(const SaddleOperator& F, const std::vector<ParameterPoint>& pts) {
  const Discriminator& D = F.discriminator();
  const Generator& G = F.generator();
  const SampleSet& s = F.samples();

  double best_real = par::indexed_max(s.n_real(), 0.0, [&](std::ptrdiff_t i) {
    return spectral_norm(D.mixed_hessian(s.reals[i]));
  });

  const auto vals = per_draw(pts, [&](const ParameterPoint& w) {
    double m = 0.0;
    for (const Vector& z : s.latents)
      m = std::max(m, spectral_norm(D.mixed_hessian(G.eval(w.theta, z))));
    return m;
  });
  return std::max(best_real, *std::max_element(vals.begin(), vals.end()));
}

double sample_lambda0(const SaddleOperator& F, const std::vector<ParameterPoint>& pts) {
  const auto vals = per_draw(pts, [&](const ParameterPoint& w) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(gramian(F, w), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  });
  return *std::min_element(vals.begin(), vals.end());
}

// Per-gamma Lipschitz rate of grad_theta B, sampled as the max spectral norm
// of its finite-difference Jacobian over the region.
double sample_kappa_theta(const RegularizedOperator& R,
                          const std::vector<ParameterPoint>& pts, double fd_step) {
  const PenaltyConfig& pc = R.penalty();
  const OperatorFn grad_theta_b = [&](const ParameterPoint& w) {
    return Vector(penalty_value_and_grads(pc, R.base(), w).grad_theta);
  };
  const auto vals = per_draw(pts, [&](const ParameterPoint& w) {
    const Index dt = R.d_theta();
    const Index d = R.dim();
    const Vector base = w.joint();
    Matrix J(dt, d);
    for (Index j = 0; j < d; ++j) {
      Vector up = base, dn = base;
      up(j) += fd_step;
      dn(j) -= fd_step;
      J.col(j) = (grad_theta_b(ParameterPoint::from_joint(up, dt)) -
                  grad_theta_b(ParameterPoint::from_joint(dn, dt))) /
                 (2.0 * fd_step);
    }
    return spectral_norm(J);
  });
  return *std::max_element(vals.begin(), vals.end()) / pc.gamma;
}

}  // namespace

ConstantsReport compute_constants(const RegularizedOperator& R,
                                  const CurvatureDeclaration& curv,
                                  const ConstantsOptions& opt) {
  require(curv.mu_theta >= 0 && curv.mu_phi >= 0,
          "constants: declared moduli must be nonnegative");
  const SaddleOperator& F = R.base();
  const PenaltyConfig& pc = R.penalty();

  ConstantsReport rep;
  rep.problem = R.describe();
  rep.region = opt.region.value_or(Region::centered_box(F.dim()));
  require(rep.region.dim() == F.dim(), "constants: region dimension mismatch");
  rep.n_samples = opt.n_samples;
  rep.seed = opt.seed;
  rep.gamma = pc.gamma;
  rep.penalty_kind = pc.kind;
  rep.tau = pc.kind == PenaltyKind::tik_full ? pc.tau_or_default() : 0.0;
  rep.mu_theta = {curv.mu_theta, Provenance::declared};
  rep.mu_phi = {curv.mu_phi, Provenance::declared};

  Provenance l0_prov = Provenance::certified;
  rep.L0 = {estimate_L0(F, rep.region, opt.n_samples, opt.seed, &l0_prov, opt.fd_step),
            l0_prov};

  const bool active = pc.active();
  std::vector<ParameterPoint> pts;
  if (F.is_model_backed() || (active && pc.kind == PenaltyKind::sgp))
    pts = draw_points(rep.region, F.d_theta(), opt.n_samples, opt.seed + 1);

  std::optional<double> lambda0_for_mu;
  switch (active ? pc.kind : PenaltyKind::none) {
    case PenaltyKind::none:
      rep.kappa = {0.0, Provenance::certified};
      rep.kappa_theta_tilde = {0.0, Provenance::certified};
      break;
    case PenaltyKind::tik_disc:
      rep.kappa = {1.0, Provenance::certified};
      rep.kappa_theta_tilde = {0.0, Provenance::certified};
      break;
    case PenaltyKind::tik_full:
      rep.kappa = {1.0, Provenance::certified};
      rep.kappa_theta_tilde = {pc.tau_or_default() / pc.gamma, Provenance::certified};
      break;
    case PenaltyKind::sgp: {
      const double ch = sample_C_H(F, pts);
      const bool exact_features =
          F.discriminator().features().kind() == FeatureMap::Kind::identity;
      rep.C_H = {ch, exact_features ? Provenance::certified : Provenance::sampled};
      rep.kappa = {2.0 * ch * ch, rep.C_H->prov};
      if (exact_features) {
        // identity features have H_xx = 0, so grad_theta B vanishes
        rep.kappa_theta_tilde = {0.0, Provenance::certified};
      } else {
        rep.kappa_theta_tilde = {sample_kappa_theta(R, pts, opt.fd_step),
                                 Provenance::sampled};
      }
      const double l0 = sample_lambda0(F, pts);
      rep.lambda0 = {std::max(l0, 0.0),
                     exact_features ? Provenance::certified : Provenance::sampled};
      rep.gn_identifiable = l0 > 0;
      lambda0_for_mu = l0;
      break;
    }
  }

  rep.kappa_tot = rep.kappa.value + rep.kappa_theta_tilde.value;
  rep.L = compute_L(rep.L0.value, pc.gamma, rep.kappa.value, rep.kappa_theta_tilde.value);
  rep.L_prov = (rep.L0.prov == Provenance::certified &&
                rep.kappa.prov == Provenance::certified &&
                rep.kappa_theta_tilde.prov == Provenance::certified)
                   ? Provenance::certified
                   : Provenance::sampled;
  rep.mu = compute_mu(curv.mu_theta, curv.mu_phi, active ? pc.gamma : 0.0,
                      active ? pc.kind : PenaltyKind::none, rep.tau, lambda0_for_mu);

  if (rep.L > 0) {
    if (rep.mu > 0) rep.step_bound_fb = 2.0 * rep.mu / (rep.L * rep.L);
    rep.step_bound_eg = 1.0 / rep.L;
    rep.step_bound_eftp_quarter = 1.0 / (4.0 * rep.L);
    rep.step_bound_eftp_half = 1.0 / (2.0 * rep.L);
  }
  return rep;
}

namespace {

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string fmt_rv(const ReportedValue& rv) {
  return fmt_g(rv.value) + " (" + provenance_name(rv.prov) + ")";
}

}  // namespace

std::string ConstantsReport::to_text() const {
  std::ostringstream os;
  os << "problem = " << problem << "\n"
     << "region = " << region.describe() << "\n"
     << "n_samples = " << n_samples << "\n"
     << "seed = " << seed << "\n"
     << "gamma = " << fmt_g(gamma) << "\n"
     << "penalty = " << penalty_name(penalty_kind) << "\n";
  if (penalty_kind == PenaltyKind::tik_full) os << "tau = " << fmt_g(tau) << "\n";
  os << "L0 = " << fmt_rv(L0) << "\n"
     << "C_H = " << (C_H ? fmt_rv(*C_H) : "n/a") << "\n"
     << "kappa = " << fmt_rv(kappa) << "\n"
     << "kappa_theta_tilde = " << fmt_rv(kappa_theta_tilde) << "\n"
     << "kappa_tot = " << fmt_g(kappa_tot) << "\n"
     << "lambda0 = " << (lambda0 ? fmt_rv(*lambda0) : "n/a") << "\n"
     << "gn_identifiable = "
     << (gn_identifiable ? (*gn_identifiable ? "yes" : "violated") : "n/a") << "\n"
     << "mu_theta = " << fmt_rv(mu_theta) << "\n"
     << "mu_phi = " << fmt_rv(mu_phi) << "\n"
     << "L = " << fmt_g(L) << " (" << provenance_name(L_prov) << ")\n"
     << "mu = " << fmt_g(mu) << "\n"
     << "step_bound_fb = "
     << (step_bound_fb ? fmt_g(*step_bound_fb) : "n/a (requires mu > 0)") << "\n"
     << "step_bound_eg = " << fmt_g(step_bound_eg) << "\n"
     << "step_bound_eftp_quarter = " << fmt_g(step_bound_eftp_quarter) << "\n"
     << "step_bound_eftp_half = " << fmt_g(step_bound_eftp_half) << "\n";
  return os.str();
}

std::vector<std::string> ConstantsReport::to_comment_lines() const {
  std::vector<std::string> lines;
  std::istringstream is(to_text());
  std::string line;
  while (std::getline(is, line)) lines.push_back("# " + line);
  return lines;
}

std::string MonotonicityReport::to_text() const {
  std::ostringstream os;
  os << "mu_bound = " << fmt_g(mu_bound) << "\n"
     << "min_eig_observed = " << fmt_g(min_eig_observed) << "\n"
     << "n_samples = " << n_samples << "\n"
     << "tol = " << fmt_g(tol) << "\n"
     << "pass = " << (pass ? "yes" : "no") << "\n";
  return os.str();
}

MonotonicityReport verify_monotonicity_bound(const RegularizedOperator& R,
                                             const ConstantsReport& report,
                                             int n_samples, std::uint64_t seed,
                                             double tol) {
  require(n_samples >= 1, "verify: needs at least one sample");
  const auto pts = draw_points(report.region, R.d_theta(), n_samples, seed);
  const OperatorFn f = R.fn();
  const auto vals = per_draw(pts, [&](const ParameterPoint& w) {
    return jacobian_fd(f, w, 1e-6).sym_eig_min;
  });
  const auto it = std::min_element(vals.begin(), vals.end());

  MonotonicityReport m;
  m.mu_bound = report.mu;
  m.min_eig_observed = *it;
  m.argmin = pts[static_cast<std::size_t>(it - vals.begin())];
  m.n_samples = n_samples;
  m.tol = tol;
  m.pass = m.min_eig_observed >= m.mu_bound - tol;
  return m;
}

double max_lipschitz_ratio(const RegularizedOperator& R, const Region& region,
                           int n_pairs, std::uint64_t seed) {
  require(n_pairs >= 1, "lipschitz ratio: needs at least one pair");
  const auto us = draw_points(region, R.d_theta(), n_pairs, seed);
  const auto vs = draw_points(region, R.d_theta(), n_pairs, seed + 0x9e3779b97f4a7c15ULL);
  std::vector<double> vals(us.size(), 0.0);
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(us.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (par::enabled() && n > 1)
#endif
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double dist = distance(us[i], vs[i]);
    if (dist < 1e-12) continue;
    vals[i] = (R.eval(us[i]) - R.eval(vs[i])).norm() / dist;
  }
  return *std::max_element(vals.begin(), vals.end());
}

}  // namespace visaddle
