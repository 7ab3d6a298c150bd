#include <doctest.h>

#include <Eigen/SVD>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "visaddle/constants.hpp"

using namespace visaddle;

namespace {

SaddleOperator affine_test() {
  Matrix M(2, 2);
  M << 1, 2, -2, 3;
  return SaddleOperator::affine(M, Vector::Zero(2), 1);
}

SaddleOperator identity_gan() {
  return SaddleOperator::gan(Discriminator(FeatureMap::identity(2)), Generator(2, 2),
                             SampleSet::gaussian(2, 2, 24, 24, 3), Link::linear);
}

}  // namespace

TEST_CASE("L0 estimates") {
  const Region box2 = Region::centered_box(2);
  Provenance prov;

  CHECK(estimate_L0(SaddleOperator::bilinear(1.0), box2, 10, 1, &prov) == 1.0);
  CHECK(prov == Provenance::certified);
  CHECK(estimate_L0(SaddleOperator::bilinear(2.5), box2, 10, 1) == 2.5);

  // sigma_max of [[1,2],[-2,3]] is 1 + 2 sqrt(2): lambda_max(M'M) = 9 + 4 sqrt(2)
  CHECK(std::abs(estimate_L0(affine_test(), box2, 10, 1, &prov) -
                 (1.0 + 2.0 * std::sqrt(2.0))) <= 1e-9);
  CHECK(prov == Provenance::certified);

  const SaddleOperator zero =
      SaddleOperator::affine(Matrix::Zero(2, 2), Vector::Zero(2), 1);
  CHECK(estimate_L0(zero, box2, 10, 1) == 0.0);

  const SaddleOperator gan = identity_gan();
  const Region box6 = Region::centered_box(gan.dim());
  const double l0 = estimate_L0(gan, box6, 50, 7, &prov);
  CHECK(prov == Provenance::sampled);
  CHECK(l0 > 0.0);
  CHECK(std::isfinite(l0));
}

TEST_CASE("L composition") {
  CHECK(compute_L(1.0, 2.0, 1.0, 0.0) == doctest::Approx(3.0));
  CHECK(compute_L(1.7, 0.0, 1.0, 0.0) == doctest::Approx(1.7));
  // sgp with C_H = 1 and an affine generator: kappa = 2, no theta rate
  CHECK(compute_L(1.0, 1.5, 2.0, 0.0) == doctest::Approx(1.0 + 2.0 * 1.5));
  CHECK_THROWS_AS(compute_L(-1.0, 0.0, 0.0, 0.0), ConfigError);
}

TEST_CASE("mu composition") {
  CHECK(compute_mu(0.0, 0.0, 2.0, PenaltyKind::tik_disc) == 0.0);
  CHECK(compute_mu(0.0, 0.0, 2.0, PenaltyKind::tik_full, 1.0) == 1.0);
  CHECK(compute_mu(0.5, 0.5, 0.0, PenaltyKind::none) == 0.5);
  CHECK(compute_mu(3.0, 0.0, 2.0, PenaltyKind::tik_disc) == 2.0);
  // sgp uses the exact half-weighted curvature gamma * lambda0 / 2
  CHECK(compute_mu(5.0, 0.0, 2.0, PenaltyKind::sgp, 0.0, 2.0) == doctest::Approx(2.0));
  // identifiability failure drops the gamma term
  CHECK(compute_mu(5.0, 0.25, 2.0, PenaltyKind::sgp, 0.0, 0.0) == 0.25);
  CHECK_THROWS_AS(compute_mu(-1.0, 0.0, 1.0, PenaltyKind::none), ConfigError);
  CHECK_THROWS_AS(compute_mu(0.0, 0.0, 1.0, PenaltyKind::sgp), ConfigError);
}

TEST_CASE("mu is nondecreasing in gamma for fixed moduli") {
  for (PenaltyKind kind : {PenaltyKind::tik_disc, PenaltyKind::tik_full,
                           PenaltyKind::sgp}) {
    double prev = -1.0;
    for (double gamma : {0.0, 0.25, 0.5, 1.0, 2.0, 4.0}) {
      const double mu = compute_mu(1.0, 0.0, gamma, kind, 0.3, 2.0);
      CHECK(mu >= prev);
      prev = mu;
    }
  }
}

TEST_CASE("stepsize rules") {
  StepsizeRule eg{Method::eg, 1.0, EftpRule::quarter};
  CHECK(admissible_stepsize(eg, 2.0, 0.0) == doctest::Approx(0.5));
  eg.rho = 0.9;
  CHECK(admissible_stepsize(eg, 2.0, 0.0) == doctest::Approx(0.45));

  StepsizeRule eftp{Method::eftp, 1.0, EftpRule::quarter};
  CHECK(admissible_stepsize(eftp, 3.0, 0.0) == doctest::Approx(1.0 / 12.0));
  eftp.eftp_rule = EftpRule::half;
  CHECK(admissible_stepsize(eftp, 3.0, 0.0) == doctest::Approx(1.0 / 6.0));

  StepsizeRule fb{Method::fb, 1.0, EftpRule::quarter};
  CHECK(admissible_stepsize(fb, 3.0, 1.0) == doctest::Approx(2.0 / 9.0));
  CHECK_THROWS_WITH_AS(admissible_stepsize(fb, 3.0, 0.0),
                       doctest::Contains("strong monotonicity"), ConfigError);
  CHECK_THROWS_AS(admissible_stepsize(fb, 0.0, 1.0), ConfigError);

  // matrix form: ||P||^2 < 2 mu lambda_min(P) / L^2
  CHECK(admissible_norm_bound(fb, 3.0, 1.0, 0.5) ==
        doctest::Approx(std::sqrt(2.0 * 1.0 * 0.5) / 3.0));
  CHECK(admissible_norm_bound(eg, 2.0, 0.0, 0.5) == doctest::Approx(0.45));
}

TEST_CASE("constants report for the regularized toy") {
  const RegularizedOperator R(SaddleOperator::bilinear(1.0),
                              {PenaltyKind::tik_disc, 2.0, {}});
  const ConstantsReport rep = compute_constants(R, {0.0, 0.0});
  CHECK(rep.L0.value == 1.0);
  CHECK(rep.L0.prov == Provenance::certified);
  CHECK(rep.kappa.value == 1.0);
  CHECK(rep.kappa_theta_tilde.value == 0.0);
  CHECK(rep.L == doctest::Approx(3.0));
  CHECK(rep.L_prov == Provenance::certified);
  CHECK(rep.mu == 0.0);
  CHECK(!rep.step_bound_fb.has_value());
  CHECK(rep.step_bound_eg == doctest::Approx(1.0 / 3.0));
  CHECK(rep.step_bound_eftp_quarter == doctest::Approx(1.0 / 12.0));
  CHECK(rep.step_bound_eftp_half == doctest::Approx(1.0 / 6.0));
  CHECK(rep.to_text().find("L = 3 (certified)") != std::string::npos);
  CHECK(rep.to_text().find("mu = 0") != std::string::npos);
}

TEST_CASE("constants report for sgp on the linear-discriminator gan") {
  const RegularizedOperator R(identity_gan(), {PenaltyKind::sgp, 2.0, {}});
  const ConstantsReport rep = compute_constants(R, {0.0, 0.0});
  REQUIRE(rep.C_H.has_value());
  CHECK(rep.C_H->value == doctest::Approx(1.0));
  CHECK(rep.kappa.value == doctest::Approx(2.0));
  REQUIRE(rep.lambda0.has_value());
  CHECK(rep.lambda0->value == doctest::Approx(2.0));
  REQUIRE(rep.gn_identifiable.has_value());
  CHECK(*rep.gn_identifiable);
  CHECK(rep.kappa_theta_tilde.value == 0.0);
  // mu = min(mu_theta, mu_phi + gamma * lambda0 / 2) with zero moduli
  CHECK(rep.mu == 0.0);
  const ConstantsReport rep2 = compute_constants(R, {99.0, 0.0});
  CHECK(rep2.mu == doctest::Approx(2.0));  // 0 + 2 * 2 / 2
}

TEST_CASE("certified L bounds the sampled Lipschitz ratio") {
  const RegularizedOperator R(SaddleOperator::bilinear(1.0),
                              {PenaltyKind::tik_disc, 2.0, {}});
  const ConstantsReport rep = compute_constants(R, {0.0, 0.0});
  const double ratio = max_lipschitz_ratio(R, rep.region, 1000, 17);
  CHECK(ratio <= rep.L + 1e-9);
  // the exact modulus of [[0,1],[-1,2]] is 1 + sqrt(2), below the bound 3
  CHECK(ratio <= 1.0 + std::sqrt(2.0) + 1e-9);
  CHECK(ratio > 1.0);
}

TEST_CASE("kappa bounds the sampled Gramian norm") {
  const SaddleOperator gan =
      SaddleOperator::gan(Discriminator(FeatureMap::tanh_features(2, 3, 13)),
                          Generator(2, 2), SampleSet::gaussian(2, 2, 16, 16, 5),
                          Link::softplus_log);
  const RegularizedOperator R(gan, {PenaltyKind::sgp, 1.0, {}});
  const ConstantsReport rep = compute_constants(R, {0.0, 0.0});
  std::mt19937_64 rng(23);
  for (int i = 0; i < 50; ++i) {
    const ParameterPoint w = rep.region.sample(rng, gan.d_theta());
    const Matrix JG = gramian(gan, w);
    CHECK(JG.jacobiSvd().singularValues()(0) <= rep.kappa.value + 1e-9);
  }
}

TEST_CASE("monotonicity verification on analytic instances") {
  const SaddleOperator bil = SaddleOperator::bilinear(1.0);

  // gamma = 2: symmetric part diag(0, 2) everywhere, min eigenvalue 0 >= mu = 0
  const RegularizedOperator tik(bil, {PenaltyKind::tik_disc, 2.0, {}});
  const ConstantsReport rep = compute_constants(tik, {0.0, 0.0});
  const MonotonicityReport m = verify_monotonicity_bound(tik, rep, 100, 9);
  CHECK(m.pass);
  CHECK(std::abs(m.min_eig_observed) <= 1e-6);

  // tik_full tau = 1: symmetric part diag(1, 2), min eigenvalue 1
  const RegularizedOperator full(bil, {PenaltyKind::tik_full, 2.0, 1.0});
  const ConstantsReport repf = compute_constants(full, {0.0, 0.0});
  CHECK(repf.mu == doctest::Approx(1.0));
  const MonotonicityReport mf = verify_monotonicity_bound(full, repf, 100, 9);
  CHECK(mf.pass);
  CHECK(mf.min_eig_observed == doctest::Approx(1.0).epsilon(1e-6));

  // gamma = 0: skew field, symmetric part vanishes
  const RegularizedOperator off(bil, {PenaltyKind::none, 0.0, {}});
  const ConstantsReport rep0 = compute_constants(off, {0.0, 0.0});
  const MonotonicityReport m0 = verify_monotonicity_bound(off, rep0, 100, 9);
  CHECK(m0.pass);
  CHECK(std::abs(m0.min_eig_observed) <= 1e-6);
}

TEST_CASE("declared curvature is cross-checked by sampling") {
  // declaring mu_theta = 1, mu_phi = 3 for [[1,2],[-2,3]] passes; inflating
  // the declaration fails the check
  const RegularizedOperator R(affine_test(), {PenaltyKind::none, 0.0, {}});
  const ConstantsReport ok = compute_constants(R, {1.0, 3.0});
  CHECK(ok.mu == doctest::Approx(1.0));
  CHECK(verify_monotonicity_bound(R, ok, 50, 4).pass);

  const ConstantsReport inflated = compute_constants(R, {2.5, 3.0});
  CHECK_FALSE(verify_monotonicity_bound(R, inflated, 50, 4).pass);
}

TEST_CASE("sampled lambda_min respects the mu bound across kinds") {
  std::mt19937_64 rng(77);
  // tik_disc and tik_full on the affine instance with honest declarations
  for (double gamma : {0.0, 0.5, 2.0}) {
    const RegularizedOperator R(affine_test(), {PenaltyKind::tik_disc, gamma, {}});
    const ConstantsReport rep = compute_constants(R, {1.0, 3.0});
    const MonotonicityReport m = verify_monotonicity_bound(R, rep, 60, 8);
    CHECK(m.pass);
  }
}

TEST_CASE("region sampling stays inside the box") {
  const Region r = Region::centered_box(4, 2.5);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) {
    const ParameterPoint w = r.sample(rng, 2);
    CHECK(w.joint().cwiseAbs().maxCoeff() <= 2.5);
  }
  CHECK(r.describe() == "box[-2.5,2.5]^4");
}
