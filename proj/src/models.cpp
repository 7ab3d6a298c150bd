#include "visaddle/models.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "visaddle/parallel.hpp"

namespace visaddle {

FeatureMap FeatureMap::identity(Index d_x) {
  require(d_x > 0, "feature map: d_x must be positive");
  FeatureMap f;
  f.kind_ = Kind::identity;
  f.d_x_ = f.d_phi_ = d_x;
  return f;
}

FeatureMap FeatureMap::tanh_features(Index d_x, Index d_phi, std::uint64_t seed) {
  require(d_x > 0 && d_phi > 0, "feature map: dimensions must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix W(d_phi, d_x);
  Vector b(d_phi);
  for (Index j = 0; j < d_phi; ++j) {
    for (Index i = 0; i < d_x; ++i) W(j, i) = normal(rng) / std::sqrt(double(d_x));
    b(j) = normal(rng);
  }
  return tanh_features(std::move(W), std::move(b));
}

FeatureMap FeatureMap::tanh_features(Matrix weights, Vector biases) {
  require(weights.rows() == biases.size(), "feature map: weights/biases mismatch");
  require(weights.rows() > 0 && weights.cols() > 0, "feature map: empty weights");
  FeatureMap f;
  f.kind_ = Kind::tanh_random;
  f.d_phi_ = weights.rows();
  f.d_x_ = weights.cols();
  f.weights_ = std::move(weights);
  f.biases_ = std::move(biases);
  return f;
}

Vector FeatureMap::eval(const Vector& x) const {
  require(x.size() == d_x_, "feature map eval: dimension mismatch");
  if (kind_ == Kind::identity) return x;
  return ((weights_ * x + biases_).array().tanh()).matrix();
}

Matrix FeatureMap::jacobian(const Vector& x) const {
  require(x.size() == d_x_, "feature map jacobian: dimension mismatch");
  if (kind_ == Kind::identity) return Matrix::Identity(d_x_, d_x_);
  // d/dx tanh(u_j) = (1 - tanh^2(u_j)) w_j'
  const Vector t = ((weights_ * x + biases_).array().tanh()).matrix();
  return (1.0 - t.array().square()).matrix().asDiagonal() * weights_;
}

Matrix FeatureMap::weighted_input_hessian(const Vector& phi, const Vector& x) const {
  require(x.size() == d_x_, "feature map hessian: x dimension mismatch");
  require(phi.size() == d_phi_, "feature map hessian: phi dimension mismatch");
  if (kind_ == Kind::identity) return Matrix::Zero(d_x_, d_x_);
  // hess tanh(u_j) = -2 t_j (1 - t_j^2) w_j w_j'
  const Vector t = ((weights_ * x + biases_).array().tanh()).matrix();
  const Vector coeff =
      (phi.array() * (-2.0) * t.array() * (1.0 - t.array().square())).matrix();
  return weights_.transpose() * coeff.asDiagonal() * weights_;
}

double Discriminator::value(const Vector& phi, const Vector& x) const {
  require(phi.size() == d_phi(), "discriminator: phi dimension mismatch");
  return phi.dot(psi_.eval(x));
}

Vector Discriminator::input_grad(const Vector& phi, const Vector& x) const {
  require(phi.size() == d_phi(), "discriminator: phi dimension mismatch");
  return psi_.jacobian(x).transpose() * phi;
}

Matrix Discriminator::mixed_hessian(const Vector& x) const {
  return psi_.jacobian(x).transpose();
}

DiscDerivs Discriminator::eval_and_derivs(const Vector& phi, const Vector& x) const {
  require(phi.size() == d_phi(), "discriminator: phi dimension mismatch");
  DiscDerivs out;
  out.grad_phi = psi_.eval(x);
  out.value = phi.dot(out.grad_phi);
  const Matrix jac = psi_.jacobian(x);
  out.input_grad = jac.transpose() * phi;
  out.mixed_hessian = jac.transpose();
  out.input_hessian = psi_.weighted_input_hessian(phi, x);
  return out;
}

Generator::Generator(Index d_x, Index d_z) : d_x_(d_x), d_z_(d_z) {
  require(d_x > 0 && d_z > 0, "generator: dimensions must be positive");
}

Vector Generator::eval(const Vector& theta, const Vector& z) const {
  require(theta.size() == d_theta(), "generator eval: theta dimension mismatch");
  require(z.size() == d_z_, "generator eval: z dimension mismatch");
  auto [W, b] = unpack(theta);
  return W * z + b;
}

Matrix Generator::jacobian(const Vector& z) const {
  require(z.size() == d_z_, "generator jacobian: z dimension mismatch");
  Matrix J = Matrix::Zero(d_x_, d_theta());
  // columns of vec(W) in column-major order: W(i, j) sits at j*d_x + i
  for (Index j = 0; j < d_z_; ++j)
    for (Index i = 0; i < d_x_; ++i) J(i, j * d_x_ + i) = z(j);
  for (Index i = 0; i < d_x_; ++i) J(i, d_x_ * d_z_ + i) = 1.0;
  return J;
}

Vector Generator::pack(const Matrix& W, const Vector& b) const {
  require(W.rows() == d_x_ && W.cols() == d_z_, "generator pack: W shape mismatch");
  require(b.size() == d_x_, "generator pack: b size mismatch");
  Vector theta(d_theta());
  theta.head(d_x_ * d_z_) = Eigen::Map<const Vector>(W.data(), d_x_ * d_z_);
  theta.tail(d_x_) = b;
  return theta;
}

std::pair<Matrix, Vector> Generator::unpack(const Vector& theta) const {
  require(theta.size() == d_theta(), "generator unpack: theta size mismatch");
  Matrix W = Eigen::Map<const Matrix>(theta.data(), d_x_, d_z_);
  Vector b = theta.tail(d_x_);
  return {std::move(W), std::move(b)};
}

void SampleSet::validate() const {
  require(!reals.empty(), "sample set: needs at least one real point");
  require(!latents.empty(), "sample set: needs at least one latent point");
  for (const auto& x : reals)
    require(x.size() == reals.front().size(), "sample set: ragged real points");
  for (const auto& z : latents)
    require(z.size() == latents.front().size(), "sample set: ragged latent points");
}

SampleSet SampleSet::gaussian(Index d_x, Index d_z, Index n_real, Index n_latent,
                              std::uint64_t seed) {
  require(d_x > 0 && d_z > 0, "sample set: dimensions must be positive");
  require(n_real > 0 && n_latent > 0, "sample set: counts must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  SampleSet s;
  s.seed = seed;
  s.reals.reserve(n_real);
  s.latents.reserve(n_latent);
  for (Index i = 0; i < n_real; ++i) {
    Vector x(d_x);
    for (Index k = 0; k < d_x; ++k) x(k) = normal(rng);
    s.reals.push_back(std::move(x));
  }
  for (Index i = 0; i < n_latent; ++i) {
    Vector z(d_z);
    for (Index k = 0; k < d_z; ++k) z(k) = normal(rng);
    s.latents.push_back(std::move(z));
  }
  return s;
}

SampleSet SampleSet::bilinear_toy(double a) {
  require(a > 0, "bilinear toy: requires a > 0");
  SampleSet s;
  s.reals.push_back(Vector::Zero(1));
  s.latents.push_back(Vector::Constant(1, -a));
  return s;
}

namespace {

void points_to_csv(std::ostream& os, const std::vector<Vector>& pts, char prefix,
                   std::uint64_t seed) {
  os << "# seed " << seed << "\n";
  const Index d = pts.empty() ? 0 : pts.front().size();
  for (Index k = 0; k < d; ++k) os << (k ? "," : "") << prefix << "_" << k;
  os << "\n";
  char buf[40];
  for (const auto& p : pts) {
    for (Index k = 0; k < d; ++k) {
      std::snprintf(buf, sizeof(buf), "%.17g", p(k));
      os << (k ? "," : "") << buf;
    }
    os << "\n";
  }
}

}  // namespace

void SampleSet::reals_to_csv(std::ostream& os) const {
  points_to_csv(os, reals, 'x', seed);
}

void SampleSet::latents_to_csv(std::ostream& os) const {
  points_to_csv(os, latents, 'z', seed);
}

std::vector<Vector> SampleSet::points_from_csv(std::istream& is, char prefix) {
  std::vector<Vector> pts;
  std::string line;
  Index d = -1;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (d < 0) {  // header row
      d = 0;
      std::stringstream ss(line);
      std::string col;
      while (std::getline(ss, col, ',')) {
        std::string want = std::string(1, prefix) + "_" + std::to_string(d);
        require(col == want, "sample csv line " + std::to_string(lineno) +
                                 ": expected header column '" + want + "', got '" +
                                 col + "'");
        ++d;
      }
      require(d > 0, "sample csv: empty header");
      continue;
    }
    std::stringstream ss(line);
    std::string cell;
    Vector p(d);
    Index k = 0;
    while (std::getline(ss, cell, ',')) {
      require(k < d, "sample csv line " + std::to_string(lineno) + ": too many columns");
      try {
        p(k) = std::stod(cell);
      } catch (const std::exception&) {
        throw ConfigError("sample csv line " + std::to_string(lineno) +
                          ": cannot parse '" + cell + "' as a real number");
      }
      ++k;
    }
    require(k == d, "sample csv line " + std::to_string(lineno) + ": too few columns");
    pts.push_back(std::move(p));
  }
  return pts;
}

SampleSet SampleSet::from_csv(std::istream& reals_csv, std::istream& latents_csv,
                              std::uint64_t seed) {
  SampleSet s;
  s.seed = seed;
  s.reals = points_from_csv(reals_csv, 'x');
  s.latents = points_from_csv(latents_csv, 'z');
  s.validate();
  return s;
}

double link_value(Link link, double t) {
  switch (link) {
    case Link::linear:
      return t;
    case Link::softplus_log:
      // -log(1 + e^{-t}) without overflow on either tail
      if (t >= 0) return -std::log1p(std::exp(-t));
      return t - std::log1p(std::exp(t));
  }
  throw ConfigError("unknown link");
}

double link_deriv(Link link, double t) {
  switch (link) {
    case Link::linear:
      return 1.0;
    case Link::softplus_log:
      // sigma(-t) = 1 / (1 + e^{t})
      if (t >= 0) {
        const double e = std::exp(-t);
        return e / (1.0 + e);
      }
      return 1.0 / (1.0 + std::exp(t));
  }
  throw ConfigError("unknown link");
}

const char* link_name(Link link) {
  return link == Link::linear ? "linear" : "softplus";
}

namespace {

// Accumulator for the sample means: loss value and both gradient blocks.
struct LossAcc {
  double value = 0.0;
  Vector grad_theta;
  Vector grad_phi;

  LossAcc& operator+=(const LossAcc& o) {
    value += o.value;
    grad_theta += o.grad_theta;
    grad_phi += o.grad_phi;
    return *this;
  }
};

}  // namespace

GanLoss gan_loss_and_grads(const Discriminator& D, const Generator& G,
                           const ParameterPoint& w, const SampleSet& samples,
                           Link link) {
  samples.validate();
  require(samples.d_x() == D.d_x(), "gan loss: real samples vs discriminator d_x");
  require(samples.d_z() == G.d_z(), "gan loss: latent samples vs generator d_z");
  require(G.d_x() == D.d_x(), "gan loss: generator output vs discriminator input");
  require(w.theta.size() == G.d_theta(), "gan loss: theta dimension mismatch");
  require(w.phi.size() == D.d_phi(), "gan loss: phi dimension mismatch");

  const LossAcc zero{0.0, Vector::Zero(G.d_theta()), Vector::Zero(D.d_phi())};

  // Real support: mean_x Psi(D(x)) contributes only to value and grad_phi.
  const LossAcc real_sum = par::chunked_sum(
      samples.n_real(), zero, [&](LossAcc& acc, std::ptrdiff_t i) {
        const Vector psi = D.features().eval(samples.reals[i]);
        const double d = w.phi.dot(psi);
        acc.value += link_value(link, d);
        acc.grad_phi += link_deriv(link, d) * psi;
      });

  // Generated support: mean_z Psi(-D(G(z))).
  const LossAcc gen_sum = par::chunked_sum(
      samples.n_latent(), zero, [&](LossAcc& acc, std::ptrdiff_t i) {
        const Vector& z = samples.latents[i];
        const Vector xg = G.eval(w.theta, z);
        const Vector psi = D.features().eval(xg);
        const double d = w.phi.dot(psi);
        const double dpsi = link_deriv(link, -d);
        acc.value += link_value(link, -d);
        acc.grad_phi -= dpsi * psi;
        const Vector g = D.input_grad(w.phi, xg);
        acc.grad_theta -= dpsi * (G.jacobian(z).transpose() * g);
      });

  const double nr = static_cast<double>(samples.n_real());
  const double nz = static_cast<double>(samples.n_latent());
  GanLoss out;
  out.value = real_sum.value / nr + gen_sum.value / nz;
  out.grad_theta = gen_sum.grad_theta / nz;
  out.grad_phi = real_sum.grad_phi / nr + gen_sum.grad_phi / nz;
  return out;
}

}  // namespace visaddle
