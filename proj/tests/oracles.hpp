#pragma once

// Independent finite-difference and regression oracles shared by the test
// suites. These stay deliberately dumb: central differences with the
// coordinate-scaled step h_i = 1e-5 * max(1, |x_i|) and plain least squares.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "visaddle/common.hpp"

namespace oracles {

using visaddle::Index;
using visaddle::Matrix;
using visaddle::Vector;

inline double fd_step(double coord) { return 1e-5 * std::max(1.0, std::abs(coord)); }

inline Vector fd_gradient(const std::function<double(const Vector&)>& f,
                          const Vector& x) {
  Vector g(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    const double h = fd_step(x(i));
    Vector up = x, dn = x;
    up(i) += h;
    dn(i) -= h;
    g(i) = (f(up) - f(dn)) / (2.0 * h);
  }
  return g;
}

inline Matrix fd_jacobian(const std::function<Vector(const Vector&)>& f,
                          const Vector& x) {
  const Vector f0 = f(x);
  Matrix J(f0.size(), x.size());
  for (Index i = 0; i < x.size(); ++i) {
    const double h = fd_step(x(i));
    Vector up = x, dn = x;
    up(i) += h;
    dn(i) -= h;
    J.col(i) = (f(up) - f(dn)) / (2.0 * h);
  }
  return J;
}

inline double rel_err(const Vector& got, const Vector& want) {
  return (got - want).norm() / std::max(1.0, want.norm());
}

inline double rel_err(const Matrix& got, const Matrix& want) {
  return (got - want).norm() / std::max(1.0, want.norm());
}

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

inline Vector random_vector(std::mt19937_64& rng, Index n, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = normal(rng);
  return v;
}

// Least-squares fit y = a + b x; returns (a, b, R^2).
struct LineFit {
  double intercept = 0, slope = 0, r2 = 0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  LineFit f;
  f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  f.intercept = (sy - f.slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double ybar = sy / n;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double pred = f.intercept + f.slope * x[i];
    ss_res += (y[i] - pred) * (y[i] - pred);
    ss_tot += (y[i] - ybar) * (y[i] - ybar);
  }
  f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return f;
}

}  // namespace oracles
