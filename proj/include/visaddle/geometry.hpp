#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include <Eigen/Cholesky>

#include "visaddle/common.hpp"

namespace visaddle {

// Joint iterate w = (theta, phi) of the two-player game, kept blockwise.
// The joint dimension d = d_theta + d_phi is fixed per problem instance.
struct ParameterPoint {
  Vector theta;
  Vector phi;

  ParameterPoint() = default;
  ParameterPoint(Vector t, Vector p) : theta(std::move(t)), phi(std::move(p)) {}

  Index d_theta() const { return theta.size(); }
  Index d_phi() const { return phi.size(); }
  Index dim() const { return theta.size() + phi.size(); }

  Vector joint() const;
  static ParameterPoint from_joint(const Vector& w, Index d_theta);

  bool all_finite() const { return theta.allFinite() && phi.allFinite(); }
};

double distance(const ParameterPoint& a, const ParameterPoint& b);

// Closed convex set with a closed-form Euclidean projection. The menu is
// whole-space / axis-aligned box / Euclidean ball; all three project in
// closed form.
class ConvexSet {
 public:
  enum class Kind { whole_space, box, ball };

  static ConvexSet whole_space();
  // Elementwise bounds, lo <= hi required.
  static ConvexSet box(Vector lo, Vector hi);
  // Uniform bounds helper: [-half, half]^dim.
  static ConvexSet centered_box(Index dim, double half_width);
  static ConvexSet ball(Vector center, double radius);

  Kind kind() const { return kind_; }
  bool is_whole_space() const { return kind_ == Kind::whole_space; }

  // Checks dimension compatibility: whole-space matches anything.
  bool accepts_dim(Index d) const;

  Vector project(const Vector& v) const;
  bool contains(const Vector& v, double tol = 0.0) const;

  const Vector& lo() const { return lo_; }
  const Vector& hi() const { return hi_; }
  const Vector& center() const { return center_; }
  double radius() const { return radius_; }

  std::string describe() const;

 private:
  ConvexSet() = default;
  Kind kind_ = Kind::whole_space;
  Vector lo_, hi_;
  Vector center_;
  double radius_ = 0.0;
};

// Product constraint S = Theta x Phi; projection acts blockwise.
struct FeasibleSet {
  ConvexSet theta_set = ConvexSet::whole_space();
  ConvexSet phi_set = ConvexSet::whole_space();

  static FeasibleSet whole_space() { return FeasibleSet{}; }

  bool is_whole_space() const {
    return theta_set.is_whole_space() && phi_set.is_whole_space();
  }
  ParameterPoint project(const ParameterPoint& w) const;
  void check_dims(Index d_theta, Index d_phi) const;
};

// SPD stepsize matrix P, or the scalar form eta (equivalent to eta*I).
// lambda_min/lambda_max are computed once at construction by a symmetric
// eigen-decomposition and cached; ||P|| = lambda_max.
class Preconditioner {
 public:
  explicit Preconditioner(double eta);
  explicit Preconditioner(const Matrix& P);

  bool is_scalar() const { return scalar_.has_value(); }
  double scalar() const;

  double lambda_min() const { return lambda_min_; }
  double lambda_max() const { return lambda_max_; }
  double norm() const { return lambda_max_; }

  // P v
  Vector apply(const Vector& v) const;
  // P^{-1} v
  Vector solve(const Vector& v) const;

  std::string describe() const;

 private:
  std::optional<double> scalar_;
  Matrix mat_;
  std::shared_ptr<const Eigen::LDLT<Matrix>> ldlt_;
  double lambda_min_ = 0.0;
  double lambda_max_ = 0.0;
};

using OperatorFn = std::function<Vector(const ParameterPoint&)>;

struct Residual {
  Vector value;
  double norm = 0.0;
};

// Preconditioned residual R_P(w) = P^{-1} (w - Pi_S(w - P F(w))).
// Zero exactly at solutions of VI(S, F); the universal stopping metric.
Residual residual(const Preconditioner& P, const OperatorFn& F,
                  const FeasibleSet& S, const ParameterPoint& w);

// Same quantity when F(w) has already been evaluated.
Residual residual_from_field(const Preconditioner& P, const Vector& field,
                             const FeasibleSet& S, const ParameterPoint& w);

}  // namespace visaddle
