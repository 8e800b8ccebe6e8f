#pragma once

#include <Eigen/Core>
#include <cmath>

#include "deal/error.hpp"

namespace deal {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = MatrixX<double>;
using Vector = VectorX<double>;
using Index = Eigen::Index;

// ---------------------------------------------------------------------------
// Scalar primitives
// ---------------------------------------------------------------------------

/// Exponential linear unit: x on the positive branch, alpha*(e^x - 1) below.
template <typename Scalar>
inline Scalar elu(Scalar x, Scalar alpha = Scalar(1)) {
  return x > Scalar(0) ? x : alpha * (std::exp(x) - Scalar(1));
}

/// Derivative of elu with respect to its input.
template <typename Scalar>
inline Scalar elu_grad(Scalar x, Scalar alpha = Scalar(1)) {
  return x > Scalar(0) ? Scalar(1) : alpha * std::exp(x);
}

/// log(1 + e^t) without overflow. Exact to double precision: for t > 30 the
/// correction term log1p(e^-t) is below 1 ulp, so t itself is returned.
template <typename Scalar>
inline Scalar softplus(Scalar t) {
  if (t > Scalar(30)) return t;
  return std::log1p(std::exp(t));
}

/// 1 / (1 + e^-t), evaluated on the stable branch.
template <typename Scalar>
inline Scalar logistic(Scalar t) {
  if (t >= Scalar(0)) return Scalar(1) / (Scalar(1) + std::exp(-t));
  const Scalar e = std::exp(t);
  return e / (Scalar(1) + e);
}

/// Margin-tunable logistic loss (1/gamma) * log(1 + e^(-gamma*x + b)).
inline double generalized_logistic(double x, double gamma, double b) {
  if (!(gamma > 0.0)) throw ArgumentError("generalized_logistic: gamma must be positive");
  const double t = -gamma * x + b;
  return softplus(t) / gamma;
}

/// d/dx of generalized_logistic; equals -logistic(-gamma*x + b).
inline double generalized_logistic_dx(double x, double gamma, double b) {
  if (!(gamma > 0.0)) throw ArgumentError("generalized_logistic: gamma must be positive");
  return -logistic(-gamma * x + b);
}

// ---------------------------------------------------------------------------
// Vector primitives
// ---------------------------------------------------------------------------

inline constexpr double kCosineNormFloor = 1e-12;

/// Cosine similarity in [-1, 1]. Returns 0 when either argument has norm
/// below kCosineNormFloor, so degenerate embeddings score as unrelated
/// instead of propagating NaN.
template <typename DerivedA, typename DerivedB>
double cosine_similarity(const Eigen::MatrixBase<DerivedA>& u,
                         const Eigen::MatrixBase<DerivedB>& v) {
  if (u.size() != v.size())
    throw ShapeError("cosine_similarity: length mismatch (" + std::to_string(u.size()) +
                     " vs " + std::to_string(v.size()) + ")");
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu < kCosineNormFloor || nv < kCosineNormFloor) return 0.0;
  return u.dot(v) / (nu * nv);
}

/// Gradient of cosine_similarity(u, v) with respect to u. Zero when the
/// similarity was clamped by the norm floor.
template <typename DerivedA, typename DerivedB>
Vector cosine_similarity_grad_u(const Eigen::MatrixBase<DerivedA>& u,
                                const Eigen::MatrixBase<DerivedB>& v) {
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu < kCosineNormFloor || nv < kCosineNormFloor) return Vector::Zero(u.size());
  const double c = u.dot(v) / (nu * nv);
  return (v / (nu * nv) - u * (c / (nu * nu))).eval();
}

}  // namespace deal
