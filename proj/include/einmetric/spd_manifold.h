#pragma once

#include <vector>

#include "einmetric/tensor_core.h"

namespace einmetric {

/// Contravariant metric g^ab: symmetric positive definite with determinant 1.
/// The lowered metric g_ab is the matrix inverse and is cached.
class UpperMetric {
 public:
  /// Validates symmetry (1e-12 relative), positivity and |det - 1| <= 1e-10.
  explicit UpperMetric(const Matrix& g);

  static UpperMetric identity(int n);

  int dim() const { return static_cast<int>(g_.rows()); }
  const Matrix& upper() const { return g_; }
  const Matrix& lower() const { return g_inv_; }

  /// Ascending eigenvalues of g^ab.
  const Vector& eigenvalues() const { return evals_; }
  /// g^{1/2} and g^{-1/2}.
  const Matrix& sqrt() const { return sqrt_; }
  const Matrix& inv_sqrt() const { return inv_sqrt_; }

  bool approx_equal(const UpperMetric& other, double tol = 1e-12) const;

 private:
  Matrix g_;
  Matrix g_inv_;
  Vector evals_;
  Matrix sqrt_;
  Matrix inv_sqrt_;
};

/// Symmetric d^ab with g_ab d^ab = 0, tangent to the det-1 slice at `base`.
class TangentPerturbation {
 public:
  /// Validates symmetry and the trace condition
  /// |tr(g^-1 D)| <= 1e-10 max(1, |g^{-1/2} D g^{-1/2}|_F).
  TangentPerturbation(const UpperMetric& base, const Matrix& d);

  static TangentPerturbation zero(const UpperMetric& base);

  const UpperMetric& base() const { return base_; }
  const Matrix& matrix() const { return d_; }
  int dim() const { return base_.dim(); }

  /// Throws TangentError unless `g` matches the base within 1e-12.
  void require_base(const UpperMetric& g) const;

 private:
  UpperMetric base_;
  Matrix d_;
};

TangentPerturbation operator*(double s, const TangentPerturbation& d);
TangentPerturbation operator+(const TangentPerturbation& x, const TangentPerturbation& y);

/// <d1, d2>_g = tr(g^-1 D1 g^-1 D2).
double inner_product(const UpperMetric& g, const TangentPerturbation& d1,
                     const TangentPerturbation& d2);

double norm(const UpperMetric& g, const TangentPerturbation& d);

/// D = S - (tr(g^-1 S) / n) g. Orthogonal projection onto the tangent space.
TangentPerturbation project_tangent(const UpperMetric& g, const Matrix& s);

/// m(t) = g exp(t g^-1 d), evaluated as g^{1/2} exp(t X) g^{1/2} with
/// X = g^{-1/2} d g^{-1/2}, then renormalized to determinant 1.
UpperMetric geodesic(const UpperMetric& g, const TangentPerturbation& d, double t);

/// Same curve without the final determinant renormalization.
Matrix geodesic_raw(const UpperMetric& g, const TangentPerturbation& d, double t);

/// m(t) - g computed through expm1 of the eigenvalues of X, accurate even
/// when t |X| is tiny.
Matrix geodesic_increment(const UpperMetric& g, const TangentPerturbation& d, double t);

/// Velocity of the geodesic at t, m(t) g^-1 d, as a tangent at m(t).
TangentPerturbation geodesic_velocity(const UpperMetric& g, const TangentPerturbation& d,
                                      double t);

/// S det(S)^{-1/n}. Throws InvariantError when S is not positive definite.
UpperMetric normalize_det(const Matrix& s);

/// Affine-invariant distance |log(g1^{-1/2} g2 g1^{-1/2})|_F.
double geodesic_distance(const UpperMetric& g1, const UpperMetric& g2);

/// Orthonormal basis of the tangent space at g (dimension n(n+1)/2 - 1):
/// g^{1/2} E g^{1/2} for E running over a Frobenius-orthonormal basis of
/// traceless symmetric matrices.
std::vector<TangentPerturbation> tangent_basis(const UpperMetric& g);

/// Coordinates of d in tangent_basis(g).
Vector tangent_coordinates(const UpperMetric& g, const TangentPerturbation& d);
TangentPerturbation from_tangent_coordinates(const UpperMetric& g, const Vector& x);

/// Frobenius-orthonormal basis of traceless symmetric n x n matrices.
std::vector<Matrix> traceless_symmetric_basis(int n);

}  // namespace einmetric
