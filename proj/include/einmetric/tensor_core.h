#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

namespace einmetric {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

class UpperMetric;

/// Dense n x n x n x n array of reals with no invariants attached.
/// Index order is [a][b][c][d], row-major (d fastest).
class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(int n);
  Tensor4(int n, std::vector<double> components);

  int dim() const { return n_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(int a, int b, int c, int d) { return data_[index(a, b, c, d)]; }
  double operator()(int a, int b, int c, int d) const { return data_[index(a, b, c, d)]; }

  const std::vector<double>& components() const { return data_; }
  double max_abs() const;

  bool operator==(const Tensor4&) const = default;

 private:
  std::size_t index(int a, int b, int c, int d) const {
    const std::size_t n = static_cast<std::size_t>(n_);
    return ((static_cast<std::size_t>(a) * n + b) * n + c) * n + d;
  }

  int n_ = 0;
  std::vector<double> data_;
};

/// A rank-4 covariant tensor with the algebraic symmetries of the Riemann
/// tensor: antisymmetry in each index pair, pair interchange and the first
/// Bianchi identity. Construct through validate/project helpers below.
class CurvatureTensor {
 public:
  /// Accepts `raw` if validate_symmetries passes at `tol`, otherwise throws
  /// InvariantError naming the failing symmetry class.
  static CurvatureTensor from_raw(Tensor4 raw, double tol = 1e-9);

  int dim() const { return t_.dim(); }
  double operator()(int a, int b, int c, int d) const { return t_(a, b, c, d); }
  const Tensor4& raw() const { return t_; }
  double max_abs() const { return t_.max_abs(); }

  // The curvature-type tensors form a linear space.
  friend CurvatureTensor operator+(const CurvatureTensor& x, const CurvatureTensor& y);
  friend CurvatureTensor operator*(double s, const CurvatureTensor& x);

  bool operator==(const CurvatureTensor&) const = default;

 private:
  explicit CurvatureTensor(Tensor4 t) : t_(std::move(t)) {}
  friend CurvatureTensor project_curvature_type(const Tensor4& raw);

  Tensor4 t_;
};

struct SymmetryReport {
  double max_antisym_violation = 0.0;
  double max_pair_violation = 0.0;
  double max_bianchi_violation = 0.0;
  bool passed = false;
};

/// Two vectors spanning a 2-plane. Construction rejects zero or
/// (numerically) collinear pairs: the identity-metric Gram determinant must
/// exceed 1e-12 |v|^2 |q|^2.
class Plane {
 public:
  Plane(Vector v, Vector q);

  const Vector& v() const { return v_; }
  const Vector& q() const { return q_; }
  int dim() const { return static_cast<int>(v_.size()); }

 private:
  Vector v_;
  Vector q_;
};

inline constexpr double kDefaultSymmetryTol = 1e-9;
inline constexpr double kPlaneDegeneracyTol = 1e-12;

SymmetryReport validate_symmetries(const Tensor4& raw, double tol = kDefaultSymmetryTol);

/// Orthogonal projection onto the curvature-type subspace: average over the
/// signed pair symmetries, then remove the totally antisymmetric part (which
/// is exactly the Bianchi obstruction on that subspace).
CurvatureTensor project_curvature_type(const Tensor4& raw);

/// Space form R_abcd = kappa (d_ac d_bd - d_ad d_bc).
CurvatureTensor constant_curvature(int n, double kappa);

/// R'_abcd = A[p][a] A[q][b] A[r][c] A[s][d] R_pqrs.
/// pullback(pullback(T, A), B) == pullback(T, A * B).
CurvatureTensor pullback(const CurvatureTensor& t, const Matrix& a);

/// Sum_abcd R_abcd X^ac Y^bd. Symmetric in (X, Y) by pair symmetry.
double double_contraction(const CurvatureTensor& t, const Matrix& x, const Matrix& y);

/// W_bd = Sum_ac R_abcd X^ac.
Matrix contract_first_third(const CurvatureTensor& t, const Matrix& x);

/// Ric_bd = R_abcd g^ac.
Matrix ricci(const CurvatureTensor& t, const UpperMetric& g);

/// R(g) = R_abcd g^ac g^bd.
double scalar_curvature(const CurvatureTensor& t, const UpperMetric& g);

/// R_abcd v^a q^b v^c q^d. Metric free.
double sectional_numerator(const CurvatureTensor& t, const Plane& p);

/// Numerator over the Gram determinant of (v, q) under g_ab = inverse(g^ab).
/// Throws DegeneratePlaneError when that determinant falls below
/// 1e-12 |v|_g^2 |q|_g^2.
double sectional_curvature(const CurvatureTensor& t, const UpperMetric& g, const Plane& p);

/// Ric - (R/n) g_ab.
Matrix traceless_ricci(const CurvatureTensor& t, const UpperMetric& g);

}  // namespace einmetric
