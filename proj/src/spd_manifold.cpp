#include "einmetric/spd_manifold.h"

#include <cmath>
#include <string>

#include "einmetric/errors.h"

namespace einmetric {

namespace {

constexpr double kEigenFloor = 1e-14;

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

bool all_finite(const Matrix& m) { return m.allFinite(); }

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DimensionError(std::string(what) + ": expected a non-empty square matrix");
  }
}

double symmetry_defect(const Matrix& m) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() / scale;
}

// V f(L) V^T for a symmetric matrix with eigen-decomposition V L V^T.
template <class F>
Matrix spectral_apply(const Eigen::SelfAdjointEigenSolver<Matrix>& es, F f) {
  const Vector fl = es.eigenvalues().unaryExpr(f);
  return es.eigenvectors() * fl.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

// ---------------------------------------------------------------------------
// UpperMetric

UpperMetric::UpperMetric(const Matrix& g) {
  require_square(g, "UpperMetric");
  if (!all_finite(g)) throw NonFiniteError("metric has non-finite entries");
  if (symmetry_defect(g) > 1e-12) throw InvariantError("metric is not symmetric");
  g_ = symmetrized(g);

  Eigen::SelfAdjointEigenSolver<Matrix> es(g_);
  if (es.info() != Eigen::Success) throw ConditioningError("metric eigen-decomposition failed");
  evals_ = es.eigenvalues();
  if (!(evals_(0) > 0.0)) throw InvariantError("metric is not positive definite");
  if (evals_(0) < kEigenFloor * std::max(1.0, evals_(evals_.size() - 1))) {
    throw ConditioningError("metric eigenvalue below conditioning floor");
  }
  const double logdet = evals_.array().log().sum();
  if (std::abs(std::expm1(logdet)) > 1e-10) {
    throw InvariantError("metric determinant is " + std::to_string(std::exp(logdet)) +
                         ", expected 1");
  }

  sqrt_ = symmetrized(spectral_apply(es, [](double x) { return std::sqrt(x); }));
  inv_sqrt_ = symmetrized(spectral_apply(es, [](double x) { return 1.0 / std::sqrt(x); }));
  g_inv_ = symmetrized(spectral_apply(es, [](double x) { return 1.0 / x; }));
}

UpperMetric UpperMetric::identity(int n) { return UpperMetric(Matrix::Identity(n, n)); }

bool UpperMetric::approx_equal(const UpperMetric& other, double tol) const {
  if (dim() != other.dim()) return false;
  const double scale = std::max(1.0, g_.cwiseAbs().maxCoeff());
  return (g_ - other.g_).cwiseAbs().maxCoeff() <= tol * scale;
}

// ---------------------------------------------------------------------------
// TangentPerturbation

TangentPerturbation::TangentPerturbation(const UpperMetric& base, const Matrix& d) : base_(base) {
  if (d.rows() != base.dim() || d.cols() != base.dim()) {
    throw DimensionError("tangent perturbation shape does not match its base metric");
  }
  if (!all_finite(d)) throw NonFiniteError("tangent perturbation has non-finite entries");
  if (symmetry_defect(d) > 1e-12) throw InvariantError("tangent perturbation is not symmetric");
  d_ = symmetrized(d);
  const double trace = (base.lower() * d_).trace();
  const double scale = (base.inv_sqrt() * d_ * base.inv_sqrt()).norm();
  if (std::abs(trace) > 1e-10 * std::max(1.0, scale)) {
    throw TangentError("perturbation is not g-traceless (tr(g^-1 d) = " + std::to_string(trace) +
                       ")");
  }
}

TangentPerturbation TangentPerturbation::zero(const UpperMetric& base) {
  return TangentPerturbation(base, Matrix::Zero(base.dim(), base.dim()));
}

void TangentPerturbation::require_base(const UpperMetric& g) const {
  if (!base_.approx_equal(g)) throw TangentError("tangent perturbation used at a foreign base point");
}

TangentPerturbation operator*(double s, const TangentPerturbation& d) {
  return TangentPerturbation(d.base(), s * d.matrix());
}

TangentPerturbation operator+(const TangentPerturbation& x, const TangentPerturbation& y) {
  y.require_base(x.base());
  return TangentPerturbation(x.base(), x.matrix() + y.matrix());
}

// ---------------------------------------------------------------------------
// Geometry

double inner_product(const UpperMetric& g, const TangentPerturbation& d1,
                     const TangentPerturbation& d2) {
  d1.require_base(g);
  d2.require_base(g);
  const Matrix a = g.lower() * d1.matrix();
  const Matrix b = g.lower() * d2.matrix();
  return (a.array() * b.transpose().array()).sum();
}

double norm(const UpperMetric& g, const TangentPerturbation& d) {
  return std::sqrt(std::max(0.0, inner_product(g, d, d)));
}

TangentPerturbation project_tangent(const UpperMetric& g, const Matrix& s) {
  if (s.rows() != g.dim() || s.cols() != g.dim()) throw DimensionError("project_tangent: shape");
  if (symmetry_defect(s) > 1e-12) throw InvariantError("project_tangent: input is not symmetric");
  const Matrix sym = symmetrized(s);
  const double tr = (g.lower() * sym).trace();
  return TangentPerturbation(g, sym - (tr / g.dim()) * g.upper());
}

namespace {

// Eigen-decomposition of the whitened generator X = g^{-1/2} d g^{-1/2}.
Eigen::SelfAdjointEigenSolver<Matrix> whitened_generator(const UpperMetric& g,
                                                        const TangentPerturbation& d) {
  d.require_base(g);
  const Matrix x = symmetrized(g.inv_sqrt() * d.matrix() * g.inv_sqrt());
  Eigen::SelfAdjointEigenSolver<Matrix> es(x);
  if (es.info() != Eigen::Success) throw ConditioningError("geodesic: eigen-decomposition failed");
  return es;
}

}  // namespace

Matrix geodesic_raw(const UpperMetric& g, const TangentPerturbation& d, double t) {
  const auto es = whitened_generator(g, d);
  const Matrix e = spectral_apply(es, [t](double x) { return std::exp(t * x); });
  return symmetrized(g.sqrt() * e * g.sqrt());
}

Matrix geodesic_increment(const UpperMetric& g, const TangentPerturbation& d, double t) {
  const auto es = whitened_generator(g, d);
  const Matrix e = spectral_apply(es, [t](double x) { return std::expm1(t * x); });
  return symmetrized(g.sqrt() * e * g.sqrt());
}

UpperMetric geodesic(const UpperMetric& g, const TangentPerturbation& d, double t) {
  const Matrix m = geodesic_raw(g, d, t);
  if (!all_finite(m)) throw NonFiniteError("geodesic produced non-finite entries");
  return normalize_det(m);
}

TangentPerturbation geodesic_velocity(const UpperMetric& g, const TangentPerturbation& d,
                                      double t) {
  const auto es = whitened_generator(g, d);
  // g^{1/2} X exp(tX) g^{1/2}; X and exp(tX) commute, so this is symmetric.
  const Matrix xe = spectral_apply(es, [t](double x) { return x * std::exp(t * x); });
  const UpperMetric m = geodesic(g, d, t);
  return project_tangent(m, symmetrized(g.sqrt() * xe * g.sqrt()));
}

UpperMetric normalize_det(const Matrix& s) {
  require_square(s, "normalize_det");
  if (!all_finite(s)) throw NonFiniteError("normalize_det: non-finite entries");
  if (symmetry_defect(s) > 1e-9) throw InvariantError("normalize_det: matrix is not symmetric");
  const Matrix sym = symmetrized(s);
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  const Vector& ev = es.eigenvalues();
  if (!(ev(0) > 0.0)) throw InvariantError("normalize_det: matrix is not positive definite");
  const double logdet = ev.array().log().sum();
  const double scale = std::exp(-logdet / static_cast<double>(sym.rows()));
  return UpperMetric(scale * sym);
}

double geodesic_distance(const UpperMetric& g1, const UpperMetric& g2) {
  if (g1.dim() != g2.dim()) throw DimensionError("geodesic_distance: dimension mismatch");
  const Matrix x = symmetrized(g1.inv_sqrt() * g2.upper() * g1.inv_sqrt());
  Eigen::SelfAdjointEigenSolver<Matrix> es(x, Eigen::EigenvaluesOnly);
  return es.eigenvalues().array().log().matrix().norm();
}

std::vector<Matrix> traceless_symmetric_basis(int n) {
  std::vector<Matrix> basis;
  basis.reserve(static_cast<std::size_t>(n * (n + 1) / 2 - 1));
  // Diagonal part: Helmert contrasts, orthonormal and orthogonal to (1,...,1).
  for (int k = 1; k < n; ++k) {
    Matrix e = Matrix::Zero(n, n);
    const double c = 1.0 / std::sqrt(static_cast<double>(k) * (k + 1));
    for (int i = 0; i < k; ++i) e(i, i) = c;
    e(k, k) = -k * c;
    basis.push_back(std::move(e));
  }
  const double r = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      Matrix e = Matrix::Zero(n, n);
      e(i, j) = e(j, i) = r;
      basis.push_back(std::move(e));
    }
  return basis;
}

std::vector<TangentPerturbation> tangent_basis(const UpperMetric& g) {
  std::vector<TangentPerturbation> out;
  for (const Matrix& e : traceless_symmetric_basis(g.dim())) {
    out.emplace_back(g, symmetrized(g.sqrt() * e * g.sqrt()));
  }
  return out;
}

Vector tangent_coordinates(const UpperMetric& g, const TangentPerturbation& d) {
  d.require_base(g);
  const Matrix x = symmetrized(g.inv_sqrt() * d.matrix() * g.inv_sqrt());
  const auto basis = traceless_symmetric_basis(g.dim());
  Vector c(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k) {
    c(static_cast<Eigen::Index>(k)) = basis[k].cwiseProduct(x).sum();
  }
  return c;
}

TangentPerturbation from_tangent_coordinates(const UpperMetric& g, const Vector& x) {
  const auto basis = traceless_symmetric_basis(g.dim());
  if (static_cast<std::size_t>(x.size()) != basis.size()) {
    throw DimensionError("tangent coordinate vector has the wrong length");
  }
  Matrix e = Matrix::Zero(g.dim(), g.dim());
  for (std::size_t k = 0; k < basis.size(); ++k) e += x(static_cast<Eigen::Index>(k)) * basis[k];
  return TangentPerturbation(g, symmetrized(g.sqrt() * e * g.sqrt()));
}

}  // namespace einmetric
