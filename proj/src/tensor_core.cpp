#include "einmetric/tensor_core.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "einmetric/errors.h"
#include "einmetric/spd_manifold.h"

namespace einmetric {

namespace {

void require_dim(int n) {
  if (n < 3) {
    throw DimensionError("curvature tensors require n >= 3, got n = " + std::to_string(n));
  }
}

void require_same_dim(int a, int b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                         " vs " + std::to_string(b) + ")");
  }
}

// Sign of the permutation taking (0,1,2,3) to p.
int permutation_sign(const std::array<int, 4>& p) {
  int inversions = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (p[i] > p[j]) ++inversions;
  return inversions % 2 == 0 ? 1 : -1;
}

}  // namespace

// ---------------------------------------------------------------------------
// Tensor4

Tensor4::Tensor4(int n) : n_(n) {
  if (n < 0) throw DimensionError("negative tensor dimension");
  const std::size_t m = static_cast<std::size_t>(n);
  data_.assign(m * m * m * m, 0.0);
}

Tensor4::Tensor4(int n, std::vector<double> components) : n_(n), data_(std::move(components)) {
  if (n < 0) throw DimensionError("negative tensor dimension");
  const std::size_t m = static_cast<std::size_t>(n);
  if (data_.size() != m * m * m * m) {
    throw DimensionError("expected " + std::to_string(m * m * m * m) + " components for n = " +
                         std::to_string(n) + ", got " + std::to_string(data_.size()));
  }
}

double Tensor4::max_abs() const {
  double m = 0.0;
  for (double x : data_) m = std::max(m, std::abs(x));
  return m;
}

// ---------------------------------------------------------------------------
// CurvatureTensor

CurvatureTensor CurvatureTensor::from_raw(Tensor4 raw, double tol) {
  const SymmetryReport rep = validate_symmetries(raw, tol);
  if (!rep.passed) {
    std::string which;
    if (rep.max_antisym_violation > tol) which = "antisymmetry";
    else if (rep.max_pair_violation > tol) which = "pair symmetry";
    else which = "first Bianchi identity";
    throw InvariantError("tensor is not of curvature type: " + which + " violated (antisym " +
                         std::to_string(rep.max_antisym_violation) + ", pair " +
                         std::to_string(rep.max_pair_violation) + ", bianchi " +
                         std::to_string(rep.max_bianchi_violation) + ", tol " +
                         std::to_string(tol) + ")");
  }
  return CurvatureTensor(std::move(raw));
}

CurvatureTensor operator+(const CurvatureTensor& x, const CurvatureTensor& y) {
  require_same_dim(x.dim(), y.dim(), "tensor sum");
  std::vector<double> out = x.t_.components();
  const auto& yc = y.t_.components();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += yc[i];
  return CurvatureTensor(Tensor4(x.dim(), std::move(out)));
}

CurvatureTensor operator*(double s, const CurvatureTensor& x) {
  std::vector<double> out = x.t_.components();
  for (double& v : out) v *= s;
  return CurvatureTensor(Tensor4(x.dim(), std::move(out)));
}

// ---------------------------------------------------------------------------
// Plane

Plane::Plane(Vector v, Vector q) : v_(std::move(v)), q_(std::move(q)) {
  if (v_.size() != q_.size()) throw DimensionError("plane vectors differ in length");
  const double vv = v_.squaredNorm();
  const double qq = q_.squaredNorm();
  const double vq = v_.dot(q_);
  if (vv == 0.0 || qq == 0.0) throw DegeneratePlaneError("plane spanned by a zero vector");
  if (vv * qq - vq * vq <= kPlaneDegeneracyTol * vv * qq) {
    throw DegeneratePlaneError("plane vectors are collinear");
  }
}

// ---------------------------------------------------------------------------
// Symmetries

SymmetryReport validate_symmetries(const Tensor4& raw, double tol) {
  const int n = raw.dim();
  require_dim(n);
  if (!(tol > 0.0)) throw InvariantError("symmetry tolerance must be positive");

  SymmetryReport rep;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          const double r = raw(a, b, c, d);
          rep.max_antisym_violation = std::max(
              {rep.max_antisym_violation, std::abs(r + raw(b, a, c, d)), std::abs(r + raw(a, b, d, c))});
          rep.max_pair_violation = std::max(rep.max_pair_violation, std::abs(r - raw(c, d, a, b)));
          rep.max_bianchi_violation = std::max(
              rep.max_bianchi_violation, std::abs(r + raw(a, c, d, b) + raw(a, d, b, c)));
        }
  for (double x : raw.components()) {
    if (!std::isfinite(x)) {
      const double inf = std::numeric_limits<double>::infinity();
      rep.max_antisym_violation = rep.max_pair_violation = rep.max_bianchi_violation = inf;
      break;
    }
  }
  rep.passed = rep.max_antisym_violation <= tol && rep.max_pair_violation <= tol &&
               rep.max_bianchi_violation <= tol;
  return rep;
}

CurvatureTensor project_curvature_type(const Tensor4& raw) {
  const int n = raw.dim();
  require_dim(n);

  // Average over the 8 signed symmetries generated by the two pair
  // antisymmetries and the pair interchange.
  Tensor4 sym(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          const double s = raw(a, b, c, d) - raw(b, a, c, d) - raw(a, b, d, c) + raw(b, a, d, c) +
                           raw(c, d, a, b) - raw(d, c, a, b) - raw(c, d, b, a) + raw(d, c, b, a);
          sym(a, b, c, d) = s / 8.0;
        }

  // On this subspace the Bianchi sum equals 3 Alt(R); subtracting the totally
  // antisymmetric part is the orthogonal projection onto its kernel.
  static const std::array<std::array<int, 4>, 24> perms = [] {
    std::array<std::array<int, 4>, 24> out{};
    std::array<int, 4> p{0, 1, 2, 3};
    std::size_t k = 0;
    do {
      out[k++] = p;
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
  }();

  Tensor4 out(n);
  std::array<int, 4> idx{};
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          double alt = 0.0;
          if (a != b && a != c && a != d && b != c && b != d && c != d) {
            const std::array<int, 4> base{a, b, c, d};
            for (const auto& p : perms) {
              for (int i = 0; i < 4; ++i) idx[i] = base[p[i]];
              alt += permutation_sign(p) * sym(idx[0], idx[1], idx[2], idx[3]);
            }
            alt /= 24.0;
          }
          out(a, b, c, d) = sym(a, b, c, d) - alt;
        }
  return CurvatureTensor(std::move(out));
}

CurvatureTensor constant_curvature(int n, double kappa) {
  require_dim(n);
  Tensor4 t(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (a == b) continue;
      t(a, b, a, b) = kappa;
      t(a, b, b, a) = -kappa;
    }
  return CurvatureTensor::from_raw(std::move(t), 1e-300);
}

CurvatureTensor pullback(const CurvatureTensor& t, const Matrix& a) {
  const int n = t.dim();
  if (a.rows() != n || a.cols() != n) throw DimensionError("pullback: matrix shape mismatch");
  Eigen::JacobiSVD<Matrix> svd(a);
  const Vector& s = svd.singularValues();
  if (!(s(n - 1) > 0.0) || s(0) / s(n - 1) > 1e12) {
    throw ConditioningError("pullback: matrix is singular or too ill-conditioned");
  }

  // Four successive single-slot transforms, n^5 work each.
  Tensor4 cur = t.raw();
  for (int slot = 0; slot < 4; ++slot) {
    Tensor4 next(n);
    std::array<int, 4> i{};
    for (i[0] = 0; i[0] < n; ++i[0])
      for (i[1] = 0; i[1] < n; ++i[1])
        for (i[2] = 0; i[2] < n; ++i[2])
          for (i[3] = 0; i[3] < n; ++i[3]) {
            std::array<int, 4> j = i;
            double acc = 0.0;
            for (int p = 0; p < n; ++p) {
              j[slot] = p;
              acc += a(p, i[slot]) * cur(j[0], j[1], j[2], j[3]);
            }
            next(i[0], i[1], i[2], i[3]) = acc;
          }
    cur = std::move(next);
  }
  // Linear maps of this form preserve every symmetry class; re-projecting
  // only strips round-off.
  return project_curvature_type(cur);
}

// ---------------------------------------------------------------------------
// Contractions

Matrix contract_first_third(const CurvatureTensor& t, const Matrix& x) {
  const int n = t.dim();
  if (x.rows() != n || x.cols() != n) throw DimensionError("contraction: matrix shape mismatch");
  Matrix w = Matrix::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c) {
      const double xac = x(a, c);
      if (xac == 0.0) continue;
      for (int b = 0; b < n; ++b)
        for (int d = 0; d < n; ++d) w(b, d) += t(a, b, c, d) * xac;
    }
  return w;
}

double double_contraction(const CurvatureTensor& t, const Matrix& x, const Matrix& y) {
  const Matrix w = contract_first_third(t, x);
  if (y.rows() != w.rows() || y.cols() != w.cols()) {
    throw DimensionError("contraction: matrix shape mismatch");
  }
  return w.cwiseProduct(y).sum();
}

Matrix ricci(const CurvatureTensor& t, const UpperMetric& g) {
  require_same_dim(t.dim(), g.dim(), "ricci");
  Matrix ric = contract_first_third(t, g.upper());
  return 0.5 * (ric + ric.transpose());
}

double scalar_curvature(const CurvatureTensor& t, const UpperMetric& g) {
  require_same_dim(t.dim(), g.dim(), "scalar_curvature");
  return ricci(t, g).cwiseProduct(g.upper()).sum();
}

namespace {

double quartic(const CurvatureTensor& t, const Vector& v, const Vector& q) {
  const int n = t.dim();
  double acc = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const double vq = v(a) * q(b);
      if (vq == 0.0) continue;
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) acc += t(a, b, c, d) * vq * v(c) * q(d);
    }
  return acc;
}

}  // namespace

double sectional_numerator(const CurvatureTensor& t, const Plane& p) {
  require_same_dim(t.dim(), p.dim(), "sectional_numerator");
  return quartic(t, p.v(), p.q());
}

double sectional_curvature(const CurvatureTensor& t, const UpperMetric& g, const Plane& p) {
  require_same_dim(t.dim(), g.dim(), "sectional_curvature");
  require_same_dim(t.dim(), p.dim(), "sectional_curvature");
  const Matrix& low = g.lower();
  const double vv = p.v().dot(low * p.v());
  const double qq = p.q().dot(low * p.q());
  const double vq = p.v().dot(low * p.q());
  const double den = vv * qq - vq * vq;
  if (!(den > kPlaneDegeneracyTol * vv * qq)) {
    throw DegeneratePlaneError("plane is degenerate under the given metric");
  }
  return quartic(t, p.v(), p.q()) / den;
}

Matrix traceless_ricci(const CurvatureTensor& t, const UpperMetric& g) {
  const Matrix ric = ricci(t, g);
  const double r = ric.cwiseProduct(g.upper()).sum();
  return ric - (r / g.dim()) * g.lower();
}

}  // namespace einmetric
