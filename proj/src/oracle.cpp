#include "einmetric/oracle.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "einmetric/bounds.h"
#include "einmetric/errors.h"

namespace einmetric::oracle {

Matrix random_orthogonal(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix z(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) z(i, j) = normal(rng);
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix column signs so the distribution is Haar.
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  return q;
}

Matrix random_well_conditioned(int n, std::mt19937_64& rng, double max_cond) {
  const Matrix u = random_orthogonal(n, rng);
  const Matrix v = random_orthogonal(n, rng);
  std::uniform_real_distribution<double> unif(-0.5, 0.5);
  const double log_cond = std::log(max_cond);
  Vector s(n);
  for (int i = 0; i < n; ++i) s(i) = std::exp(unif(rng) * log_cond);
  return u * s.asDiagonal() * v.transpose();
}

Matrix random_traceless_symmetric(int n, std::mt19937_64& rng, double frobenius) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix s(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) s(i, j) = s(j, i) = normal(rng);
  s -= (s.trace() / n) * Matrix::Identity(n, n);
  const double f = s.norm();
  if (f > 0.0) s *= frobenius / f;
  return s;
}

Matrix sym_exp(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (s + s.transpose()));
  const Vector e = es.eigenvalues().array().exp();
  const Matrix out = es.eigenvectors() * e.asDiagonal() * es.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

UpperMetric random_metric(int n, std::mt19937_64& rng, double scale) {
  return normalize_det(sym_exp(random_traceless_symmetric(n, rng, scale)));
}

TangentPerturbation random_tangent(const UpperMetric& g, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const int n = g.dim();
  Matrix s(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) s(i, j) = s(j, i) = normal(rng);
  const TangentPerturbation d = project_tangent(g, s);
  return (1.0 / norm(g, d)) * d;
}

// ---------------------------------------------------------------------------
// Fixtures

Fixture generate_fixture(const FixtureSpec& spec) {
  if (spec.n < 3) throw DimensionError("fixtures require n >= 3");
  const int n = spec.n;
  std::mt19937_64 rng(spec.seed);

  switch (spec.kind) {
    case FixtureKind::constant:
      return Fixture{constant_curvature(n, spec.kappa), Matrix::Identity(n, n), 0.0};

    case FixtureKind::pullback: {
      if (!(spec.kappa > 0.0)) throw InvariantError("pullback fixtures require kappa > 0");
      const Matrix a = random_well_conditioned(n, rng);
      return Fixture{pullback(constant_curvature(n, spec.kappa), a), a, 0.0};
    }

    case FixtureKind::perturbed: {
      if (!(spec.kappa > 0.0)) throw InvariantError("perturbed fixtures require kappa > 0");
      if (!(spec.eps >= 0.0)) throw InvariantError("perturbation size must be non-negative");
      std::normal_distribution<double> normal(0.0, 1.0);
      Tensor4 noise(n);
      std::vector<double> c(noise.size());
      for (double& x : c) x = normal(rng);
      const CurvatureTensor dir = project_curvature_type(Tensor4(n, std::move(c)));
      const CurvatureTensor base = constant_curvature(n, spec.kappa);

      double eps = spec.eps;
      for (int attempt = 0; attempt <= 20; ++attempt) {
        CurvatureTensor t = base + eps * dir;
        const auto verdict = positivity_check(t, 2000, spec.seed);
        if (verdict.verdict == Positivity::strictly_positive_sampled) {
          return Fixture{std::move(t), Matrix::Identity(n, n), eps};
        }
        eps *= 0.5;
      }
      throw Error("perturbed fixture: positivity not reached after 20 halvings of eps");
    }
  }
  throw InvariantError("unknown fixture kind");
}

// ---------------------------------------------------------------------------
// Brute force

namespace {

// Symmetric traceless matrices: off-diagonal pairs and e_kk - e_{n-1,n-1}.
Matrix coords_to_matrix(int n, const Vector& x) {
  Matrix s = Matrix::Zero(n, n);
  Eigen::Index k = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j, ++k) s(i, j) = s(j, i) = x(k);
  for (int i = 0; i + 1 < n; ++i, ++k) {
    s(i, i) += x(k);
    s(n - 1, n - 1) -= x(k);
  }
  return s;
}

struct NelderMeadResult {
  Vector x;
  double f;
  bool converged;
  int evals;
};

// Adaptive-parameter Nelder-Mead (Gao & Han coefficients).
NelderMeadResult nelder_mead(const std::function<double(const Vector&)>& f, const Vector& x0,
                             double initial_size, double tol, int max_evals) {
  const Eigen::Index m = x0.size();
  const double md = static_cast<double>(m);
  const double alpha = 1.0, beta = 1.0 + 2.0 / md, gamma = 0.75 - 0.5 / md, delta = 1.0 - 1.0 / md;

  std::vector<Vector> pts(static_cast<std::size_t>(m + 1), x0);
  std::vector<double> vals(static_cast<std::size_t>(m + 1));
  for (Eigen::Index i = 0; i < m; ++i) pts[static_cast<std::size_t>(i + 1)](i) += initial_size;
  int evals = 0;
  for (std::size_t i = 0; i < pts.size(); ++i, ++evals) vals[i] = f(pts[i]);

  std::vector<std::size_t> order(pts.size());
  bool converged = false;
  while (evals < max_evals) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    const std::size_t lo = order.front(), hi = order.back(), second = order[order.size() - 2];

    double diameter = 0.0;
    for (const auto& p : pts) diameter = std::max(diameter, (p - pts[lo]).cwiseAbs().maxCoeff());
    if (diameter <= tol) {
      converged = true;
      break;
    }

    Vector centroid = Vector::Zero(m);
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (i != hi) centroid += pts[i];
    centroid /= md;

    const Vector xr = centroid + alpha * (centroid - pts[hi]);
    const double fr = f(xr);
    ++evals;
    if (fr < vals[lo]) {
      const Vector xe = centroid + beta * (xr - centroid);
      const double fe = f(xe);
      ++evals;
      if (fe < fr) { pts[hi] = xe; vals[hi] = fe; }
      else { pts[hi] = xr; vals[hi] = fr; }
      continue;
    }
    if (fr < vals[second]) {
      pts[hi] = xr;
      vals[hi] = fr;
      continue;
    }
    const bool outside = fr < vals[hi];
    const Vector xc = outside ? Vector(centroid + gamma * (xr - centroid))
                              : Vector(centroid - gamma * (centroid - pts[hi]));
    const double fc = f(xc);
    ++evals;
    if ((outside && fc <= fr) || (!outside && fc < vals[hi])) {
      pts[hi] = xc;
      vals[hi] = fc;
      continue;
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i == lo) continue;
      pts[i] = pts[lo] + delta * (pts[i] - pts[lo]);
      vals[i] = f(pts[i]);
      ++evals;
    }
  }
  const auto best = static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin());
  return NelderMeadResult{pts[best], vals[best], converged, evals};
}

}  // namespace

BruteForceResult brute_force_minimize(const CurvatureTensor& t, std::uint64_t seed, double tol) {
  const int n = t.dim();
  const Eigen::Index m = n * (n + 1) / 2 - 1;
  const auto objective = [&](const Vector& x) {
    const Matrix g = sym_exp(coords_to_matrix(n, x));
    return double_contraction(t, g, g);
  };

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 0.5);
  BruteForceResult out;
  Vector best_x = Vector::Zero(m);
  double best_f = objective(best_x);

  for (int restart = 0; restart < 5; ++restart) {
    Vector x0(m);
    for (Eigen::Index i = 0; i < m; ++i) x0(i) = normal(rng);
    const NelderMeadResult r = nelder_mead(objective, x0, 0.5, tol, 20000 * static_cast<int>(m));
    out.evaluations += r.evals;
    if (r.f < best_f) {
      best_f = r.f;
      best_x = r.x;
    }
  }

  // Polish: restart from the incumbent with a shrinking simplex until the
  // position stops moving.
  double size = 0.1;
  for (int polish = 0; polish < 30; ++polish) {
    const NelderMeadResult r = nelder_mead(objective, best_x, size, tol, 20000 * static_cast<int>(m));
    out.evaluations += r.evals;
    const double moved = (r.x - best_x).cwiseAbs().maxCoeff();
    if (r.f <= best_f) {
      best_f = r.f;
      best_x = r.x;
    }
    out.converged = r.converged;
    if (r.converged && moved <= 10.0 * tol) break;
    size = std::max(0.5 * size, 1e-4);
  }

  out.g = normalize_det(sym_exp(coords_to_matrix(n, best_x)));
  out.r = double_contraction(t, out.g.upper(), out.g.upper());
  return out;
}

// ---------------------------------------------------------------------------
// Finite differences

namespace {

double r_change(const CurvatureTensor& t, const UpperMetric& g, const TangentPerturbation& d,
                double h) {
  const Matrix inc = geodesic_increment(g, d, h);
  return double_contraction(t, inc, 2.0 * g.upper() + inc);
}

}  // namespace

double finite_diff_directional(const CurvatureTensor& t, const UpperMetric& g,
                               const TangentPerturbation& d, double h) {
  if (!(h > 0.0)) throw InvariantError("finite difference step must be positive");
  return (r_change(t, g, d, h) - r_change(t, g, d, -h)) / (2.0 * h);
}

double finite_diff_second(const CurvatureTensor& t, const UpperMetric& g,
                          const TangentPerturbation& d, double h) {
  if (!(h > 0.0)) throw InvariantError("finite difference step must be positive");
  return (r_change(t, g, d, h) + r_change(t, g, d, -h)) / (h * h);
}

// ---------------------------------------------------------------------------
// Multistart

MultistartResult multistart(const CurvatureTensor& t, int k, std::uint64_t seed,
                            const SolveOptions& opts, bool include_identity) {
  if (k < 1) throw InvariantError("multistart: need at least one start");
  std::mt19937_64 rng(seed);
  MultistartResult out;
  for (int i = 0; i < k; ++i) {
    const UpperMetric g0 = (include_identity && i == 0) ? UpperMetric::identity(t.dim())
                                                        : random_metric(t.dim(), rng, 1.5);
    out.runs.push_back(solve_einstein(t, g0, opts));
  }

  for (std::size_t i = 0; i < out.runs.size(); ++i) {
    const SolveReport& ri = out.runs[i];
    if (!ri.converged) {
      ++out.failed;
      continue;
    }
    ++out.converged;
    if (out.best < 0 || ri.r_trace.back() < out.runs[static_cast<std::size_t>(out.best)].r_trace.back()) {
      out.best = static_cast<int>(i);
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (!out.runs[j].converged) continue;
      out.max_distance =
          std::max(out.max_distance, geodesic_distance(ri.minimizer, out.runs[j].minimizer));
    }
  }
  return out;
}

MultistartResult multistart_uniqueness(const CurvatureTensor& t, int k, std::uint64_t seed) {
  if (k < 2) throw InvariantError("multistart_uniqueness: k must be >= 2");
  return multistart(t, k, seed, SolveOptions{}, false);
}

}  // namespace einmetric::oracle
