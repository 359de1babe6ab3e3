#include "einmetric/solver.h"

#include <cmath>

#include "einmetric/errors.h"

namespace einmetric {

void SolveOptions::validate() const {
  if (!(tol_grad > 0.0)) throw InvariantError("tol_grad must be positive");
  if (max_iter < 1) throw InvariantError("max_iter must be at least 1");
  if (!(line_search.backtrack > 0.0 && line_search.backtrack < 1.0)) {
    throw InvariantError("line search backtrack factor must lie in (0, 1)");
  }
  if (!(line_search.initial_step > 0.0)) throw InvariantError("initial step must be positive");
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iter_exceeded: return "max_iter_exceeded";
    case SolveStatus::line_search_failure: return "line_search_failure";
  }
  return "unknown";
}

TangentPerturbation riemannian_gradient(const CurvatureTensor& t, const UpperMetric& g) {
  const Matrix tl = traceless_ricci(t, g);
  const Matrix d = 2.0 * g.upper() * tl * g.upper();
  return project_tangent(g, 0.5 * (d + d.transpose()));
}

double hessian_quadratic_form(const CurvatureTensor& t, const UpperMetric& g,
                              const TangentPerturbation& d) {
  d.require_base(g);
  const Matrix& x = d.matrix();
  const Matrix ric = ricci(t, g);
  const double first = ric.cwiseProduct(x * g.lower() * x).sum();
  const double second = double_contraction(t, x, x);
  return 2.0 * (first + second);
}

double HessianOperator::operator()(const TangentPerturbation& d1,
                                   const TangentPerturbation& d2) const {
  const Vector x = tangent_coordinates(base, d1);
  const Vector y = tangent_coordinates(base, d2);
  return x.dot(matrix * y);
}

double HessianOperator::smallest_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(matrix, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

HessianOperator hessian_operator(const CurvatureTensor& t, const UpperMetric& g) {
  if (t.dim() != g.dim()) throw DimensionError("hessian_operator: dimension mismatch");
  const auto basis = tangent_basis(g);
  const Matrix ric = ricci(t, g);
  const Eigen::Index m = static_cast<Eigen::Index>(basis.size());

  std::vector<Matrix> contracted;
  contracted.reserve(basis.size());
  for (const auto& b : basis) contracted.push_back(contract_first_third(t, b.matrix()));

  Matrix h(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i; j < m; ++j) {
      const Matrix& di = basis[static_cast<std::size_t>(i)].matrix();
      const Matrix& dj = basis[static_cast<std::size_t>(j)].matrix();
      const Matrix cross = di * g.lower() * dj;
      const double first = ric.cwiseProduct(0.5 * (cross + cross.transpose())).sum();
      const double second = contracted[static_cast<std::size_t>(i)].cwiseProduct(dj).sum();
      h(i, j) = h(j, i) = 2.0 * (first + second);
    }
  return HessianOperator{h, g};
}

namespace {

struct Step {
  UpperMetric point;
  double delta_r;
};

// R(m) - R(g) = B(m - g, m + g), using the accurate geodesic increment so
// that decreases far below eps |R| remain resolvable.
Step trial_step(const CurvatureTensor& t, const UpperMetric& g, const TangentPerturbation& dir,
                double step) {
  const Matrix inc = geodesic_increment(g, dir, step);
  if (!inc.allFinite()) throw NonFiniteError("solver: non-finite geodesic increment");
  const double delta = double_contraction(t, inc, 2.0 * g.upper() + inc);
  if (!std::isfinite(delta)) throw NonFiniteError("solver: non-finite objective change");
  return Step{normalize_det(g.upper() + inc), delta};
}

struct Direction {
  TangentPerturbation d;
  double slope;  // directional derivative <grad, d>_g
  bool newton;
};

Direction choose_direction(const CurvatureTensor& t, const UpperMetric& g,
                           const TangentPerturbation& grad, double gnorm,
                           const SolveOptions& opts) {
  if (opts.use_newton && gnorm < opts.newton_threshold) {
    const HessianOperator h = hessian_operator(t, g);
    Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix);
    const Vector& ev = es.eigenvalues();
    const double largest = ev.cwiseAbs().maxCoeff();
    if (es.info() == Eigen::Success && ev(0) > 1e-12 * largest && largest > 0.0) {
      const Vector gc = tangent_coordinates(g, grad);
      const Vector x = -(es.eigenvectors() *
                         (es.eigenvectors().transpose() * gc).cwiseQuotient(ev));
      const double slope = gc.dot(x);
      if (slope < 0.0 && x.allFinite()) {
        return Direction{from_tangent_coordinates(g, x), slope, true};
      }
    }
  }
  return Direction{(-1.0 / gnorm) * grad, -gnorm, false};
}

}  // namespace

SolveReport solve_einstein(const CurvatureTensor& t, const UpperMetric& g0,
                           const SolveOptions& opts) {
  opts.validate();
  if (t.dim() != g0.dim()) throw DimensionError("solve_einstein: dimension mismatch");

  SolveReport rep;
  UpperMetric g = g0;
  double r = scalar_curvature(t, g);
  if (!std::isfinite(r)) throw NonFiniteError("solver: non-finite scalar curvature");
  rep.r_trace.push_back(r);

  for (int k = 0;; ++k) {
    const TangentPerturbation grad = riemannian_gradient(t, g);
    const double gnorm = norm(g, grad);
    if (!std::isfinite(gnorm)) throw NonFiniteError("solver: non-finite gradient");
    rep.grad_norm = gnorm;
    rep.iterations = k;

    if (gnorm <= opts.tol_grad) {
      rep.converged = true;
      rep.status = SolveStatus::converged;
      break;
    }
    if (k >= opts.max_iter) {
      rep.status = SolveStatus::max_iter_exceeded;
      break;
    }

    const Direction dir = choose_direction(t, g, grad, gnorm, opts);
    const LineSearchOptions& ls = opts.line_search;
    double step = ls.initial_step;
    bool accepted = false;
    while (step >= ls.min_step) {
      Step trial = trial_step(t, g, dir.d, step);
      if (trial.delta_r < 0.0 && trial.delta_r <= ls.sufficient_decrease * step * dir.slope) {
        g = std::move(trial.point);
        r += trial.delta_r;
        rep.r_trace.push_back(r);
        if (dir.newton) ++rep.newton_steps;
        accepted = true;
        break;
      }
      step *= ls.backtrack;
    }
    if (!accepted) {
      rep.status = SolveStatus::line_search_failure;
      rep.iterations = k;
      break;
    }
  }

  const EinsteinCheck check = verify_einstein(t, g, 0.0);
  rep.minimizer = g;
  rep.lambda = check.lambda;
  rep.einstein_residual = check.residual;
  rep.residual_bound_factor = 1.0 / (2.0 * g.eigenvalues()(0));
  return rep;
}

EinsteinCheck verify_einstein(const CurvatureTensor& t, const UpperMetric& g, double tol) {
  const Matrix ric = ricci(t, g);
  const double r = ric.cwiseProduct(g.upper()).sum();
  EinsteinCheck out;
  out.lambda = r / g.dim();
  out.residual = (ric - out.lambda * g.lower()).norm();
  out.passed = out.residual <= tol * std::max(1.0, std::abs(out.lambda));
  return out;
}

}  // namespace einmetric
