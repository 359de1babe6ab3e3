#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "einmetric/spd_manifold.h"
#include "einmetric/tensor_core.h"

namespace einmetric {

struct LineSearchOptions {
  double sufficient_decrease = 1e-4;
  double backtrack = 0.5;
  double initial_step = 1.0;
  double min_step = 1e-16;
};

struct SolveOptions {
  double tol_grad = 1e-10;
  int max_iter = 500;
  LineSearchOptions line_search;
  bool use_newton = true;
  /// Newton steps are attempted once the gradient norm drops below this.
  double newton_threshold = 1e-3;
  std::uint64_t seed = 0;

  /// Throws InvariantError on tol_grad <= 0 or max_iter < 1.
  void validate() const;
};

enum class SolveStatus { converged, max_iter_exceeded, line_search_failure };

std::string to_string(SolveStatus s);

struct SolveReport {
  UpperMetric minimizer = UpperMetric::identity(3);
  /// Einstein constant R(minimizer) / n.
  double lambda = 0.0;
  /// Gradient norm in the manifold inner product.
  double grad_norm = 0.0;
  /// |Ric - lambda g_ab|_F at the minimizer.
  double einstein_residual = 0.0;
  /// einstein_residual <= residual_bound_factor * grad_norm, with the factor
  /// 1 / (2 lambda_min(g^ab)) set by the conditioning of the minimizer.
  double residual_bound_factor = 0.0;
  int iterations = 0;
  int newton_steps = 0;
  /// R at every accepted iterate, starting with R(g0). Updated by the
  /// accurately computed increment of each accepted step, so it is
  /// non-increasing by construction.
  std::vector<double> r_trace;
  bool converged = false;
  SolveStatus status = SolveStatus::max_iter_exceeded;
};

/// 2 g T g with T the traceless Ricci tensor: the unique tangent vector with
/// <grad, d>_g = 2 T_ab d^ab for every tangent d.
TangentPerturbation riemannian_gradient(const CurvatureTensor& t, const UpperMetric& g);

/// Second derivative of R along the geodesic through g with velocity d:
/// 2 (Ric_ab g_cd + R_abcd) d^ac d^bd.
double hessian_quadratic_form(const CurvatureTensor& t, const UpperMetric& g,
                              const TangentPerturbation& d);

/// Polarized Hessian in the orthonormal tangent_basis(g).
struct HessianOperator {
  Matrix matrix;
  UpperMetric base = UpperMetric::identity(3);

  /// Bilinear form H(d1, d2).
  double operator()(const TangentPerturbation& d1, const TangentPerturbation& d2) const;
  double smallest_eigenvalue() const;
};

HessianOperator hessian_operator(const CurvatureTensor& t, const UpperMetric& g);

/// Geodesic descent on the det-1 slice with Armijo backtracking; switches to
/// Newton steps near the minimum when the Hessian is positive definite.
/// Throws NonFiniteError if a non-finite value appears.
SolveReport solve_einstein(const CurvatureTensor& t, const UpperMetric& g0,
                           const SolveOptions& opts = {});

struct EinsteinCheck {
  double lambda = 0.0;
  double residual = 0.0;
  bool passed = false;
};

/// lambda = R(g)/n, residual = |Ric - lambda g_ab|_F,
/// passed iff residual <= tol max(1, |lambda|).
EinsteinCheck verify_einstein(const CurvatureTensor& t, const UpperMetric& g, double tol);

}  // namespace einmetric
