#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "einmetric/solver.h"
#include "einmetric/spd_manifold.h"
#include "einmetric/tensor_core.h"

// Verification machinery kept apart from the solver: fixture generators,
// a derivative-free minimizer over an unconstrained parameterization, finite
// difference oracles and the multistart uniqueness harness.
//
// brute_force_minimize shares no optimization code with solve_einstein; it
// only uses scalar_curvature and an eigen-decomposition exponential.
namespace einmetric::oracle {

enum class FixtureKind { constant, pullback, perturbed };

struct FixtureSpec {
  int n = 3;
  FixtureKind kind = FixtureKind::constant;
  double kappa = 1.0;
  /// Perturbation size for `perturbed`; halved until positivity_check passes.
  double eps = 0.05;
  std::uint64_t seed = 0;
};

struct Fixture {
  CurvatureTensor tensor;
  /// Pullback matrix (identity unless kind == pullback).
  Matrix a;
  /// Perturbation size actually used (after any halving).
  double eps_used = 0.0;
};

/// Deterministic given the spec. Throws InvariantError for kappa <= 0 on
/// pullback/perturbed kinds, and Error if 20 halvings of eps do not yield a
/// strictly positive sampled tensor.
Fixture generate_fixture(const FixtureSpec& spec);

/// Random matrix with condition number <= max_cond (singular values
/// log-uniform in [max_cond^{-1/2}, max_cond^{1/2}], random orthogonal factors).
Matrix random_well_conditioned(int n, std::mt19937_64& rng, double max_cond = 10.0);

/// Uniformly random orthogonal matrix.
Matrix random_orthogonal(int n, std::mt19937_64& rng);

/// Symmetric traceless matrix with Gaussian coordinates, rescaled to the
/// given Frobenius norm.
Matrix random_traceless_symmetric(int n, std::mt19937_64& rng, double frobenius);

/// exp(S) for symmetric S via eigen-decomposition.
Matrix sym_exp(const Matrix& s);

/// exp(S) with S random traceless symmetric of Frobenius norm `scale`.
UpperMetric random_metric(int n, std::mt19937_64& rng, double scale = 1.5);

/// Random unit-norm tangent vector at g.
TangentPerturbation random_tangent(const UpperMetric& g, std::mt19937_64& rng);

struct BruteForceResult {
  UpperMetric g = UpperMetric::identity(3);
  double r = 0.0;
  bool converged = false;
  int evaluations = 0;
};

/// Minimizes R(exp S) over symmetric traceless S with Nelder-Mead, restarted
/// from 5 seeded starting points and polished by repeated restarts from the
/// incumbent. `tol` bounds the final simplex diameter in S coordinates.
BruteForceResult brute_force_minimize(const CurvatureTensor& t, std::uint64_t seed,
                                      double tol = 1e-9);

/// (R(m(h)) - R(m(-h))) / 2h along geodesic(g, d, .).
double finite_diff_directional(const CurvatureTensor& t, const UpperMetric& g,
                               const TangentPerturbation& d, double h);

/// (R(m(h)) - 2 R(g) + R(m(-h))) / h^2 along geodesic(g, d, .). The two
/// differences are formed from geodesic increments to avoid cancellation.
double finite_diff_second(const CurvatureTensor& t, const UpperMetric& g,
                          const TangentPerturbation& d, double h);

struct MultistartResult {
  double max_distance = 0.0;
  int converged = 0;
  int failed = 0;
  std::vector<SolveReport> runs;
  /// Index into runs of the converged run with the smallest final R.
  int best = -1;
};

/// Runs solve_einstein from the identity followed by k-1 random starts
/// (random_metric with scale 1.5). Non-converged runs are counted in
/// `failed` and excluded from the distance. Runs are independent and
/// reduced in start order.
MultistartResult multistart(const CurvatureTensor& t, int k, std::uint64_t seed,
                            const SolveOptions& opts = {}, bool include_identity = true);

/// Max pairwise geodesic distance between minimizers of k random starts.
MultistartResult multistart_uniqueness(const CurvatureTensor& t, int k, std::uint64_t seed);

}  // namespace einmetric::oracle
