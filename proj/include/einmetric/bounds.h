#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "einmetric/spd_manifold.h"
#include "einmetric/tensor_core.h"

namespace einmetric {

// Quantitative estimates for strictly sectionally positive tensors: the
// minimal sectional curvature R_s under the identity metric, scalar-curvature
// lower bounds, eigenvalue-product bounds for det-1 metrics and the
// eigenvalue box outside of which R(g) exceeds R(identity).

struct SectionalMinimum {
  double r_s = 0.0;
  /// Orthonormal (under the identity) frame attaining r_s.
  Plane argmin;
};

/// Samples random orthonormal 2-frames (plus all coordinate planes, which are
/// tried first), then refines the ten best by projected gradient descent on
/// the frame. Every value returned is attained by an actual plane, so the
/// result is an upper bound on the true minimum. Deterministic given `seed`.
SectionalMinimum min_sectional_estimate(const CurvatureTensor& t, int n_samples = 2000,
                                        int refine_steps = 200, std::uint64_t seed = 0);

struct TwoRsCheck {
  double r_delta = 0.0;
  double r_s = 0.0;
  /// R(identity) - 2 r_s.
  double margin = 0.0;
  bool passed = false;
};

/// R(identity) >= 2 R_s, with slack 1e-9.
TwoRsCheck check_two_rs_bound(const CurvatureTensor& t, int n_samples = 2000,
                              std::uint64_t seed = 0);

struct ScalarLowerBound {
  double bound = 0.0;
  double actual = 0.0;
  bool passed = false;
};

/// R(g) >= 2 lambda_1 lambda_2 r_s with lambda_1, lambda_2 the two largest
/// eigenvalues of g^ab. Requires r_s >= 0.
ScalarLowerBound scalar_lower_bound(const CurvatureTensor& t, const UpperMetric& g, double r_s);

/// lam1^{n/(n-1)}, the claimed lower bound on the product of the two largest
/// eigenvalues of a det-1 metric whose largest eigenvalue is lam1.
/// This claim does not hold in general: see sharp_product_bound_from_max.
double product_bound_from_max(double lam1, int n);

/// lam1^{(n-2)/(n-1)}: the attainable lower bound for the same quantity
/// (remaining n-1 eigenvalues all equal to lam1^{-1/(n-1)}).
double sharp_product_bound_from_max(double lam1, int n);

/// lam2^{-2/(n-1)} with lam2 the smallest eigenvalue, 0 < lam2 <= 1.
double product_bound_from_min(double lam2, int n);

enum class Positivity { strictly_positive_sampled, nonnegative_sampled, violated };

std::string to_string(Positivity p);

struct PositivityVerdict {
  Positivity verdict = Positivity::nonnegative_sampled;
  /// Smallest numerator found over unit orthonormal frames.
  double min_numerator = 0.0;
  /// 1e-10 times the largest component magnitude.
  double tolerance = 0.0;
  /// Plane attaining min_numerator; a certificate when verdict == violated.
  Plane witness;
};

PositivityVerdict positivity_check(const CurvatureTensor& t, int n_samples = 2000,
                                   std::uint64_t seed = 0);

struct BoundsReport {
  bool applicable = false;
  double r_delta = 0.0;
  double r_s = 0.0;
  /// r_delta / (2 r_s).
  double ratio = 0.0;
  /// ratio^{-(n-1)/2}.
  double lam_min_floor = 0.0;
  /// ratio^{(n-1)/n}.
  double lam_max_ceiling = 0.0;
  /// ratio^{(n-1)/(n-2)}, the ceiling implied by the sharp product bound.
  double sharp_lam_max_ceiling = 0.0;
  PositivityVerdict positivity;
};

/// Fills the report from sampled R_s. Not applicable (applicable == false)
/// when the sampled R_s is not positive. Since r_s is an upper-bound
/// estimate, the box depends on the sampling.
BoundsReport coercivity_region(const CurvatureTensor& t, int n_samples = 2000,
                               std::uint64_t seed = 0);

/// Two largest eigenvalues (descending) of g^ab.
std::pair<double, double> two_largest_eigenvalues(const UpperMetric& g);

}  // namespace einmetric
