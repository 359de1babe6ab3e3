#include "einmetric/bounds.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "einmetric/errors.h"

namespace einmetric {

namespace {

constexpr int kRefineCandidates = 10;

struct Frame {
  Vector v;
  Vector q;
};

// Gram-Schmidt; returns false if the pair collapsed.
bool orthonormalize(Frame& f) {
  const double nv = f.v.norm();
  if (!(nv > 0.0)) return false;
  f.v /= nv;
  f.q -= f.v.dot(f.q) * f.v;
  const double nq = f.q.norm();
  if (!(nq > 1e-12)) return false;
  f.q /= nq;
  return true;
}

double numerator(const CurvatureTensor& t, const Frame& f) {
  return sectional_numerator(t, Plane(f.v, f.q));
}

// Partial derivatives of R(v,q,v,q) in v and q.
std::pair<Vector, Vector> frame_gradient(const CurvatureTensor& t, const Frame& f) {
  const int n = t.dim();
  Vector gv = Vector::Zero(n);
  Vector gq = Vector::Zero(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          const double r = t(a, b, c, d);
          if (r == 0.0) continue;
          gv(a) += r * f.q(b) * f.v(c) * f.q(d);
          gq(b) += r * f.v(a) * f.v(c) * f.q(d);
        }
  return {2.0 * gv, 2.0 * gq};
}

// Projected gradient descent on the Grassmannian of 2-planes with a simple
// expanding/halving step rule. Only strictly improving moves are taken.
Frame refine(const CurvatureTensor& t, Frame f, double value, int steps, double scale,
             double* out_value) {
  const int n = t.dim();
  double eta = 0.1 / scale;
  for (int k = 0; k < steps; ++k) {
    auto [gv, gq] = frame_gradient(t, f);
    const Matrix p = Matrix::Identity(n, n) - f.v * f.v.transpose() - f.q * f.q.transpose();
    gv = p * gv;
    gq = p * gq;
    const double gnorm = std::sqrt(gv.squaredNorm() + gq.squaredNorm());
    if (gnorm <= 1e-13 * scale) break;

    bool moved = false;
    while (eta * gnorm > 1e-16) {
      Frame trial{f.v - eta * gv, f.q - eta * gq};
      if (orthonormalize(trial)) {
        const double tv = numerator(t, trial);
        if (tv < value) {
          f = std::move(trial);
          value = tv;
          eta *= 1.5;
          moved = true;
          break;
        }
      }
      eta *= 0.5;
    }
    if (!moved) break;
  }
  *out_value = value;
  return f;
}

}  // namespace

SectionalMinimum min_sectional_estimate(const CurvatureTensor& t, int n_samples,
                                        int refine_steps, std::uint64_t seed) {
  if (n_samples < 1) throw InvariantError("min_sectional_estimate: n_samples must be >= 1");
  const int n = t.dim();
  const double scale = t.max_abs();

  std::vector<Frame> frames;
  frames.reserve(static_cast<std::size_t>(n * (n - 1) / 2 + n_samples));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      frames.push_back({Vector::Unit(n, i), Vector::Unit(n, j)});

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  while (static_cast<int>(frames.size()) < n * (n - 1) / 2 + n_samples) {
    Frame f{Vector(n), Vector(n)};
    for (int i = 0; i < n; ++i) f.v(i) = normal(rng);
    for (int i = 0; i < n; ++i) f.q(i) = normal(rng);
    if (orthonormalize(f)) frames.push_back(std::move(f));
  }

  std::vector<double> values(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) values[i] = numerator(t, frames[i]);

  // Ties resolve to the earliest candidate, so exact minima on coordinate
  // planes are reported as such.
  const double tie = 8.0 * std::numeric_limits<double>::epsilon() * std::max(scale, 1e-300);
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] < values[best] - tie) best = i;
  Frame best_frame = frames[best];
  double best_value = values[best];

  if (scale > 0.0 && refine_steps > 0) {
    std::vector<std::size_t> order(frames.size());
    std::iota(order.begin(), order.end(), 0);
    const std::size_t k = std::min<std::size_t>(kRefineCandidates, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](std::size_t a, std::size_t b) {
                        return values[a] < values[b] || (values[a] == values[b] && a < b);
                      });
    for (std::size_t i = 0; i < k; ++i) {
      double v = 0.0;
      Frame f = refine(t, frames[order[i]], values[order[i]], refine_steps, scale, &v);
      if (v < best_value - tie) {
        best_value = v;
        best_frame = std::move(f);
      }
    }
  }
  return SectionalMinimum{best_value, Plane(best_frame.v, best_frame.q)};
}

TwoRsCheck check_two_rs_bound(const CurvatureTensor& t, int n_samples, std::uint64_t seed) {
  TwoRsCheck out;
  out.r_delta = scalar_curvature(t, UpperMetric::identity(t.dim()));
  out.r_s = min_sectional_estimate(t, n_samples, 200, seed).r_s;
  out.margin = out.r_delta - 2.0 * out.r_s;
  out.passed = out.margin >= -1e-9;
  return out;
}

std::pair<double, double> two_largest_eigenvalues(const UpperMetric& g) {
  const Vector& ev = g.eigenvalues();
  const Eigen::Index n = ev.size();
  return {ev(n - 1), ev(n - 2)};
}

ScalarLowerBound scalar_lower_bound(const CurvatureTensor& t, const UpperMetric& g, double r_s) {
  if (r_s < 0.0) throw InvariantError("scalar_lower_bound: r_s must be non-negative");
  const auto [l1, l2] = two_largest_eigenvalues(g);
  ScalarLowerBound out;
  out.bound = 2.0 * l1 * l2 * r_s;
  out.actual = scalar_curvature(t, g);
  out.passed = out.actual >= out.bound - 1e-9;
  return out;
}

namespace {

void require_n(int n) {
  if (n < 3) throw DimensionError("eigenvalue product bounds require n >= 3");
}

}  // namespace

double product_bound_from_max(double lam1, int n) {
  require_n(n);
  if (!(lam1 >= 1.0)) throw InvariantError("largest eigenvalue of a det-1 metric must be >= 1");
  return std::pow(lam1, static_cast<double>(n) / (n - 1));
}

double sharp_product_bound_from_max(double lam1, int n) {
  require_n(n);
  if (!(lam1 >= 1.0)) throw InvariantError("largest eigenvalue of a det-1 metric must be >= 1");
  return std::pow(lam1, static_cast<double>(n - 2) / (n - 1));
}

double product_bound_from_min(double lam2, int n) {
  require_n(n);
  if (!(lam2 > 0.0 && lam2 <= 1.0)) {
    throw InvariantError("smallest eigenvalue of a det-1 metric must lie in (0, 1]");
  }
  return std::pow(lam2, -2.0 / (n - 1));
}

std::string to_string(Positivity p) {
  switch (p) {
    case Positivity::strictly_positive_sampled: return "strictly_positive_sampled";
    case Positivity::nonnegative_sampled: return "nonnegative_sampled";
    case Positivity::violated: return "violated";
  }
  return "unknown";
}

PositivityVerdict positivity_check(const CurvatureTensor& t, int n_samples, std::uint64_t seed) {
  const SectionalMinimum m = min_sectional_estimate(t, n_samples, 200, seed);
  const double tol = 1e-10 * t.max_abs();
  Positivity v = Positivity::nonnegative_sampled;
  if (m.r_s > tol) v = Positivity::strictly_positive_sampled;
  else if (m.r_s < -tol) v = Positivity::violated;
  return PositivityVerdict{v, m.r_s, tol, m.argmin};
}

BoundsReport coercivity_region(const CurvatureTensor& t, int n_samples, std::uint64_t seed) {
  BoundsReport rep{.positivity = positivity_check(t, n_samples, seed)};
  const int n = t.dim();
  rep.r_delta = scalar_curvature(t, UpperMetric::identity(n));
  rep.r_s = rep.positivity.min_numerator;
  if (!(rep.r_s > 0.0)) return rep;

  rep.applicable = true;
  rep.ratio = rep.r_delta / (2.0 * rep.r_s);
  rep.lam_min_floor = std::pow(rep.ratio, -(n - 1) / 2.0);
  rep.lam_max_ceiling = std::pow(rep.ratio, (n - 1.0) / n);
  rep.sharp_lam_max_ceiling = std::pow(rep.ratio, (n - 1.0) / (n - 2.0));
  return rep;
}

}  // namespace einmetric
