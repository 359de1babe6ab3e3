// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "einmetric/bounds.h"
#include "einmetric/io.h"
#include "einmetric/oracle.h"
#include "einmetric/solver.h"
#include "test_support.h"

namespace em = einmetric;
using em::Matrix;
using em::UpperMetric;
using em::oracle::FixtureKind;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::vector<std::string> failed;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      failed.push_back(what);
    }
  }
};

em::CurvatureTensor fixture(int n, FixtureKind kind, std::uint64_t seed) {
  em::oracle::FixtureSpec spec;
  spec.n = n;
  spec.kind = kind;
  spec.seed = seed;
  return em::oracle::generate_fixture(spec).tensor;
}

// Mixed pool of fixtures for the derivative checks.
em::CurvatureTensor derivative_fixture(int i) {
  const int n = 3 + i % 3;
  switch (i % 3) {
    case 0: return em::constant_curvature(n, 1.0 + 0.1 * i);
    case 1: return fixture(n, FixtureKind::pullback, static_cast<std::uint64_t>(i));
    default: return fixture(n, FixtureKind::perturbed, static_cast<std::uint64_t>(i));
  }
}

Outcome criterion_1() {
  Outcome o;
  const auto t0 = Clock::now();
  double worst_dist = 0.0, worst_lambda = 0.0;
  for (int n : {3, 4, 5})
    for (double kappa : {0.5, 1.0, 2.0}) {
      const em::SolveReport r =
          em::solve_einstein(em::constant_curvature(n, kappa), UpperMetric::identity(n));
      worst_dist = std::max(worst_dist, em::geodesic_distance(r.minimizer, UpperMetric::identity(n)));
      const double expect = kappa * (n - 1);
      worst_lambda = std::max(worst_lambda, std::abs(r.lambda - expect) / expect);
      o.require(r.converged, "n=" + std::to_string(n) + " did not converge");
    }
  const double secs = seconds_since(t0);
  o.require(worst_dist <= 1e-10, "distance above 1e-10");
  o.require(worst_lambda <= 1e-12, "lambda error above 1e-12");
  o.require(secs < 1.0, "runtime over 1 s");
  o.detail << "max distance " << worst_dist << ", max lambda rel error " << worst_lambda
           << ", " << secs << " s";
  return o;
}

Outcome criterion_2() {
  Outcome o;
  const auto t0 = Clock::now();
  double worst = 0.0;
  int runs = 0;
  for (int n : {3, 4}) {
    std::mt19937_64 rng(1000 + n);
    for (int i = 0; i < 10; ++i, ++runs) {
      const Matrix a = em::oracle::random_well_conditioned(n, rng);
      const em::CurvatureTensor t = em::pullback(em::constant_curvature(n, 1.0), a);
      const em::SolveReport r = em::solve_einstein(t, UpperMetric::identity(n));
      const UpperMetric expect = em::normalize_det((a.transpose() * a).inverse());
      worst = std::max(worst, em::geodesic_distance(r.minimizer, expect));
      o.require(r.converged, "run did not converge");
    }
  }
  const double secs = seconds_since(t0);
  o.require(worst <= 1e-7, "distance above 1e-7");
  o.require(secs < 10.0, "runtime over 10 s");
  o.detail << runs << " pullbacks, max distance " << worst << ", " << secs << " s";
  return o;
}

Outcome criterion_3() {
  Outcome o;
  std::mt19937_64 rng(3);
  double worst_rel = 0.0, worst_order = 1e300;
  for (int i = 0; i < 50; ++i) {
    const em::CurvatureTensor t = derivative_fixture(i);
    const UpperMetric g = em::oracle::random_metric(t.dim(), rng, 1.0);
    const em::TangentPerturbation d = em::oracle::random_tangent(g, rng);
    const em::TangentPerturbation grad = em::riemannian_gradient(t, g);
    const double an = em::inner_product(g, grad, d);
    const double scale = std::max(std::abs(an), em::norm(g, grad));
    const double fd = em::oracle::finite_diff_directional(t, g, d, 1e-5);
    worst_rel = std::max(worst_rel, std::abs(fd - an) / scale);
    const double e1 = std::abs(em::oracle::finite_diff_directional(t, g, d, 2e-2) - an);
    const double e2 = std::abs(em::oracle::finite_diff_directional(t, g, d, 1e-2) - an);
    worst_order = std::min(worst_order, std::log2(e1 / e2));
  }
  o.require(worst_rel <= 1e-6, "relative error above 1e-6");
  o.require(worst_order >= 1.9, "observed order below 1.9");
  o.detail << "50 triples, worst relative error " << worst_rel << ", min observed order "
           << worst_order;
  return o;
}

Outcome criterion_4() {
  Outcome o;
  std::mt19937_64 rng(4);
  double worst_rel = 0.0;
  for (int i = 0; i < 50; ++i) {
    const em::CurvatureTensor t = derivative_fixture(i + 1);
    const UpperMetric g = em::oracle::random_metric(t.dim(), rng, 1.0);
    const em::TangentPerturbation d = em::oracle::random_tangent(g, rng);
    const double hq = em::hessian_quadratic_form(t, g, d);
    const double fd = em::oracle::finite_diff_second(t, g, d, 1e-3);
    worst_rel = std::max(worst_rel, std::abs(fd - hq) / std::abs(hq));
  }
  double min_eig = 1e300;
  const em::CurvatureTensor positive[] = {fixture(3, FixtureKind::perturbed, 41),
                                          fixture(4, FixtureKind::pullback, 42),
                                          em::constant_curvature(5, 1.0)};
  for (int i = 0; i < 50; ++i) {
    const em::CurvatureTensor& t = positive[i % 3];
    const UpperMetric g = em::oracle::random_metric(t.dim(), rng, 1.5);
    min_eig = std::min(min_eig, em::hessian_operator(t, g).smallest_eigenvalue());
  }
  const UpperMetric id = UpperMetric::identity(3);
  const em::TangentPerturbation d(id, Eigen::Vector3d(1, -1, 0).asDiagonal().toDenseMatrix());
  const double closed = em::hessian_quadratic_form(em::constant_curvature(3, 1.0), id, d);
  o.require(worst_rel <= 1e-5, "second-difference mismatch above 1e-5");
  o.require(min_eig > 0.0, "non-positive Hessian eigenvalue");
  o.require(std::abs(closed - 4.0) <= 1e-12, "closed-form value 4 not reproduced");
  o.detail << "worst relative error " << worst_rel << ", smallest eigenvalue over 50 points "
           << min_eig << ", diag(1,-1,0) value " << closed;
  return o;
}

Outcome criterion_5() {
  Outcome o;
  double worst_spread = 0.0, worst_brute = 0.0;
  int failed = 0;
  for (int i = 0; i < 10; ++i) {
    const int n = 3 + i % 2;
    const em::CurvatureTensor t = fixture(n, FixtureKind::perturbed, 500 + i);
    const em::oracle::MultistartResult ms = em::oracle::multistart_uniqueness(t, 10, 500 + i);
    worst_spread = std::max(worst_spread, ms.max_distance);
    failed += ms.failed;
    const em::SolveReport s = em::solve_einstein(t, UpperMetric::identity(n));
    const em::oracle::BruteForceResult b = em::oracle::brute_force_minimize(t, 500 + i);
    worst_brute = std::max(worst_brute, em::geodesic_distance(s.minimizer, b.g));
    o.require(s.converged && b.converged, "fixture " + std::to_string(i) + " did not converge");
  }
  o.require(failed == 0, "multistart runs failed");
  o.require(worst_spread <= 1e-6, "multistart spread above 1e-6");
  o.require(worst_brute <= 1e-5, "brute force disagrees above 1e-5");
  o.detail << "max multistart spread " << worst_spread << ", max solver/brute-force distance "
           << worst_brute << ", failed runs " << failed;
  return o;
}

// Random det-1 metric with one eigenvalue pinned, the rest log-normal.
UpperMetric metric_with_eigenvalue(int n, double pinned, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 0.5);
  em::Vector l(n);
  l(0) = std::log(pinned);
  double rest = 0.0;
  for (int i = 1; i < n; ++i) rest += (l(i) = normal(rng));
  const double shift = (-l(0) - rest) / (n - 1);
  for (int i = 1; i < n; ++i) l(i) += shift;
  const Matrix q = em::oracle::random_orthogonal(n, rng);
  return em::normalize_det(q * l.array().exp().matrix().asDiagonal() * q.transpose());
}

Outcome criterion_6() {
  Outcome o;
  const double slack = 1e-9;

  // Two R_s bound and the scalar lower bound, with the exact n = 3 sectional minimum.
  int v4 = 0, v5 = 0;
  std::mt19937_64 rng(6);
  std::vector<em::CurvatureTensor> pos3;
  for (int s = 0; s < 10; ++s) {
    pos3.push_back(fixture(3, FixtureKind::pullback, 600 + s));
    pos3.push_back(fixture(3, FixtureKind::perturbed, 600 + s));
  }
  for (const auto& t : pos3) {
    const double rs = em::testing::exact_rs_n3(t);
    if (em::scalar_curvature(t, UpperMetric::identity(3)) < 2.0 * rs - slack) ++v4;
  }
  for (int i = 0; i < 100; ++i) {
    const em::CurvatureTensor& t = pos3[static_cast<std::size_t>(i) % pos3.size()];
    const UpperMetric g = em::oracle::random_metric(3, rng, 1.5);
    if (!em::scalar_lower_bound(t, g, em::testing::exact_rs_n3(t)).passed) ++v5;
  }

  // Eigenvalue-product bounds over 10^3 random det-1 matrices per n.
  int v6 = 0, v7 = 0;
  double worst6 = 0.0;
  for (int n = 3; n <= 6; ++n)
    for (int i = 0; i < 1000; ++i) {
      const UpperMetric g(em::testing::random_det1_spd(n, rng, 1.0));
      const auto [l1, l2] = em::two_largest_eigenvalues(g);
      const double b6 = em::product_bound_from_max(l1, n);
      if (l1 * l2 < b6 - slack) {
        ++v6;
        worst6 = std::max(worst6, b6 / (l1 * l2));
      }
      if (l1 * l2 < em::product_bound_from_min(g.eigenvalues()(0), n) - slack) ++v7;
    }

  // Exterior of the coercivity box: 100 metrics just outside each face.
  int v8 = 0, fixtures8 = 0;
  double worst8 = 0.0;
  for (int s = 0; s < 6; ++s) {
    for (FixtureKind kind : {FixtureKind::constant, FixtureKind::pullback, FixtureKind::perturbed}) {
      const int n = 3 + s % 2;
      const em::CurvatureTensor t = fixture(n, kind, 800 + s);
      const em::BoundsReport rep = em::coercivity_region(t);
      if (!rep.applicable) continue;
      ++fixtures8;
      for (int i = 0; i < 100; ++i) {
        const UpperMetric g =
            i % 2 ? metric_with_eigenvalue(n, 1.01 * rep.lam_max_ceiling, rng)
                  : metric_with_eigenvalue(n, 0.99 * rep.lam_min_floor, rng);
        const double margin = em::scalar_curvature(t, g) - rep.r_delta;
        if (margin < -slack) {
          ++v8;
          worst8 = std::min(worst8, margin / rep.r_delta);
        }
      }
    }
  }

  const em::BoundsReport box = em::coercivity_region(em::constant_curvature(3, 1.0));
  const bool box_ok = std::abs(box.lam_min_floor - 1.0 / 3.0) <= 1e-12 &&
                      std::abs(box.lam_max_ceiling - std::pow(3.0, 2.0 / 3.0)) <= 1e-12;

  o.require(v4 == 0, "two-R_s bound violated");
  o.require(v5 == 0, "scalar lower bound violated");
  o.require(v6 == 0, "product bound from the largest eigenvalue violated");
  o.require(v7 == 0, "product bound from the smallest eigenvalue violated");
  o.require(v8 == 0, "coercivity exterior inequality violated");
  o.require(box_ok, "n=3 box mismatch");
  o.detail << "violations: two-R_s " << v4 << "/20, scalar bound " << v5
           << "/100, max-eigenvalue product " << v6 << "/4000 (worst ratio " << worst6
           << "), min-eigenvalue product " << v7 << "/4000, exterior " << v8 << "/"
           << 100 * fixtures8 << " (worst relative margin " << worst8 << "); box ["
           << box.lam_min_floor << ", " << box.lam_max_ceiling << "]";
  return o;
}

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

Outcome criterion_7() {
  Outcome o;
  std::mt19937_64 rng(7);
  std::vector<em::CurvatureTensor> tensors = {
      fixture(3, FixtureKind::perturbed, 700), fixture(4, FixtureKind::pullback, 701),
      em::constant_curvature(3, -1.0)};
  {
    std::normal_distribution<double> normal(0.0, 1.0);
    em::Tensor4 raw(4);
    std::vector<double> c(raw.size());
    for (double& x : c) x = normal(rng);
    tensors.push_back(em::project_curvature_type(em::Tensor4(4, std::move(c))));
  }
  long mismatches = 0, planes = 0;
  for (const auto& t : tensors) {
    const int n = t.dim();
    std::vector<UpperMetric> metrics;
    for (int m = 0; m < 10; ++m) metrics.push_back(em::oracle::random_metric(n, rng, 1.5));
    for (int p = 0; p < 10000; ++p, ++planes) {
      const em::Plane plane = em::testing::random_plane(n, rng);
      const int ref = sign_of(em::sectional_numerator(t, plane));
      for (const auto& g : metrics) {
        if (sign_of(em::sectional_curvature(t, g, plane)) != ref) ++mismatches;
      }
    }
  }
  const em::PositivityVerdict a = em::positivity_check(em::constant_curvature(3, -1.0));
  const em::PositivityVerdict b = em::positivity_check(em::constant_curvature(3, -1.0));
  const bool witness_ok = a.verdict == em::Positivity::violated &&
                          a.witness.v() == b.witness.v() && a.witness.q() == b.witness.q() &&
                          em::sectional_numerator(em::constant_curvature(3, -1.0), a.witness) < 0.0;
  o.require(mismatches == 0, "sign changed with the metric");
  o.require(witness_ok, "negative witness not reproducible");
  o.detail << planes << " planes x 10 metrics, sign mismatches " << mismatches
           << ", kappa=-1 witness numerator " << a.min_numerator;
  return o;
}

int run_cli(const std::string& args, const std::string& log) {
  const std::string cmd =
      std::string("\"") + EINMETRIC_CLI_PATH + "\" " + args + " > \"" + log + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome criterion_8() {
  namespace fs = std::filesystem;
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / "einmetric_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto p = [&](const std::string& name) { return "\"" + (dir / name).string() + "\""; };
  const std::string log = (dir / "log.txt").string();

  // Shipped example.
  const int shipped = run_cli(std::string("solve \"") + EINMETRIC_DATA_DIR + "/constant_n3_k1.json\"", log);
  const em::io::json shipped_doc = em::io::json::parse(slurp(log), nullptr, false);
  const bool lambda2 = !shipped_doc.is_discarded() && shipped_doc.value("lambda", 0.0) == 2.0;
  o.require(shipped == 0 && lambda2, "shipped example did not print lambda = 2 with exit 0");

  // Round trip: generate, solve, verify against the closed-form minimizer.
  o.require(run_cli("generate --kind pullback --seed 8 --minimizer-output " + p("min.json") + " " +
                        p("t.json"), log) == 0,
            "generate failed");
  o.require(run_cli("solve " + p("t.json") + " --output " + p("rep.json"), log) == 0, "solve failed");
  const em::io::json rep = em::io::read_json_file(dir / "rep.json");
  const UpperMetric solved =
      em::io::metric_from_json({{"n", 3}, {"g_upper", rep["minimizer"]}}).metric;
  const UpperMetric closed = em::io::read_metric_file(dir / "min.json").metric;
  o.require(em::geodesic_distance(solved, closed) <= 1e-8, "round trip minimizer mismatch");
  o.require(run_cli("verify " + p("t.json") + " " + p("min.json"), log) == 0,
            "verify rejected the closed-form minimizer");
  o.require(run_cli("generate --kind perturbed --seed 8 --format sparse " + p("s.json"), log) == 0 &&
                run_cli("generate --kind perturbed --seed 8 " + p("d.json"), log) == 0 &&
                em::io::read_tensor_file(dir / "s.json").tensor ==
                    em::io::read_tensor_file(dir / "d.json").tensor,
            "dense/sparse round trip mismatch");

  // Exit codes.
  std::ofstream(dir / "id.json") << em::io::metric_to_json(UpperMetric::identity(3)).dump();
  std::ofstream(dir / "neg.json")
      << em::io::tensor_to_json(em::constant_curvature(3, -1.0)).dump();
  o.require(run_cli("solve " + p("missing.json"), log) == 1, "missing file not exit 1");
  o.require(run_cli("solve " + p("t.json") + " --max-iter 1 --no-newton", log) == 2,
            "non-convergence not exit 2");
  o.require(run_cli("verify " + p("t.json") + " " + p("id.json"), log) == 3,
            "failed verification not exit 3");
  o.require(run_cli("bounds " + p("neg.json"), log) == 4, "violated positivity not exit 4");

  // Seed reproducibility.
  run_cli("generate --kind perturbed --n 4 --seed 21 " + p("a.json"), log);
  run_cli("generate --kind perturbed --n 4 --seed 21 " + p("b.json"), log);
  o.require(slurp((dir / "a.json").string()) == slurp((dir / "b.json").string()),
            "generate not reproducible");
  run_cli("solve " + p("a.json") + " --starts 3 --seed 5 --output " + p("s1.json"), log);
  run_cli("solve " + p("a.json") + " --starts 3 --seed 5 --output " + p("s2.json"), log);
  o.require(slurp((dir / "s1.json").string()) == slurp((dir / "s2.json").string()),
            "solve not reproducible");

  fs::remove_all(dir);
  o.detail << "shipped example exit " << shipped << ", lambda "
           << (shipped_doc.is_discarded() ? std::string("?") : shipped_doc["lambda"].dump());
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"space-form identity", criterion_1},
      {"closed-form recovery under pullback", criterion_2},
      {"gradient matches central differences", criterion_3},
      {"Hessian matches second differences and is positive", criterion_4},
      {"uniqueness across starts and brute force", criterion_5},
      {"bounds suite", criterion_6},
      {"metric independence of positivity", criterion_7},
      {"CLI contract", criterion_8},
  };
  int failures = 0;
  int index = 1;
  for (const Criterion& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    std::cout << "criterion " << index++ << " [" << c.name << "]: " << (o.pass ? "PASS" : "FAIL")
              << " (" << o.detail.str() << ")";
    for (const std::string& f : o.failed) std::cout << " [" << f << "]";
    std::cout << std::endl;
    failures += o.pass ? 0 : 1;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
