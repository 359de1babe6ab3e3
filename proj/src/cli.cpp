#include "einmetric/cli.h"

#include <CLI11.hpp>
#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include "einmetric/bounds.h"
#include "einmetric/errors.h"
#include "einmetric/io.h"
#include "einmetric/oracle.h"
#include "einmetric/solver.h"

namespace einmetric::cli {

namespace {

using io::json;

constexpr double kGradcheckGradTol = 1e-6;
constexpr double kGradcheckHessTol = 1e-5;

struct CommonOptions {
  double tol = 1e-10;
  int max_iter = 500;
  std::uint64_t seed = 0;
  int starts = 1;
  bool newton = true;
  bool symmetrize = false;
  std::string output;
};

void add_common(CLI::App* app, CommonOptions& o) {
  app->add_option("--tol", o.tol, "Gradient / verification tolerance")->capture_default_str();
  app->add_option("--max-iter", o.max_iter, "Maximum solver iterations")->capture_default_str();
  app->add_option("--seed", o.seed, "Seed for randomized steps")->capture_default_str();
  app->add_option("--starts", o.starts, "Number of solver starts")->capture_default_str();
  app->add_flag("--newton,!--no-newton", o.newton, "Use Newton steps near the minimum");
  app->add_flag("--symmetrize", o.symmetrize, "Project the input onto curvature type");
  app->add_option("--output", o.output, "Write the report to PATH instead of stdout");
}

json options_json(const CommonOptions& o) {
  return json{{"tol", o.tol},       {"max_iter", o.max_iter}, {"seed", o.seed},
              {"starts", o.starts}, {"newton", o.newton},     {"symmetrize", o.symmetrize}};
}

json with_header(json body, const std::string& command, json options) {
  body["version"] = EINMETRIC_VERSION;
  body["command"] = command;
  body["options"] = std::move(options);
  return body;
}

// Report goes to --output (atomically) or stdout; `summary` is printed to
// stdout only when the report went to a file.
void emit(const json& doc, const std::string& output, const std::string& summary,
          std::ostream& out) {
  const std::string text = doc.dump(2) + "\n";
  if (output.empty() || output == "-") {
    out << text;
  } else {
    io::write_atomic(output, text);
    if (!summary.empty()) out << summary << "\n";
  }
}

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(17);
  s << x;
  return s.str();
}

SolveOptions solve_options(const CommonOptions& o) {
  SolveOptions opts;
  opts.tol_grad = o.tol;
  opts.max_iter = o.max_iter;
  opts.use_newton = o.newton;
  opts.seed = o.seed;
  return opts;
}

int cmd_solve(const std::string& path, const CommonOptions& o, std::ostream& out) {
  if (o.starts < 1) throw InvariantError("--starts must be >= 1");
  const io::LoadedTensor in = io::read_tensor_file(path, o.symmetrize);
  const SolveOptions opts = solve_options(o);
  opts.validate();

  const oracle::MultistartResult ms = oracle::multistart(in.tensor, o.starts, o.seed, opts, true);
  const std::size_t pick = ms.best >= 0 ? static_cast<std::size_t>(ms.best) : 0;
  const SolveReport& rep = ms.runs[pick];

  json doc = io::solve_report_to_json(rep);
  doc["n"] = in.tensor.dim();
  doc["symmetrized_input"] = in.symmetrized;
  doc["multistart"] = json{{"starts", o.starts},
                           {"converged", ms.converged},
                           {"failed", ms.failed},
                           {"selected_start", pick},
                           {"max_pairwise_distance", ms.max_distance}};
  emit(with_header(std::move(doc), "solve", options_json(o)), o.output,
       "lambda = " + fmt(rep.lambda) + " converged = " + (rep.converged ? "true" : "false"), out);
  return rep.converged ? kSuccess : kNotConverged;
}

int cmd_verify(const std::string& tensor_path, const std::string& metric_path,
               const CommonOptions& o, std::ostream& out) {
  const io::LoadedTensor in = io::read_tensor_file(tensor_path, o.symmetrize);
  const io::LoadedMetric m = io::read_metric_file(metric_path);
  if (m.metric.dim() != in.tensor.dim()) {
    throw DimensionError("tensor and metric files have different dimensions");
  }
  const EinsteinCheck c = verify_einstein(in.tensor, m.metric, o.tol);
  out << "lambda = " << fmt(c.lambda) << " residual = " << fmt(c.residual)
      << (c.passed ? " passed" : " failed") << "\n";
  return c.passed ? kSuccess : kVerificationFailed;
}

int cmd_bounds(const std::string& path, int samples, const CommonOptions& o, std::ostream& out,
               std::ostream& err) {
  if (samples < 1) throw InvariantError("--samples must be >= 1");
  const io::LoadedTensor in = io::read_tensor_file(path, o.symmetrize);
  const BoundsReport rep = coercivity_region(in.tensor, samples, o.seed);
  json opts = options_json(o);
  opts["samples"] = samples;
  json doc = io::bounds_report_to_json(rep, in.tensor.dim());

  std::string summary = "positivity = " + to_string(rep.positivity.verdict);
  if (rep.applicable) {
    summary += " box = [" + fmt(rep.lam_min_floor) + ", " + fmt(rep.lam_max_ceiling) + "]";
  }
  emit(with_header(std::move(doc), "bounds", std::move(opts)), o.output, summary, out);

  switch (rep.positivity.verdict) {
    case Positivity::violated: return kPositivityViolated;
    case Positivity::nonnegative_sampled:
      err << "warning: tensor is only non-negative on sampled planes; bounds not applicable\n";
      return kSuccess;
    case Positivity::strictly_positive_sampled: return kSuccess;
  }
  return kSuccess;
}

struct GenerateOptions {
  std::string kind = "constant";
  int n = 3;
  double kappa = 1.0;
  double eps = 0.05;
  std::string format = "dense";
  std::string minimizer_output;
};

int cmd_generate(const GenerateOptions& g, const CommonOptions& o, std::ostream& out) {
  oracle::FixtureSpec spec;
  spec.n = g.n;
  spec.kappa = g.kappa;
  spec.eps = g.eps;
  spec.seed = o.seed;
  if (g.kind == "constant") spec.kind = oracle::FixtureKind::constant;
  else if (g.kind == "pullback") spec.kind = oracle::FixtureKind::pullback;
  else if (g.kind == "perturbed") spec.kind = oracle::FixtureKind::perturbed;
  else throw InvariantError("unknown --kind \"" + g.kind + "\"");
  if (g.format != "dense" && g.format != "sparse") throw InvariantError("unknown --format");

  const oracle::Fixture fx = oracle::generate_fixture(spec);
  const json doc = io::tensor_to_json(
      fx.tensor, g.format == "dense" ? io::TensorFormat::dense : io::TensorFormat::sparse);
  emit(doc, o.output, "", out);

  if (!g.minimizer_output.empty()) {
    // Space-form pullbacks are Einstein exactly at (A^T A)^{-1}.
    const Matrix h = fx.a.transpose() * fx.a;
    const UpperMetric m = normalize_det(h.inverse());
    if (spec.kind == oracle::FixtureKind::perturbed) {
      throw InvariantError("--minimizer-output has no closed form for perturbed fixtures");
    }
    io::write_atomic(g.minimizer_output, io::metric_to_json(m).dump(2) + "\n");
  }
  return kSuccess;
}

double relative_error(double approx, double exact, double floor) {
  const double diff = std::abs(approx - exact);
  if (diff == 0.0) return 0.0;
  return diff / std::max({std::abs(exact), floor, 1e-300});
}

int cmd_gradcheck(const std::string& path, const CommonOptions& o, std::ostream& out) {
  const io::LoadedTensor in = io::read_tensor_file(path, o.symmetrize);
  const CurvatureTensor& t = in.tensor;
  std::mt19937_64 rng(o.seed);
  double worst_grad = 0.0;
  double worst_hess = 0.0;
  for (int i = 0; i < 5; ++i) {
    const UpperMetric g = oracle::random_metric(t.dim(), rng, 1.0);
    const TangentPerturbation d = oracle::random_tangent(g, rng);
    const TangentPerturbation grad = riemannian_gradient(t, g);
    const double an = inner_product(g, grad, d);
    const double fd = oracle::finite_diff_directional(t, g, d, 1e-4);
    worst_grad = std::max(worst_grad, relative_error(fd, an, 1e-3 * norm(g, grad)));

    const double hq = hessian_quadratic_form(t, g, d);
    const double fd2 = oracle::finite_diff_second(t, g, d, 1e-3);
    worst_hess = std::max(worst_hess,
                          relative_error(fd2, hq, 1e-3 * std::abs(scalar_curvature(t, g))));
  }
  const bool ok = worst_grad <= kGradcheckGradTol && worst_hess <= kGradcheckHessTol;
  out << "worst gradient relative error = " << fmt(worst_grad) << "\n"
      << "worst hessian relative error = " << fmt(worst_hess) << "\n"
      << (ok ? "gradcheck passed" : "gradcheck failed") << "\n";
  return ok ? kSuccess : kVerificationFailed;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Einstein metrics for curvature-type tensors", "einmetric"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(EINMETRIC_VERSION));

  CommonOptions common;
  std::string tensor_path, metric_path;
  int samples = 2000;
  GenerateOptions gen;

  CLI::App* solve = app.add_subcommand("solve", "Find the Einstein metric of a tensor");
  solve->add_option("tensor", tensor_path, "Tensor file")->required();
  add_common(solve, common);

  CLI::App* verify = app.add_subcommand("verify", "Check the Einstein condition for a metric");
  verify->add_option("tensor", tensor_path, "Tensor file")->required();
  verify->add_option("metric", metric_path, "Metric file")->required();
  add_common(verify, common);

  CLI::App* bounds = app.add_subcommand("bounds", "Sectional positivity and coercivity box");
  bounds->add_option("tensor", tensor_path, "Tensor file")->required();
  bounds->add_option("--samples", samples, "Random planes to sample")->capture_default_str();
  add_common(bounds, common);

  CLI::App* generate = app.add_subcommand("generate", "Write a fixture tensor file");
  generate->add_option("--kind", gen.kind, "constant | pullback | perturbed")->capture_default_str();
  generate->add_option("--n", gen.n, "Dimension")->capture_default_str();
  generate->add_option("--kappa", gen.kappa, "Space-form curvature")->capture_default_str();
  generate->add_option("--eps", gen.eps, "Perturbation size")->capture_default_str();
  generate->add_option("--format", gen.format, "dense | sparse")->capture_default_str();
  generate->add_option("--minimizer-output", gen.minimizer_output,
                       "Also write the closed-form Einstein metric (constant/pullback)");
  generate->add_option("path", common.output, "Output path (default stdout)");
  add_common(generate, common);

  CLI::App* gradcheck = app.add_subcommand("gradcheck", "Finite-difference derivative checks");
  gradcheck->add_option("tensor", tensor_path, "Tensor file")->required();
  add_common(gradcheck, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kInputError;
  }

  try {
    if (*solve) return cmd_solve(tensor_path, common, out);
    if (*verify) return cmd_verify(tensor_path, metric_path, common, out);
    if (*bounds) return cmd_bounds(tensor_path, samples, common, out, err);
    if (*generate) return cmd_generate(gen, common, out);
    if (*gradcheck) return cmd_gradcheck(tensor_path, common, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

}  // namespace einmetric::cli
