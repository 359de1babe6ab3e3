#include "einmetric/io.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "einmetric/errors.h"

namespace einmetric::io {

namespace {

int read_dim(const json& doc) {
  if (!doc.is_object()) throw FormatError("document must be a JSON object");
  if (!doc.contains("n") || !doc["n"].is_number_integer()) {
    throw FormatError("missing integer field \"n\"");
  }
  const int n = doc["n"].get<int>();
  if (n < 1 || n > 64) throw FormatError("field \"n\" out of range");
  return n;
}

double read_number(const json& v, const char* what) {
  if (!v.is_number()) throw FormatError(std::string(what) + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw FormatError(std::string(what) + ": non-finite value");
  return x;
}

}  // namespace

LoadedTensor tensor_from_json(const json& doc, bool force_symmetrize) {
  const int n = read_dim(doc);
  if (n < 3) throw DimensionError("tensor dimension must be >= 3");
  const std::string format = doc.value("format", std::string("dense"));
  if (!doc.contains("components") || !doc["components"].is_array()) {
    throw FormatError("missing array field \"components\"");
  }
  const json& comps = doc["components"];
  bool symmetrize = force_symmetrize;
  if (doc.contains("symmetrize")) {
    if (!doc["symmetrize"].is_boolean()) throw FormatError("\"symmetrize\" must be a boolean");
    symmetrize = symmetrize || doc["symmetrize"].get<bool>();
  }

  Tensor4 raw(n);
  if (format == "dense") {
    if (comps.size() != raw.size()) {
      throw FormatError("dense tensor needs n^4 = " + std::to_string(raw.size()) +
                        " components, got " + std::to_string(comps.size()));
    }
    std::vector<double> values;
    values.reserve(raw.size());
    for (const auto& v : comps) values.push_back(read_number(v, "component"));
    raw = Tensor4(n, std::move(values));
  } else if (format == "sparse") {
    for (const auto& e : comps) {
      if (!e.is_array() || e.size() != 5) throw FormatError("sparse entry must be [a,b,c,d,value]");
      int idx[4];
      for (int k = 0; k < 4; ++k) {
        if (!e[static_cast<std::size_t>(k)].is_number_integer()) {
          throw FormatError("sparse index must be an integer");
        }
        idx[k] = e[static_cast<std::size_t>(k)].get<int>();
        if (idx[k] < 0 || idx[k] >= n) throw FormatError("sparse index out of range");
      }
      raw(idx[0], idx[1], idx[2], idx[3]) = read_number(e[4], "sparse value");
    }
  } else {
    throw FormatError("unknown tensor format \"" + format + "\"");
  }

  const SymmetryReport rep = validate_symmetries(raw, kDefaultSymmetryTol);
  if (symmetrize) return LoadedTensor{project_curvature_type(raw), rep, true};
  return LoadedTensor{CurvatureTensor::from_raw(std::move(raw), kDefaultSymmetryTol), rep, false};
}

json tensor_to_json(const CurvatureTensor& t, TensorFormat format) {
  const int n = t.dim();
  json doc;
  doc["n"] = n;
  if (format == TensorFormat::dense) {
    doc["format"] = "dense";
    doc["components"] = t.raw().components();
  } else {
    doc["format"] = "sparse";
    json entries = json::array();
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          for (int d = 0; d < n; ++d)
            if (t(a, b, c, d) != 0.0) entries.push_back({a, b, c, d, t(a, b, c, d)});
    doc["components"] = std::move(entries);
  }
  doc["symmetrize"] = false;
  return doc;
}

LoadedMetric metric_from_json(const json& doc) {
  const int n = read_dim(doc);
  if (!doc.contains("g_upper") || !doc["g_upper"].is_array() || doc["g_upper"].size() != static_cast<std::size_t>(n)) {
    throw FormatError("\"g_upper\" must be an n x n array of rows");
  }
  Matrix g(n, n);
  for (int i = 0; i < n; ++i) {
    const json& row = doc["g_upper"][static_cast<std::size_t>(i)];
    if (!row.is_array() || row.size() != static_cast<std::size_t>(n)) {
      throw FormatError("\"g_upper\" row has the wrong length");
    }
    for (int j = 0; j < n; ++j) g(i, j) = read_number(row[static_cast<std::size_t>(j)], "metric entry");
  }
  const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
  if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw InvariantError("metric is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (g + g.transpose()), Eigen::EigenvaluesOnly);
  if (!(es.eigenvalues()(0) > 0.0)) throw InvariantError("metric is not positive definite");
  const double logdet = es.eigenvalues().array().log().sum();
  const Matrix sym = 0.5 * (g + g.transpose());
  // Already on the slice up to rounding: keep the stored values bit for bit.
  if (std::abs(logdet) <= 1e-13) return LoadedMetric{UpperMetric(sym), 1.0};
  return LoadedMetric{normalize_det(sym), std::exp(-logdet / n)};
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json metric_to_json(const UpperMetric& g) {
  return json{{"n", g.dim()}, {"g_upper", matrix_to_json(g.upper())}};
}

json plane_to_json(const Plane& p) {
  return json{{"v", std::vector<double>(p.v().data(), p.v().data() + p.v().size())},
              {"q", std::vector<double>(p.q().data(), p.q().data() + p.q().size())}};
}

json solve_report_to_json(const SolveReport& rep) {
  json doc;
  doc["minimizer"] = matrix_to_json(rep.minimizer.upper());
  doc["lambda"] = rep.lambda;
  doc["grad_norm"] = rep.grad_norm;
  doc["einstein_residual"] = rep.einstein_residual;
  doc["residual_bound_factor"] = rep.residual_bound_factor;
  doc["iterations"] = rep.iterations;
  doc["newton_steps"] = rep.newton_steps;
  doc["converged"] = rep.converged;
  doc["status"] = to_string(rep.status);
  doc["r_trace"] = rep.r_trace;
  return doc;
}

json bounds_report_to_json(const BoundsReport& rep, int n) {
  json doc;
  doc["n"] = n;
  doc["applicable"] = rep.applicable;
  doc["r_delta"] = rep.r_delta;
  doc["r_s"] = rep.r_s;
  doc["r_s_direction"] = "upper_bound_estimate";
  if (rep.applicable) {
    doc["ratio"] = rep.ratio;
    doc["lam_min_floor"] = rep.lam_min_floor;
    doc["lam_max_ceiling"] = rep.lam_max_ceiling;
    doc["sharp_lam_max_ceiling"] = rep.sharp_lam_max_ceiling;
    doc["box_depends_on_estimate"] = true;
  }
  json pos;
  pos["verdict"] = to_string(rep.positivity.verdict);
  pos["min_numerator"] = rep.positivity.min_numerator;
  pos["tolerance"] = rep.positivity.tolerance;
  pos["witness"] = plane_to_json(rep.positivity.witness);
  doc["positivity"] = std::move(pos);
  return doc;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": invalid JSON (" + e.what() + ")");
  }
}

void write_atomic(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write " + tmp.string());
    out << text;
    if (!out) throw FormatError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

LoadedTensor read_tensor_file(const std::filesystem::path& path, bool force_symmetrize) {
  return tensor_from_json(read_json_file(path), force_symmetrize);
}

LoadedMetric read_metric_file(const std::filesystem::path& path) {
  return metric_from_json(read_json_file(path));
}

}  // namespace einmetric::io
