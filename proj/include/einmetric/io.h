#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "einmetric/bounds.h"
#include "einmetric/solver.h"
#include "einmetric/spd_manifold.h"
#include "einmetric/tensor_core.h"

// JSON file formats.
//
// Tensor file:
//   {"n": 3, "format": "dense", "components": [ n^4 numbers, index order a,b,c,d ],
//    "symmetrize": false}
//   {"n": 3, "format": "sparse", "components": [[a, b, c, d, value], ...]}
// Sparse entries are literal: entries implied by symmetry must be listed
// unless the tensor is symmetrized on load.
//
// Metric file:
//   {"n": 3, "g_upper": [[...], [...], [...]]}
// The loader rescales to determinant 1 and records the factor applied.
namespace einmetric::io {

using json = nlohmann::json;

enum class TensorFormat { dense, sparse };

struct LoadedTensor {
  CurvatureTensor tensor;
  SymmetryReport symmetry;
  bool symmetrized = false;
};

/// Parses a tensor document. When neither the document nor `force_symmetrize`
/// asks for symmetrization, validate_symmetries must pass at 1e-9; otherwise
/// throws InvariantError naming the failing symmetry class.
LoadedTensor tensor_from_json(const json& doc, bool force_symmetrize = false);
json tensor_to_json(const CurvatureTensor& t, TensorFormat format = TensorFormat::dense);

struct LoadedMetric {
  UpperMetric metric;
  /// det(G)^{-1/n}, the factor the file contents were multiplied by.
  double applied_scale = 1.0;
};

LoadedMetric metric_from_json(const json& doc);
json metric_to_json(const UpperMetric& g);
json matrix_to_json(const Matrix& m);

json solve_report_to_json(const SolveReport& rep);
json bounds_report_to_json(const BoundsReport& rep, int n);
json plane_to_json(const Plane& p);

/// Throws FormatError when the file is missing or not valid JSON.
json read_json_file(const std::filesystem::path& path);

/// Writes `text` to a temporary sibling and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& text);

LoadedTensor read_tensor_file(const std::filesystem::path& path, bool force_symmetrize = false);
LoadedMetric read_metric_file(const std::filesystem::path& path);

}  // namespace einmetric::io
