#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "pgg/analysis.hpp"
#include "pgg/harness.hpp"
#include "pgg/penalty.hpp"
#include "pgg/pinv.hpp"
#include "pgg/solver.hpp"

namespace pgg {

using Json = nlohmann::json;

// Binary layout: u32 rows, u32 cols, then rows*cols little-endian float64, row-major.
// Files ending in .csv are read and written as comma-separated text instead.
Matrix read_matrix(const std::filesystem::path& path);
void write_matrix(const std::filesystem::path& path, const Matrix& mx);
/// Accepts N x 1 or 1 x N storage.
Vector read_vector(const std::filesystem::path& path);
void write_vector(const std::filesystem::path& path, const Vector& v);

Json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

/// {"kind":"mcp","sigma":1.0,"p":0.5,"prescale":1.0,"argscale":1.0}; missing fields take defaults.
Penalty penalty_from_json(const Json& j);
Json penalty_to_json(const Penalty& pen);

/// Accepts a number, "inf", or a list of either.
std::vector<double> msnr_list_from_json(const Json& j);

ExperimentSpec spec_from_json(const Json& j);
Json spec_to_json(const ExperimentSpec& spec);

/// A recovery problem on disk. Paths in the file are relative to the manifest.
struct Manifest {
  std::filesystem::path a_path;
  std::filesystem::path y_path;
  std::optional<std::filesystem::path> x_star_path;
  Penalty penalty{PenaltyKind::Abs};
  SolverConfig config;
  ProjectionMode mode = ProjectionMode::Exact;
  int approx_steps = 4;
  double approx_scale = kBenIsraelDefaultScale;
  double noise_norm = 0.0;  // used by the bound report
  double tau = 0.0;         // compressible tail bound
};

Manifest manifest_from_json(const Json& j, const std::filesystem::path& base_dir);
Manifest read_manifest(const std::filesystem::path& path);
SensingModel build_model(const Manifest& manifest, Matrix a);

Json constants_to_json(const ConvergenceConstants& c);

}  // namespace pgg
