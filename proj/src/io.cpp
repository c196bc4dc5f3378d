#include "pgg/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "pgg/error.hpp"

namespace fs = std::filesystem;

namespace pgg {
namespace {

static_assert(std::numeric_limits<double>::is_iec559);

template <class T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
    std::memcpy(&v, bytes, sizeof(T));
  }
  return v;
}

bool is_csv(const fs::path& path) { return path.extension() == ".csv"; }

Matrix read_csv_matrix(const fs::path& path, std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ConfigError(fmt::format("{}: bad number '{}'", path.string(), cell));
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ConfigError(path.string() + ": ragged CSV matrix");
    }
    rows.push_back(std::move(row));
  }
  Matrix mx(static_cast<Index>(rows.size()), rows.empty() ? 0 : static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < mx.rows(); ++i) {
    for (Index j = 0; j < mx.cols(); ++j) {
      mx(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return mx;
}

double num_or_inf(const Json& j, const char* what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "noiseless") return std::numeric_limits<double>::infinity();
  }
  throw ConfigError(fmt::format("{} must be a number or \"inf\"", what));
}

std::vector<double> number_list(const Json& j, const char* what) {
  std::vector<double> out;
  if (j.is_array()) {
    for (const Json& v : j) {
      if (!v.is_number()) throw ConfigError(fmt::format("{} entries must be numbers", what));
      out.push_back(v.get<double>());
    }
  } else if (j.is_number()) {
    out.push_back(j.get<double>());
  } else {
    throw ConfigError(fmt::format("{} must be a number or a list", what));
  }
  return out;
}

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ConfigError(fmt::format("field '{}' has the wrong type", key));
  }
}

Json num_json(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return nullptr;
  return v;
}

fs::path resolve(const fs::path& base, const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw ConfigError(fmt::format("manifest field '{}' must be a path string", key));
  }
  fs::path p = j.at(key).get<std::string>();
  return p.is_absolute() ? p : base / p;
}

}  // namespace

Matrix read_matrix(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  if (is_csv(path)) return read_csv_matrix(path, in);

  std::uint32_t header[2];
  if (!in.read(reinterpret_cast<char*>(header), sizeof(header))) {
    throw ConfigError(path.string() + ": truncated header");
  }
  const Index rows = to_little(header[0]);
  const Index cols = to_little(header[1]);
  Matrix mx(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      double v;
      if (!in.read(reinterpret_cast<char*>(&v), sizeof(v))) {
        throw ConfigError(path.string() + ": truncated data");
      }
      mx(i, j) = to_little(v);
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) throw ConfigError(path.string() + ": trailing bytes");
  return mx;
}

void write_matrix(const fs::path& path, const Matrix& mx) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  if (is_csv(path)) {
    for (Index i = 0; i < mx.rows(); ++i) {
      for (Index j = 0; j < mx.cols(); ++j) out << (j ? "," : "") << fmt::format("{:.17g}", mx(i, j));
      out << '\n';
    }
  } else {
    if (mx.rows() > std::numeric_limits<std::uint32_t>::max() ||
        mx.cols() > std::numeric_limits<std::uint32_t>::max()) {
      throw ConfigError("matrix too large for the binary format");
    }
    const std::uint32_t header[2] = {to_little(static_cast<std::uint32_t>(mx.rows())),
                                     to_little(static_cast<std::uint32_t>(mx.cols()))};
    out.write(reinterpret_cast<const char*>(header), sizeof(header));
    for (Index i = 0; i < mx.rows(); ++i) {
      for (Index j = 0; j < mx.cols(); ++j) {
        const double v = to_little(mx(i, j));
        out.write(reinterpret_cast<const char*>(&v), sizeof(v));
      }
    }
  }
  if (!out) throw ConfigError("failed writing " + path.string());
}

Vector read_vector(const fs::path& path) {
  Matrix mx = read_matrix(path);
  if (mx.cols() == 1) return mx.col(0);
  if (mx.rows() == 1) return mx.row(0).transpose();
  throw ConfigError(path.string() + ": expected a vector");
}

void write_vector(const fs::path& path, const Vector& v) { write_matrix(path, Matrix(v)); }

Json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
  if (!out) throw ConfigError("failed writing " + path.string());
}

Penalty penalty_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("penalty must be a JSON object");
  if (!j.contains("kind")) throw ConfigError("penalty needs a kind");
  return Penalty(parse_penalty_kind(get_or<std::string>(j, "kind", "")), get_or(j, "sigma", 1.0),
                 get_or(j, "p", 0.5), get_or(j, "prescale", 1.0), get_or(j, "argscale", 1.0));
}

Json penalty_to_json(const Penalty& pen) {
  return {{"kind", std::string(to_string(pen.kind()))},
          {"sigma", pen.sigma()},
          {"p", pen.p()},
          {"prescale", pen.prescale()},
          {"argscale", pen.argscale()}};
}

std::vector<double> msnr_list_from_json(const Json& j) {
  std::vector<double> out;
  if (j.is_array()) {
    for (const Json& v : j) out.push_back(num_or_inf(v, "msnr_db"));
  } else {
    out.push_back(num_or_inf(j, "msnr_db"));
  }
  return out;
}

ExperimentSpec spec_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("experiment spec must be a JSON object");
  ExperimentSpec s;
  s.experiment_id = get_or<std::string>(j, "experiment_id", s.experiment_id);
  s.m = get_or<Index>(j, "M", 0);
  s.n = get_or<Index>(j, "N", 0);
  if (!j.contains("K")) throw ConfigError("spec needs K");
  const Json& k = j.at("K");
  if (k.is_object()) {
    const Index from = get_or<Index>(k, "from", 1);
    const Index to = get_or<Index>(k, "to", 0);
    for (Index v = from; v <= to; ++v) s.k_values.push_back(v);
  } else {
    for (double v : number_list(k, "K")) {
      if (v != std::floor(v)) throw ConfigError("K values must be integers");
      s.k_values.push_back(static_cast<Index>(v));
    }
  }
  s.dist = parse_nonzero_dist(get_or<std::string>(j, "nonzero_dist", "gaussian"));
  if (j.contains("penalty")) s.penalty = penalty_from_json(j.at("penalty"));
  if (j.contains("nonconvexity")) s.nonconvexity = number_list(j.at("nonconvexity"), "nonconvexity");
  if (j.contains("kappa")) s.kappas = number_list(j.at("kappa"), "kappa");
  if (j.contains("msnr_db")) s.msnr_db = msnr_list_from_json(j.at("msnr_db"));
  s.trials = get_or(j, "trials", s.trials);
  s.success_threshold_db = get_or(j, "success_threshold_db", s.success_threshold_db);
  s.base_seed = get_or<std::uint64_t>(j, "base_seed", s.base_seed);
  s.solver = parse_solver_kind(get_or<std::string>(j, "solver", "pgg"));
  s.apgg_steps = get_or(j, "apgg_steps", s.apgg_steps);
  s.irls_p = get_or(j, "irls_p", s.irls_p);
  if (j.contains("max_iters") && !j.at("max_iters").is_null()) {
    s.max_iters = get_or<std::int64_t>(j, "max_iters", 0);
  }
  s.gamma = get_or(j, "gamma", s.gamma);
  s.shared_matrix = get_or(j, "shared_matrix", s.shared_matrix);
  s.stop_at_first_failure = get_or(j, "stop_at_first_failure", s.stop_at_first_failure);
  s.jobs = get_or(j, "jobs", s.jobs);
  s.validate();
  return s;
}

Json spec_to_json(const ExperimentSpec& s) {
  Json msnr = Json::array();
  for (double v : s.msnr_db) msnr.push_back(num_json(v));
  Json j = {{"experiment_id", s.experiment_id},
            {"M", s.m},
            {"N", s.n},
            {"K", s.k_values},
            {"nonzero_dist", to_string(s.dist)},
            {"penalty", penalty_to_json(s.penalty)},
            {"nonconvexity", s.nonconvexity},
            {"kappa", s.kappas},
            {"msnr_db", msnr},
            {"trials", s.trials},
            {"success_threshold_db", s.success_threshold_db},
            {"base_seed", s.base_seed},
            {"solver", to_string(s.solver)},
            {"apgg_steps", s.apgg_steps},
            {"irls_p", s.irls_p},
            {"gamma", s.gamma},
            {"shared_matrix", s.shared_matrix},
            {"stop_at_first_failure", s.stop_at_first_failure}};
  j["max_iters"] = s.max_iters ? Json(*s.max_iters) : Json(nullptr);
  return j;
}

Manifest manifest_from_json(const Json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw ConfigError("manifest must be a JSON object");
  Manifest m;
  m.a_path = resolve(base_dir, j, "A");
  m.y_path = resolve(base_dir, j, "y");
  if (j.contains("x_star") && !j.at("x_star").is_null()) m.x_star_path = resolve(base_dir, j, "x_star");
  if (j.contains("penalty")) m.penalty = penalty_from_json(j.at("penalty"));
  if (j.contains("config")) {
    const Json& c = j.at("config");
    m.config.kappa = get_or(c, "kappa", m.config.kappa);
    m.config.max_iters = get_or(c, "max_iters", m.config.max_iters);
    m.config.early_stop_tol = get_or(c, "early_stop_tol", m.config.early_stop_tol);
    m.config.trace_every = get_or(c, "trace_every", m.config.trace_every);
  }
  if (j.contains("projection")) {
    const Json& p = j.at("projection");
    const auto mode = get_or<std::string>(p, "mode", "exact");
    if (mode == "exact") {
      m.mode = ProjectionMode::Exact;
    } else if (mode == "approx") {
      m.mode = ProjectionMode::Approx;
    } else {
      throw ConfigError("projection mode must be exact or approx");
    }
    m.approx_steps = get_or(p, "steps", m.approx_steps);
    m.approx_scale = get_or(p, "scale", m.approx_scale);
  }
  m.noise_norm = get_or(j, "noise_norm", m.noise_norm);
  m.tau = get_or(j, "tau", m.tau);
  m.config.validate();
  return m;
}

Manifest read_manifest(const fs::path& path) {
  return manifest_from_json(read_json(path), path.parent_path());
}

SensingModel build_model(const Manifest& manifest, Matrix a) {
  if (manifest.mode == ProjectionMode::Exact) return exact_pinv(std::move(a));
  return ben_israel(std::move(a), manifest.approx_steps, manifest.approx_scale);
}

Json constants_to_json(const ConvergenceConstants& c) {
  return {{"gamma", num_json(c.gamma)}, {"M0", num_json(c.m0)},   {"C1", num_json(c.c1)},
          {"C2", num_json(c.c2)},       {"C3", num_json(c.c3)},   {"C4", num_json(c.c4)},
          {"C5", num_json(c.c5)},       {"C6", num_json(c.c6)},   {"C7", num_json(c.c7)},
          {"d", num_json(c.d)},         {"zeta", num_json(c.zeta)}, {"threshold", num_json(c.threshold)},
          {"alpha", num_json(c.alpha)}, {"rho", num_json(c.rho)}, {"N", c.n},
          {"norm_A", num_json(c.norm_A)}, {"norm_B", num_json(c.norm_B)},
          {"sigma_min", num_json(c.sigma_min)}};
}

}  // namespace pgg
