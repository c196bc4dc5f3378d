// pgg: sparse recovery and experiment driver.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "pgg/analysis.hpp"
#include "pgg/error.hpp"
#include "pgg/harness.hpp"
#include "pgg/io.hpp"
#include "pgg/solver.hpp"

namespace fs = std::filesystem;
using namespace pgg;

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<std::string> solver;
  std::optional<double> kappa;
  std::optional<std::string> msnr;
  std::optional<std::string> penalty;
  std::optional<std::int64_t> max_iters;
  bool timing = false;
};

struct Options {
  std::string spec;
  std::string out;
  Overrides ov;
  double gamma = 0.5;
  std::optional<double> m0;
  int steps = 6;
  double scale = kBenIsraelDefaultScale;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--spec", o.spec, "input JSON (experiment spec or problem manifest)")->required();
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--kappa", o.ov.kappa, "step size");
  cmd->add_option("--penalty", o.ov.penalty, "penalty as a JSON object");
  cmd->add_option("--max-iters", o.ov.max_iters, "iteration cap");
}

void add_experiment(CLI::App* cmd, Options& o) {
  cmd->add_option("--seed", o.ov.seed, "base seed");
  cmd->add_option("--jobs", o.ov.jobs, "worker threads");
  cmd->add_option("--solver", o.ov.solver, "pgg | apgg | omp | irls | l1");
  cmd->add_option("--msnr", o.ov.msnr, "measurement SNR in dB, or inf");
  cmd->add_flag("--timing", o.ov.timing, "record wall-clock time per trial");
}

Penalty parse_penalty_arg(const std::string& text) {
  try {
    return penalty_from_json(Json::parse(text));
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("--penalty: ") + e.what());
  }
}

ExperimentSpec load_spec(const Options& o) {
  Json j = read_json(o.spec);
  if (o.ov.seed) j["base_seed"] = *o.ov.seed;
  if (o.ov.jobs) j["jobs"] = *o.ov.jobs;
  if (o.ov.solver) j["solver"] = *o.ov.solver;
  if (o.ov.kappa) j["kappa"] = *o.ov.kappa;
  if (o.ov.msnr) {
    try {
      j["msnr_db"] = *o.ov.msnr == "inf" ? Json("inf") : Json(std::stod(*o.ov.msnr));
    } catch (const std::exception&) {
      throw ConfigError("--msnr must be a number or inf");
    }
  }
  if (o.ov.penalty) j["penalty"] = Json::parse(*o.ov.penalty, nullptr, false);
  if (o.ov.max_iters) j["max_iters"] = *o.ov.max_iters;
  if (j.contains("penalty") && j["penalty"].is_discarded()) throw ConfigError("--penalty is not valid JSON");
  ExperimentSpec spec = spec_from_json(j);
  spec.timing = o.ov.timing;
  return spec;
}

Manifest load_manifest(const Options& o) {
  Manifest m = read_manifest(o.spec);
  if (o.ov.kappa) m.config.kappa = *o.ov.kappa;
  if (o.ov.max_iters) m.config.max_iters = *o.ov.max_iters;
  if (o.ov.penalty) m.penalty = parse_penalty_arg(*o.ov.penalty);
  m.config.validate();
  return m;
}

fs::path out_dir(const Options& o) {
  if (o.out.empty()) throw ConfigError("--out is required");
  fs::path dir = o.out;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError(fmt::format("cannot create {}: {}", dir.string(), ec.message()));
  return dir;
}

int cmd_solve(const Options& o) {
  const Manifest m = load_manifest(o);
  Matrix a = read_matrix(m.a_path);
  const Vector y = read_vector(m.y_path);
  std::optional<Vector> x_star;
  if (m.x_star_path) x_star = read_vector(*m.x_star_path);
  if (y.size() != a.rows()) throw ConfigError("y length does not match A");
  if (x_star && x_star->size() != a.cols()) throw ConfigError("x_star length does not match A");
  const fs::path dir = out_dir(o);

  const SensingModel model = build_model(m, std::move(a));
  const RecoveryResult res = solve(model, m.penalty, y, m.config, x_star ? &*x_star : nullptr);

  write_vector(dir / "x_hat.bin", res.x_hat);
  Json out = {{"x_hat_path", "x_hat.bin"},
              {"iters_run", res.iters_run},
              {"final_residual", res.final_residual}};
  if (x_star) out["rsnr"] = rsnr_db(res.x_hat, *x_star);
  write_text(dir / "result.json", out.dump(2) + "\n");
  return 0;
}

Json kmax_json(const PhaseResult& r) {
  Json list = Json::array();
  for (const KmaxRecord& k : r.kmax) {
    Json row = {{"kappa", k.kappa}, {"kmax", k.kmax}};
    row["nonconvexity"] = std::isnan(k.nonconvexity) ? Json(nullptr) : Json(k.nonconvexity);
    row["msnr_db"] = std::isinf(k.msnr_db) ? Json("inf") : Json(k.msnr_db);
    list.push_back(row);
  }
  return list;
}

int cmd_phase(const Options& o) {
  const ExperimentSpec spec = load_spec(o);
  const fs::path dir = out_dir(o);
  const PhaseResult r = run_phase(spec);
  write_text(dir / "trials.csv", trials_csv(spec, r.cells));
  write_text(dir / "aggregate.csv", aggregate_csv(spec, r.cells));
  write_text(dir / "kmax.json", kmax_json(r).dump(2) + "\n");
  write_text(dir / "spec.json", spec_to_json(spec).dump(2) + "\n");
  for (const KmaxRecord& k : r.kmax) {
    std::cout << fmt::format("nonconvexity={} kappa={} msnr={} kmax={}\n", k.nonconvexity, k.kappa,
                             k.msnr_db, k.kmax);
  }
  return 0;
}

int cmd_rsnr(const Options& o) {
  const ExperimentSpec spec = load_spec(o);
  const fs::path dir = out_dir(o);
  const auto cells = run_rsnr_sweep(spec);
  write_text(dir / "trials.csv", trials_csv(spec, cells));
  write_text(dir / "aggregate.csv", aggregate_csv(spec, cells));
  write_text(dir / "spec.json", spec_to_json(spec).dump(2) + "\n");
  return 0;
}

int cmd_analyze(const Options& o) {
  const Manifest m = load_manifest(o);
  Matrix a = read_matrix(m.a_path);
  const Vector y = read_vector(m.y_path);
  if (y.size() != a.rows()) throw ConfigError("y length does not match A");
  const SensingModel model = build_model(m, std::move(a));

  double m0 = 0.0;
  if (o.m0) {
    m0 = *o.m0;
  } else if (m.x_star_path) {
    const Vector x_star = read_vector(*m.x_star_path);
    if (x_star.size() != model.cols()) throw ConfigError("x_star length does not match A");
    m0 = (model.pinv() * y - x_star).norm();
  } else {
    throw ConfigError("--m0 is required when the manifest has no x_star");
  }

  const ConvergenceConstants c = constants(m.penalty, model, o.gamma, m0);
  const Theorem3Check t3 = check_theorem3(m.penalty, c);
  const double kappa = m.config.kappa;
  Json report = constants_to_json(c);
  report["theorem3_ok"] = t3.ok;
  report["theorem3_margin"] = t3.margin;
  report["nonconvexity"] = m.penalty.nonconvexity();
  report["penalty"] = penalty_to_json(m.penalty);
  report["kappa"] = kappa;
  report["noise_norm"] = m.noise_norm;
  report["tau"] = m.tau;
  report["projection"] = model.mode() == ProjectionMode::Exact ? "exact" : "approx";
  report["bounds"] = {
      {"pgg", error_bound_pgg(c, c.alpha, c.n, kappa, m.noise_norm)},
      {"apgg", error_bound_apgg(c, kappa, m.noise_norm)},
      {"compressible", error_bound_compressible(c, kappa, m.noise_norm, m.tau, c.norm_A)},
      {"max_iters", default_max_iters(c.c3, c.m0, c.d, c.alpha, c.n, kappa)}};
  const std::string text = report.dump(2) + "\n";
  if (o.out.empty()) {
    std::cout << text;
  } else {
    write_text(out_dir(o) / "analysis.json", text);
  }
  return 0;
}

int cmd_pinv_report(const Options& o) {
  Matrix a;
  const fs::path spec = o.spec;
  if (spec.extension() == ".json") {
    a = read_matrix(read_manifest(spec).a_path);
  } else {
    a = read_matrix(spec);
  }
  std::string text = "k,zeta,d\n";
  for (const BenIsraelStep& s : ben_israel_history(a, o.steps, o.scale)) {
    text += fmt::format("{},{:.17g},{:.17g}\n", s.k, s.zeta, s.d);
  }
  if (o.out.empty()) {
    std::cout << text;
  } else {
    write_text(out_dir(o) / "pinv_report.csv", text);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Projected generalized gradient sparse recovery"};
  app.require_subcommand(1);
  Options o;

  auto* solve_cmd = app.add_subcommand("solve", "recover x from a problem manifest");
  add_common(solve_cmd, o);

  auto* phase_cmd = app.add_subcommand("phase", "success rate versus sparsity");
  add_common(phase_cmd, o);
  add_experiment(phase_cmd, o);

  auto* rsnr_cmd = app.add_subcommand("rsnr", "RSNR over step sizes and MSNRs");
  add_common(rsnr_cmd, o);
  add_experiment(rsnr_cmd, o);

  auto* analyze_cmd = app.add_subcommand("analyze", "convergence constants and error bounds");
  add_common(analyze_cmd, o);
  analyze_cmd->add_option("--gamma", o.gamma, "assumed null space constant")->capture_default_str();
  analyze_cmd->add_option("--m0", o.m0, "radius M0 (default: measured from x_star)");

  auto* pinv_cmd = app.add_subcommand("pinv-report", "zeta and d per Ben-Israel step");
  pinv_cmd->add_option("--spec", o.spec, "matrix file or problem manifest")->required();
  pinv_cmd->add_option("--out", o.out, "output directory");
  pinv_cmd->add_option("--steps", o.steps, "number of steps")->capture_default_str();
  pinv_cmd->add_option("--scale", o.scale, "start scale in (0, 2)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*solve_cmd) return cmd_solve(o);
    if (*phase_cmd) return cmd_phase(o);
    if (*rsnr_cmd) return cmd_rsnr(o);
    if (*analyze_cmd) return cmd_analyze(o);
    if (*pinv_cmd) return cmd_pinv_report(o);
  } catch (const NumericalError& e) {
    std::cerr << "pgg: numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "pgg: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
