#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pgg/penalty.hpp"
#include "pgg/types.hpp"

namespace pgg {

enum class NonzeroDist { Gaussian, Bernoulli };
enum class SolverKind { Pgg, Apgg, Omp, Irls, L1 };

std::string to_string(NonzeroDist dist);
std::string to_string(SolverKind kind);
NonzeroDist parse_nonzero_dist(const std::string& name);
SolverKind parse_solver_kind(const std::string& name);

/// Entries i.i.d. N(0, 1/M).
Matrix gen_matrix(Index m, Index n, std::uint64_t seed);
/// K-sparse, support uniform over K-subsets, scaled to unit l2 norm.
Vector gen_signal(Index n, Index k, NonzeroDist dist, std::uint64_t seed);
/// Gaussian direction scaled to the requested MSNR; an infinite msnr gives zero noise.
/// Throws ConfigError("zero signal power") when Ax = 0.
Vector gen_noise(const Vector& ax, double msnr_db, std::uint64_t seed);

/// 20 log10(||x*|| / ||x_hat - x*||), capped at +300 dB.
double rsnr_db(const Vector& x_hat, const Vector& x_star);
inline constexpr double kRsnrCapDb = 300.0;

/// Student-t 95% interval for the mean. Throws ConfigError for fewer than 2 samples.
std::pair<double, double> ci95(const std::vector<double>& samples);

/// SplitMix64-style mix of a base seed with a list of indices.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts);

struct ExperimentSpec {
  std::string experiment_id = "experiment";
  Index m = 0;
  Index n = 0;
  std::vector<Index> k_values;
  NonzeroDist dist = NonzeroDist::Gaussian;
  Penalty penalty{PenaltyKind::Mcp};
  std::vector<double> nonconvexity;  // empty: penalty used as given
  std::vector<double> kappas{1e-4};
  std::vector<double> msnr_db{std::numeric_limits<double>::infinity()};
  int trials = 1;
  double success_threshold_db = 40.0;
  std::uint64_t base_seed = 0;
  SolverKind solver = SolverKind::Pgg;
  int apgg_steps = 4;
  double irls_p = 0.5;
  std::optional<std::int64_t> max_iters;  // default: iteration bound from the constants, capped
  double gamma = 0.5;                     // assumed null space constant for that bound
  bool shared_matrix = false;
  bool stop_at_first_failure = true;      // phase runs only
  int jobs = 1;
  bool timing = false;                    // fill wall_ms

  void validate() const;  // throws ConfigError
};

inline constexpr std::int64_t kHarnessIterCap = 2000000;

struct TrialRecord {
  Index k = 0;
  double nonconvexity = 0.0;
  double kappa = 0.0;
  double msnr_db = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  double zeta = 0.0;  // NaN when the solver has no projection
  double rsnr_db = 0.0;
  bool success = false;
  std::int64_t iters = 0;
  double wall_ms = 0.0;  // NaN unless timed
};

struct ExperimentRecord {
  Index k = 0;
  double nonconvexity = 0.0;
  double kappa = 0.0;
  double msnr_db = 0.0;
  std::vector<TrialRecord> trials;
  double success_rate = 0.0;
  double mean_rsnr_db = 0.0;
  double ci95_low = 0.0;
  double ci95_high = 0.0;
  double wall_ms = 0.0;
};

struct KmaxRecord {
  double nonconvexity = 0.0;
  double kappa = 0.0;
  double msnr_db = 0.0;
  Index kmax = 0;
};

struct PhaseResult {
  std::vector<ExperimentRecord> cells;
  std::vector<KmaxRecord> kmax;
};

/// Penalty actually used for one nonconvexity level (unit alpha, argscale set).
Penalty cell_penalty(const ExperimentSpec& spec, double nonconvexity);
/// Nonconvexity levels swept; a single entry holding the given penalty's value when none are set.
std::vector<double> nonconvexity_levels(const ExperimentSpec& spec);

/// One trial, deterministic in (spec, k, trial).
TrialRecord run_trial(const ExperimentSpec& spec, Index k, double nonconvexity, double kappa,
                      double msnr_db, int trial);
ExperimentRecord run_cell(const ExperimentSpec& spec, Index k, double nonconvexity, double kappa,
                          double msnr_db);

/// Sweeps K ascending for every (nonconvexity, kappa, msnr) group. Kmax is the
/// smallest K with any failed trial, minus one.
PhaseResult run_phase(const ExperimentSpec& spec);
/// Full factorial over nonconvexity x K x kappa x msnr.
std::vector<ExperimentRecord> run_rsnr_sweep(const ExperimentSpec& spec);

std::string trials_csv(const ExperimentSpec& spec, const std::vector<ExperimentRecord>& cells);
std::string aggregate_csv(const ExperimentSpec& spec, const std::vector<ExperimentRecord>& cells);

}  // namespace pgg
