#include "pgg/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include "pgg/analysis.hpp"
#include "pgg/error.hpp"
#include "pgg/pinv.hpp"
#include "pgg/solver.hpp"

namespace pgg {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Runs fn(i) for i in [0, count) on up to `jobs` threads. The exception of the
// lowest failing index is rethrown so errors do not depend on scheduling.
template <class Fn>
void parallel_for(int count, int jobs, Fn&& fn) {
  const int workers = std::max(1, std::min(jobs, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex mu;
  int failed_at = count;
  std::exception_ptr failure;
  auto work = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (i < failed_at) {
          failed_at = i;
          failure = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

bool uses_penalty_grid(SolverKind kind) { return kind == SolverKind::Pgg || kind == SolverKind::Apgg; }

std::string solver_label(const ExperimentSpec& spec) {
  if (spec.solver == SolverKind::Apgg) return fmt::format("apgg({})", spec.apgg_steps);
  return to_string(spec.solver);
}

std::string penalty_label(const ExperimentSpec& spec) {
  switch (spec.solver) {
    case SolverKind::Omp:
    case SolverKind::Irls:
      return "none";
    case SolverKind::L1:
      return std::string(to_string(PenaltyKind::Abs));
    default:
      return std::string(to_string(spec.penalty.kind()));
  }
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", v);
}

std::string opt_num(double v) { return std::isnan(v) ? std::string() : num(v); }

std::string row_prefix(const ExperimentSpec& spec, const ExperimentRecord& cell) {
  return fmt::format("{},{},{},{},{},{},{},{},{}", spec.experiment_id, spec.m, spec.n, cell.k,
                     to_string(spec.dist), penalty_label(spec), num(cell.nonconvexity),
                     num(cell.kappa), num(cell.msnr_db));
}

}  // namespace

std::string to_string(NonzeroDist dist) {
  return dist == NonzeroDist::Gaussian ? "gaussian" : "bernoulli";
}

std::string to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::Pgg: return "pgg";
    case SolverKind::Apgg: return "apgg";
    case SolverKind::Omp: return "omp";
    case SolverKind::Irls: return "irls";
    case SolverKind::L1: return "l1";
  }
  return "?";
}

NonzeroDist parse_nonzero_dist(const std::string& name) {
  if (name == "gaussian") return NonzeroDist::Gaussian;
  if (name == "bernoulli") return NonzeroDist::Bernoulli;
  throw ConfigError("unknown nonzero distribution: " + name);
}

SolverKind parse_solver_kind(const std::string& name) {
  for (SolverKind k : {SolverKind::Pgg, SolverKind::Apgg, SolverKind::Omp, SolverKind::Irls,
                       SolverKind::L1}) {
    if (name == to_string(k)) return k;
  }
  throw ConfigError("unknown solver: " + name);
}

Matrix gen_matrix(Index m, Index n, std::uint64_t seed) {
  if (!(m >= 1 && m < n)) throw ConfigError("gen_matrix requires 1 <= M < N");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(m)));
  Matrix a(m, n);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) a(i, j) = normal(rng);
  }
  return a;
}

Vector gen_signal(Index n, Index k, NonzeroDist dist, std::uint64_t seed) {
  if (!(k >= 1 && k <= n)) throw ConfigError("gen_signal requires 1 <= K <= N");
  std::mt19937_64 rng(seed);
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  // Partial Fisher-Yates: the first k entries form a uniform k-subset.
  for (Index i = 0; i < k; ++i) {
    std::uniform_int_distribution<Index> pick(i, n - 1);
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
  }
  Vector x = Vector::Zero(n);
  std::normal_distribution<double> normal;
  std::bernoulli_distribution coin;
  for (Index i = 0; i < k; ++i) {
    double v = 0.0;
    if (dist == NonzeroDist::Gaussian) {
      while (v == 0.0) v = normal(rng);
    } else {
      v = coin(rng) ? 1.0 : -1.0;
    }
    x[idx[static_cast<std::size_t>(i)]] = v;
  }
  return x / x.norm();
}

Vector gen_noise(const Vector& ax, double msnr_db, std::uint64_t seed) {
  if (std::isinf(msnr_db) && msnr_db > 0) return Vector::Zero(ax.size());
  if (std::isnan(msnr_db) || std::isinf(msnr_db)) throw ConfigError("msnr must be finite or +inf");
  const double power = ax.norm();
  if (!(power > 0.0)) throw ConfigError("zero signal power");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vector g(ax.size());
  do {
    for (Index i = 0; i < g.size(); ++i) g[i] = normal(rng);
  } while (!(g.norm() > 0.0));
  return g * (power * std::pow(10.0, -msnr_db / 20.0) / g.norm());
}

double rsnr_db(const Vector& x_hat, const Vector& x_star) {
  if (x_hat.size() != x_star.size()) throw ConfigError("rsnr_db: length mismatch");
  const double err = (x_hat - x_star).norm();
  if (!(err > 0.0)) return kRsnrCapDb;
  return std::min(kRsnrCapDb, 20.0 * std::log10(x_star.norm() / err));
}

std::pair<double, double> ci95(const std::vector<double>& samples) {
  const auto n = samples.size();
  if (n < 2) throw ConfigError("ci95 needs at least 2 samples");
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double s : samples) ss += (s - mean) * (s - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  boost::math::students_t dist(static_cast<double>(n - 1));
  const double half = boost::math::quantile(dist, 0.975) * sd / std::sqrt(static_cast<double>(n));
  return {mean - half, mean + half};
}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = splitmix(base);
  for (std::uint64_t p : parts) h = splitmix(splitmix(h) ^ p);
  return h;
}

void ExperimentSpec::validate() const {
  if (!(n > m && m >= 1)) throw ConfigError("spec requires 1 <= M < N");
  if (k_values.empty()) throw ConfigError("spec has an empty K range");
  for (Index k : k_values) {
    if (k < 1 || k > m) throw ConfigError(fmt::format("K = {} outside 1..M", k));
  }
  if (trials < 1) throw ConfigError("trials must be at least 1");
  if (kappas.empty() || msnr_db.empty()) throw ConfigError("kappa and msnr grids must be nonempty");
  for (double k : kappas) {
    if (!(k > 0.0) || !std::isfinite(k)) throw ConfigError("kappa must be positive");
  }
  for (double s : msnr_db) {
    if (std::isnan(s) || s == -std::numeric_limits<double>::infinity()) {
      throw ConfigError("msnr must be finite or +inf");
    }
  }
  for (double v : nonconvexity) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("nonconvexity levels must be positive");
    if (penalty.kind() == PenaltyKind::Abs) throw ConfigError("the abs penalty has no nonconvexity to set");
  }
  if (solver == SolverKind::Apgg && apgg_steps < 0) throw ConfigError("apgg steps must be >= 0");
  if (solver == SolverKind::Irls && !(irls_p >= 0.0 && irls_p <= 1.0)) {
    throw ConfigError("irls p must lie in [0, 1]");
  }
  if (max_iters && *max_iters < 0) throw ConfigError("max_iters must be nonnegative");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in [0, 1)");
  if (jobs < 1) throw ConfigError("jobs must be at least 1");
}

std::vector<double> nonconvexity_levels(const ExperimentSpec& spec) {
  if (spec.solver == SolverKind::L1) return {0.0};
  if (!uses_penalty_grid(spec.solver)) return {kNaN};
  if (spec.nonconvexity.empty()) return {spec.penalty.nonconvexity()};
  return spec.nonconvexity;
}

Penalty cell_penalty(const ExperimentSpec& spec, double nonconvexity) {
  if (spec.solver == SolverKind::L1) return Penalty(PenaltyKind::Abs);
  if (spec.nonconvexity.empty()) return spec.penalty;
  return spec.penalty.with_nonconvexity(nonconvexity);
}

TrialRecord run_trial(const ExperimentSpec& spec, Index k, double nonconvexity, double kappa,
                      double msnr_db, int trial) {
  TrialRecord rec;
  rec.k = k;
  rec.nonconvexity = nonconvexity;
  rec.kappa = kappa;
  rec.msnr_db = msnr_db;
  rec.trial = trial;
  rec.seed = derive_seed(spec.base_seed, {static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(trial)});
  rec.zeta = kNaN;
  rec.wall_ms = kNaN;

  const std::uint64_t matrix_seed = spec.shared_matrix ? derive_seed(spec.base_seed, {~0ULL})
                                                       : derive_seed(rec.seed, {0});
  Matrix a = gen_matrix(spec.m, spec.n, matrix_seed);
  const Vector x_star = gen_signal(spec.n, k, spec.dist, derive_seed(rec.seed, {1}));
  Vector y = a * x_star;
  y += gen_noise(y, msnr_db, derive_seed(rec.seed, {2}));

  const auto start = std::chrono::steady_clock::now();
  try {
    RecoveryResult res;
    switch (spec.solver) {
      case SolverKind::Omp:
        res = omp_solve(a, y, k);
        break;
      case SolverKind::Irls:
        res = irls_solve(a, y, spec.irls_p);
        break;
      default: {
        const SensingModel model = spec.solver == SolverKind::Apgg
                                       ? ben_israel(std::move(a), spec.apgg_steps)
                                       : exact_pinv(std::move(a));
        rec.zeta = model.zeta();
        const Penalty pen = cell_penalty(spec, nonconvexity);
        SolverConfig cfg;
        cfg.kappa = kappa;
        if (spec.max_iters) {
          cfg.max_iters = *spec.max_iters;
        } else {
          const double m0 = (model.pinv() * y - x_star).norm();
          const ConvergenceConstants c = constants(pen, model, spec.gamma, std::max(m0, 1e-12));
          cfg.max_iters = std::min(
              kHarnessIterCap, default_max_iters(c.c3, c.m0, c.d, c.alpha, c.n, kappa));
        }
        res = solve(model, pen, y, cfg);
      }
    }
    rec.iters = res.iters_run;
    rec.rsnr_db = rsnr_db(res.x_hat, x_star);
  } catch (const NumericalError&) {
    rec.rsnr_db = kNaN;
  }
  if (spec.timing) {
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  rec.success = rec.rsnr_db > spec.success_threshold_db;
  return rec;
}

ExperimentRecord run_cell(const ExperimentSpec& spec, Index k, double nonconvexity, double kappa,
                          double msnr_db) {
  ExperimentRecord cell;
  cell.k = k;
  cell.nonconvexity = nonconvexity;
  cell.kappa = kappa;
  cell.msnr_db = msnr_db;
  cell.trials.resize(static_cast<std::size_t>(spec.trials));
  parallel_for(spec.trials, spec.jobs, [&](int t) {
    cell.trials[static_cast<std::size_t>(t)] = run_trial(spec, k, nonconvexity, kappa, msnr_db, t);
  });

  std::vector<double> rsnr;
  int successes = 0;
  cell.wall_ms = spec.timing ? 0.0 : kNaN;
  for (const TrialRecord& t : cell.trials) {
    rsnr.push_back(t.rsnr_db);
    successes += t.success ? 1 : 0;
    if (spec.timing) cell.wall_ms += t.wall_ms;
  }
  cell.success_rate = static_cast<double>(successes) / spec.trials;
  cell.mean_rsnr_db = std::accumulate(rsnr.begin(), rsnr.end(), 0.0) / static_cast<double>(rsnr.size());
  if (rsnr.size() >= 2) {
    std::tie(cell.ci95_low, cell.ci95_high) = ci95(rsnr);
  } else {
    cell.ci95_low = cell.ci95_high = cell.mean_rsnr_db;
  }
  return cell;
}

PhaseResult run_phase(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<Index> ks = spec.k_values;
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

  PhaseResult out;
  for (double nu : nonconvexity_levels(spec)) {
    for (double kappa : spec.kappas) {
      for (double msnr : spec.msnr_db) {
        KmaxRecord km{nu, kappa, msnr, ks.back()};
        bool failed = false;
        Index previous = ks.front() - 1;
        for (Index k : ks) {
          out.cells.push_back(run_cell(spec, k, nu, kappa, msnr));
          if (!failed && out.cells.back().success_rate < 1.0) {
            failed = true;
            km.kmax = previous;
            if (spec.stop_at_first_failure) break;
          }
          previous = k;
        }
        out.kmax.push_back(km);
      }
    }
  }
  return out;
}

std::vector<ExperimentRecord> run_rsnr_sweep(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<ExperimentRecord> cells;
  for (double nu : nonconvexity_levels(spec)) {
    for (Index k : spec.k_values) {
      for (double kappa : spec.kappas) {
        for (double msnr : spec.msnr_db) cells.push_back(run_cell(spec, k, nu, kappa, msnr));
      }
    }
  }
  return cells;
}

std::string trials_csv(const ExperimentSpec& spec, const std::vector<ExperimentRecord>& cells) {
  std::string out =
      "experiment_id,M,N,K,dist,penalty_kind,nonconvexity,kappa,msnr_db,zeta,solver,trial,seed,"
      "rsnr_db,success,iters,wall_ms\n";
  const std::string solver = solver_label(spec);
  for (const ExperimentRecord& cell : cells) {
    const std::string prefix = row_prefix(spec, cell);
    for (const TrialRecord& t : cell.trials) {
      out += fmt::format("{},{},{},{},{},{},{},{},{}\n", prefix, opt_num(t.zeta), solver, t.trial,
                         t.seed, num(t.rsnr_db), t.success ? 1 : 0, t.iters, opt_num(t.wall_ms));
    }
  }
  return out;
}

std::string aggregate_csv(const ExperimentSpec& spec, const std::vector<ExperimentRecord>& cells) {
  std::string out =
      "experiment_id,M,N,K,dist,penalty_kind,nonconvexity,kappa,msnr_db,solver,trials,"
      "success_rate,mean_rsnr_db,ci95_low,ci95_high,wall_ms\n";
  const std::string solver = solver_label(spec);
  for (const ExperimentRecord& cell : cells) {
    out += fmt::format("{},{},{},{},{},{},{},{}\n", row_prefix(spec, cell), solver,
                       cell.trials.size(), num(cell.success_rate), num(cell.mean_rsnr_db),
                       num(cell.ci95_low), num(cell.ci95_high), opt_num(cell.wall_ms));
  }
  return out;
}

}  // namespace pgg
