#include "pgg/solver.hpp"

#include <cmath>
#include <limits>

#include "pgg/error.hpp"

namespace pgg {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

TracePoint sample(const SensingModel& model, const Penalty& pen, const Vector& y, const Vector& x,
                  const Vector* x_star, std::int64_t n) {
  TracePoint tp;
  tp.iteration = n;
  Vector ax = model.A() * x;
  tp.residual = (y - ax).norm();
  tp.objective = j_value(pen, x);
  if (x_star != nullptr) {
    tp.error = (x - *x_star).norm();
    tp.model_residual = (ax - model.A() * *x_star).norm();
  } else {
    tp.error = kNaN;
    tp.model_residual = kNaN;
  }
  return tp;
}

// Shared driver. step(x, grad, next) writes x(n+1) given x(n) and grad J(x(n)).
template <typename Step>
RecoveryResult run_iterations(const SensingModel& model, const Penalty& pen, const Vector& y,
                              const SolverConfig& cfg, const Vector* x_star, Vector x,
                              const Step& step) {
  cfg.validate();
  RecoveryResult result;
  const bool tracing = cfg.trace_every > 0;
  if (tracing) result.trace.push_back(sample(model, pen, y, x, x_star, 0));

  Vector grad(x.size());
  Vector next(x.size());
  std::int64_t n = 0;
  while (n < cfg.max_iters) {
    j_gradient(pen, x, grad);
    step(x, grad, next);
    if (!next.allFinite()) throw NumericalError("divergence");
    ++n;
    bool stop = cfg.early_stop_tol > 0.0 && (next - x).norm() < cfg.early_stop_tol;
    x.swap(next);
    if (tracing && (n % cfg.trace_every == 0 || stop || n == cfg.max_iters)) {
      result.trace.push_back(sample(model, pen, y, x, x_star, n));
    }
    if (stop) break;
  }
  result.iters_run = n;
  result.final_residual = (y - model.A() * x).norm();
  result.x_hat = std::move(x);
  return result;
}

void check_inputs(const SensingModel& model, const Vector& y, const Vector* x_star) {
  if (y.size() != model.rows()) throw ConfigError("measurement length does not match A");
  if (!y.allFinite()) throw ConfigError("measurement vector has non-finite entries");
  if (x_star != nullptr && x_star->size() != model.cols()) {
    throw ConfigError("ground truth length does not match A");
  }
}

RecoveryResult pgg_impl(const SensingModel& model, const Penalty& pen, const Vector& y,
                        const SolverConfig& cfg, const Vector* x_star) {
  if (model.mode() != ProjectionMode::Exact) {
    throw ConfigError("PGG requires an exact pseudo-inverse");
  }
  check_inputs(model, y, x_star);
  const Matrix& a = model.A();
  const Matrix& pinv = model.pinv();
  const double kappa = cfg.kappa;
  Vector shifted(a.cols());
  Vector resid(a.rows());
  auto step = [&](const Vector& x, const Vector& grad, Vector& next) {
    shifted.noalias() = x - kappa * grad;
    resid = y;
    resid.noalias() -= a * shifted;
    next = shifted;
    next.noalias() += pinv * resid;
  };
  return run_iterations(model, pen, y, cfg, x_star, pinv * y, step);
}

RecoveryResult apgg_impl(const SensingModel& model, const Penalty& pen, const Vector& y,
                         const SolverConfig& cfg, const Vector* x_star) {
  if (model.mode() != ProjectionMode::Approx) {
    throw ConfigError("APGG requires an approximate pseudo-inverse");
  }
  if (!(model.zeta() < 1.0)) throw ConfigError("APGG requires zeta < 1");
  check_inputs(model, y, x_star);
  const Matrix& a = model.A();
  const Matrix& pinv = model.pinv();
  const double kappa = cfg.kappa;
  const Vector base = pinv * y;
  Vector shifted(a.cols());
  Vector image(a.rows());
  auto step = [&](const Vector& x, const Vector& grad, Vector& next) {
    shifted.noalias() = x - kappa * grad;
    image.noalias() = a * shifted;
    next = base + shifted;
    next.noalias() -= pinv * image;
  };
  return run_iterations(model, pen, y, cfg, x_star, base, step);
}

}  // namespace

void SolverConfig::validate() const {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw ConfigError("step size kappa must be positive");
  if (max_iters < 1) throw ConfigError("max_iters must be at least 1");
  if (!(early_stop_tol >= 0.0)) throw ConfigError("early_stop_tol must be nonnegative");
  if (trace_every < 0) throw ConfigError("trace_every must be nonnegative");
}

RecoveryResult pgg_solve(const SensingModel& model, const Penalty& pen, const Vector& y,
                         const SolverConfig& cfg) {
  return pgg_impl(model, pen, y, cfg, nullptr);
}

RecoveryResult pgg_solve(const SensingModel& model, const Penalty& pen, const Vector& y,
                         const SolverConfig& cfg, const Vector& x_star) {
  return pgg_impl(model, pen, y, cfg, &x_star);
}

RecoveryResult apgg_solve(const SensingModel& model, const Penalty& pen, const Vector& y,
                          const SolverConfig& cfg) {
  return apgg_impl(model, pen, y, cfg, nullptr);
}

RecoveryResult apgg_solve(const SensingModel& model, const Penalty& pen, const Vector& y,
                          const SolverConfig& cfg, const Vector& x_star) {
  return apgg_impl(model, pen, y, cfg, &x_star);
}

RecoveryResult solve(const SensingModel& model, const Penalty& pen, const Vector& y,
                     const SolverConfig& cfg, const Vector* x_star) {
  if (model.mode() == ProjectionMode::Exact) return pgg_impl(model, pen, y, cfg, x_star);
  return apgg_impl(model, pen, y, cfg, x_star);
}

std::int64_t default_max_iters(double c3, double m0, double d, double alpha, Index n,
                               double kappa) {
  if (!(c3 > 0.0 && m0 > 0.0 && d > 0.0 && alpha > 0.0 && n > 0 && kappa > 0.0)) {
    throw ConfigError("iteration bound needs positive inputs");
  }
  double bound = std::ceil(4.0 * c3 * m0 / (d * alpha * alpha * static_cast<double>(n) * kappa));
  constexpr double kMax = static_cast<double>(std::numeric_limits<std::int64_t>::max() / 2);
  if (!(bound < kMax)) return static_cast<std::int64_t>(kMax);
  return static_cast<std::int64_t>(bound);
}

RecoveryResult omp_solve(const Matrix& a, const Vector& y, Index k) {
  const Index m = a.rows();
  const Index n = a.cols();
  if (y.size() != m) throw ConfigError("measurement length does not match A");
  if (k < 1 || k > m) throw ConfigError("OMP sparsity must satisfy 1 <= K <= M");

  RecoveryResult result;
  result.x_hat = Vector::Zero(n);
  std::vector<Index> support;
  std::vector<bool> chosen(static_cast<std::size_t>(n), false);
  Vector residual = y;
  Vector coef;
  const double floor = 1e-14 * std::max(1.0, y.norm());

  for (Index round = 0; round < k; ++round) {
    if (residual.norm() <= floor) break;
    Vector corr = a.transpose() * residual;
    Index best = -1;
    double best_val = -1.0;
    for (Index j = 0; j < n; ++j) {
      if (chosen[static_cast<std::size_t>(j)]) continue;
      double v = std::abs(corr[j]);
      if (v > best_val) {
        best_val = v;
        best = j;
      }
    }
    if (best < 0) break;
    chosen[static_cast<std::size_t>(best)] = true;
    support.push_back(best);

    Matrix sub(m, static_cast<Index>(support.size()));
    for (std::size_t c = 0; c < support.size(); ++c) sub.col(static_cast<Index>(c)) = a.col(support[c]);
    Eigen::ColPivHouseholderQR<Matrix> qr(sub);
    qr.setThreshold(1e-10);
    if (qr.rank() < sub.cols()) throw NumericalError("degenerate support");
    coef = qr.solve(y);
    residual = y - sub * coef;
    ++result.iters_run;
  }
  for (std::size_t c = 0; c < support.size(); ++c) result.x_hat[support[c]] = coef[static_cast<Index>(c)];
  result.final_residual = residual.norm();
  return result;
}

RecoveryResult irls_solve(const Matrix& a, const Vector& y, double p, const IrlsSchedule& schedule) {
  if (y.size() != a.rows()) throw ConfigError("measurement length does not match A");
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("IRLS exponent p must lie in [0, 1]");
  if (schedule.eps.empty()) throw ConfigError("IRLS epsilon schedule is empty");
  if (schedule.inner_iters < 1) throw ConfigError("IRLS needs at least one inner iteration");
  for (double e : schedule.eps) {
    if (!(e > 0.0)) throw ConfigError("IRLS epsilon values must be positive");
  }

  RecoveryResult result;
  if (y.squaredNorm() == 0.0) {
    result.x_hat = Vector::Zero(a.cols());
    return result;
  }
  auto weighted_solve = [&](const Vector& w) -> Vector {
    Matrix gram = a * w.asDiagonal() * a.transpose();
    Eigen::LLT<Matrix> llt(gram);
    if (llt.info() != Eigen::Success) throw NumericalError("singular reweighted system");
    Vector lambda = llt.solve(y);
    Vector x = w.asDiagonal() * (a.transpose() * lambda);
    if (!x.allFinite()) throw NumericalError("singular reweighted system");
    return x;
  };

  Vector x = weighted_solve(Vector::Ones(a.cols()));
  const double exponent = 1.0 - p / 2.0;
  for (double eps : schedule.eps) {
    for (int it = 0; it < schedule.inner_iters; ++it) {
      Vector w = (x.array().square() + eps).pow(exponent).matrix();
      x = weighted_solve(w);
      ++result.iters_run;
    }
  }
  result.final_residual = (y - a * x).norm();
  result.x_hat = std::move(x);
  return result;
}

}  // namespace pgg
