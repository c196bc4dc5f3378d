#pragma once

#include <cstdint>
#include <vector>

#include "pgg/penalty.hpp"
#include "pgg/pinv.hpp"
#include "pgg/types.hpp"

namespace pgg {

struct SolverConfig {
  double kappa = 1e-4;         // step size
  std::int64_t max_iters = 1000;
  double early_stop_tol = 0.0; // halt when ||x(n+1) - x(n)||_2 < tol; 0 disables
  std::int64_t trace_every = 0;  // 0 disables tracing

  void validate() const;  // throws ConfigError
};

// One diagnostic sample. Truth-dependent fields are NaN when no ground truth was supplied.
struct TracePoint {
  std::int64_t iteration = 0;
  double error = 0.0;           // ||x(n) - x*||_2
  double residual = 0.0;        // ||y - A x(n)||_2
  double model_residual = 0.0;  // ||A (x(n) - x*)||_2
  double objective = 0.0;       // J(x(n))
};

struct RecoveryResult {
  Vector x_hat;
  std::int64_t iters_run = 0;
  double final_residual = 0.0;
  std::vector<TracePoint> trace;
};

/// Projected generalized gradient method with the exact projection:
///   x(0) = A^+ y,  x~ = x - kappa * grad J(x),  x+ = x~ + A^+ (y - A x~).
/// Requires an exact-mode model. Throws NumericalError("divergence") on a non-finite iterate.
RecoveryResult pgg_solve(const SensingModel& model, const Penalty& pen, const Vector& y,
                         const SolverConfig& cfg);
RecoveryResult pgg_solve(const SensingModel& model, const Penalty& pen, const Vector& y,
                         const SolverConfig& cfg, const Vector& x_star);

/// Approximate-projection variant with a fixed A^T B:
///   x(0) = A^T B y,  x+ = A^T B y + (I - A^T B A)(x - kappa * grad J(x)).
/// The N x N operator is never formed. Requires an approx-mode model with zeta < 1.
RecoveryResult apgg_solve(const SensingModel& model, const Penalty& pen, const Vector& y,
                          const SolverConfig& cfg);
RecoveryResult apgg_solve(const SensingModel& model, const Penalty& pen, const Vector& y,
                          const SolverConfig& cfg, const Vector& x_star);

/// Dispatches on model.mode().
RecoveryResult solve(const SensingModel& model, const Penalty& pen, const Vector& y,
                     const SolverConfig& cfg, const Vector* x_star = nullptr);

/// ceil(4 C3 M0 / (d alpha^2 N kappa)), the iteration count after which the
/// approximate-projection bound is guaranteed.
std::int64_t default_max_iters(double c3, double m0, double d, double alpha, Index n,
                               double kappa);

/// Orthogonal matching pursuit: K greedy atom picks (lowest index wins ties),
/// each followed by a least-squares refit on the active set.
RecoveryResult omp_solve(const Matrix& a, const Vector& y, Index k);

struct IrlsSchedule {
  std::vector<double> eps{1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
  int inner_iters = 10;
};

/// Iteratively reweighted least squares for l_p, 0 <= p <= 1:
///   x <- W A^T (A W A^T)^{-1} y,  w_i = (x_i^2 + eps)^{1 - p/2},
/// annealing eps down the schedule. Starts from the least-norm solution.
RecoveryResult irls_solve(const Matrix& a, const Vector& y, double p,
                          const IrlsSchedule& schedule = {});

}  // namespace pgg
