#pragma once

#include <vector>

#include "pgg/types.hpp"

namespace pgg {

enum class ProjectionMode { Exact, Approx };

// Ben-Israel start parameter is scale / ||A A^T||_1; admissible scales lie in (0, 2).
inline constexpr double kBenIsraelDefaultScale = 1.95;

/// Sensing matrix A (M x N, M < N) together with a pseudo-inverse of the form
/// A^T B and the spectral quantities the solvers and constant calculus consume.
///
/// Built by exact_pinv() or ben_israel(); immutable afterwards and safe to share
/// between concurrent solver runs.
class SensingModel {
 public:
  const Matrix& A() const { return a_; }
  const Matrix& B() const { return b_; }
  /// Cached product A^T B (N x M).
  const Matrix& pinv() const { return pinv_; }

  ProjectionMode mode() const { return mode_; }
  int approx_steps() const { return steps_; }

  /// ||I - A A^T B||_2; stored as 0 in exact mode.
  double zeta() const { return zeta_; }
  /// ||I - A^T B A||_2^2.
  double d() const { return d_; }
  double sigma_min() const { return sigma_min_; }
  double norm_A() const { return norm_a_; }
  double norm_B() const { return norm_b_; }

  Index rows() const { return a_.rows(); }
  Index cols() const { return a_.cols(); }

 private:
  friend SensingModel exact_pinv(Matrix a);
  friend SensingModel ben_israel(Matrix a, int steps, double scale);

  SensingModel(Matrix a, Matrix b, ProjectionMode mode, int steps);

  Matrix a_;
  Matrix b_;
  Matrix pinv_;
  ProjectionMode mode_ = ProjectionMode::Exact;
  int steps_ = 0;
  double zeta_ = 0.0;
  double d_ = 0.0;
  double sigma_min_ = 0.0;
  double norm_a_ = 0.0;
  double norm_b_ = 0.0;
};

/// B = (A A^T)^{-1}. Throws NumericalError("singular Gram matrix") when A lacks full row rank.
SensingModel exact_pinv(Matrix a);

/// k steps of the Ben-Israel hyper-power iteration, carried on the M x M factor:
/// G_0 = s I with s = scale / ||A A^T||_1, G_j = G_{j-1} (2I - A A^T G_{j-1}).
SensingModel ben_israel(Matrix a, int steps, double scale = kBenIsraelDefaultScale);

struct BenIsraelStep {
  int k = 0;
  double zeta = 0.0;
  double d = 0.0;
};

/// Measured zeta_k and d_k for k = 0..steps.
std::vector<BenIsraelStep> ben_israel_history(const Matrix& a, int steps,
                                              double scale = kBenIsraelDefaultScale);

/// The M x M factor G_k itself (mostly for tests and the report tool).
Matrix ben_israel_factor(const Matrix& a, int steps, double scale = kBenIsraelDefaultScale);

/// Largest singular value by power iteration on M^T M, started from the
/// normalized all-ones vector; stops when the Rayleigh quotient settles to a
/// relative 1e-8 or after 10000 iterations.
double spectral_norm(const Matrix& mx);

/// Largest singular value from a full singular value decomposition. Used where
/// power iteration cannot resolve the required precision.
double spectral_norm_svd(const Matrix& mx);

/// Smallest singular value exceeding 1e-10 * ||A||_2.
double sigma_min_nonzero(const Matrix& a);

/// Maximum absolute column sum.
double norm_one(const Matrix& mx);

/// ||I - A A^T B||_2 and ||I - A^T B A||_2^2 for an arbitrary factor B.
double measure_zeta(const Matrix& a, const Matrix& b);
double measure_d(const Matrix& a, const Matrix& b);

}  // namespace pgg
