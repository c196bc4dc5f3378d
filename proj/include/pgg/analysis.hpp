#pragma once

#include <cstdint>
#include <vector>

#include "pgg/penalty.hpp"
#include "pgg/pinv.hpp"
#include "pgg/types.hpp"

namespace pgg {

/// Constants of the convergence guarantees for one (penalty, model, gamma, M0) tuple.
struct ConvergenceConstants {
  double gamma = 0.0;  // assumed null space constant, in [0, 1)
  double m0 = 0.0;     // bound on ||x(0) - x*||_2
  double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0, c5 = 0.0, c6 = 0.0, c7 = 0.0;
  double d = 0.0;
  double zeta = 0.0;
  double threshold = 0.0;  // admissible non-convexity, (1 - gamma) / ((5 + 3 gamma) M0)

  // Inputs echoed for the bounds.
  double alpha = 0.0;
  double rho = 0.0;
  Index n = 0;
  double norm_A = 0.0;
  double norm_B = 0.0;
  double sigma_min = 0.0;
};

/// Throws ConfigError("null space condition violated") when gamma >= 1.
ConvergenceConstants constants(const Penalty& pen, const SensingModel& model, double gamma,
                               double m0);

struct Theorem3Check {
  bool ok = false;
  double margin = 0.0;  // threshold - nonconvexity
};

Theorem3Check check_theorem3(const Penalty& pen, const ConvergenceConstants& consts);

/// C1 / (-4 rho); infinite for rho == 0. The initial distance must not exceed it.
double lemma6_radius(const ConvergenceConstants& consts);

double error_bound_pgg(const ConvergenceConstants& consts, double alpha, Index n, double kappa,
                       double noise_norm);
double error_bound_apgg(const ConvergenceConstants& consts, double kappa, double noise_norm);
double error_bound_compressible(const ConvergenceConstants& consts, double kappa, double noise_norm,
                                double tau, double norm_A);

struct NscEstimate {
  double value = 0.0;
  Index k = 0;
  bool exact = false;
  std::int64_t samples = 0;
  // Maximizing support and null-space vector (empty when the null space is trivial).
  std::vector<Index> support;
  Vector vector;
};

/// Orthonormal basis of the null space of A (N x (N - rank)).
Matrix null_space_basis(const Matrix& a);

/// Exact gamma(l1, A, K) by enumerating every support of size K and every sign
/// pattern, each solved as a linear program over null-space coordinates.
/// Budget: N <= 14, N - rank(A) <= 8, K <= 4.
NscEstimate nsc_l1_exact(const Matrix& a, Index k);

/// Same quantity via vertex enumeration of {c : ||(Z c)_{S^c}||_1 <= 1}; an LP-free
/// cross-check for null spaces of dimension <= 3.
NscEstimate nsc_l1_vertices(const Matrix& a, Index k);

/// Lower bound on gamma(J, A, K): sup over sampled null-space vectors and the
/// scales in beta_grid of J(beta z_S) / J(beta z_{S^c}), S the K largest entries.
/// Extra candidate vectors are always included.
NscEstimate nsc_j_lower_probe(const Matrix& a, Index k, const Penalty& pen,
                              const std::vector<double>& beta_grid, std::int64_t samples,
                              std::uint64_t seed = 0, const std::vector<Vector>& extra = {});

/// True iff M >= 2K + 1 and every 2K-column submatrix has full column rank.
/// Budget: C(N, 2K) <= 1e6.
bool gamma_l0_certify(const Matrix& a, Index k);

struct GridSpec {
  double radius = 1.0;  // half-width of the box in null-space coordinates
  int points_per_axis = 201;
};

/// Box of radius 2 ||x*||_inf, 201 points per axis.
GridSpec default_grid(const Vector& x_star);

struct JminResult {
  Vector x;
  double objective = 0.0;
  double resolution = 0.0;  // diagonal of one grid cell
};

/// Grid search for min J(x) subject to A x = y over the box centered at the
/// least-norm solution. Budget: N <= 6, null space dimension <= 3.
JminResult jmin_bruteforce(const Matrix& a, const Vector& y, const Penalty& pen,
                           const GridSpec& grid);

}  // namespace pgg
