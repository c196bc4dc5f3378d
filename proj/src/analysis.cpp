#include "pgg/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "pgg/error.hpp"
#include "pgg/lp.hpp"

namespace pgg {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Advances comb (sorted, values < n) to the next k-combination; false when exhausted.
bool next_combination(std::vector<Index>& comb, Index n) {
  const auto k = static_cast<Index>(comb.size());
  for (Index i = k - 1; i >= 0; --i) {
    auto& v = comb[static_cast<std::size_t>(i)];
    if (v < n - k + i) {
      ++v;
      for (Index j = i + 1; j < k; ++j) comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
      return true;
    }
  }
  return false;
}

std::vector<Index> first_combination(Index k) {
  std::vector<Index> comb(static_cast<std::size_t>(k));
  std::iota(comb.begin(), comb.end(), Index{0});
  return comb;
}

double binomial(Index n, Index k) {
  if (k < 0 || k > n) return 0.0;
  double out = 1.0;
  for (Index i = 1; i <= k; ++i) out = out * static_cast<double>(n - k + i) / static_cast<double>(i);
  return out;
}

std::vector<Index> complement(const std::vector<Index>& support, Index n) {
  std::vector<Index> rest;
  std::size_t s = 0;
  for (Index i = 0; i < n; ++i) {
    if (s < support.size() && support[s] == i) {
      ++s;
    } else {
      rest.push_back(i);
    }
  }
  return rest;
}

double l1_ratio(const Vector& z, const std::vector<Index>& support, const std::vector<Index>& rest) {
  double num = 0.0;
  double den = 0.0;
  for (Index i : support) num += std::abs(z[i]);
  for (Index i : rest) den += std::abs(z[i]);
  if (den <= 1e-12 * z.lpNorm<Eigen::Infinity>()) return num > 0.0 ? kInf : 0.0;
  return num / den;
}

void check_nsc_budget(const Matrix& a, Index k, Index max_null_dim) {
  const Index n = a.cols();
  if (k < 1) throw ConfigError("sparsity K must be at least 1");
  if (k >= n) throw ConfigError("sparsity K must be smaller than N");
  Index null_dim = n - a.fullPivLu().rank();
  if (n > 14 || null_dim > max_null_dim || k > 4) {
    throw ConfigError("instance too large for exact oracle");
  }
}

}  // namespace

ConvergenceConstants constants(const Penalty& pen, const SensingModel& model, double gamma,
                               double m0) {
  if (!(gamma < 1.0)) throw ConfigError("null space condition violated");
  if (!(gamma >= 0.0)) throw ConfigError("null space constant must be nonnegative");
  if (!(m0 > 0.0) || !std::isfinite(m0)) throw ConfigError("M0 must be positive");

  ConvergenceConstants c;
  c.gamma = gamma;
  c.m0 = m0;
  c.alpha = pen.alpha();
  c.rho = pen.rho();
  c.n = model.cols();
  c.d = model.d();
  c.zeta = model.zeta();
  c.norm_A = model.norm_A();
  c.norm_B = model.norm_B();
  c.sigma_min = model.sigma_min();

  const double root_n = std::sqrt(static_cast<double>(c.n));
  const double a_root_n = c.alpha * root_n;
  const double z = c.zeta;

  c.c1 = (pen.eval(m0) / m0) * (1.0 - gamma) / (1.0 + gamma);
  c.c2 = (a_root_n + c.c1) / (c.c1 * c.sigma_min);
  c.c5 = 2.0 * z * a_root_n * c.norm_A / (1.0 - z);
  c.c6 = (2.0 * c.norm_B * c.c5 / c.c1) * (2.0 * (1.0 + z) * a_root_n * c.norm_A + (3.0 + z) * c.c5);
  c.c7 = (4.0 * c.norm_B / c.c1) * (a_root_n * c.norm_A + c.c5);
  c.c3 = std::max(2.0 * c.c2 * c.c5,
                  2.0 * c.d * c.alpha * c.alpha * static_cast<double>(c.n) / c.c1 + c.c6);
  c.c4 = std::max(2.0 * c.c2, c.c7);
  c.threshold = (1.0 / m0) * (1.0 - gamma) / (5.0 + 3.0 * gamma);
  return c;
}

Theorem3Check check_theorem3(const Penalty& pen, const ConvergenceConstants& consts) {
  Theorem3Check out;
  out.margin = consts.threshold - pen.nonconvexity();
  out.ok = out.margin >= 0.0;
  return out;
}

double lemma6_radius(const ConvergenceConstants& consts) {
  if (consts.rho == 0.0) return kInf;
  return consts.c1 / (-4.0 * consts.rho);
}

double error_bound_pgg(const ConvergenceConstants& consts, double alpha, Index n, double kappa,
                       double noise_norm) {
  return 4.0 * alpha * alpha * static_cast<double>(n) / consts.c1 * kappa +
         8.0 * consts.c2 * noise_norm;
}

double error_bound_apgg(const ConvergenceConstants& consts, double kappa, double noise_norm) {
  return 2.0 * consts.c3 * kappa + 2.0 * consts.c4 * noise_norm;
}

double error_bound_compressible(const ConvergenceConstants& consts, double kappa, double noise_norm,
                                double tau, double norm_A) {
  if (!(tau >= 0.0)) throw ConfigError("tail bound tau must be nonnegative");
  return error_bound_apgg(consts, kappa, noise_norm) + (2.0 * consts.c4 * norm_A + 1.0) * tau;
}

Matrix null_space_basis(const Matrix& a) {
  const Index n = a.cols();
  if (a.rows() == 0) return Matrix::Identity(n, n);
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  const double cutoff = s.size() > 0 ? 1e-10 * s(0) : 0.0;
  Index rank = 0;
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff) ++rank;
  }
  return svd.matrixV().rightCols(n - rank);
}

NscEstimate nsc_l1_exact(const Matrix& a, Index k) {
  check_nsc_budget(a, k, 8);
  const Index n = a.cols();
  const Matrix z = null_space_basis(a);
  const Index r = z.cols();

  NscEstimate best;
  best.k = k;
  best.exact = true;
  if (r == 0) return best;

  const Index rest_n = n - k;
  const Index vars = 2 * r + rest_n;
  const Index cons = 2 * rest_n + 1;
  std::vector<Index> support = first_combination(k);
  best.value = -1.0;
  do {
    const std::vector<Index> rest = complement(support, n);
    Matrix lp_a = Matrix::Zero(cons, vars);
    Vector lp_b = Vector::Zero(cons);
    for (Index q = 0; q < rest_n; ++q) {
      const auto row = z.row(rest[static_cast<std::size_t>(q)]);
      lp_a.block(2 * q, 0, 1, r) = row;
      lp_a.block(2 * q, r, 1, r) = -row;
      lp_a(2 * q, 2 * r + q) = -1.0;
      lp_a.block(2 * q + 1, 0, 1, r) = -row;
      lp_a.block(2 * q + 1, r, 1, r) = row;
      lp_a(2 * q + 1, 2 * r + q) = -1.0;
    }
    lp_a.block(cons - 1, 2 * r, 1, rest_n).setOnes();
    lp_b[cons - 1] = 1.0;

    // Sign patterns with the first entry fixed to +1; z and -z give the same value.
    const std::uint64_t patterns = std::uint64_t{1} << (k - 1);
    for (std::uint64_t mask = 0; mask < patterns; ++mask) {
      Vector coef = Vector::Zero(r);
      for (Index q = 0; q < k; ++q) {
        const double sign = (q > 0 && ((mask >> (q - 1)) & 1U)) ? -1.0 : 1.0;
        coef += sign * z.row(support[static_cast<std::size_t>(q)]).transpose();
      }
      Vector lp_c = Vector::Zero(vars);
      lp_c.head(r) = coef;
      lp_c.segment(r, r) = -coef;
      LpResult res = simplex_maximize(lp_a, lp_b, lp_c);
      if (res.status == LpStatus::Infeasible) throw NumericalError("null space LP reported infeasible");
      if (res.status == LpStatus::Unbounded || res.objective > best.value) {
        best.value = res.objective;
        best.support = support;
        if (res.status == LpStatus::Optimal) {
          best.vector = z * (res.x.head(r) - res.x.segment(r, r));
        } else {
          best.vector.resize(0);
          return best;
        }
      }
    }
  } while (next_combination(support, n));
  return best;
}

NscEstimate nsc_l1_vertices(const Matrix& a, Index k) {
  check_nsc_budget(a, k, 3);
  const Index n = a.cols();
  const Matrix z = null_space_basis(a);
  const Index r = z.cols();

  NscEstimate best;
  best.k = k;
  best.exact = true;
  if (r == 0) return best;
  best.value = -1.0;

  auto consider = [&](const Vector& zc, const std::vector<Index>& support,
                      const std::vector<Index>& rest) {
    double ratio = l1_ratio(zc, support, rest);
    if (ratio > best.value) {
      best.value = ratio;
      best.support = support;
      best.vector = zc;
    }
  };

  std::vector<Index> support = first_combination(k);
  do {
    const std::vector<Index> rest = complement(support, n);
    Matrix w(static_cast<Index>(rest.size()), r);
    for (std::size_t q = 0; q < rest.size(); ++q) w.row(static_cast<Index>(q)) = z.row(rest[q]);
    if (w.fullPivLu().rank() < r) {
      // Some null vector vanishes off S: the ratio is unbounded.
      Eigen::JacobiSVD<Matrix> svd(w, Eigen::ComputeFullV);
      consider(z * svd.matrixV().col(r - 1), support, rest);
      continue;
    }
    if (r == 1) {
      consider(z.col(0), support, rest);
      continue;
    }
    // Vertices: directions annihilated by r - 1 independent rows of W.
    std::vector<Index> active = first_combination(r - 1);
    const auto rows = static_cast<Index>(rest.size());
    do {
      Matrix sub(r - 1, r);
      for (Index q = 0; q < r - 1; ++q) sub.row(q) = w.row(active[static_cast<std::size_t>(q)]);
      Eigen::JacobiSVD<Matrix> svd(sub, Eigen::ComputeFullV);
      const Vector& s = svd.singularValues();
      if (s(s.size() - 1) <= 1e-10 * std::max(1.0, s(0))) continue;
      consider(z * svd.matrixV().col(r - 1), support, rest);
    } while (next_combination(active, rows));
  } while (next_combination(support, n));
  return best;
}

NscEstimate nsc_j_lower_probe(const Matrix& a, Index k, const Penalty& pen,
                              const std::vector<double>& beta_grid, std::int64_t samples,
                              std::uint64_t seed, const std::vector<Vector>& extra) {
  const Index n = a.cols();
  if (k < 1 || k >= n) throw ConfigError("sparsity K must satisfy 1 <= K < N");
  if (samples < 0) throw ConfigError("sample count must be nonnegative");
  for (double beta : beta_grid) {
    if (!(beta > 0.0)) throw ConfigError("probe scales must be positive");
  }
  const Matrix z = null_space_basis(a);
  const Index r = z.cols();

  NscEstimate best;
  best.k = k;
  best.exact = false;
  best.samples = samples;
  if (r == 0) return best;

  std::vector<Index> order(static_cast<std::size_t>(n));
  auto evaluate = [&](const Vector& v) {
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index i, Index j) { return std::abs(v[i]) > std::abs(v[j]); });
    for (double beta : beta_grid) {
      double num = 0.0;
      double den = 0.0;
      for (Index q = 0; q < n; ++q) {
        double f = pen.eval(beta * v[order[static_cast<std::size_t>(q)]]);
        (q < k ? num : den) += f;
      }
      double ratio = den > 0.0 ? num / den : (num > 0.0 ? kInf : 0.0);
      if (ratio > best.value) {
        best.value = ratio;
        best.vector = v;
        best.support.assign(order.begin(), order.begin() + k);
        std::sort(best.support.begin(), best.support.end());
      }
    }
  };

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (std::int64_t s = 0; s < samples; ++s) {
    Vector coef(r);
    for (Index j = 0; j < r; ++j) coef[j] = normal(rng);
    evaluate(z * coef);
  }
  for (const Vector& v : extra) {
    if (v.size() != n) throw ConfigError("probe vector length does not match A");
    evaluate(v);
  }
  return best;
}

bool gamma_l0_certify(const Matrix& a, Index k) {
  const Index m = a.rows();
  const Index n = a.cols();
  if (k < 1) throw ConfigError("sparsity K must be at least 1");
  if (binomial(n, 2 * k) > 1e6) throw ConfigError("instance too large for l0 certification");
  if (m < 2 * k + 1) return false;
  const double cutoff = 1e-10 * spectral_norm_svd(a);
  std::vector<Index> cols = first_combination(2 * k);
  do {
    Matrix sub(m, 2 * k);
    for (Index q = 0; q < 2 * k; ++q) sub.col(q) = a.col(cols[static_cast<std::size_t>(q)]);
    Eigen::JacobiSVD<Matrix> svd(sub);
    if (!(svd.singularValues()(2 * k - 1) > cutoff)) return false;
  } while (next_combination(cols, n));
  return true;
}

GridSpec default_grid(const Vector& x_star) {
  GridSpec grid;
  double inf_norm = x_star.size() > 0 ? x_star.lpNorm<Eigen::Infinity>() : 0.0;
  grid.radius = inf_norm > 0.0 ? 2.0 * inf_norm : 1.0;
  return grid;
}

JminResult jmin_bruteforce(const Matrix& a, const Vector& y, const Penalty& pen,
                           const GridSpec& grid) {
  const Index n = a.cols();
  if (y.size() != a.rows()) throw ConfigError("measurement length does not match A");
  if (n > 6) throw ConfigError("grid oracle limited to N <= 6");
  if (grid.points_per_axis < 2 || !(grid.radius > 0.0)) throw ConfigError("invalid grid specification");

  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(a);
  const Vector base = cod.solve(y);
  if ((a * base - y).norm() > 1e-9 * std::max(1.0, y.norm())) {
    throw ConfigError("infeasible measurement: no solution to A x = y");
  }
  const Matrix z = null_space_basis(a);
  const Index r = z.cols();
  if (r > 3) throw ConfigError("grid oracle limited to null space dimension <= 3");

  JminResult out;
  out.x = base;
  out.objective = j_value(pen, base);
  if (r == 0) return out;

  const int pts = grid.points_per_axis;
  const double step = 2.0 * grid.radius / (pts - 1);
  out.resolution = step * std::sqrt(static_cast<double>(r));

  // offsets[j][g] = (grid coordinate g) * z_j
  std::vector<std::vector<Vector>> offsets(static_cast<std::size_t>(r));
  for (Index j = 0; j < r; ++j) {
    auto& axis = offsets[static_cast<std::size_t>(j)];
    axis.reserve(static_cast<std::size_t>(pts));
    for (int g = 0; g < pts; ++g) axis.push_back((-grid.radius + g * step) * z.col(j));
  }

  double best = kInf;
  Vector best_x = base;
  std::vector<Vector> partial(static_cast<std::size_t>(r + 1), base);
  auto recurse = [&](auto&& self, Index depth) -> void {
    if (depth == r) {
      const Vector& x = partial[static_cast<std::size_t>(r)];
      double value = j_value(pen, x);
      if (value < best) {
        best = value;
        best_x = x;
      }
      return;
    }
    for (const Vector& off : offsets[static_cast<std::size_t>(depth)]) {
      partial[static_cast<std::size_t>(depth + 1)] = partial[static_cast<std::size_t>(depth)] + off;
      self(self, depth + 1);
    }
  };
  recurse(recurse, 0);
  out.x = best_x;
  out.objective = best;
  return out;
}

}  // namespace pgg
