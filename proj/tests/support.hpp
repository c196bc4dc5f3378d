#pragma once

// Independent reference implementations used by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "pgg/lp.hpp"
#include "pgg/penalty.hpp"
#include "pgg/types.hpp"

namespace testing {

using pgg::Index;
using pgg::Matrix;
using pgg::Penalty;
using pgg::PenaltyKind;
using pgg::Vector;

inline Matrix gaussian(Index m, Index n, std::mt19937_64& rng, double sd = 1.0) {
  std::normal_distribution<double> nd(0.0, sd);
  Matrix a(m, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < m; ++i) a(i, j) = nd(rng);
  return a;
}

inline Vector sparse(Index n, Index k, std::mt19937_64& rng) {
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::shuffle(idx.begin(), idx.end(), rng);
  std::normal_distribution<double> nd;
  Vector x = Vector::Zero(n);
  for (Index i = 0; i < k; ++i) x[idx[static_cast<std::size_t>(i)]] = nd(rng);
  return x / x.norm();
}

// 256 log-spaced magnitudes in [1e-6, 1e3], both signs, plus 0.
inline std::vector<double> penalty_grid() {
  std::vector<double> g{0.0};
  for (int i = 0; i < 256; ++i) {
    double t = std::pow(10.0, -6.0 + 9.0 * i / 255.0);
    g.push_back(t);
    g.push_back(-t);
  }
  return g;
}

// Table formulas written out directly, without the library's scaling code.
inline double raw_f(PenaltyKind kind, double s, double p, double t) {
  const double u = std::fabs(t);
  switch (kind) {
    case PenaltyKind::Abs: return u;
    case PenaltyKind::RationalP: return u / std::pow(u + s, 1.0 - p);
    case PenaltyKind::Exp: return 1.0 - std::exp(-s * u);
    case PenaltyKind::Log: return std::log(1.0 + s * u);
    case PenaltyKind::Atan: return std::atan(s * u);
    case PenaltyKind::Mcp: return u <= 1.0 / s ? 2.0 * s * u - s * s * u * u : 1.0;
  }
  return 0.0;
}

inline double naive_eval(const Penalty& pen, double t) {
  return pen.prescale() * raw_f(pen.kind(), pen.sigma(), pen.p(), pen.argscale() * t);
}

inline double naive_alpha(const Penalty& pen) {
  const double s = pen.sigma();
  double a = 1.0;
  switch (pen.kind()) {
    case PenaltyKind::Abs: a = 1.0; break;
    case PenaltyKind::RationalP: a = std::pow(s, pen.p() - 1.0); break;
    case PenaltyKind::Exp:
    case PenaltyKind::Log:
    case PenaltyKind::Atan: a = s; break;
    case PenaltyKind::Mcp: a = 2.0 * s; break;
  }
  return pen.prescale() * pen.argscale() * a;
}

// rho = inf_{t>0} F''(t)/2, scanning central differences of the gradient.
inline double numeric_rho(const Penalty& pen) {
  double best = 0.0;
  const double scale = 1.0 / (pen.argscale() * pen.sigma());
  for (int i = 0; i <= 4000; ++i) {
    const double t = scale * std::pow(10.0, -6.0 + 8.0 * i / 4000.0);
    const double h = 1e-4 * t;
    const double f2 = (pen.grad(t + h) - pen.grad(t - h)) / (2.0 * h);
    best = std::min(best, f2 / 2.0);
  }
  return best;
}

inline Penalty random_penalty(PenaltyKind kind, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> logu(-1.0, 1.0);
  std::uniform_real_distribution<double> pu(0.0, 0.95);
  const double sigma = std::pow(10.0, logu(rng));
  const double p = pu(rng);
  const double pre = std::pow(5.0, logu(rng));
  const double arg = std::pow(5.0, logu(rng));
  return Penalty(kind, sigma, p, pre, arg);
}

inline const std::vector<PenaltyKind>& all_kinds() {
  static const std::vector<PenaltyKind> kinds{PenaltyKind::Abs, PenaltyKind::RationalP,
                                              PenaltyKind::Exp, PenaltyKind::Log,
                                              PenaltyKind::Atan, PenaltyKind::Mcp};
  return kinds;
}

// Kink locations of the penalty in t (besides 0).
inline std::vector<double> kinks(const Penalty& pen) {
  if (pen.kind() == PenaltyKind::Mcp) return {1.0 / (pen.sigma() * pen.argscale())};
  return {};
}

// Returns the names of every violated law; empty means all hold.
inline std::vector<std::string> penalty_law_violations(const Penalty& pen) {
  std::vector<std::string> bad;
  auto fail = [&](const std::string& law) {
    if (std::find(bad.begin(), bad.end(), law) == bad.end()) bad.push_back(law);
  };
  const auto grid = penalty_grid();
  const double a = pen.alpha();
  const double r = pen.rho();
  auto tol = [](double mag) { return 1e-9 + 1e-12 * mag; };

  if (!(a > 0.0)) fail("alpha positive");
  if (!(r <= 0.0)) fail("rho nonpositive");
  if (pen.eval(0.0) != 0.0) fail("eval(0) = 0");
  if (pen.grad(0.0) != 0.0) fail("grad(0) = 0");
  if (std::fabs(pen.nonconvexity() + r / a) > 1e-15 * std::max(1.0, std::fabs(r / a))) fail("nonconvexity");

  std::vector<double> pos;
  for (double t : grid) {
    const double f = pen.eval(t);
    const double g = pen.grad(t);
    if (pen.eval(-t) != f) fail("even");
    if (std::fabs(f - naive_eval(pen, t)) > 1e-12 * std::max(1.0, std::fabs(f))) fail("table formula");
    if (std::fabs(g) > a + tol(a)) fail("gradient bounded by alpha");
    if (t > 0 && g < 0.0) fail("gradient nonnegative");
    if (f - a * std::fabs(t) - r * t * t < -tol(a * std::fabs(t) - r * t * t)) fail("quadratic upper bound");
    if (t >= 0) pos.push_back(t);
  }
  std::sort(pos.begin(), pos.end());
  for (std::size_t i = 1; i < pos.size(); ++i) {
    if (pen.eval(pos[i]) < pen.eval(pos[i - 1])) fail("monotone");
    if (i >= 2 && pen.eval(pos[i - 1]) / pos[i - 1] < pen.eval(pos[i]) / pos[i] - 1e-12 * pen.eval(pos[i - 1]) / pos[i - 1])
      fail("ratio nonincreasing");
  }
  for (double t1 : grid) {
    const double f1 = pen.eval(t1);
    const double g1 = pen.grad(t1);
    for (double t2 : grid) {
      const double f2 = pen.eval(t2);
      const double f12 = pen.eval(t1 + t2);
      if (f12 > f1 + f2 + tol(f1 + f2)) fail("subadditive");
      const double dt = t1 - t2;
      const double lhs = dt * g1;
      const double rhs = f1 - f2 + r * dt * dt;
      if (lhs < rhs - tol(std::fabs(lhs) + std::fabs(f1) + std::fabs(f2) + std::fabs(r * dt * dt))) fail("weak convexity inequality");
      if (t1 >= 0 && t2 > t1) {
        const double mid = pen.eval(0.5 * (t1 + t2));
        const double bound = 0.5 * (f1 + f2) - r * dt * dt / 4.0;
        if (mid > bound + tol(std::fabs(f1) + std::fabs(f2) + std::fabs(r * dt * dt))) fail("midpoint weak convexity");
      }
    }
  }
  // Central differences away from 0 and kinks.
  for (double t : grid) {
    if (std::fabs(t) < 1e-3) continue;
    bool near_kink = false;
    for (double k : kinks(pen)) near_kink |= std::fabs(std::fabs(t) - k) < 1e-3 * std::max(1.0, k);
    if (near_kink) continue;
    const double h = 1e-5 * std::fabs(t);
    const double fd = (pen.eval(t + h) - pen.eval(t - h)) / (2.0 * h);
    if (std::fabs(fd - pen.grad(t)) > 1e-6 * std::max(1.0, std::fabs(pen.grad(t)))) fail("finite difference gradient");
  }
  // Slope at the origin.
  {
    const double t = 1e-9 / pen.argscale();
    if (std::fabs(pen.eval(t) / t - a) > 1e-6 * a) fail("alpha as F(t)/t limit");
    if (std::fabs(a - naive_alpha(pen)) > 1e-12 * a) fail("alpha closed form");
  }
  return bad;
}

// min ||x||_1 s.t. A x = y by enumerating basic solutions (supports of size rank(A)).
inline Vector l1_min_basic(const Matrix& a, const Vector& y) {
  const Index m = a.rows();
  const Index n = a.cols();
  std::vector<Index> comb(static_cast<std::size_t>(m));
  std::iota(comb.begin(), comb.end(), Index{0});
  double best = std::numeric_limits<double>::infinity();
  Vector best_x = Vector::Zero(n);
  while (true) {
    Matrix sub(m, m);
    for (Index q = 0; q < m; ++q) sub.col(q) = a.col(comb[static_cast<std::size_t>(q)]);
    Eigen::FullPivLU<Matrix> lu(sub);
    if (lu.rank() == m) {
      Vector c = lu.solve(y);
      if (c.lpNorm<1>() < best) {
        best = c.lpNorm<1>();
        best_x.setZero();
        for (Index q = 0; q < m; ++q) best_x[comb[static_cast<std::size_t>(q)]] = c[q];
      }
    }
    Index i = m - 1;
    while (i >= 0 && comb[static_cast<std::size_t>(i)] == n - m + i) --i;
    if (i < 0) break;
    ++comb[static_cast<std::size_t>(i)];
    for (Index j = i + 1; j < m; ++j) comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
  }
  return best_x;
}

// min ||x||_1 s.t. A x = y as an LP in (u, v) >= 0 with x = u - v.
inline double l1_min_lp_value(const Matrix& a, const Vector& y) {
  const Index m = a.rows();
  const Index n = a.cols();
  Matrix lp(2 * m, 2 * n);
  lp << a, -a, -a, a;
  Vector b(2 * m);
  b << y, -y;
  Vector c = -Vector::Ones(2 * n);
  pgg::LpResult res = pgg::simplex_maximize(lp, b, c);
  return -res.objective;
}

// Y_0 = s A^T, Y_k = Y_{k-1}(2I - A Y_{k-1}) carried directly on the N x M iterate.
inline Matrix direct_hyperpower(const Matrix& a, int steps, double scale) {
  Matrix gram = a * a.transpose();
  const double n1 = gram.cwiseAbs().colwise().sum().maxCoeff();
  Matrix y = (scale / n1) * a.transpose();
  const Matrix eye = Matrix::Identity(a.rows(), a.rows());
  for (int k = 0; k < steps; ++k) y = y * (2.0 * eye - a * y);
  return y;
}

}  // namespace testing
