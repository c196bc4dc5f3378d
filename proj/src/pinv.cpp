#include "pgg/pinv.hpp"

#include <cmath>

#include "pgg/error.hpp"

namespace pgg {
namespace {

constexpr int kPowerMaxIters = 10000;
constexpr double kPowerRelTol = 1e-8;

// Power iteration on op^T op. apply/apply_t map R^n -> R^m and back.
template <typename Apply, typename ApplyT>
double power_norm(const Apply& apply, const ApplyT& apply_t, Vector v) {
  double lambda = 0.0;
  for (int it = 0; it < kPowerMaxIters; ++it) {
    Vector w = apply_t(apply(v));
    double next = v.dot(w);
    double wn = w.norm();
    if (wn == 0.0) return 0.0;
    v = w / wn;
    if (it > 0 && std::abs(next - lambda) <= kPowerRelTol * std::abs(next)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return std::sqrt(std::max(lambda, 0.0));
}

template <typename Apply, typename ApplyT>
double operator_norm(Index n, const Apply& apply, const ApplyT& apply_t) {
  if (n == 0) return 0.0;
  Vector ones = Vector::Ones(n) / std::sqrt(static_cast<double>(n));
  double result = power_norm(apply, apply_t, ones);
  if (result == 0.0) {
    // The all-ones start can be orthogonal to the row space; retry from a fixed
    // non-symmetric vector before declaring the operator zero.
    Vector alt(n);
    for (Index i = 0; i < n; ++i) alt[i] = std::sin(1.0 + 0.7 * static_cast<double>(i)) + 0.1;
    result = power_norm(apply, apply_t, alt.normalized());
  }
  return result;
}

}  // namespace

double spectral_norm(const Matrix& mx) {
  return operator_norm(
      mx.cols(), [&](const Vector& v) -> Vector { return mx * v; },
      [&](const Vector& v) -> Vector { return mx.transpose() * v; });
}

double spectral_norm_svd(const Matrix& mx) {
  if (mx.size() == 0) return 0.0;
  Eigen::BDCSVD<Matrix> svd(mx);
  return svd.singularValues()(0);
}

double sigma_min_nonzero(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::BDCSVD<Matrix> svd(a);
  const Vector& s = svd.singularValues();
  double cutoff = 1e-10 * s(0);
  double smallest = 0.0;
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff) smallest = s(i);
  }
  return smallest;
}

double norm_one(const Matrix& mx) {
  if (mx.size() == 0) return 0.0;
  return mx.cwiseAbs().colwise().sum().maxCoeff();
}

double measure_zeta(const Matrix& a, const Matrix& b) {
  Matrix defect = Matrix::Identity(a.rows(), a.rows()) - (a * a.transpose()) * b;
  return spectral_norm_svd(defect);
}

double measure_d(const Matrix& a, const Matrix& b) {
  // I - A^T B A, applied matrix-free.
  double norm = operator_norm(
      a.cols(), [&](const Vector& v) -> Vector { return v - a.transpose() * (b * (a * v)); },
      [&](const Vector& v) -> Vector { return v - a.transpose() * (b.transpose() * (a * v)); });
  return norm * norm;
}

SensingModel::SensingModel(Matrix a, Matrix b, ProjectionMode mode, int steps)
    : a_(std::move(a)), b_(std::move(b)), mode_(mode), steps_(steps) {
  pinv_ = a_.transpose() * b_;
  zeta_ = mode_ == ProjectionMode::Exact ? 0.0 : measure_zeta(a_, b_);
  d_ = measure_d(a_, b_);
  sigma_min_ = sigma_min_nonzero(a_);
  norm_a_ = spectral_norm(a_);
  norm_b_ = spectral_norm(b_);
}

SensingModel exact_pinv(Matrix a) {
  if (a.rows() == 0 || a.cols() == 0) throw ConfigError("empty sensing matrix");
  Matrix gram = a * a.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  if (eig.info() != Eigen::Success) throw NumericalError("singular Gram matrix");
  const Vector& lambda = eig.eigenvalues();
  double top = lambda.maxCoeff();
  if (!(top > 0.0) || lambda.minCoeff() <= 1e-12 * top) throw NumericalError("singular Gram matrix");
  const Matrix& v = eig.eigenvectors();
  Matrix b = v * lambda.cwiseInverse().asDiagonal() * v.transpose();
  return SensingModel(std::move(a), std::move(b), ProjectionMode::Exact, 0);
}

Matrix ben_israel_factor(const Matrix& a, int steps, double scale) {
  if (steps < 0) throw ConfigError("Ben-Israel step count must be nonnegative");
  if (!(scale > 0.0 && scale < 2.0)) throw ConfigError("Ben-Israel scale must lie in (0, 2)");
  Matrix gram = a * a.transpose();
  double n1 = norm_one(gram);
  if (!(n1 > 0.0)) throw NumericalError("singular Gram matrix");
  const Index m = gram.rows();
  Matrix g = (scale / n1) * Matrix::Identity(m, m);
  for (int k = 0; k < steps; ++k) {
    Matrix residual = 2.0 * Matrix::Identity(m, m) - gram * g;
    g = g * residual;
  }
  return g;
}

SensingModel ben_israel(Matrix a, int steps, double scale) {
  if (a.rows() == 0 || a.cols() == 0) throw ConfigError("empty sensing matrix");
  Matrix b = ben_israel_factor(a, steps, scale);
  return SensingModel(std::move(a), std::move(b), ProjectionMode::Approx, steps);
}

std::vector<BenIsraelStep> ben_israel_history(const Matrix& a, int steps, double scale) {
  if (steps < 0) throw ConfigError("Ben-Israel step count must be nonnegative");
  std::vector<BenIsraelStep> out;
  Matrix gram = a * a.transpose();
  const Index m = gram.rows();
  Matrix g = ben_israel_factor(a, 0, scale);
  for (int k = 0; k <= steps; ++k) {
    if (k > 0) g = g * (2.0 * Matrix::Identity(m, m) - gram * g);
    out.push_back({k, measure_zeta(a, g), measure_d(a, g)});
  }
  return out;
}

}  // namespace pgg
