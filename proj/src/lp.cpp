#include "pgg/lp.hpp"

#include <limits>
#include <vector>

#include "pgg/error.hpp"

namespace pgg {
namespace {

class Tableau {
 public:
  Tableau(const Matrix& a, const Vector& b, const Vector& c, double eps)
      : m_(a.rows()), n_(a.cols()), eps_(eps), basis_(m_), nonbasis_(n_ + 1), d_(m_ + 2, n_ + 2) {
    d_.setZero();
    for (Index i = 0; i < m_; ++i) {
      for (Index j = 0; j < n_; ++j) d_(i, j) = a(i, j);
      basis_[i] = n_ + i;
      d_(i, n_) = -1.0;
      d_(i, n_ + 1) = b[i];
    }
    for (Index j = 0; j < n_; ++j) {
      nonbasis_[j] = j;
      d_(m_, j) = -c[j];
    }
    nonbasis_[n_] = -1;
    d_(m_ + 1, n_) = 1.0;
  }

  LpResult solve() {
    LpResult out;
    Index r = 0;
    for (Index i = 1; i < m_; ++i) {
      if (d_(i, n_ + 1) < d_(r, n_ + 1)) r = i;
    }
    if (m_ > 0 && d_(r, n_ + 1) < -eps_) {
      pivot(r, n_);
      if (!run(true) || d_(m_ + 1, n_ + 1) < -eps_) {
        out.status = LpStatus::Infeasible;
        return out;
      }
      for (Index i = 0; i < m_; ++i) {
        if (basis_[i] != -1) continue;
        Index s = -1;
        for (Index j = 0; j <= n_; ++j) {
          if (s == -1 || d_(i, j) < d_(i, s) || (d_(i, j) == d_(i, s) && nonbasis_[j] < nonbasis_[s])) s = j;
        }
        pivot(i, s);
      }
    }
    if (!run(false)) {
      out.status = LpStatus::Unbounded;
      out.objective = std::numeric_limits<double>::infinity();
      return out;
    }
    out.status = LpStatus::Optimal;
    out.x = Vector::Zero(n_);
    for (Index i = 0; i < m_; ++i) {
      if (basis_[i] >= 0 && basis_[i] < n_) out.x[basis_[i]] = d_(i, n_ + 1);
    }
    out.objective = d_(m_, n_ + 1);
    return out;
  }

 private:
  void pivot(Index r, Index s) {
    const double inv = 1.0 / d_(r, s);
    for (Index i = 0; i < m_ + 2; ++i) {
      if (i == r) continue;
      const double factor = d_(i, s) * inv;
      if (factor == 0.0) continue;
      for (Index j = 0; j < n_ + 2; ++j) {
        if (j != s) d_(i, j) -= d_(r, j) * factor;
      }
    }
    for (Index j = 0; j < n_ + 2; ++j) {
      if (j != s) d_(r, j) *= inv;
    }
    for (Index i = 0; i < m_ + 2; ++i) {
      if (i != r) d_(i, s) *= -inv;
    }
    d_(r, s) = inv;
    std::swap(basis_[r], nonbasis_[s]);
  }

  // Bland's rule: lowest-index improving column, lowest-index tied row.
  bool run(bool phase_one) {
    const Index row = phase_one ? m_ + 1 : m_;
    for (;;) {
      Index s = -1;
      for (Index j = 0; j <= n_; ++j) {
        if (!phase_one && nonbasis_[j] == -1) continue;
        if (d_(row, j) < -eps_ && (s == -1 || nonbasis_[j] < nonbasis_[s])) s = j;
      }
      if (s == -1) return true;
      Index r = -1;
      double best = 0.0;
      for (Index i = 0; i < m_; ++i) {
        if (d_(i, s) <= eps_) continue;
        const double ratio = d_(i, n_ + 1) / d_(i, s);
        if (r == -1 || ratio < best - eps_ || (ratio <= best + eps_ && basis_[i] < basis_[r])) {
          r = i;
          best = ratio;
        }
      }
      if (r == -1) return false;
      pivot(r, s);
    }
  }

  Index m_;
  Index n_;
  double eps_;
  std::vector<Index> basis_;
  std::vector<Index> nonbasis_;
  Matrix d_;
};

}  // namespace

LpResult simplex_maximize(const Matrix& a, const Vector& b, const Vector& c, double eps) {
  if (a.rows() != b.size() || a.cols() != c.size()) throw ConfigError("LP dimensions disagree");
  return Tableau(a, b, c, eps).solve();
}

}  // namespace pgg
