#pragma once

#include "pgg/types.hpp"

namespace pgg {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;
  Vector x;
};

/// Dense two-phase simplex with Bland's rule for
///   maximize c^T x  subject to  A x <= b,  x >= 0.
/// Intended for the small exact oracles; the tableau is (m + 2) x (n + 2).
LpResult simplex_maximize(const Matrix& a, const Vector& b, const Vector& c, double eps = 1e-9);

}  // namespace pgg
