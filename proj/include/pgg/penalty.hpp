#pragma once

#include <string>
#include <string_view>

#include "pgg/types.hpp"

namespace pgg {

// The six weakly convex sparseness measures. Each is an even function F with
// F(0) = 0, non-decreasing on [0, inf), F(t)/t non-increasing, and
// F(t) - rho * t^2 convex on [0, inf).
enum class PenaltyKind { Abs, RationalP, Exp, Log, Atan, Mcp };

std::string_view to_string(PenaltyKind kind);

// Accepts the lowercase names abs|rational_p|exp|log|atan|mcp. Throws ConfigError otherwise.
PenaltyKind parse_penalty_kind(std::string_view name);

/// A weakly convex sparseness measure scaled as prescale * F(argscale * t).
///
/// Immutable after construction. The shape parameter sigma is ignored by Abs and
/// p is only read by RationalP.
class Penalty {
 public:
  Penalty() = default;
  explicit Penalty(PenaltyKind kind, double sigma = 1.0, double p = 0.5, double prescale = 1.0,
                   double argscale = 1.0);

  PenaltyKind kind() const { return kind_; }
  double sigma() const { return sigma_; }
  double p() const { return p_; }
  double prescale() const { return prescale_; }
  double argscale() const { return argscale_; }

  double eval(double t) const;

  /// One element of the generalized gradient set at t. Zero at t = 0; at the Mcp
  /// saturation point the right derivative of the even extension (0) is returned.
  double grad(double t) const;

  /// Slope at the origin, lim F(t)/t as t -> 0+, including both scalings.
  double alpha() const;

  /// Weak convexity parameter (<= 0). Scales linearly with prescale and
  /// quadratically with argscale.
  double rho() const;

  /// -rho / alpha. Invariant under prescale, linear in argscale.
  double nonconvexity() const;

  Penalty with_prescale(double prescale) const;
  Penalty with_argscale(double argscale) const;

  /// Same measure with prescale chosen so that alpha() == 1.
  Penalty with_unit_alpha() const;

  /// Unit-alpha copy whose argscale is adjusted to reach the requested
  /// non-convexity. Abs only accepts a target of 0.
  Penalty with_nonconvexity(double target) const;

 private:
  PenaltyKind kind_ = PenaltyKind::Abs;
  double sigma_ = 1.0;
  double p_ = 0.5;
  double prescale_ = 1.0;
  double argscale_ = 1.0;
};

/// J(x) = sum_i F(x_i).
double j_value(const Penalty& pen, const Vector& x);

/// Coordinate-wise generalized gradient of J, written into out (resized to x.size()).
void j_gradient(const Penalty& pen, const Vector& x, Vector& out);
Vector j_gradient(const Penalty& pen, const Vector& x);

}  // namespace pgg
