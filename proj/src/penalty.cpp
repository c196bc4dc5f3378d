#include "pgg/penalty.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "pgg/error.hpp"

namespace pgg {
namespace {

// Unscaled measure F(u) for u >= 0.
double base_value(PenaltyKind kind, double sigma, double p, double u) {
  switch (kind) {
    case PenaltyKind::Abs:
      return u;
    case PenaltyKind::RationalP:
      return u / std::pow(u + sigma, 1.0 - p);
    case PenaltyKind::Exp:
      return -std::expm1(-sigma * u);
    case PenaltyKind::Log:
      return std::log1p(sigma * u);
    case PenaltyKind::Atan:
      return std::atan(sigma * u);
    case PenaltyKind::Mcp:
      return u <= 1.0 / sigma ? 2.0 * sigma * u - sigma * sigma * u * u : 1.0;
  }
  return 0.0;
}

// Right derivative of the unscaled measure for u > 0.
double base_slope(PenaltyKind kind, double sigma, double p, double u) {
  switch (kind) {
    case PenaltyKind::Abs:
      return 1.0;
    case PenaltyKind::RationalP:
      return std::pow(u + sigma, p - 2.0) * (sigma + p * u);
    case PenaltyKind::Exp:
      return sigma * std::exp(-sigma * u);
    case PenaltyKind::Log:
      return sigma / (1.0 + sigma * u);
    case PenaltyKind::Atan:
      return sigma / (1.0 + sigma * sigma * u * u);
    case PenaltyKind::Mcp:
      return u < 1.0 / sigma ? 2.0 * sigma - 2.0 * sigma * sigma * u : 0.0;
  }
  return 0.0;
}

double base_alpha(PenaltyKind kind, double sigma, double p) {
  switch (kind) {
    case PenaltyKind::Abs:
      return 1.0;
    case PenaltyKind::RationalP:
      return std::pow(sigma, p - 1.0);
    case PenaltyKind::Exp:
    case PenaltyKind::Log:
    case PenaltyKind::Atan:
      return sigma;
    case PenaltyKind::Mcp:
      return 2.0 * sigma;
  }
  return 0.0;
}

double base_rho(PenaltyKind kind, double sigma, double p) {
  switch (kind) {
    case PenaltyKind::Abs:
      return 0.0;
    case PenaltyKind::RationalP:
      return (p - 1.0) * std::pow(sigma, p - 2.0);
    case PenaltyKind::Exp:
    case PenaltyKind::Log:
      return -sigma * sigma / 2.0;
    case PenaltyKind::Atan:
      return -3.0 * std::numbers::sqrt3 * sigma * sigma / 16.0;
    case PenaltyKind::Mcp:
      return -sigma * sigma;
  }
  return 0.0;
}

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

std::string_view to_string(PenaltyKind kind) {
  switch (kind) {
    case PenaltyKind::Abs:
      return "abs";
    case PenaltyKind::RationalP:
      return "rational_p";
    case PenaltyKind::Exp:
      return "exp";
    case PenaltyKind::Log:
      return "log";
    case PenaltyKind::Atan:
      return "atan";
    case PenaltyKind::Mcp:
      return "mcp";
  }
  return "unknown";
}

PenaltyKind parse_penalty_kind(std::string_view name) {
  for (auto kind : {PenaltyKind::Abs, PenaltyKind::RationalP, PenaltyKind::Exp, PenaltyKind::Log,
                    PenaltyKind::Atan, PenaltyKind::Mcp}) {
    if (to_string(kind) == name) return kind;
  }
  throw ConfigError("unknown penalty kind '" + std::string(name) + "'");
}

Penalty::Penalty(PenaltyKind kind, double sigma, double p, double prescale, double argscale)
    : kind_(kind), sigma_(sigma), p_(p), prescale_(prescale), argscale_(argscale) {
  if (!positive_finite(sigma_)) throw ConfigError("penalty sigma must be positive");
  if (!(p_ >= 0.0 && p_ < 1.0)) throw ConfigError("penalty p must lie in [0, 1)");
  if (!positive_finite(prescale_)) throw ConfigError("penalty prescale must be positive");
  if (!positive_finite(argscale_)) throw ConfigError("penalty argscale must be positive");
}

double Penalty::eval(double t) const {
  return prescale_ * base_value(kind_, sigma_, p_, argscale_ * std::abs(t));
}

double Penalty::grad(double t) const {
  if (t == 0.0) return 0.0;
  double slope = prescale_ * argscale_ * base_slope(kind_, sigma_, p_, argscale_ * std::abs(t));
  return t > 0.0 ? slope : -slope;
}

double Penalty::alpha() const { return prescale_ * argscale_ * base_alpha(kind_, sigma_, p_); }

double Penalty::rho() const {
  return prescale_ * argscale_ * argscale_ * base_rho(kind_, sigma_, p_);
}

double Penalty::nonconvexity() const { return -rho() / alpha(); }

Penalty Penalty::with_prescale(double prescale) const {
  return Penalty(kind_, sigma_, p_, prescale, argscale_);
}

Penalty Penalty::with_argscale(double argscale) const {
  return Penalty(kind_, sigma_, p_, prescale_, argscale);
}

Penalty Penalty::with_unit_alpha() const { return with_prescale(prescale_ / alpha()); }

Penalty Penalty::with_nonconvexity(double target) const {
  if (!(target >= 0.0) || !std::isfinite(target)) {
    throw ConfigError("target non-convexity must be finite and nonnegative");
  }
  Penalty unit = with_unit_alpha();
  double current = unit.nonconvexity();
  if (current == 0.0) {
    if (target == 0.0) return unit;
    throw ConfigError("abs penalty has zero non-convexity and cannot be rescaled");
  }
  if (target == 0.0) throw ConfigError("only the abs penalty has zero non-convexity");
  return unit.with_argscale(argscale_ * target / current).with_unit_alpha();
}

double j_value(const Penalty& pen, const Vector& x) {
  double sum = 0.0;
  for (Index i = 0; i < x.size(); ++i) sum += pen.eval(x[i]);
  return sum;
}

void j_gradient(const Penalty& pen, const Vector& x, Vector& out) {
  out.resize(x.size());
  for (Index i = 0; i < x.size(); ++i) out[i] = pen.grad(x[i]);
}

Vector j_gradient(const Penalty& pen, const Vector& x) {
  Vector out;
  j_gradient(pen, x, out);
  return out;
}

}  // namespace pgg
