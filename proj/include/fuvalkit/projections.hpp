#pragma once

// Closed-form solutions of the three small subproblems that every update in
// this library reduces to.

#include <span>

#include "fuvalkit/linalg.hpp"

namespace fuvalkit {

/// Squared norms below this are treated as an exactly zero normal vector.
inline constexpr double kZeroNormSq = 1e-24;

/// argmin_w ||w - w0||^2  s.t.  <a, w - w0> + c <= 0.
/// Returns w0 - ((c)_+ / ||a||^2) a. Throws InfeasibleError when a = 0 and c > 0.
Vector halfspace_project(std::span<const double> a, double c, std::span<const double> w0);

struct HalfspaceSlackInstance {
  Vector a;
  double c = 0.0;
  Vector w0;
  double s0 = 0.0;
  /// Weight on (s - s0)^2 in the objective; must be positive.
  double slack_weight = 1.0;
};

struct SlackProjection {
  Vector w;
  double s;
};

/// argmin_{w,s} ||w - w0||^2 + slack_weight (s - s0)^2  s.t.  <a, w - w0> + c <= s.
SlackProjection halfspace_project_slack(const HalfspaceSlackInstance& inst);

/// argmin_y (c + <a, y - y0>)_+ + ||y - y0||^2 / (2 beta)
///   = y0 - min{beta, (c)_+ / ||a||^2} a,
/// with (c)_+/0 read as +inf for c > 0 and 0 otherwise.
Vector max_linear_prox(std::span<const double> y0, std::span<const double> a, double c, double beta);

/// The step coefficient min{beta, (c)_+ / ||a||^2} used by max_linear_prox.
double max_linear_prox_coefficient(double a_norm_sq, double c, double beta);

}  // namespace fuvalkit
