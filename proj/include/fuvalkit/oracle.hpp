#pragma once

// Derivative-free numeric minimizer for small convex problems. It knows nothing
// about the closed forms it is used to check: it only evaluates the objective.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>

#include "fuvalkit/linalg.hpp"

namespace fuvalkit {

/// Feasible set {y : <normal, y> <= bound}.
struct LinearConstraint {
  Vector normal;
  double bound = 0.0;
};

struct OracleOptions {
  /// Stop once a whole sweep of line searches improves the objective by less than this.
  double tol = 1e-13;
  std::size_t max_sweeps = 5000;
  /// A line search that keeps decreasing past |t| = this is reported as unbounded.
  double unbounded_step = 1e9;
  std::uint64_t seed = 0x5eed;
};

struct OracleResult {
  Vector argmin;
  double value = 0.0;
  std::size_t evaluations = 0;
};

using Objective = std::function<double(std::span<const double>)>;

/// Minimizes `objective` over R^k (k <= 6), optionally subject to one linear
/// inequality, by golden-section line searches along coordinate axes, random
/// directions and Powell extrapolation directions. When constrained, directions
/// are also projected onto the constraint's tangent space so the search can
/// slide along an active boundary. Throws OracleError when a line search is
/// unbounded or the sweep cap is reached.
OracleResult brute_force_minimize(const Objective& objective, std::span<const double> start,
                                  const std::optional<LinearConstraint>& constraint = std::nullopt,
                                  const OracleOptions& options = {});

}  // namespace fuvalkit
