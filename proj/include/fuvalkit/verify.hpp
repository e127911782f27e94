#pragma once

// Seeded property checks shared by `fuvalkit verify` and the acceptance binary.
// Every check is deterministic and reports one pass/fail line.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "fuvalkit/problems.hpp"

namespace fuvalkit::verify {

struct PropertyResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Dense-ish random problem: each feature present with probability 0.7, values N(0,1).
/// Least-squares labels are N(0,1); logistic labels are +-1.
Problem random_problem(std::mt19937_64& rng, LossKind loss, std::size_t n, std::size_t d);

/// Closed-form projections and the max-linear prox against the numeric oracle.
PropertyResult projection_oracle(std::size_t instances = 1000, std::uint64_t seed = 11);

/// fuval_step against the projection, prox-linear and online-SGD assemblies (three results).
std::vector<PropertyResult> viewpoint_equivalence(std::size_t triples = 500, std::uint64_t seed = 12);

PropertyResult gradient_bound_identity(std::size_t states = 1000, std::uint64_t seed = 13);
/// Loss gradients and surrogate gradients against central differences.
PropertyResult finite_differences(std::size_t points = 200, std::uint64_t seed = 14);
PropertyResult slack_lower_bound(std::size_t steps = 10000, std::size_t seeds = 5);
PropertyResult fejer_monotonicity(std::size_t steps = 1000, std::size_t seeds = 5);
/// SPS+ smooth bound at every horizon plus the log-log rate fit.
PropertyResult sps_smooth_bound(std::size_t T = 10000, std::size_t seeds = 5);
/// SPS+ Lipschitz bound on a logistic problem.
PropertyResult sps_lipschitz_bound(std::size_t T = 5000, std::size_t seeds = 5);
PropertyResult sgd_convergence_bound(std::size_t seeds = 20);
/// Rate fit of the lambda-weighted average under InvSqrt schedules.
PropertyResult prox_linear_rate(std::size_t T = 10000, std::size_t seeds = 5);
/// The printed prox-linear bound at the final horizon of the same runs.
PropertyResult prox_linear_bound(std::size_t T = 10000, std::size_t seeds = 5);
PropertyResult scale_invariance(std::size_t steps = 2000);
PropertyResult penalty_equivalence(std::size_t points = 1000, std::uint64_t seed = 15);
/// Single-scale prox-linear step equals fuval_step with lambda = delta.
PropertyResult appc_identity(std::size_t states = 500, std::uint64_t seed = 16);
/// Full-batch and per-sample steps coincide bit for bit when n = 1.
PropertyResult single_sample_full_batch(std::size_t states = 200, std::uint64_t seed = 17);
PropertyResult tau_bounds(std::size_t states = 1000, std::uint64_t seed = 18);
PropertyResult surrogate_convexity(std::size_t pairs = 500, std::uint64_t seed = 19);
PropertyResult inf_s_closed_form(std::size_t instances = 100, std::uint64_t seed = 20);
PropertyResult stationary_point(std::size_t anchors = 20, std::uint64_t seed = 21);

/// projections, equivalence, identities, bounds, all.
const std::vector<std::string>& suite_names();
/// Throws ConfigError for an unknown suite.
std::vector<PropertyResult> run_suite(const std::string& name);

/// "PASS name (detail)" or "FAIL name (detail)".
std::string format_result(const PropertyResult& r);

}  // namespace fuvalkit::verify
