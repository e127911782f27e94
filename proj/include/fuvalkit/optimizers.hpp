#pragma once

// Iterative methods (GD, SGD, SPS, SPS+, FUVAL and its full-batch and
// single-scale prox-linear variants), their step kernels, stepsize schedules,
// scaling schemes and the seeded run loop that produces a Trace.

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <variant>

#include "fuvalkit/problems.hpp"
#include "fuvalkit/reference.hpp"

namespace fuvalkit {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
/// SPS/SPS+ take a zero step when ||grad f_i(w)||^2 is below this.
inline constexpr double kZeroGradSq = 1e-24;
/// |f(w)| above this (or non-finite) counts as divergence.
inline constexpr double kDivergenceThreshold = 1e100;

struct IterateState {
  Vector w;
  /// One slack per sample; a single entry for the full-batch method.
  Vector s;
  std::size_t t = 0;
};

enum class ScheduleKind { Constant, InvSqrt };

struct Schedule {
  ScheduleKind kind = ScheduleKind::Constant;
  double base = 1.0;

  /// base or base / sqrt(t + 1).
  double at(std::size_t t) const noexcept;
};

enum class ScalingKind { Naive, UnitInvariantFV, UnitInvariantGrad, RemarkLipschitz, RemarkFV };

std::string to_string(ScalingKind kind);
ScalingKind scaling_kind_from_string(const std::string& name);

/// A scaling rule plus the single dimensionless tunable eta (the stepsize factor).
struct ScalingScheme {
  ScalingKind kind = ScalingKind::UnitInvariantFV;
  double eta = 1.0;
};

struct SlackInit {
  enum class Kind { AtW0, Zeros, Custom };
  Kind kind = Kind::AtW0;
  Vector custom;
};

struct FuvalParams {
  Schedule lambda;
  Schedule delta;
  double gamma = 1.0;
  double c_penalty = kInfinity;
  SlackInit s_init;

  /// Throws ConfigError unless gamma in (0,1], c >= 1 and both bases > 0.
  void validate() const;
};

struct GradientDescent { double step = 1.0; };
struct StochasticGradient { double step = 1.0; };
struct Sps {};
struct SpsPlus {};
struct Fuval { FuvalParams params; };
struct FuvalFullBatch { FuvalParams params; };
struct ProxLinearAppC {
  Schedule lambda;
  double c_penalty = kInfinity;
  SlackInit s_init;
};

using MethodSpec =
    std::variant<GradientDescent, StochasticGradient, Sps, SpsPlus, Fuval, FuvalFullBatch, ProxLinearAppC>;

/// Short CLI name: gd, sgd, sps, sps-plus, fuval, fuval-full, prox-linear.
std::string method_name(const MethodSpec& method);
/// True for methods that touch one sample per step.
bool is_stochastic(const MethodSpec& method);
/// epochs * n for stochastic methods, epochs for full-batch ones.
std::size_t iterations_for_epochs(const MethodSpec& method, std::size_t n, std::size_t epochs);

/// What one step did. `sample` is -1 for full-batch steps.
struct StepRecord {
  long sample = -1;
  double tau = std::numeric_limits<double>::quiet_NaN();
  double f_value = std::numeric_limits<double>::quiet_NaN();
  double grad_norm_sq = std::numeric_limits<double>::quiet_NaN();
  /// Effective multiplier applied to the gradient in the w update.
  double stepsize = std::numeric_limits<double>::quiet_NaN();
};

// --- step kernels ----------------------------------------------------------

/// (f_i(w) - f_i(w*)) / ||grad f_i(w)||^2, clipped at zero when `positive`.
double sps_stepsize(const Problem& problem, const ReferenceSolution& reference, std::span<const double> w,
                    std::size_t i, bool positive);
Vector sps_step(const Problem& problem, const ReferenceSolution& reference, std::span<const double> w,
                std::size_t i);
Vector sps_plus_step(const Problem& problem, const ReferenceSolution& reference, std::span<const double> w,
                     std::size_t i);

/// tau = min{c, (f_j - s_j + delta)_+ / (delta + lambda ||grad f_j||^2)},
/// w -= gamma tau lambda grad f_j, s_j += gamma delta (tau - 1).
/// Updates `state` in place (t incremented) and returns the step record.
StepRecord fuval_step_inplace(const Problem& problem, IterateState& state, double gamma, double c_penalty,
                              std::size_t j, double lambda_t, double delta_t);

struct FuvalStepResult {
  IterateState state;
  StepRecord record;
};
FuvalStepResult fuval_step(const Problem& problem, const IterateState& state, const FuvalParams& params,
                           std::size_t j, double lambda_t, double delta_t);

struct FullBatchStepResult {
  Vector w;
  double s = 0.0;
  StepRecord record;
};
/// The same update with f, grad f and a scalar slack.
FullBatchStepResult fuval_full_batch_step(const Problem& problem, std::span<const double> w, double s,
                                          const FuvalParams& params, double lambda_t, double delta_t);

/// Single-scale variant: tau = min{lambda c, (f_j - s_j + lambda)_+ / (||grad f_j||^2 + 1)},
/// w -= tau grad f_j, s_j += tau - lambda.
StepRecord prox_linear_appc_step_inplace(const Problem& problem, IterateState& state, double lambda_t,
                                         double c_penalty, std::size_t j);
IterateState prox_linear_appc_step(const Problem& problem, const IterateState& state, double lambda_t,
                                   double c_penalty, std::size_t j);

// --- scaling ------------------------------------------------------------------

struct ScalingBases {
  double lambda = 1.0;
  double delta = 1.0;
};

/// Maps (scheme, eta) and statistics at w0 to the bases of the lambda and delta
/// schedules. RemarkLipschitz falls back to RemarkFV when the problem has no
/// Lipschitz constants (least squares). Throws ConfigError naming the scheme
/// when a statistic it divides by vanishes.
ScalingBases resolve_scaling(const ScalingScheme& scheme, const Problem& problem, std::span<const double> w0,
                             const SampleConstants& constants);

/// FuvalParams with both schedules of `kind` and bases from resolve_scaling.
FuvalParams fuval_params_for(const ScalingScheme& scheme, const Problem& problem, std::span<const double> w0,
                             ScheduleKind kind = ScheduleKind::Constant, double gamma = 1.0,
                             double c_penalty = kInfinity);

// --- run loop ---------------------------------------------------------------------

struct TraceRecord {
  std::size_t t = 0;
  long sample = -1;
  double tau = std::numeric_limits<double>::quiet_NaN();
  double f = std::numeric_limits<double>::quiet_NaN();
  double subopt = std::numeric_limits<double>::quiet_NaN();
  double grad_sq = std::numeric_limits<double>::quiet_NaN();
  double stepsize = std::numeric_limits<double>::quiet_NaN();
  double seconds = 0.0;
};

struct RunMetadata {
  std::string method;
  std::string scheme = "none";
  std::uint64_t seed = 0;
  std::size_t iterations = 0;
  double gamma = std::numeric_limits<double>::quiet_NaN();
  double c_penalty = std::numeric_limits<double>::quiet_NaN();
  double lambda_base = std::numeric_limits<double>::quiet_NaN();
  double delta_base = std::numeric_limits<double>::quiet_NaN();
  double reference_f_star = std::numeric_limits<double>::quiet_NaN();
  double reference_tol = std::numeric_limits<double>::quiet_NaN();
};

struct Trace {
  RunMetadata meta;
  std::vector<TraceRecord> records;
  bool diverged = false;
  std::size_t steps = 0;
  Vector w0;
  Vector s0;
  Vector w_final;
  Vector s_final;
  /// w^0 .. w^steps when RunConfig::store_iterates is set.
  std::vector<Vector> iterates;
  /// lambda_t used at step t (the GD/SGD step for those methods).
  std::vector<double> step_lambdas;
};

using StepObserver = std::function<void(const IterateState&, const StepRecord&)>;

struct RunConfig {
  std::size_t iterations = 0;
  std::uint64_t seed = 0;
  const ReferenceSolution* reference = nullptr;
  /// Record f(w^t) every this many steps (plus t = 0 and the final step).
  std::size_t eval_every = 1;
  bool store_iterates = false;
  std::optional<Vector> w0;
  /// Called after every step with the new state.
  StepObserver observer;
  std::string scheme_label = "none";
};

/// Runs `config.iterations` steps with i.i.d. uniform sampling from a
/// generator seeded by `config.seed`. Halts early and sets `diverged` when an
/// iterate or f(w) becomes non-finite or exceeds kDivergenceThreshold.
Trace run(const Problem& problem, const MethodSpec& method, const RunConfig& config);

struct AverageWeighting {
  enum class Kind { Uniform, LambdaWeighted, ThetaWeighted };
  Kind kind = Kind::Uniform;
  /// ThetaWeighted uses theta = n / (n + 2 gamma^2).
  double gamma = 1.0;
  std::size_t n = 1;
};

/// Uniform: mean of w^0..w^{T-1}. LambdaWeighted: sum lambda_t w^{t+1} / sum lambda_t
/// over t < T. ThetaWeighted: sum theta^{t+1} w^t / sum theta^{t+1} over t < T.
/// T defaults to trace.steps. Throws ConfigError when iterates were not stored.
Vector averaged_iterate(const Trace& trace, const AverageWeighting& weighting,
                        std::optional<std::size_t> upto = std::nullopt);

}  // namespace fuvalkit
