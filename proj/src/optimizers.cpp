#include "fuvalkit/optimizers.hpp"

#include <chrono>
#include <cmath>
#include <random>

#include "fuvalkit/kernels.hpp"

namespace fuvalkit {

double Schedule::at(std::size_t t) const noexcept {
  if (kind == ScheduleKind::Constant) return base;
  return base / std::sqrt(static_cast<double>(t) + 1.0);
}

std::string to_string(ScalingKind kind) {
  switch (kind) {
    case ScalingKind::Naive: return "naive";
    case ScalingKind::UnitInvariantFV: return "uifv";
    case ScalingKind::UnitInvariantGrad: return "uigrad";
    case ScalingKind::RemarkLipschitz: return "remark-lip";
    case ScalingKind::RemarkFV: return "remark-fv";
  }
  return "?";
}

ScalingKind scaling_kind_from_string(const std::string& name) {
  for (auto kind : {ScalingKind::Naive, ScalingKind::UnitInvariantFV, ScalingKind::UnitInvariantGrad,
                    ScalingKind::RemarkLipschitz, ScalingKind::RemarkFV})
    if (to_string(kind) == name) return kind;
  throw ConfigError("unknown scaling scheme '" + name + "' (expected naive, uifv, uigrad, remark-lip, remark-fv)");
}

void FuvalParams::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in (0, 1]");
  if (!(c_penalty >= 1.0)) throw ConfigError("penalty multiplier c must be >= 1");
  if (!(lambda.base > 0.0) || !std::isfinite(lambda.base)) throw ConfigError("lambda must be positive");
  if (!(delta.base > 0.0) || !std::isfinite(delta.base)) throw ConfigError("delta must be positive");
}

std::string method_name(const MethodSpec& method) {
  struct Namer {
    std::string operator()(const GradientDescent&) const { return "gd"; }
    std::string operator()(const StochasticGradient&) const { return "sgd"; }
    std::string operator()(const Sps&) const { return "sps"; }
    std::string operator()(const SpsPlus&) const { return "sps-plus"; }
    std::string operator()(const Fuval&) const { return "fuval"; }
    std::string operator()(const FuvalFullBatch&) const { return "fuval-full"; }
    std::string operator()(const ProxLinearAppC&) const { return "prox-linear"; }
  };
  return std::visit(Namer{}, method);
}

bool is_stochastic(const MethodSpec& method) {
  return !std::holds_alternative<GradientDescent>(method) && !std::holds_alternative<FuvalFullBatch>(method);
}

std::size_t iterations_for_epochs(const MethodSpec& method, std::size_t n, std::size_t epochs) {
  return is_stochastic(method) ? epochs * n : epochs;
}

// --- step kernels ----------------------------------------------------------

namespace {

void check_state(const Problem& problem, std::span<const double> w, std::size_t i) {
  if (w.size() != problem.dim()) throw ContractError("iterate has wrong dimension");
  if (i >= problem.n()) throw ContractError("sample index out of range");
}

void check_reference(const Problem& problem, const ReferenceSolution& reference) {
  if (reference.per_sample_f_star.size() != problem.n())
    throw ConfigError("reference solution does not match the problem (per-sample values)");
}

/// w -= step * grad f_i(w), with grad f_i = derivative * x_i.
void sparse_step(const Problem& problem, std::size_t i, double step, double derivative, std::span<double> w) {
  const RowView r = problem.row(i);
  for (std::size_t k = 0; k < r.indices.size(); ++k) w[r.indices[k]] -= step * (derivative * r.values[k]);
}

}  // namespace

double sps_stepsize(const Problem& problem, const ReferenceSolution& reference, std::span<const double> w,
                    std::size_t i, bool positive) {
  check_state(problem, w, i);
  check_reference(problem, reference);
  const SampleEval ev = evaluate_sample(problem, i, w);
  if (ev.grad_norm_sq <= kZeroGradSq) return 0.0;
  const double gap = ev.value - reference.per_sample_f_star[i];
  return (positive ? positive_part(gap) : gap) / ev.grad_norm_sq;
}

namespace {

Vector sps_like_step(const Problem& problem, const ReferenceSolution& reference, std::span<const double> w,
                     std::size_t i, bool positive) {
  const double step = sps_stepsize(problem, reference, w, i, positive);
  Vector out(w.begin(), w.end());
  if (step != 0.0) {
    const RowView r = problem.row(i);
    sparse_step(problem, i, step, loss_derivative(problem, i, r.dot(w)), out);
  }
  return out;
}

}  // namespace

Vector sps_step(const Problem& problem, const ReferenceSolution& reference, std::span<const double> w,
                std::size_t i) {
  return sps_like_step(problem, reference, w, i, false);
}

Vector sps_plus_step(const Problem& problem, const ReferenceSolution& reference, std::span<const double> w,
                     std::size_t i) {
  return sps_like_step(problem, reference, w, i, true);
}

StepRecord fuval_step_inplace(const Problem& problem, IterateState& state, double gamma, double c_penalty,
                              std::size_t j, double lambda_t, double delta_t) {
  if (!(lambda_t > 0.0) || !(delta_t > 0.0)) throw ContractError("fuval_step: lambda_t and delta_t must be positive");
  check_state(problem, state.w, j);
  if (state.s.size() != problem.n()) throw ContractError("fuval_step: slack vector must have n entries");

  const SampleEval ev = evaluate_sample(problem, j, state.w);
  const double ratio = positive_part(ev.value - state.s[j] + delta_t) / (delta_t + lambda_t * ev.grad_norm_sq);
  const double tau = std::min(c_penalty, ratio);
  const double step = gamma * tau * lambda_t;
  sparse_step(problem, j, step, ev.derivative, state.w);
  state.s[j] += gamma * delta_t * (tau - 1.0);
  ++state.t;
  return StepRecord{static_cast<long>(j), tau, ev.value, ev.grad_norm_sq, step};
}

FuvalStepResult fuval_step(const Problem& problem, const IterateState& state, const FuvalParams& params,
                           std::size_t j, double lambda_t, double delta_t) {
  FuvalStepResult out{state, {}};
  out.record = fuval_step_inplace(problem, out.state, params.gamma, params.c_penalty, j, lambda_t, delta_t);
  return out;
}

FullBatchStepResult fuval_full_batch_step(const Problem& problem, std::span<const double> w, double s,
                                          const FuvalParams& params, double lambda_t, double delta_t) {
  if (!(lambda_t > 0.0) || !(delta_t > 0.0))
    throw ContractError("fuval_full_batch_step: lambda_t and delta_t must be positive");
  Vector grad;
  const double f = objective_and_grad(problem, w, grad);
  const double grad_sq = norm_sq(grad);
  const double ratio = positive_part(f - s + delta_t) / (lambda_t * grad_sq + delta_t);
  const double tau = std::min(params.c_penalty, ratio);
  const double step = params.gamma * tau * lambda_t;
  FullBatchStepResult out{Vector(w.begin(), w.end()), s + params.gamma * delta_t * (tau - 1.0), {}};
  for (std::size_t k = 0; k < grad.size(); ++k) out.w[k] -= step * grad[k];
  out.record = StepRecord{-1, tau, f, grad_sq, step};
  return out;
}

StepRecord prox_linear_appc_step_inplace(const Problem& problem, IterateState& state, double lambda_t,
                                         double c_penalty, std::size_t j) {
  if (!(lambda_t > 0.0)) throw ContractError("prox_linear_appc_step: lambda_t must be positive");
  if (!(c_penalty >= 1.0)) throw ContractError("prox_linear_appc_step: c must be >= 1");
  check_state(problem, state.w, j);
  if (state.s.size() != problem.n()) throw ContractError("prox_linear_appc_step: slack vector must have n entries");

  const SampleEval ev = evaluate_sample(problem, j, state.w);
  const double tau =
      std::min(lambda_t * c_penalty, positive_part(ev.value - state.s[j] + lambda_t) / (ev.grad_norm_sq + 1.0));
  sparse_step(problem, j, tau, ev.derivative, state.w);
  state.s[j] = state.s[j] - lambda_t + tau;
  ++state.t;
  return StepRecord{static_cast<long>(j), tau, ev.value, ev.grad_norm_sq, tau};
}

IterateState prox_linear_appc_step(const Problem& problem, const IterateState& state, double lambda_t,
                                   double c_penalty, std::size_t j) {
  IterateState out = state;
  prox_linear_appc_step_inplace(problem, out, lambda_t, c_penalty, j);
  return out;
}

// --- scaling ------------------------------------------------------------------

ScalingBases resolve_scaling(const ScalingScheme& scheme, const Problem& problem, std::span<const double> w0,
                             const SampleConstants& constants) {
  const std::string name = to_string(scheme.kind);
  if (!(scheme.eta > 0.0) || !std::isfinite(scheme.eta))
    throw ConfigError("scheme " + name + ": stepsize factor eta must be positive");
  const double eta = scheme.eta;
  if (scheme.kind == ScalingKind::Naive) return {eta, eta};

  if (w0.size() != problem.dim()) throw ContractError("resolve_scaling: w0 has wrong dimension");
  Vector grad;
  const double f0 = objective_and_grad(problem, w0, grad);
  const double w0_sq = norm_sq(w0);
  auto require = [&](bool ok, const char* what) {
    if (!ok) throw ConfigError("scheme " + name + ": " + what);
  };

  ScalingKind kind = scheme.kind;
  if (kind == ScalingKind::RemarkLipschitz && !constants.lipschitz_available) kind = ScalingKind::RemarkFV;

  switch (kind) {
    case ScalingKind::UnitInvariantFV:
      require(f0 > 0.0, "needs f(w0) > 0");
      return {eta / f0, eta * f0};
    case ScalingKind::UnitInvariantGrad: {
      require(f0 > 0.0, "needs f(w0) > 0");
      const double g_sq = norm_sq(grad);
      require(g_sq > 0.0, "needs a nonzero gradient at w0");
      return {eta * f0 / g_sq, eta * f0};
    }
    case ScalingKind::RemarkLipschitz:
      require(constants.g_max > 0.0, "needs G_max > 0");
      require(w0_sq > 0.0, "needs w0 != 0");
      return {eta * w0_sq / constants.g_max, eta * constants.g_max};
    case ScalingKind::RemarkFV:
      require(f0 > 0.0, "needs f(w0) > 0");
      require(w0_sq > 0.0, "needs w0 != 0");
      return {eta * w0_sq / f0, eta * f0};
    case ScalingKind::Naive:
      break;
  }
  return {eta, eta};
}

FuvalParams fuval_params_for(const ScalingScheme& scheme, const Problem& problem, std::span<const double> w0,
                             ScheduleKind kind, double gamma, double c_penalty) {
  const ScalingBases bases = resolve_scaling(scheme, problem, w0, sample_constants(problem));
  FuvalParams params;
  params.lambda = Schedule{kind, bases.lambda};
  params.delta = Schedule{kind, bases.delta};
  params.gamma = gamma;
  params.c_penalty = c_penalty;
  return params;
}

// --- run loop ---------------------------------------------------------------------

namespace {

Vector initial_slack(const Problem& problem, const SlackInit& init, std::span<const double> w0, bool full_batch) {
  const std::size_t size = full_batch ? 1 : problem.n();
  switch (init.kind) {
    case SlackInit::Kind::AtW0:
      return full_batch ? Vector{objective(problem, w0)} : kernels::sample_values_omp(problem, w0);
    case SlackInit::Kind::Zeros:
      return Vector(size, 0.0);
    case SlackInit::Kind::Custom:
      if (init.custom.size() != size)
        throw ConfigError("custom initial slack must have " + std::to_string(size) + " entries");
      return init.custom;
  }
  return Vector(size, 0.0);
}

bool diverged_value(double f) { return !std::isfinite(f) || std::abs(f) > kDivergenceThreshold; }

class Runner {
 public:
  Runner(const Problem& problem, const RunConfig& config, Trace& trace)
      : problem_(problem), config_(config), trace_(trace), rng_(config.seed), pick_(0, problem.n() - 1),
        start_(std::chrono::steady_clock::now()) {}

  std::size_t sample() { return pick_(rng_); }

  void begin(const IterateState& state) {
    trace_.w0 = state.w;
    trace_.s0 = state.s;
    if (config_.store_iterates) trace_.iterates.push_back(state.w);
    evaluate(state, StepRecord{});
  }

  /// Returns false when the run must stop.
  bool after_step(const IterateState& state, const StepRecord& rec, double lambda_t) {
    ++trace_.steps;
    trace_.step_lambdas.push_back(lambda_t);
    if (config_.store_iterates) trace_.iterates.push_back(state.w);
    if (config_.observer) config_.observer(state, rec);
    const bool finite_step = std::isfinite(rec.stepsize) && std::isfinite(rec.f_value) &&
                             std::isfinite(rec.grad_norm_sq);
    const bool eval_now = trace_.steps % std::max<std::size_t>(config_.eval_every, 1) == 0 ||
                          trace_.steps == config_.iterations || !finite_step;
    if (eval_now && !evaluate(state, rec)) return false;
    if (!finite_step || !all_finite(state.w)) {
      if (!eval_now) evaluate(state, rec);
      trace_.diverged = true;
      return false;
    }
    return true;
  }

  void finish(const IterateState& state) {
    trace_.w_final = state.w;
    trace_.s_final = state.s;
  }

 private:
  bool evaluate(const IterateState& state, const StepRecord& rec) {
    TraceRecord r;
    r.t = trace_.steps;
    r.sample = rec.sample;
    r.tau = rec.tau;
    r.grad_sq = rec.grad_norm_sq;
    r.stepsize = rec.stepsize;
    r.f = all_finite(state.w) ? objective(problem_, state.w) : std::numeric_limits<double>::quiet_NaN();
    if (config_.reference) r.subopt = r.f - config_.reference->f_star;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    trace_.records.push_back(r);
    if (diverged_value(r.f)) {
      trace_.diverged = true;
      return false;
    }
    return true;
  }

  const Problem& problem_;
  const RunConfig& config_;
  Trace& trace_;
  std::mt19937_64 rng_;
  std::uniform_int_distribution<std::size_t> pick_;
  std::chrono::steady_clock::time_point start_;
};

const ReferenceSolution& require_reference(const RunConfig& config, const std::string& method) {
  if (!config.reference) throw ConfigError(method + " needs a reference solution supplying f_i(w*)");
  if (!config.reference->converged)
    throw ConfigError(method + " refuses a reference solution that did not converge");
  return *config.reference;
}

}  // namespace

Trace run(const Problem& problem, const MethodSpec& method, const RunConfig& config) {
  Trace trace;
  trace.meta.method = method_name(method);
  trace.meta.scheme = config.scheme_label;
  trace.meta.seed = config.seed;
  trace.meta.iterations = config.iterations;
  if (config.reference) {
    trace.meta.reference_f_star = config.reference->f_star;
    trace.meta.reference_tol = config.reference->tol;
  }

  IterateState state;
  state.w = config.w0 ? *config.w0 : Vector(problem.dim(), 0.0);
  if (state.w.size() != problem.dim()) throw ConfigError("initial point has wrong dimension");

  Runner runner(problem, config, trace);

  auto run_gradient = [&](double step, bool stochastic) {
    trace.meta.lambda_base = step;
    runner.begin(state);
    Vector grad;
    for (std::size_t t = 0; t < config.iterations; ++t) {
      StepRecord rec;
      rec.tau = 1.0;
      rec.stepsize = step;
      if (stochastic) {
        const std::size_t i = runner.sample();
        const SampleEval ev = evaluate_sample(problem, i, state.w);
        sparse_step(problem, i, step, ev.derivative, state.w);
        rec.sample = static_cast<long>(i);
        rec.f_value = ev.value;
        rec.grad_norm_sq = ev.grad_norm_sq;
      } else {
        rec.f_value = objective_and_grad(problem, state.w, grad);
        rec.grad_norm_sq = norm_sq(grad);
        for (std::size_t k = 0; k < grad.size(); ++k) state.w[k] -= step * grad[k];
      }
      ++state.t;
      if (!runner.after_step(state, rec, step)) break;
    }
  };

  auto run_sps = [&](bool positive) {
    const ReferenceSolution& ref = require_reference(config, trace.meta.method);
    check_reference(problem, ref);
    runner.begin(state);
    for (std::size_t t = 0; t < config.iterations; ++t) {
      const std::size_t i = runner.sample();
      const SampleEval ev = evaluate_sample(problem, i, state.w);
      double step = 0.0;
      if (ev.grad_norm_sq > kZeroGradSq) {
        const double gap = ev.value - ref.per_sample_f_star[i];
        step = (positive ? positive_part(gap) : gap) / ev.grad_norm_sq;
      }
      if (step != 0.0) sparse_step(problem, i, step, ev.derivative, state.w);
      ++state.t;
      const StepRecord rec{static_cast<long>(i), step, ev.value, ev.grad_norm_sq, step};
      if (!runner.after_step(state, rec, step)) break;
    }
  };

  struct Visitor {
    const Problem& problem;
    const RunConfig& config;
    Trace& trace;
    IterateState& state;
    Runner& runner;
    decltype(run_gradient)& gradient;
    decltype(run_sps)& sps;

    void operator()(const GradientDescent& m) { gradient(m.step, false); }
    void operator()(const StochasticGradient& m) { gradient(m.step, true); }
    void operator()(const Sps&) { sps(false); }
    void operator()(const SpsPlus&) { sps(true); }

    void fill_meta(const FuvalParams& p) {
      trace.meta.gamma = p.gamma;
      trace.meta.c_penalty = p.c_penalty;
      trace.meta.lambda_base = p.lambda.base;
      trace.meta.delta_base = p.delta.base;
    }

    void operator()(const Fuval& m) {
      m.params.validate();
      fill_meta(m.params);
      state.s = initial_slack(problem, m.params.s_init, state.w, false);
      runner.begin(state);
      for (std::size_t t = 0; t < config.iterations; ++t) {
        const std::size_t j = runner.sample();
        const double lambda_t = m.params.lambda.at(t);
        const StepRecord rec =
            fuval_step_inplace(problem, state, m.params.gamma, m.params.c_penalty, j, lambda_t, m.params.delta.at(t));
        if (!runner.after_step(state, rec, lambda_t)) break;
      }
    }

    void operator()(const FuvalFullBatch& m) {
      m.params.validate();
      fill_meta(m.params);
      state.s = initial_slack(problem, m.params.s_init, state.w, true);
      runner.begin(state);
      for (std::size_t t = 0; t < config.iterations; ++t) {
        const double lambda_t = m.params.lambda.at(t);
        FullBatchStepResult res = fuval_full_batch_step(problem, state.w, state.s[0], m.params, lambda_t,
                                                        m.params.delta.at(t));
        state.w = std::move(res.w);
        state.s[0] = res.s;
        ++state.t;
        if (!runner.after_step(state, res.record, lambda_t)) break;
      }
    }

    void operator()(const ProxLinearAppC& m) {
      if (!(m.lambda.base > 0.0)) throw ConfigError("lambda must be positive");
      if (!(m.c_penalty >= 1.0)) throw ConfigError("penalty multiplier c must be >= 1");
      trace.meta.c_penalty = m.c_penalty;
      trace.meta.lambda_base = m.lambda.base;
      trace.meta.delta_base = m.lambda.base;
      trace.meta.gamma = 1.0;
      state.s = initial_slack(problem, m.s_init, state.w, false);
      runner.begin(state);
      for (std::size_t t = 0; t < config.iterations; ++t) {
        const std::size_t j = runner.sample();
        const double lambda_t = m.lambda.at(t);
        const StepRecord rec = prox_linear_appc_step_inplace(problem, state, lambda_t, m.c_penalty, j);
        if (!runner.after_step(state, rec, lambda_t)) break;
      }
    }
  };

  std::visit(Visitor{problem, config, trace, state, runner, run_gradient, run_sps}, method);
  runner.finish(state);
  return trace;
}

Vector averaged_iterate(const Trace& trace, const AverageWeighting& weighting, std::optional<std::size_t> upto) {
  const std::size_t T = upto.value_or(trace.steps);
  if (trace.iterates.empty()) throw ConfigError("averaged_iterate: run did not store iterates");
  if (T == 0 || T > trace.steps || trace.iterates.size() < T + 1)
    throw ContractError("averaged_iterate: horizon out of range");
  const std::size_t d = trace.iterates.front().size();
  Vector avg(d, 0.0);
  double total = 0.0;

  switch (weighting.kind) {
    case AverageWeighting::Kind::Uniform:
      for (std::size_t t = 0; t < T; ++t) axpy(1.0, trace.iterates[t], avg);
      total = static_cast<double>(T);
      break;
    case AverageWeighting::Kind::LambdaWeighted:
      for (std::size_t t = 0; t < T; ++t) {
        axpy(trace.step_lambdas[t], trace.iterates[t + 1], avg);
        total += trace.step_lambdas[t];
      }
      break;
    case AverageWeighting::Kind::ThetaWeighted: {
      const double n = static_cast<double>(weighting.n);
      const double theta = n / (n + 2.0 * weighting.gamma * weighting.gamma);
      double weight = theta;
      for (std::size_t t = 0; t < T; ++t) {
        axpy(weight, trace.iterates[t], avg);
        total += weight;
        weight *= theta;
      }
      break;
    }
  }
  for (double& v : avg) v /= total;
  return avg;
}

}  // namespace fuvalkit
