#include <gtest/gtest.h>

#include <cmath>

#include "fuvalkit/dataio.hpp"
#include "fuvalkit/optimizers.hpp"

using namespace fuvalkit;

namespace {

/// f(w) = 0.5 (a w - y)^2 in one dimension.
Problem quadratic(double a, double y) {
  return Problem::from_examples({SparseExample{y, {{1, a}}, 1}}, LossKind::LeastSquares);
}

ReferenceSolution zero_reference(std::size_t n) {
  ReferenceSolution r;
  r.w_star = Vector{1.0};
  r.per_sample_f_star.assign(n, 0.0);
  r.converged = true;
  return r;
}

FuvalParams params(double lambda, double delta, double gamma = 1.0, double c = kInfinity) {
  FuvalParams p;
  p.lambda = Schedule{ScheduleKind::Constant, lambda};
  p.delta = Schedule{ScheduleKind::Constant, delta};
  p.gamma = gamma;
  p.c_penalty = c;
  return p;
}

}  // namespace

TEST(Schedule, InvSqrt) {
  const Schedule s{ScheduleKind::InvSqrt, 2.0};
  EXPECT_DOUBLE_EQ(s.at(0), 2.0);
  EXPECT_DOUBLE_EQ(s.at(3), 1.0);
  EXPECT_DOUBLE_EQ((Schedule{ScheduleKind::Constant, 2.0}.at(99)), 2.0);
}

TEST(Sps, Examples) {
  const Problem p = quadratic(1.0, 1.0);
  const ReferenceSolution ref = zero_reference(1);
  EXPECT_DOUBLE_EQ(sps_step(p, ref, Vector{0.0}, 0)[0], 0.5);
  EXPECT_DOUBLE_EQ(sps_plus_step(p, ref, Vector{0.0}, 0)[0], 0.5);
  EXPECT_EQ(sps_step(p, ref, Vector{1.0}, 0), (Vector{1.0}));

  ReferenceSolution high = ref;
  high.per_sample_f_star = {0.5};
  const Vector w{1.5};
  EXPECT_GT(std::abs(sps_step(p, high, w, 0)[0] - 1.0), std::abs(w[0] - 1.0));
  EXPECT_EQ(sps_plus_step(p, high, w, 0), w);
}

TEST(FuvalStep, Example) {
  const Problem p = quadratic(1.0, 1.0);
  const IterateState st{Vector{0.0}, Vector{0.0}, 0};
  const FuvalStepResult r = fuval_step(p, st, params(1.0, 1.0), 0, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(r.record.tau, 0.75);
  EXPECT_DOUBLE_EQ(r.state.w[0], 0.75);
  EXPECT_DOUBLE_EQ(r.state.s[0], -0.25);
  EXPECT_EQ(r.state.t, 1u);
  EXPECT_EQ(r.record.sample, 0);
  EXPECT_DOUBLE_EQ(r.record.f_value, 0.5);
  EXPECT_DOUBLE_EQ(r.record.grad_norm_sq, 1.0);
}

TEST(FuvalStep, InactivePositivePart) {
  const Problem p = quadratic(1.0, 1.0);
  const IterateState st{Vector{1.0}, Vector{2.0}, 0};
  const FuvalStepResult r = fuval_step(p, st, params(1.0, 1.0), 0, 1.0, 1.0);
  EXPECT_EQ(r.record.tau, 0.0);
  EXPECT_EQ(r.state.w, st.w);
  EXPECT_DOUBLE_EQ(r.state.s[0], 1.0);
}

TEST(FuvalStep, PenaltyClamp) {
  const Problem p = quadratic(1.0 / std::sqrt(20.0), 0.0);
  const IterateState st{Vector{20.0}, Vector{0.0}, 0};
  const FuvalStepResult r = fuval_step(p, st, params(1.0, 1.0, 1.0, 1.0), 0, 1.0, 1.0);
  EXPECT_NEAR(r.record.f_value, 10.0, 1e-12);
  EXPECT_NEAR(r.record.grad_norm_sq, 1.0, 1e-12);
  EXPECT_EQ(r.record.tau, 1.0);
  EXPECT_EQ(r.state.s[0], 0.0);
}

TEST(FuvalStep, RelaxationScalesTheMove) {
  const Problem p = quadratic(1.0, 1.0);
  const IterateState st{Vector{0.0}, Vector{0.0}, 0};
  const FuvalStepResult r = fuval_step(p, st, params(1.0, 1.0, 0.5), 0, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(r.state.w[0], 0.375);
  EXPECT_DOUBLE_EQ(r.state.s[0], -0.125);
}

TEST(FuvalStep, Contracts) {
  const Problem p = quadratic(1.0, 1.0);
  IterateState st{Vector{0.0}, Vector{0.0}, 0};
  EXPECT_THROW(fuval_step_inplace(p, st, 1.0, kInfinity, 0, 0.0, 1.0), ContractError);
  EXPECT_THROW(fuval_step_inplace(p, st, 1.0, kInfinity, 0, 1.0, -1.0), ContractError);
  EXPECT_THROW(fuval_step_inplace(p, st, 1.0, kInfinity, 3, 1.0, 1.0), ContractError);
  EXPECT_THROW(params(1.0, 1.0, 0.0).validate(), ConfigError);
  EXPECT_THROW(params(1.0, 1.0, 1.0, 0.5).validate(), ConfigError);
}

TEST(FullBatch, MatchesPerSampleForOneSample) {
  const Problem p = quadratic(0.7, -1.3);
  const FuvalParams prm = params(0.4, 2.0, 0.8, 3.0);
  const FullBatchStepResult fb = fuval_full_batch_step(p, Vector{0.25}, 0.1, prm, 0.4, 2.0);
  const FuvalStepResult ps = fuval_step(p, IterateState{Vector{0.25}, Vector{0.1}, 0}, prm, 0, 0.4, 2.0);
  EXPECT_EQ(fb.w, ps.state.w);
  EXPECT_EQ(fb.s, ps.state.s[0]);
  EXPECT_EQ(fb.record.tau, ps.record.tau);
}

TEST(FullBatch, FixedPointAtInterpolatingSolution) {
  const SyntheticProblem sp = gen_synthetic(parse_synthetic_spec("interp:n=20,d=3,seed=2"));
  const FullBatchStepResult r = fuval_full_batch_step(sp.problem, *sp.known_wstar, 0.0, params(1.0, 1.0), 1.0, 1.0);
  EXPECT_NEAR(r.record.tau, 1.0, 1e-12);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(r.w[k], (*sp.known_wstar)[k], 1e-14);
  EXPECT_NEAR(r.s, 0.0, 1e-14);
}

TEST(ProxLinearAppC, Examples) {
  const Problem p = quadratic(1.0, 1.0);
  IterateState st{Vector{1.0}, Vector{5.0}, 0};
  const IterateState inactive = prox_linear_appc_step(p, st, 0.5, kInfinity, 0);
  EXPECT_EQ(inactive.w, st.w);
  EXPECT_DOUBLE_EQ(inactive.s[0], 4.5);

  IterateState far{Vector{-99.0}, Vector{0.0}, 0};
  const StepRecord rec = prox_linear_appc_step_inplace(p, far, 0.1, 1.0, 0);
  EXPECT_DOUBLE_EQ(rec.tau, 0.1);
  EXPECT_NEAR(far.s[0], 0.0, 1e-15);
}

TEST(ResolveScaling, Examples) {
  const Problem p = quadratic(1.0, 2.0);
  const Vector w0{0.0};
  const SampleConstants c = sample_constants(p);
  const ScalingBases naive = resolve_scaling({ScalingKind::Naive, 0.1}, p, w0, c);
  EXPECT_DOUBLE_EQ(naive.lambda, 0.1);
  EXPECT_DOUBLE_EQ(naive.delta, 0.1);
  const ScalingBases fv = resolve_scaling({ScalingKind::UnitInvariantFV, 0.1}, p, w0, c);
  EXPECT_DOUBLE_EQ(fv.lambda, 0.05);
  EXPECT_DOUBLE_EQ(fv.delta, 0.2);
  const ScalingBases gr = resolve_scaling({ScalingKind::UnitInvariantGrad, 0.1}, p, w0, c);
  EXPECT_DOUBLE_EQ(gr.lambda, 0.05);
  EXPECT_DOUBLE_EQ(gr.delta, 0.2);

  const ScalingBases scaled = resolve_scaling({ScalingKind::UnitInvariantFV, 0.1}, p.scaled(4.0), w0, c);
  EXPECT_DOUBLE_EQ(scaled.lambda, fv.lambda / 4.0);
  EXPECT_DOUBLE_EQ(scaled.delta, fv.delta * 4.0);
}

TEST(ResolveScaling, DegenerateStatisticsNameTheScheme) {
  const Problem p = quadratic(1.0, 0.0);
  const SampleConstants c = sample_constants(p);
  try {
    resolve_scaling({ScalingKind::UnitInvariantFV, 1.0}, p, Vector{0.0}, c);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("uifv"), std::string::npos);
  }
  EXPECT_THROW(resolve_scaling({ScalingKind::RemarkFV, 1.0}, quadratic(1.0, 1.0), Vector{0.0}, c), ConfigError);
  EXPECT_THROW(resolve_scaling({ScalingKind::Naive, -1.0}, p, Vector{0.0}, c), ConfigError);
}

TEST(ScalingKind, RoundTrip) {
  for (ScalingKind k : {ScalingKind::Naive, ScalingKind::UnitInvariantFV, ScalingKind::UnitInvariantGrad,
                        ScalingKind::RemarkLipschitz, ScalingKind::RemarkFV})
    EXPECT_EQ(scaling_kind_from_string(to_string(k)), k);
  EXPECT_THROW(scaling_kind_from_string("fancy"), ConfigError);
}

namespace {

Problem logistic_problem() { return gen_synthetic(parse_synthetic_spec("logistic:n=40,d=5,seed=3")).problem; }

}  // namespace

TEST(Run, DeterministicPerSeed) {
  const Problem p = logistic_problem();
  const FuvalParams prm = fuval_params_for({ScalingKind::UnitInvariantFV, 0.5}, p, Vector(5, 0.0));
  RunConfig cfg;
  cfg.iterations = 500;
  cfg.seed = 7;
  cfg.eval_every = 10;
  const Trace a = run(p, Fuval{prm}, cfg);
  const Trace b = run(p, Fuval{prm}, cfg);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    EXPECT_EQ(a.records[k].f, b.records[k].f);
    EXPECT_EQ(a.records[k].sample, b.records[k].sample);
  }
  EXPECT_EQ(a.w_final, b.w_final);
  cfg.seed = 8;
  EXPECT_NE(run(p, Fuval{prm}, cfg).w_final, a.w_final);
  EXPECT_EQ(a.records.front().t, 0u);
  EXPECT_EQ(a.records.back().t, 500u);
  EXPECT_EQ(a.records.size(), 51u);
}

TEST(Run, ZeroStepSgdIsConstant) {
  const Problem p = logistic_problem();
  RunConfig cfg;
  cfg.iterations = 50;
  cfg.store_iterates = true;
  const Trace t = run(p, StochasticGradient{0.0}, cfg);
  for (const auto& w : t.iterates) EXPECT_EQ(w, t.w0);
  for (const auto& r : t.records) EXPECT_EQ(r.f, t.records.front().f);
}

TEST(Run, DivergenceHalts) {
  const Problem p = gen_synthetic(parse_synthetic_spec("noisy:n=30,d=4,seed=1")).problem;
  RunConfig cfg;
  cfg.iterations = 5000;
  const Trace t = run(p, GradientDescent{100.0}, cfg);
  EXPECT_TRUE(t.diverged);
  EXPECT_LT(t.steps, 5000u);
}

TEST(Run, SpsNeedsReference) {
  const Problem p = logistic_problem();
  RunConfig cfg;
  cfg.iterations = 10;
  EXPECT_THROW(run(p, Sps{}, cfg), ConfigError);
  ReferenceSolution bad = zero_reference(p.n());
  bad.converged = false;
  cfg.reference = &bad;
  EXPECT_THROW(run(p, SpsPlus{}, cfg), ConfigError);
}

TEST(Run, ObserverSeesEveryStep) {
  const Problem p = logistic_problem();
  std::size_t calls = 0, last_t = 0;
  RunConfig cfg;
  cfg.iterations = 25;
  cfg.observer = [&](const IterateState& st, const StepRecord&) {
    ++calls;
    last_t = st.t;
  };
  run(p, FuvalFullBatch{fuval_params_for({ScalingKind::Naive, 0.3}, p, Vector(5, 0.0))}, cfg);
  EXPECT_EQ(calls, 25u);
  EXPECT_EQ(last_t, 25u);
}

TEST(Run, EpochsToIterations) {
  EXPECT_EQ(iterations_for_epochs(StochasticGradient{}, 40, 3), 120u);
  EXPECT_EQ(iterations_for_epochs(GradientDescent{}, 40, 3), 3u);
  EXPECT_EQ(method_name(FuvalFullBatch{}), "fuval-full");
  EXPECT_TRUE(is_stochastic(Fuval{}));
  EXPECT_FALSE(is_stochastic(FuvalFullBatch{}));
}

TEST(AveragedIterate, Examples) {
  Trace t;
  t.steps = 2;
  t.iterates = {Vector{0.0}, Vector{2.0}, Vector{5.0}};
  t.step_lambdas = {1.0, 3.0};
  EXPECT_DOUBLE_EQ(averaged_iterate(t, {AverageWeighting::Kind::Uniform})[0], 1.0);
  EXPECT_DOUBLE_EQ(averaged_iterate(t, {AverageWeighting::Kind::LambdaWeighted})[0], (2.0 + 15.0) / 4.0);

  Trace flat;
  flat.steps = 3;
  flat.iterates.assign(4, Vector{1.5, -2.0});
  flat.step_lambdas.assign(3, 0.7);
  for (auto kind : {AverageWeighting::Kind::Uniform, AverageWeighting::Kind::LambdaWeighted,
                    AverageWeighting::Kind::ThetaWeighted}) {
    const Vector avg = averaged_iterate(flat, {kind, 0.5, 10});
    EXPECT_NEAR(avg[0], 1.5, 1e-15);
    EXPECT_NEAR(avg[1], -2.0, 1e-15);
  }

  Trace empty;
  empty.steps = 2;
  EXPECT_THROW(averaged_iterate(empty, {}), ConfigError);
}
