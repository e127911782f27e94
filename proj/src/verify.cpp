#include "fuvalkit/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

#include "fuvalkit/bench.hpp"
#include "fuvalkit/dataio.hpp"
#include "fuvalkit/kernels.hpp"
#include "fuvalkit/optimizers.hpp"
#include "fuvalkit/oracle.hpp"
#include "fuvalkit/projections.hpp"
#include "fuvalkit/surrogate.hpp"
#include "fuvalkit/viewpoints.hpp"

namespace fuvalkit::verify {
namespace {

using Clock = std::chrono::steady_clock;

struct Timer {
  Clock::time_point start = Clock::now();
  double seconds() const { return std::chrono::duration<double>(Clock::now() - start).count(); }
};

std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

PropertyResult make(std::string name, bool passed, std::string detail, const Timer& timer) {
  return PropertyResult{std::move(name), passed, std::move(detail), timer.seconds()};
}

Vector gaussian(std::mt19937_64& rng, std::size_t k, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector v(k);
  for (double& x : v) x = normal(rng);
  return v;
}

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

std::size_t uniform_index(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

/// max_k |a_k - b_k| / max(1, |a_k|)
double max_rel_diff(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = std::abs(a[k] - b[k]) / std::max(1.0, std::abs(a[k]));
    worst = std::max(worst, std::isnan(diff) ? std::numeric_limits<double>::infinity() : diff);
  }
  return worst;
}

double state_diff(const IterateState& a, const IterateState& b) {
  return std::max(max_rel_diff(a.w, b.w), max_rel_diff(a.s, b.s));
}

LossKind random_loss(std::mt19937_64& rng) {
  return std::bernoulli_distribution(0.5)(rng) ? LossKind::Logistic : LossKind::LeastSquares;
}

/// A random (problem, state) pair with slacks scattered around the sample values.
struct RandomCase {
  Problem problem;
  IterateState state;
  std::size_t j = 0;
};

RandomCase random_case(std::mt19937_64& rng, std::size_t max_n = 6, std::size_t max_d = 5) {
  RandomCase rc;
  const std::size_t n = uniform_index(rng, 1, max_n);
  const std::size_t d = uniform_index(rng, 1, max_d);
  rc.problem = random_problem(rng, random_loss(rng), n, d);
  rc.state.w = gaussian(rng, d);
  rc.state.s = kernels::sample_values_omp(rc.problem, rc.state.w);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& s : rc.state.s) s += normal(rng);
  rc.j = uniform_index(rng, 0, n - 1);
  return rc;
}

Problem synthetic(SyntheticMode mode, std::size_t n, std::size_t d, std::uint64_t seed, double noise = 0.0) {
  SyntheticSpec spec;
  spec.n = n;
  spec.d = d;
  spec.seed = seed;
  spec.mode = mode;
  spec.noise_std = noise;
  return gen_synthetic(spec).problem;
}

ReferenceSolution solve(const Problem& problem, std::optional<Vector> warm = std::nullopt, bool interpolating = false) {
  ReferenceOptions opts;
  opts.warm_start = std::move(warm);
  opts.interpolating = interpolating;
  return reference_solve(problem, opts);
}

/// The interpolating least-squares problem used by the smooth bound checks.
struct InterpCase {
  Problem problem;
  ReferenceSolution reference;
};

InterpCase interpolating_case(std::size_t n, std::size_t d, std::uint64_t seed) {
  SyntheticSpec spec;
  spec.n = n;
  spec.d = d;
  spec.seed = seed;
  spec.mode = SyntheticMode::Interpolating;
  SyntheticProblem sp = gen_synthetic(spec);
  InterpCase out{sp.problem, {}};
  out.reference = solve(out.problem, sp.known_wstar, true);
  return out;
}

}  // namespace

Problem random_problem(std::mt19937_64& rng, LossKind loss, std::size_t n, std::size_t d) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution keep(0.7), positive(0.5);
  std::vector<SparseExample> rows(n);
  for (auto& ex : rows) {
    ex.dim = d;
    for (std::size_t k = 1; k <= d; ++k)
      if (keep(rng)) ex.features.emplace_back(k, normal(rng));
    ex.label = loss == LossKind::Logistic ? (positive(rng) ? 1.0 : -1.0) : normal(rng);
  }
  return Problem::from_examples(rows, loss);
}

// --- projections ---------------------------------------------------------------------

PropertyResult projection_oracle(std::size_t instances, std::uint64_t seed) {
  Timer timer;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  double worst[3] = {0.0, 0.0, 0.0};
  double worst_violation = 0.0;
  std::size_t oracle_failures = 0;

  auto record = [&](int which, double closed, double numeric) {
    // The closed form is the exact minimizer, so it may only undercut the oracle.
    const double gap = (numeric - closed) / std::max(1.0, std::abs(closed));
    const double err = std::max(std::abs(gap), closed > numeric ? (closed - numeric) : 0.0);
    worst[which] = std::max(worst[which], err);
  };

  for (std::size_t it = 0; it < instances; ++it) {
    OracleOptions opts;
    opts.seed = seed * 1000003 + it;

    // Halfspace projection.
    {
      const std::size_t d = uniform_index(rng, 1, 4);
      const Vector a = gaussian(rng, d), w0 = gaussian(rng, d);
      const double c = normal(rng) * std::sqrt(norm_sq(a));
      const Vector w = halfspace_project(a, c, w0);
      worst_violation = std::max(worst_violation, dot(a, w) - dot(a, w0) + c);
      auto obj = [&](std::span<const double> y) { return distance_sq(y, w0); };
      try {
        const OracleResult r = brute_force_minimize(obj, w0, LinearConstraint{a, dot(a, w0) - c}, opts);
        record(0, obj(w), r.value);
      } catch (const OracleError&) {
        ++oracle_failures;
      }
    }

    // Projection with slack: variables (w, s).
    {
      const std::size_t d = uniform_index(rng, 1, 4);
      HalfspaceSlackInstance inst;
      inst.a = gaussian(rng, d);
      inst.w0 = gaussian(rng, d);
      inst.c = normal(rng) * 2.0;
      inst.s0 = normal(rng);
      inst.slack_weight = log_uniform(rng, 0.1, 10.0);
      const SlackProjection p = halfspace_project_slack(inst);
      worst_violation = std::max(worst_violation, dot(inst.a, p.w) - dot(inst.a, inst.w0) + inst.c - p.s);
      auto obj = [&](std::span<const double> y) {
        const double ds = y[d] - inst.s0;
        return distance_sq(y.first(d), inst.w0) + inst.slack_weight * ds * ds;
      };
      Vector start = inst.w0, normal_vec = inst.a;
      start.push_back(inst.s0);
      normal_vec.push_back(-1.0);
      Vector closed = p.w;
      closed.push_back(p.s);
      try {
        const OracleResult r =
            brute_force_minimize(obj, start, LinearConstraint{normal_vec, dot(inst.a, inst.w0) - inst.c}, opts);
        record(1, obj(closed), r.value);
      } catch (const OracleError&) {
        ++oracle_failures;
      }
    }

    // Max-linear prox, minimized separately on each side of the kink.
    {
      const std::size_t d = uniform_index(rng, 1, 5);
      const Vector a = gaussian(rng, d), y0 = gaussian(rng, d);
      const double c = normal(rng) * 2.0;
      const double beta = log_uniform(rng, 0.05, 20.0);
      auto obj = [&](std::span<const double> y) {
        double lin = c;
        for (std::size_t k = 0; k < d; ++k) lin += a[k] * (y[k] - y0[k]);
        return positive_part(lin) + distance_sq(y, y0) / (2.0 * beta);
      };
      const Vector y = max_linear_prox(y0, a, c, beta);
      const double bound = dot(a, y0) - c;
      Vector neg_a = a;
      for (double& v : neg_a) v = -v;
      try {
        const OracleResult below = brute_force_minimize(obj, y0, LinearConstraint{a, bound}, opts);
        const OracleResult above = brute_force_minimize(obj, y0, LinearConstraint{neg_a, -bound}, opts);
        record(2, obj(y), std::min(below.value, above.value));
      } catch (const OracleError&) {
        ++oracle_failures;
      }
    }
  }

  const double tol = 1e-6;
  const bool ok = oracle_failures == 0 && worst[0] <= tol && worst[1] <= tol && worst[2] <= tol &&
                  worst_violation <= 1e-9;
  return make("projection-oracle", ok,
              std::to_string(instances) + " instances per closed form; max objective gap halfspace " + sci(worst[0]) +
                  ", slack " + sci(worst[1]) + ", max-linear prox " + sci(worst[2]) + " (tol 1e-6); oracle failures " +
                  std::to_string(oracle_failures),
              timer);
}

// --- equivalence -----------------------------------------------------------------------

std::vector<PropertyResult> viewpoint_equivalence(std::size_t triples, std::uint64_t seed) {
  Timer timer;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst_proj = 0.0, worst_prox = 0.0, worst_sgd = 0.0;

  for (std::size_t it = 0; it < triples; ++it) {
    const RandomCase rc = random_case(rng);
    const double lambda = log_uniform(rng, 0.01, 10.0);
    const double delta = log_uniform(rng, 0.01, 10.0);
    const double c = unit(rng) < 0.3 ? kInfinity : 1.0 + 9.0 * unit(rng);
    const double gamma = 0.05 + 0.95 * unit(rng);

    FuvalParams unrelaxed;
    unrelaxed.c_penalty = kInfinity;
    const IterateState base = fuval_step(rc.problem, rc.state, unrelaxed, rc.j, lambda, delta).state;
    worst_proj = std::max(worst_proj, state_diff(base, projection_viewpoint_step(rc.problem, rc.state, rc.j, lambda, delta)));

    FuvalParams penalized;
    penalized.c_penalty = c;
    const IterateState with_c = fuval_step(rc.problem, rc.state, penalized, rc.j, lambda, delta).state;
    worst_prox =
        std::max(worst_prox, state_diff(with_c, prox_linear_viewpoint_step(rc.problem, rc.state, rc.j, lambda, delta, c)));

    FuvalParams relaxed;
    relaxed.gamma = gamma;
    const IterateState with_gamma = fuval_step(rc.problem, rc.state, relaxed, rc.j, lambda, delta).state;
    worst_sgd = std::max(worst_sgd,
                         state_diff(with_gamma, online_sgd_viewpoint_step(rc.problem, rc.state, rc.j, lambda, delta, gamma)));
  }

  const double tol = 1e-12;
  const std::string suffix = " over " + std::to_string(triples) + " random triples (tol 1e-12)";
  return {
      make("equivalence-projection", worst_proj <= tol, "max rel diff " + sci(worst_proj) + suffix, timer),
      make("equivalence-prox-linear", worst_prox <= tol, "max rel diff " + sci(worst_prox) + suffix, timer),
      make("equivalence-online-sgd", worst_sgd <= tol, "max rel diff " + sci(worst_sgd) + suffix, timer),
  };
}

// --- identities ------------------------------------------------------------------------

PropertyResult gradient_bound_identity(std::size_t states, std::uint64_t seed) {
  Timer timer;
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (std::size_t it = 0; it < states; ++it) {
    const RandomCase rc = random_case(rng);
    const double lambda = log_uniform(rng, 0.1, 10.0);
    const double delta = log_uniform(rng, 0.1, 10.0);
    const SurrogateAnchor anchor = anchor_at(rc.problem, rc.state.w, lambda, delta);
    const double res = gradient_bound_residual(anchor, rc.problem, rc.state, rc.j);
    worst = std::max(worst, std::isnan(res) ? kInfinity : std::abs(res));
  }
  return make("gradient-bound-identity", worst <= 1e-10,
              "max |residual| " + sci(worst) + " over " + std::to_string(states) + " self-anchored states (tol 1e-10)",
              timer);
}

PropertyResult finite_differences(std::size_t points, std::uint64_t seed) {
  Timer timer;
  std::mt19937_64 rng(seed);
  // Relative error is measured against max(||g||, 1e-4) so vanishing gradients are not divided by ~0.
  auto rel_err = [](const Vector& fd, const Vector& g) {
    return std::sqrt(distance_sq(fd, g)) / std::max(std::sqrt(norm_sq(g)), 1e-4);
  };
  auto central = [](const std::function<double(const Vector&)>& f, Vector x) {
    Vector g(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double h = 1e-5 * std::max(1.0, std::abs(x[k]));
      const double keep = x[k];
      x[k] = keep + h;
      const double fp = f(x);
      x[k] = keep - h;
      const double fm = f(x);
      x[k] = keep;
      g[k] = (fp - fm) / (2.0 * h);
    }
    return g;
  };

  double worst_loss = 0.0;
  for (std::size_t it = 0; it < points; ++it) {
    const RandomCase rc = random_case(rng);
    const Vector g = loss_grad(rc.problem, rc.j, rc.state.w);
    const Vector fd = central([&](const Vector& w) { return loss_value(rc.problem, rc.j, w); }, rc.state.w);
    worst_loss = std::max(worst_loss, rel_err(fd, g));
  }

  double worst_phi = 0.0;
  std::size_t used = 0;
  while (used < points) {
    const RandomCase rc = random_case(rng);
    const double lambda = log_uniform(rng, 0.1, 10.0);
    const double delta = log_uniform(rng, 0.1, 10.0);
    const SurrogateAnchor anchor = anchor_at(rc.problem, gaussian(rng, rc.problem.dim()), lambda, delta);
    const double kink = loss_value(rc.problem, rc.j, rc.state.w) - rc.state.s[rc.j] + delta;
    if (std::abs(kink) <= 1e-3) continue;
    ++used;
    const std::size_t d = rc.problem.dim();
    Vector z = rc.state.w;
    z.insert(z.end(), rc.state.s.begin(), rc.state.s.end());
    const SurrogateGradient g = grad_phi_i(anchor, rc.problem, rc.j, rc.state.w, rc.state.s);
    Vector gz = g.grad_w;
    gz.insert(gz.end(), g.grad_s.begin(), g.grad_s.end());
    const Vector fd = central(
        [&](const Vector& x) {
          return phi_i(anchor, rc.problem, rc.j, std::span<const double>(x).first(d),
                       std::span<const double>(x).subspan(d));
        },
        z);
    worst_phi = std::max(worst_phi, rel_err(fd, gz));
  }

  const bool ok = worst_loss <= 1e-5 && worst_phi <= 1e-5;
  return make("finite-differences", ok,
              "max rel error loss " + sci(worst_loss) + ", surrogate " + sci(worst_phi) + " over " +
                  std::to_string(points) + " points each (tol 1e-5)",
              timer);
}

PropertyResult slack_lower_bound(std::size_t steps, std::size_t seeds) {
  Timer timer;
  const Problem problem = synthetic(SyntheticMode::NoisyLeastSquares, 50, 10, 5, 0.5);
  const SampleConstants sc = sample_constants(problem);
  double lowest = kInfinity;
  for (double gamma : {0.5, 1.0}) {
    for (std::size_t seed = 1; seed <= seeds; ++seed) {
      FuvalParams params;
      params.lambda = Schedule{ScheduleKind::Constant, 1.0 / (4.0 * sc.l_max)};
      params.delta = Schedule{ScheduleKind::Constant, 1.0};
      params.gamma = gamma;
      params.s_init.kind = SlackInit::Kind::Zeros;
      RunConfig cfg;
      cfg.iterations = steps;
      cfg.seed = seed;
      cfg.eval_every = steps;
      cfg.observer = [&](const IterateState& st, const StepRecord& rec) {
        lowest = std::min(lowest, st.s[static_cast<std::size_t>(rec.sample)]);
      };
      run(problem, Fuval{params}, cfg);
    }
  }
  return make("slack-lower-bound", lowest >= -1e-12,
              "min_{i,t} s_i^t = " + sci(lowest) + " (least squares n=50 d=10, lambda=1/(4 L_max), gamma in {0.5,1}, " +
                  std::to_string(steps) + " steps, " + std::to_string(seeds) + " seeds; tol -1e-12)",
              timer);
}

PropertyResult fejer_monotonicity(std::size_t steps, std::size_t seeds) {
  Timer timer;
  struct Case {
    std::string label;
    Problem problem;
    ReferenceSolution ref;
  };
  std::vector<Case> cases;
  {
    const InterpCase ic = interpolating_case(50, 10, 6);
    cases.push_back({"interpolating", ic.problem, ic.reference});
  }
  {
    const Problem p = synthetic(SyntheticMode::NoisyLeastSquares, 50, 10, 6, 0.3);
    cases.push_back({"noisy", p, solve(p)});
  }
  {
    const Problem p = synthetic(SyntheticMode::Logistic, 50, 10, 6);
    cases.push_back({"logistic", p, solve(p)});
  }

  double worst_increase = -kInfinity;
  bool refs_ok = true;
  for (const auto& c : cases) {
    refs_ok = refs_ok && c.ref.converged;
    for (std::size_t seed = 1; seed <= seeds; ++seed) {
      double prev = std::sqrt(norm_sq(c.ref.w_star));
      RunConfig cfg;
      cfg.iterations = steps;
      cfg.seed = seed;
      cfg.reference = &c.ref;
      cfg.eval_every = steps;
      cfg.observer = [&](const IterateState& st, const StepRecord&) {
        const double dist = std::sqrt(distance_sq(st.w, c.ref.w_star));
        worst_increase = std::max(worst_increase, dist - prev);
        prev = dist;
      };
      run(c.problem, SpsPlus{}, cfg);
    }
  }
  return make("sps-plus-fejer", refs_ok && worst_increase <= 1e-12,
              "max step increase of ||w^t - w*|| " + sci(worst_increase) +
                  " on interpolating, noisy and logistic problems (" + std::to_string(steps) + " steps, " +
                  std::to_string(seeds) + " seeds; tol 1e-12)",
              timer);
}

// --- bounds -------------------------------------------------------------------------------

PropertyResult sps_smooth_bound(std::size_t T, std::size_t seeds) {
  Timer timer;
  const InterpCase ic = interpolating_case(100, 20, 7);
  const RateConstants rc = rate_constants(ic.problem);
  const Vector w0(ic.problem.dim(), 0.0);
  const double dist_sq = distance_sq(w0, ic.reference.w_star);

  // Mean over seeds of f(w^t) - f*, t = 0..T.
  Vector mean(T + 1, 0.0);
  for (std::size_t seed = 1; seed <= seeds; ++seed) {
    RunConfig cfg;
    cfg.iterations = T;
    cfg.seed = seed;
    cfg.reference = &ic.reference;
    const Trace trace = run(ic.problem, SpsPlus{}, cfg);
    for (const auto& r : trace.records) mean[r.t] += r.subopt / static_cast<double>(seeds);
  }

  double worst_ratio = 0.0;
  double running = kInfinity;
  Vector best(T + 1);
  for (std::size_t t = 1; t <= T; ++t) {
    running = std::min(running, mean[t - 1]);
    best[t] = running;
    worst_ratio = std::max(worst_ratio, running / sps_smooth_rhs(rc.l_max, dist_sq, t));
  }
  std::vector<double> ts, ys;
  for (std::size_t t : log_spaced_steps(100, T, 30)) {
    ts.push_back(static_cast<double>(t));
    ys.push_back(best[t]);
  }
  const double slope = loglog_slope(ts, ys);
  const bool ok = ic.reference.converged && worst_ratio <= 1.0 && slope <= -0.8;
  return make("sps-plus-smooth-bound", ok,
              "max over T of min_t subopt / (2 L ||w0-w*||^2 / T) = " + sci(worst_ratio) + " (need <= 1); slope " +
                  sci(slope) + " over t in [1e2," + std::to_string(T) + "] (need <= -0.8); " + std::to_string(seeds) +
                  "-seed mean",
              timer);
}

PropertyResult sps_lipschitz_bound(std::size_t T, std::size_t seeds) {
  Timer timer;
  const Problem problem = synthetic(SyntheticMode::Logistic, 100, 10, 8);
  const ReferenceSolution ref = solve(problem);
  const RateConstants rc = rate_constants(problem);
  const double dist = std::sqrt(norm_sq(ref.w_star));
  Vector mean(T + 1, 0.0);
  for (std::size_t seed = 1; seed <= seeds; ++seed) {
    RunConfig cfg;
    cfg.iterations = T;
    cfg.seed = seed;
    cfg.reference = &ref;
    const Trace trace = run(problem, SpsPlus{}, cfg);
    for (const auto& r : trace.records) mean[r.t] += r.subopt / static_cast<double>(seeds);
  }
  double worst_ratio = 0.0, running = kInfinity;
  for (std::size_t t = 1; t <= T; ++t) {
    running = std::min(running, mean[t]);
    worst_ratio = std::max(worst_ratio, running / sps_lipschitz_rhs(rc.g_max, dist, t));
  }
  return make("sps-plus-lipschitz-bound", ref.converged && worst_ratio <= 1.0,
              "max over T of min_t subopt / (G ||w0-w*|| / sqrt(T)) = " + sci(worst_ratio) + " (need <= 1), logistic, " +
                  std::to_string(seeds) + "-seed mean",
              timer);
}

PropertyResult sgd_convergence_bound(std::size_t seeds) {
  Timer timer;
  const InterpCase ic = interpolating_case(100, 20, 7);
  const RateConstants rc = rate_constants(ic.problem);
  const std::vector<std::size_t> horizons{1000, 10000};
  const std::size_t T = horizons.back();

  FuvalParams params;
  params.lambda = Schedule{ScheduleKind::Constant, 1.0 / (4.0 * rc.l_max)};
  params.delta = Schedule{ScheduleKind::Constant, 1.0};
  params.gamma = 0.5;

  Vector lhs(horizons.size(), 0.0), rhs(horizons.size(), 0.0);
  for (std::size_t seed = 1; seed <= seeds; ++seed) {
    RunConfig cfg;
    cfg.iterations = T;
    cfg.seed = seed;
    cfg.reference = &ic.reference;
    cfg.eval_every = T;
    cfg.store_iterates = true;
    const Trace trace = run(ic.problem, Fuval{params}, cfg);
    FuvalBoundInputs in = bound_inputs(trace, ic.reference, ic.problem.n());
    for (std::size_t h = 0; h < horizons.size(); ++h) {
      const Vector avg = averaged_iterate(trace, {AverageWeighting::Kind::Uniform}, horizons[h]);
      lhs[h] += (objective(ic.problem, avg) - ic.reference.f_star) / static_cast<double>(seeds);
      in.T = horizons[h];
      rhs[h] = sgd_convergence_rhs(in, rc.l_max, ic.reference.sigma);
    }
  }
  bool ok = ic.reference.converged;
  std::string detail;
  for (std::size_t h = 0; h < horizons.size(); ++h) {
    ok = ok && lhs[h] <= 1.1 * rhs[h];
    detail += "T=" + std::to_string(horizons[h]) + ": mean " + sci(lhs[h]) + " vs 1.1*rhs " + sci(1.1 * rhs[h]) + "; ";
  }
  detail += std::to_string(seeds) + " seeds, gamma=0.5, lambda=1/(4 L_max), delta=1";
  return make("sgd-convergence-bound", ok, detail, timer);
}

namespace {

/// Suboptimality of the lambda-weighted average at the requested horizons,
/// averaged over seeds, for FUVAL with InvSqrt schedules on a logistic problem.
struct ProxLinearRuns {
  std::vector<std::size_t> horizons;
  Vector mean_subopt;
  double rhs_final = 0.0;
  bool reference_ok = false;
};

ProxLinearRuns prox_linear_runs(std::size_t T, std::size_t seeds) {
  const Problem problem = synthetic(SyntheticMode::Logistic, 200, 10, 9);
  const ReferenceSolution ref = solve(problem);
  ProxLinearRuns out;
  out.reference_ok = ref.converged;
  out.horizons = log_spaced_steps(100, T, 30);
  out.mean_subopt.assign(out.horizons.size(), 0.0);

  FuvalParams params;
  params.lambda = Schedule{ScheduleKind::InvSqrt, 1.0};
  params.delta = Schedule{ScheduleKind::InvSqrt, 10.0};
  params.gamma = 1.0;
  params.c_penalty = 1.0;

  for (std::size_t seed = 1; seed <= seeds; ++seed) {
    Vector weighted(problem.dim(), 0.0);
    double weight = 0.0;
    std::size_t next = 0;
    RunConfig cfg;
    cfg.iterations = T;
    cfg.seed = seed;
    cfg.eval_every = T;
    cfg.observer = [&](const IterateState& st, const StepRecord&) {
      const double lambda_t = params.lambda.at(st.t - 1);
      axpy(lambda_t, st.w, weighted);
      weight += lambda_t;
      if (next < out.horizons.size() && st.t == out.horizons[next]) {
        Vector avg = weighted;
        for (double& v : avg) v /= weight;
        out.mean_subopt[next] += (objective(problem, avg) - ref.f_star) / static_cast<double>(seeds);
        ++next;
      }
    };
    const Trace trace = run(problem, Fuval{params}, cfg);
    if (seed == 1) {
      FuvalBoundInputs in = bound_inputs(trace, ref, problem.n());
      out.rhs_final = prox_linear_rhs(in, sample_constants(problem).lipschitz);
    }
  }
  return out;
}

}  // namespace

PropertyResult prox_linear_rate(std::size_t T, std::size_t seeds) {
  Timer timer;
  const ProxLinearRuns runs = prox_linear_runs(T, seeds);
  std::vector<double> ts(runs.horizons.begin(), runs.horizons.end());
  const double slope = loglog_slope(ts, runs.mean_subopt);
  return make("prox-linear-rate", runs.reference_ok && slope <= -0.4,
              "slope " + sci(slope) + " of lambda-weighted average suboptimality over t in [1e2," + std::to_string(T) +
                  "] (need <= -0.4); final " + sci(runs.mean_subopt.back()) + ", " + std::to_string(seeds) +
                  "-seed mean",
              timer);
}

PropertyResult prox_linear_bound(std::size_t T, std::size_t seeds) {
  Timer timer;
  const ProxLinearRuns runs = prox_linear_runs(T, seeds);
  const double lhs = runs.mean_subopt.back();
  return make("prox-linear-bound", runs.reference_ok && lhs <= 1.1 * runs.rhs_final,
              "T=" + std::to_string(T) + ": mean " + sci(lhs) + " vs 1.1*rhs " + sci(1.1 * runs.rhs_final), timer);
}

// --- invariance and penalty -------------------------------------------------------------

PropertyResult scale_invariance(std::size_t steps) {
  Timer timer;
  struct Case {
    std::string label;
    Problem problem;
  };
  const std::vector<Case> cases{{"lsq", synthetic(SyntheticMode::NoisyLeastSquares, 50, 10, 10, 0.5)},
                                {"logistic", synthetic(SyntheticMode::Logistic, 50, 10, 10)}};

  auto trajectory = [&](const Problem& p, ScalingKind kind, bool full_batch) {
    const Vector w0(p.dim(), 0.0);
    const FuvalParams params = fuval_params_for(ScalingScheme{kind, 0.1}, p, w0);
    RunConfig cfg;
    cfg.iterations = full_batch ? steps / 10 : steps;
    cfg.seed = 3;
    cfg.eval_every = cfg.iterations;
    cfg.store_iterates = true;
    const MethodSpec m = full_batch ? MethodSpec{FuvalFullBatch{params}} : MethodSpec{Fuval{params}};
    return run(p, m, cfg).iterates;
  };
  auto deviation = [](const std::vector<Vector>& a, const std::vector<Vector>& b) {
    if (a.size() != b.size()) return kInfinity;
    double worst = 0.0;
    for (std::size_t t = 0; t < a.size(); ++t) {
      const double dev = std::sqrt(distance_sq(a[t], b[t])) / std::max(1.0, std::sqrt(norm_sq(a[t])));
      worst = std::max(worst, std::isnan(dev) ? kInfinity : dev);
    }
    return worst;
  };

  double worst_invariant = 0.0, least_naive = kInfinity;
  for (const auto& c : cases) {
    for (bool full : {false, true}) {
      for (ScalingKind kind : {ScalingKind::UnitInvariantFV, ScalingKind::UnitInvariantGrad, ScalingKind::Naive}) {
        const auto base = trajectory(c.problem, kind, full);
        for (double alpha : {0.01, 100.0}) {
          const double dev = deviation(base, trajectory(c.problem.scaled(alpha), kind, full));
          if (kind == ScalingKind::Naive) {
            least_naive = std::min(least_naive, dev);
          } else {
            worst_invariant = std::max(worst_invariant, dev);
          }
        }
      }
    }
  }
  const bool ok = worst_invariant <= 1e-8 && least_naive > 1e-3;
  return make("scale-invariance", ok,
              "uifv/uigrad max rel deviation " + sci(worst_invariant) + " (tol 1e-8); naive min deviation " +
                  sci(least_naive) + " (need > 1e-3); alpha in {0.01, 100}, eta 0.1, stochastic and full batch",
              timer);
}

PropertyResult penalty_equivalence(std::size_t points, std::uint64_t seed) {
  Timer timer;
  const Problem problem = synthetic(SyntheticMode::Logistic, 50, 5, 12);
  const ReferenceSolution ref = solve(problem);
  double worst_gap = 0.0;
  for (double c : {1.0, 2.0, 10.0})
    worst_gap = std::max(worst_gap, std::abs(penalty_value(problem, ref.w_star, ref.per_sample_f_star, c) - ref.f_star));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  double worst_below = 0.0;
  for (std::size_t it = 0; it < points; ++it) {
    const Vector w = gaussian(rng, problem.dim(), 2.0);
    Vector s = kernels::sample_values_omp(problem, w);
    for (double& v : s) v += normal(rng);
    const double f = objective(problem, w);
    for (double c : {1.0, 2.0, 10.0})
      worst_below = std::max(worst_below, (f - penalty_value(problem, w, s, c)) / std::max(1.0, std::abs(f)));
  }
  const bool ok = ref.converged && worst_gap <= 1e-10 && worst_below <= 1e-12;
  return make("penalty-equivalence", ok,
              "|g(w*,s*) - f(w*)| = " + sci(worst_gap) + " (tol 1e-10); max (f - g)/max(1,|f|) = " +
                  sci(worst_below) + " over " + std::to_string(points) + " points, c in {1,2,10}",
              timer);
}

PropertyResult appc_identity(std::size_t states, std::uint64_t seed) {
  Timer timer;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (std::size_t it = 0; it < states; ++it) {
    const RandomCase rc = random_case(rng);
    const double lambda = log_uniform(rng, 0.01, 10.0);
    const double c = unit(rng) < 0.3 ? kInfinity : 1.0 + 9.0 * unit(rng);
    FuvalParams params;
    params.c_penalty = c;
    const IterateState a = fuval_step(rc.problem, rc.state, params, rc.j, lambda, lambda).state;
    const IterateState b = prox_linear_appc_step(rc.problem, rc.state, lambda, c, rc.j);
    worst = std::max(worst, state_diff(a, b));
  }
  return make("single-scale-identity", worst <= 1e-12,
              "max rel diff " + sci(worst) + " between the single-scale step and fuval_step with lambda = delta",
              timer);
}

PropertyResult single_sample_full_batch(std::size_t states, std::uint64_t seed) {
  Timer timer;
  std::mt19937_64 rng(seed);
  std::size_t mismatches = 0;
  for (std::size_t it = 0; it < states; ++it) {
    RandomCase rc = random_case(rng, 1, 5);
    const double lambda = log_uniform(rng, 0.01, 10.0);
    const double delta = log_uniform(rng, 0.01, 10.0);
    FuvalParams params;
    const FuvalStepResult a = fuval_step(rc.problem, rc.state, params, 0, lambda, delta);
    const FullBatchStepResult b = fuval_full_batch_step(rc.problem, rc.state.w, rc.state.s[0], params, lambda, delta);
    if (a.state.w != b.w || a.state.s[0] != b.s) ++mismatches;
  }
  return make("single-sample-full-batch", mismatches == 0,
              std::to_string(mismatches) + " of " + std::to_string(states) + " n=1 states differ (exact comparison)",
              timer);
}

PropertyResult tau_bounds(std::size_t states, std::uint64_t seed) {
  Timer timer;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t violations = 0;
  for (std::size_t it = 0; it < states; ++it) {
    const RandomCase rc = random_case(rng);
    const double lambda = log_uniform(rng, 0.01, 10.0);
    const double delta = log_uniform(rng, 0.01, 10.0);
    FuvalParams params;
    params.c_penalty = unit(rng) < 0.3 ? kInfinity : 1.0 + 9.0 * unit(rng);
    const StepRecord rec = fuval_step(rc.problem, rc.state, params, rc.j, lambda, delta).record;
    const double cap = positive_part(rec.f_value - rc.state.s[rc.j] + delta) / delta;
    if (!(rec.tau >= 0.0 && rec.tau <= params.c_penalty && rec.tau <= cap * (1.0 + 1e-15))) ++violations;
  }
  return make("tau-bounds", violations == 0,
              std::to_string(violations) + " violations of 0 <= tau <= min(c, (f-s+delta)_+/delta) in " +
                  std::to_string(states) + " states",
              timer);
}

PropertyResult surrogate_convexity(std::size_t pairs, std::uint64_t seed) {
  Timer timer;
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (std::size_t it = 0; it < pairs; ++it) {
    const RandomCase rc = random_case(rng);
    const double lambda = log_uniform(rng, 0.1, 10.0);
    const double delta = log_uniform(rng, 0.1, 10.0);
    const SurrogateAnchor anchor = anchor_at(rc.problem, rc.state.w, lambda, delta);
    const Vector w2 = gaussian(rng, rc.problem.dim(), 2.0);
    Vector s2 = rc.state.s;
    std::normal_distribution<double> normal(0.0, 2.0);
    for (double& v : s2) v += normal(rng);
    const SurrogateGradient g = grad_phi_i(anchor, rc.problem, rc.j, rc.state.w, rc.state.s);
    double inner = 0.0;
    for (std::size_t k = 0; k < w2.size(); ++k) inner += g.grad_w[k] * (w2[k] - rc.state.w[k]);
    for (std::size_t k = 0; k < s2.size(); ++k) inner += g.grad_s[k] * (s2[k] - rc.state.s[k]);
    const double gap = phi_i(anchor, rc.problem, rc.j, w2, s2) - phi_i(anchor, rc.problem, rc.j, rc.state.w, rc.state.s) - inner;
    worst = std::min(worst, gap);
  }
  return make("surrogate-convexity", worst >= -1e-10,
              "min first-order convexity gap " + sci(worst) + " over " + std::to_string(pairs) + " pairs (tol -1e-10)",
              timer);
}

PropertyResult inf_s_closed_form(std::size_t instances, std::uint64_t seed) {
  Timer timer;
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  std::size_t failures = 0;
  for (std::size_t it = 0; it < instances; ++it) {
    const RandomCase rc = random_case(rng);
    const double lambda = log_uniform(rng, 0.1, 10.0);
    const double delta = log_uniform(rng, 0.1, 10.0);
    const SurrogateAnchor anchor = anchor_at(rc.problem, gaussian(rng, rc.problem.dim()), lambda, delta);
    Vector s = rc.state.s;
    auto obj = [&](std::span<const double> x) {
      s[rc.j] = x[0];
      return phi_i(anchor, rc.problem, rc.j, rc.state.w, s);
    };
    try {
      OracleOptions opts;
      opts.seed = seed + it;
      const Vector start{rc.state.s[rc.j]};
      const OracleResult r = brute_force_minimize(obj, start, std::nullopt, opts);
      const double closed = inf_s_phi_i(anchor, rc.problem, rc.j, rc.state.w);
      worst = std::max(worst, std::abs(r.value - closed) / std::max(1.0, std::abs(closed)));
    } catch (const OracleError&) {
      ++failures;
    }
  }
  return make("inf-s-closed-form", failures == 0 && worst <= 1e-8,
              "max rel gap to numeric minimization over s " + sci(worst) + " (tol 1e-8); oracle failures " +
                  std::to_string(failures),
              timer);
}

PropertyResult stationary_point(std::size_t anchors, std::uint64_t seed) {
  Timer timer;
  const InterpCase ic = interpolating_case(40, 8, 13);
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (std::size_t it = 0; it < anchors; ++it) {
    const double lambda = log_uniform(rng, 0.01, 1.0);
    const double delta = log_uniform(rng, 0.1, 10.0);
    const SurrogateAnchor anchor = anchor_at(ic.problem, gaussian(rng, ic.problem.dim()), lambda, delta);
    Vector s(ic.problem.n());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = stationary_slack(anchor, ic.reference, i);
    Vector mean_w(ic.problem.dim(), 0.0), mean_s(ic.problem.n(), 0.0);
    for (std::size_t i = 0; i < ic.problem.n(); ++i) {
      const SurrogateGradient g = grad_phi_i(anchor, ic.problem, i, ic.reference.w_star, s);
      axpy(1.0 / static_cast<double>(ic.problem.n()), g.grad_w, mean_w);
      axpy(1.0 / static_cast<double>(ic.problem.n()), g.grad_s, mean_s);
    }
    worst = std::max(worst, std::sqrt(norm_sq(mean_w) + norm_sq(mean_s)));
  }
  return make("surrogate-stationary-point", ic.reference.converged && worst <= 1e-8,
              "max ||mean_i grad phi_i(w*, s*)|| = " + sci(worst) + " over " + std::to_string(anchors) +
                  " anchors (tol 1e-8)",
              timer);
}

// --- suites ---------------------------------------------------------------------------------

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"projections", "equivalence", "identities", "bounds", "all"};
  return names;
}

std::vector<PropertyResult> run_suite(const std::string& name) {
  std::vector<PropertyResult> out;
  const bool all = name == "all";
  if (!all && std::find(suite_names().begin(), suite_names().end(), name) == suite_names().end())
    throw ConfigError("unknown verify suite '" + name + "' (expected projections, equivalence, identities, bounds, all)");
  if (all || name == "projections") out.push_back(projection_oracle());
  if (all || name == "equivalence") {
    for (auto& r : viewpoint_equivalence()) out.push_back(std::move(r));
  }
  if (all || name == "identities") {
    out.push_back(gradient_bound_identity());
    out.push_back(finite_differences());
    out.push_back(appc_identity());
    out.push_back(single_sample_full_batch());
    out.push_back(tau_bounds());
    out.push_back(surrogate_convexity());
    out.push_back(inf_s_closed_form());
    out.push_back(stationary_point());
    out.push_back(penalty_equivalence());
    out.push_back(slack_lower_bound());
    out.push_back(scale_invariance());
  }
  if (all || name == "bounds") {
    out.push_back(fejer_monotonicity());
    out.push_back(sps_smooth_bound());
    out.push_back(sgd_convergence_bound());
    out.push_back(sps_lipschitz_bound());
    out.push_back(prox_linear_rate());
    out.push_back(prox_linear_bound());
  }
  return out;
}

std::string format_result(const PropertyResult& r) {
  std::ostringstream os;
  os.precision(2);
  os << std::fixed << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << r.detail << ") [" << r.seconds << " s]";
  return os.str();
}

}  // namespace fuvalkit::verify
