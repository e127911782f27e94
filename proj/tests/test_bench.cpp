#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fuvalkit/bench.hpp"
#include "fuvalkit/dataio.hpp"

using namespace fuvalkit;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "fuvalkit-test-bench";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Problem two_point() {
  return Problem::from_examples({SparseExample{0.0, {{1, 1.0}}, 1}, SparseExample{2.0, {{1, 1.0}}, 1}},
                                LossKind::LeastSquares);
}

}  // namespace

TEST(Reference, OneDimensionalLeastSquares) {
  const ReferenceSolution r = reference_solve(two_point());
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.w_star[0], 1.0, 1e-10);
  EXPECT_NEAR(r.f_star, 0.5, 1e-14);
  EXPECT_NEAR(r.sigma, 0.5, 1e-14);
  EXPECT_LE(r.grad_norm_at_solution, r.tol);
  EXPECT_NEAR(r.per_sample_f_star[0], 0.5, 1e-10);
}

TEST(Reference, MonotoneAndConvergedOnLogistic) {
  const Problem p = gen_synthetic(parse_synthetic_spec("logistic:n=300,d=8,seed=2")).problem;
  std::vector<double> history;
  ReferenceOptions opts;
  opts.history = &history;
  const ReferenceSolution r = reference_solve(p, opts);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.grad_norm_at_solution, 1e-10);
  EXPECT_GE(r.sigma, -1e-12);
  ASSERT_GT(history.size(), 2u);
  for (std::size_t k = 1; k < history.size(); ++k)
    EXPECT_LE(history[k], history[k - 1] + 4 * std::numeric_limits<double>::epsilon() * std::abs(history[k - 1]));
}

TEST(Reference, InterpolatingWarmStart) {
  const SyntheticProblem sp = gen_synthetic(parse_synthetic_spec("interp:n=40,d=6,seed=5"));
  ReferenceOptions opts;
  opts.warm_start = sp.known_wstar;
  opts.interpolating = true;
  const ReferenceSolution r = reference_solve(sp.problem, opts);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.f_star, 1e-16);
}

TEST(Reference, IterationCapFlagsNotConverged) {
  const Problem p = gen_synthetic(parse_synthetic_spec("logistic:n=300,d=8,seed=2")).problem;
  ReferenceOptions opts;
  opts.max_iters = 2;
  EXPECT_FALSE(reference_solve(p, opts).converged);
}

TEST(Reference, ObjectiveChangeMatchesDifference) {
  const Problem p = gen_synthetic(parse_synthetic_spec("logistic:n=50,d=4,seed=8")).problem;
  const Vector w{0.1, -0.2, 0.3, 0.0};
  const Vector d{0.05, 0.01, -0.02, 0.1};
  Vector w2 = w;
  axpy(1.0, d, w2);
  EXPECT_NEAR(objective_change(p, w, d), objective(p, w2) - objective(p, w), 1e-14);
}

TEST(Bounds, RightHandSides) {
  EXPECT_DOUBLE_EQ(sps_lipschitz_rhs(2.0, 3.0, 4), 3.0);
  EXPECT_DOUBLE_EQ(sps_smooth_rhs(2.0, 3.0, 1), 12.0);
  EXPECT_DOUBLE_EQ(sps_smooth_rhs(2.0, 3.0, 4), 3.0);
  FuvalBoundInputs in;
  in.lambda = 0.1;
  in.delta = 1.0;
  in.gamma = 0.5;
  in.w_dist_sq = 1.0;
  in.s_dist_sq = 0.0;
  in.T = 10;
  const double rhs = sgd_convergence_rhs(in, 1.0, 0.0);
  EXPECT_NEAR(rhs, (1.0 / 0.1) / (2 * 0.5 * 0.5 * 0.9 * 10), 1e-12);
}

TEST(Bounds, RateConstants) {
  const Problem p = gen_synthetic(parse_synthetic_spec("logistic:n=10,d=3,seed=1")).problem;
  const RateConstants rc = rate_constants(p, 1.0, 1.0);
  EXPECT_NEAR(rc.theta, 10.0 / 12.0, 1e-15);
  EXPECT_TRUE(rc.lipschitz_available);
  EXPECT_EQ(rc.m_i.size(), 10u);
  EXPECT_GT(rc.m_bar, 1.0);
}

TEST(RateFit, PowerLawSlope) {
  std::vector<double> t, y;
  for (double x : {10.0, 100.0, 1000.0, 10000.0}) {
    t.push_back(x);
    y.push_back(3.0 / x);
  }
  EXPECT_NEAR(loglog_slope(t, y), -1.0, 1e-12);
  const auto steps = log_spaced_steps(1, 10, 30);
  EXPECT_EQ(steps.front(), 1u);
  EXPECT_EQ(steps.back(), 10u);
  EXPECT_TRUE(std::is_sorted(steps.begin(), steps.end()));
  EXPECT_EQ(std::adjacent_find(steps.begin(), steps.end()), steps.end());
}

TEST(EtaGrid, Parsing) {
  const auto g = parse_eta_grid("logspace:1e-4,1e2,25");
  ASSERT_EQ(g.size(), 25u);
  EXPECT_NEAR(g.front(), 1e-4, 1e-18);
  EXPECT_NEAR(g.back(), 1e2, 1e-12);
  EXPECT_EQ(parse_eta_grid("0.1,1,10"), (std::vector<double>{0.1, 1.0, 10.0}));
  EXPECT_THROW(parse_eta_grid("0.1,0.1"), ConfigError);
  EXPECT_THROW(parse_eta_grid("1,0.1"), ConfigError);
  EXPECT_THROW(parse_eta_grid("-1,1"), ConfigError);
  EXPECT_THROW(parse_eta_grid(""), ConfigError);
  EXPECT_THROW(parse_eta_grid("logspace:1,2"), ConfigError);
}

TEST(Grid, RowCountsAndDeterminism) {
  const Problem p = gen_synthetic(parse_synthetic_spec("logistic:n=60,d=5,seed=4")).problem;
  const ReferenceSolution ref = reference_solve(p);
  GridOptions opts;
  opts.methods = {"gd", "fuval-full", "sgd", "fuval"};
  opts.schemes = {"naive", "uifv", "uigrad"};
  opts.etas = parse_eta_grid("logspace:1e-2,1,5");
  opts.full_batch_iterations = 20;
  opts.epochs = 2;
  opts.seeds = {0, 1};
  opts.timing = false;
  const SensitivityTable a = grid_search(p, ref, opts);
  EXPECT_EQ(a.rows.size(), 5u * (1 + 3 + 1 + 3));
  std::size_t gd = 0;
  for (const auto& r : a.rows) {
    gd += r.method == "gd";
    if (r.method == "gd" || r.method == "sgd") EXPECT_EQ(r.scheme, "none");
    EXPECT_EQ(r.seconds, 0.0);
  }
  EXPECT_EQ(gd, 5u);

  const fs::path f1 = scratch("grid1.csv"), f2 = scratch("grid2.csv");
  write_sensitivity_csv(a, f1.string());
  opts.jobs = 3;
  write_sensitivity_csv(grid_search(p, ref, opts), f2.string());
  EXPECT_EQ(slurp(f1), slurp(f2));

  const SensitivityTable back = read_sensitivity_csv(f1.string());
  ASSERT_EQ(back.rows.size(), a.rows.size());
  EXPECT_EQ(back.rows[3].eta, a.rows[3].eta);
  EXPECT_EQ(back.rows[3].subopt_mean, a.rows[3].subopt_mean);
  EXPECT_EQ(slurp(f1).substr(0, std::string(kSensitivityHeader).size()), kSensitivityHeader);
}

TEST(Grid, RejectsUnknownMethod) {
  const Problem p = gen_synthetic(parse_synthetic_spec("logistic:n=20,d=3,seed=4")).problem;
  GridOptions opts;
  EXPECT_THROW(grid_method("sps", "none", 1.0, p, opts), ConfigError);
  EXPECT_THROW(grid_method("adam", "none", 1.0, p, opts), ConfigError);
}

TEST(TraceFiles, RoundTripAndMeta) {
  const Problem p = gen_synthetic(parse_synthetic_spec("logistic:n=20,d=3,seed=4")).problem;
  const ReferenceSolution ref = reference_solve(p);
  RunConfig cfg;
  cfg.iterations = 40;
  cfg.seed = 2;
  cfg.eval_every = 7;
  cfg.reference = &ref;
  cfg.scheme_label = "uifv";
  const Trace t = run(p, Fuval{fuval_params_for({ScalingKind::UnitInvariantFV, 0.5}, p, Vector(3, 0.0))}, cfg);
  const fs::path csv = scratch("nested/run.csv");
  write_trace_csv(t, csv.string());
  const auto back = read_trace_csv(csv.string());
  ASSERT_EQ(back.size(), t.records.size());
  for (std::size_t k = 0; k < back.size(); ++k) {
    EXPECT_EQ(back[k].t, t.records[k].t);
    EXPECT_EQ(back[k].f, t.records[k].f);
    EXPECT_EQ(back[k].subopt, t.records[k].subopt);
  }
  EXPECT_EQ(meta_path_for(csv.string()), scratch("nested/run.meta").string());
  write_run_meta(t.meta, meta_path_for(csv.string()));
  const std::string meta = slurp(scratch("nested/run.meta"));
  for (const char* key : {"seed=2", "T=40", "scheme=uifv", "gamma=", "c=", "lambda_base=", "delta_base=",
                          "reference_f_star=", "reference_tol="})
    EXPECT_NE(meta.find(key), std::string::npos) << key;
  EXPECT_EQ(slurp(csv).substr(0, std::string(kTraceHeader).size()), kTraceHeader);
}

TEST(ReferenceFiles, SaveLoadAndHashCheck) {
  const Problem p = two_point();
  const ReferenceSolution r = reference_solve(p);
  const fs::path f = scratch("ref.json");
  save_reference(r, p, f.string());
  const ReferenceSolution back = load_reference(f.string(), p);
  EXPECT_EQ(back.w_star, r.w_star);
  EXPECT_EQ(back.f_star, r.f_star);
  EXPECT_EQ(back.per_sample_f_star, r.per_sample_f_star);
  EXPECT_THROW(load_reference(f.string(), p.scaled(2.0)), ConfigError);

  const fs::path dir = scratch("cache");
  fs::remove_all(dir);
  cached_reference(p, dir.string());
  EXPECT_TRUE(fs::exists(reference_cache_path(dir.string(), p)));
  EXPECT_EQ(cached_reference(p, dir.string()).f_star, r.f_star);
}
