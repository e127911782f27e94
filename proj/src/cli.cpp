#include "fuvalkit/cli.hpp"

#include <fmt/core.h>
#include <omp.h>

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <sstream>

#include "fuvalkit/bench.hpp"
#include "fuvalkit/dataio.hpp"
#include "fuvalkit/optimizers.hpp"
#include "fuvalkit/verify.hpp"

namespace fuvalkit::cli {
namespace {

struct SourceOptions {
  std::string data;
  std::string synthetic;
  std::string loss = "logistic";
  std::size_t dim = 0;
};

struct LoadedProblem {
  Problem problem;
  std::optional<Vector> known_wstar;
  std::string label;
};

struct ReferenceFlags {
  std::string file;
  bool solve = false;
  std::string cache_dir;
};

void add_source_options(CLI::App* cmd, SourceOptions& src) {
  auto* data = cmd->add_option("--data", src.data, "LIBSVM dataset path (relative paths also tried under $FUVALKIT_DATA)");
  auto* syn = cmd->add_option("--synthetic", src.synthetic,
                              "Synthetic problem, e.g. interp:n=100,d=10,seed=1 | noisy:...,noise=0.1 | logistic:...");
  data->excludes(syn);
  cmd->add_option("--loss", src.loss, "Loss for --data: logistic or lsq")->capture_default_str();
  cmd->add_option("--dim", src.dim, "Force the feature dimension of --data (0 = max index)")->capture_default_str();
}

void add_reference_options(CLI::App* cmd, ReferenceFlags& ref) {
  auto* file = cmd->add_option("--reference", ref.file, "Precomputed reference solution (JSON)");
  auto* solve = cmd->add_flag("--solve-reference", ref.solve, "Solve for the reference solution before running");
  file->excludes(solve);
  cmd->add_option("--reference-cache", ref.cache_dir, "Directory caching reference solutions by problem hash");
}

std::string resolve_data_path(const std::string& path) {
  namespace fs = std::filesystem;
  if (fs::exists(path)) return path;
  if (const char* dir = std::getenv("FUVALKIT_DATA"); dir && fs::path(path).is_relative()) {
    const fs::path candidate = fs::path(dir) / path;
    if (fs::exists(candidate)) return candidate.string();
  }
  throw ConfigError("--data: dataset '" + path + "' not found (also looked under $FUVALKIT_DATA)");
}

LoadedProblem load_source(const SourceOptions& src) {
  if (src.data.empty() == src.synthetic.empty())
    throw ConfigError("exactly one of --data or --synthetic is required");
  LoadedProblem out;
  if (!src.synthetic.empty()) {
    SyntheticProblem sp = gen_synthetic(parse_synthetic_spec(src.synthetic));
    out.problem = std::move(sp.problem);
    out.known_wstar = std::move(sp.known_wstar);
    out.label = src.synthetic;
    return out;
  }
  LibsvmOptions opts;
  opts.loss = loss_kind_from_string(src.loss);
  if (src.dim > 0) opts.dim_override = src.dim;
  const std::string path = resolve_data_path(src.data);
  try {
    out.problem = load_libsvm(path, opts);
  } catch (const ParseError& e) {
    throw ConfigError("--data: " + path + ": " + e.what());
  }
  out.label = path;
  return out;
}

ReferenceOptions reference_options(const LoadedProblem& lp) {
  ReferenceOptions opts;
  opts.warm_start = lp.known_wstar;
  opts.interpolating = lp.known_wstar.has_value();
  return opts;
}

std::optional<ReferenceSolution> acquire_reference(const LoadedProblem& lp, const ReferenceFlags& flags,
                                                   bool solve_by_default) {
  if (!flags.file.empty()) return load_reference(flags.file, lp.problem);
  if (!flags.solve && !solve_by_default) return std::nullopt;
  if (!flags.cache_dir.empty()) return cached_reference(lp.problem, flags.cache_dir, reference_options(lp));
  return reference_solve(lp.problem, reference_options(lp));
}

ScheduleKind schedule_from_string(const std::string& s) {
  if (s == "constant") return ScheduleKind::Constant;
  if (s == "invsqrt") return ScheduleKind::InvSqrt;
  throw ConfigError("--schedule must be constant or invsqrt, got '" + s + "'");
}

SlackInit slack_init_from_string(const std::string& s) {
  SlackInit init;
  if (s == "atw0") {
    init.kind = SlackInit::Kind::AtW0;
  } else if (s == "zeros") {
    init.kind = SlackInit::Kind::Zeros;
  } else {
    throw ConfigError("--s-init must be atw0 or zeros, got '" + s + "'");
  }
  return init;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

/// Runs `body`, mapping library errors to exit code 2.
template <typename Body>
int guarded(Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
  } catch (const ContractError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
  } catch (const ParseError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
  } catch (const std::runtime_error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
  }
  return kExitConfig;
}

// --- gen ---------------------------------------------------------------------------------

struct GenArgs {
  std::string synthetic;
  std::string out;
};

int cmd_gen(const GenArgs& args) {
  return guarded([&] {
    const SyntheticProblem sp = gen_synthetic(parse_synthetic_spec(args.synthetic));
    save_libsvm(sp.problem, args.out);
    fmt::print("wrote {} examples (d = {}) to {}\n", sp.problem.n(), sp.problem.dim(), args.out);
    return kExitOk;
  });
}

// --- reference ------------------------------------------------------------------------------

struct ReferenceArgs {
  SourceOptions src;
  std::string out;
  double tol = 1e-10;
  std::size_t max_iters = 200000;
};

int cmd_reference(const ReferenceArgs& args) {
  return guarded([&] {
    const LoadedProblem lp = load_source(args.src);
    ReferenceOptions opts = reference_options(lp);
    opts.tol = args.tol;
    opts.max_iters = args.max_iters;
    const ReferenceSolution ref = reference_solve(lp.problem, opts);
    save_reference(ref, lp.problem, args.out);
    fmt::print("f* = {:.17g}  ||grad|| = {:.3e}  sigma = {:.3e}  iterations = {}  converged = {}\n", ref.f_star,
               ref.grad_norm_at_solution, ref.sigma, ref.iterations, ref.converged);
    return kExitOk;
  });
}

// --- fit ----------------------------------------------------------------------------------------

struct FitArgs {
  SourceOptions src;
  ReferenceFlags ref;
  std::string method = "fuval";
  std::string scheme = "uifv";
  double eta = 1.0;
  double gamma = 1.0;
  double penalty_c = kInfinity;
  std::string schedule = "constant";
  std::string s_init = "atw0";
  std::size_t epochs = 20;
  std::size_t iters = 0;
  std::uint64_t seed = 0;
  std::size_t eval_every = 0;
  bool store_iterates = false;
  std::string out = "runs";
};

MethodSpec build_method(const FitArgs& args, const Problem& problem, std::string& scheme_label) {
  scheme_label = "none";
  if (args.method == "gd") return GradientDescent{args.eta};
  if (args.method == "sgd") return StochasticGradient{args.eta};
  if (args.method == "sps") return Sps{};
  if (args.method == "sps-plus") return SpsPlus{};
  if (args.method != "fuval" && args.method != "fuval-full" && args.method != "prox-linear")
    throw ConfigError("--method must be one of gd, sgd, sps, sps-plus, fuval, fuval-full, prox-linear");

  scheme_label = args.scheme;
  const ScalingScheme scheme{scaling_kind_from_string(args.scheme), args.eta};
  const ScheduleKind kind = schedule_from_string(args.schedule);
  const Vector w0(problem.dim(), 0.0);
  if (args.method == "prox-linear") {
    const ScalingBases bases = resolve_scaling(scheme, problem, w0, sample_constants(problem));
    return ProxLinearAppC{Schedule{kind, bases.lambda}, args.penalty_c, slack_init_from_string(args.s_init)};
  }
  FuvalParams params = fuval_params_for(scheme, problem, w0, kind, args.gamma, args.penalty_c);
  params.s_init = slack_init_from_string(args.s_init);
  params.validate();
  if (args.method == "fuval") return Fuval{params};
  return FuvalFullBatch{params};
}

std::string trace_file_name(const FitArgs& args, const std::string& scheme) {
  return fmt::format("{}_{}_eta{:g}_seed{}.csv", args.method, scheme, args.eta, args.seed);
}

int cmd_fit(const FitArgs& args) {
  return guarded([&] {
    const LoadedProblem lp = load_source(args.src);
    std::string scheme_label;
    const MethodSpec method = build_method(args, lp.problem, scheme_label);
    const bool needs_reference = std::holds_alternative<Sps>(method) || std::holds_alternative<SpsPlus>(method);
    if (needs_reference && args.ref.file.empty() && !args.ref.solve)
      throw ConfigError("--method " + args.method + " needs f_i(w*): pass --reference FILE or --solve-reference");
    const std::optional<ReferenceSolution> ref = acquire_reference(lp, args.ref, false);

    RunConfig cfg;
    cfg.iterations = args.iters > 0 ? args.iters : iterations_for_epochs(method, lp.problem.n(), args.epochs);
    cfg.seed = args.seed;
    cfg.reference = ref ? &*ref : nullptr;
    cfg.eval_every = args.eval_every > 0 ? args.eval_every
                                         : (is_stochastic(method) ? std::max<std::size_t>(lp.problem.n(), 1) : 1);
    cfg.store_iterates = args.store_iterates;
    cfg.scheme_label = scheme_label;
    const Trace trace = run(lp.problem, method, cfg);

    const std::string path = (std::filesystem::path(args.out) / trace_file_name(args, scheme_label)).string();
    write_trace_csv(trace, path);
    write_run_meta(trace.meta, meta_path_for(path));

    const TraceRecord& last = trace.records.back();
    if (trace.diverged) {
      fmt::print(stderr, "diverged at step {} (f = {})\n", last.t, format_number(last.f));
      fmt::print("trace: {}\n", path);
      return kExitDiverged;
    }
    if (ref) {
      fmt::print("final suboptimality {:.6e} after {} steps (f = {:.10g}, f* = {:.10g})\n", last.f - ref->f_star,
                 trace.steps, last.f, ref->f_star);
    } else {
      fmt::print("final f {:.10g} after {} steps (no reference: suboptimality not computed)\n", last.f, trace.steps);
    }
    fmt::print("trace: {}\n", path);
    return kExitOk;
  });
}

// --- grid ------------------------------------------------------------------------------------------

struct GridArgs {
  SourceOptions src;
  ReferenceFlags ref;
  std::string methods = "gd,fuval-full";
  std::string schemes = "naive,uifv,uigrad";
  std::string eta_grid = "logspace:1e-4,1e2,25";
  std::size_t iters = 200;
  std::size_t epochs = 20;
  std::string seeds = "0";
  int jobs = 0;
  bool no_timing = false;
  double gamma = 1.0;
  double penalty_c = kInfinity;
  std::string schedule = "constant";
  std::string out = "sensitivity.csv";
};

int cmd_grid(const GridArgs& args) {
  return guarded([&] {
    const LoadedProblem lp = load_source(args.src);
    GridOptions opts;
    opts.methods = split_list(args.methods);
    opts.schemes = split_list(args.schemes);
    if (opts.methods.empty()) throw ConfigError("--methods is empty");
    opts.etas = parse_eta_grid(args.eta_grid);
    opts.full_batch_iterations = args.iters;
    opts.epochs = args.epochs;
    opts.seeds.clear();
    for (const auto& s : split_list(args.seeds)) {
      try {
        opts.seeds.push_back(std::stoull(s));
      } catch (const std::logic_error&) {
        throw ConfigError("--seeds: bad seed '" + s + "'");
      }
    }
    opts.jobs = args.jobs > 0 ? args.jobs : omp_get_num_procs();
    opts.timing = !args.no_timing;
    opts.gamma = args.gamma;
    opts.c_penalty = args.penalty_c;
    opts.schedule = schedule_from_string(args.schedule);

    const std::optional<ReferenceSolution> ref = acquire_reference(lp, args.ref, true);
    if (!ref->converged) fmt::print(stderr, "warning: reference solve did not reach tol {:.1e}\n", ref->tol);
    const SensitivityTable table = grid_search(lp.problem, *ref, opts);
    write_sensitivity_csv(table, args.out);

    std::size_t diverged = 0;
    for (const auto& row : table.rows) diverged += row.diverged ? 1 : 0;
    fmt::print("wrote {} rows ({} diverged) to {}\n", table.rows.size(), diverged, args.out);
    return kExitOk;
  });
}

// --- verify -------------------------------------------------------------------------------------------

int cmd_verify(const std::string& suite) {
  const auto& names = verify::suite_names();
  if (std::find(names.begin(), names.end(), suite) == names.end()) {
    fmt::print(stderr, "error: unknown suite '{}' (expected projections, equivalence, identities, bounds, all)\n",
               suite);
    return kExitConfig;
  }
  bool all_passed = true;
  for (const auto& r : verify::run_suite(suite)) {
    fmt::print("{}\n", verify::format_result(r));
    all_passed = all_passed && r.passed;
  }
  return all_passed ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"fuvalkit: stochastic Polyak-type methods with learned per-sample targets"};
  app.require_subcommand(1);
  app.get_formatter()->column_width(36);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Write a synthetic problem as a LIBSVM file");
  gen_cmd->add_option("--synthetic", gen.synthetic, "Synthetic spec")->required();
  gen_cmd->add_option("--out", gen.out, "Output LIBSVM path")->required();

  ReferenceArgs refa;
  auto* ref_cmd = app.add_subcommand("reference", "Solve for w*, f* and f_i(w*) and save them as JSON");
  add_source_options(ref_cmd, refa.src);
  ref_cmd->add_option("--out", refa.out, "Output JSON path")->required();
  ref_cmd->add_option("--tol", refa.tol, "Gradient-norm tolerance")->capture_default_str();
  ref_cmd->add_option("--max-iters", refa.max_iters, "Iteration cap")->capture_default_str();

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Run one method and write its trace CSV and .meta sidecar");
  add_source_options(fit_cmd, fit.src);
  add_reference_options(fit_cmd, fit.ref);
  fit_cmd->add_option("--method", fit.method, "gd, sgd, sps, sps-plus, fuval, fuval-full, prox-linear")
      ->capture_default_str();
  fit_cmd->add_option("--scheme", fit.scheme, "naive, uifv, uigrad, remark-lip, remark-fv (FUVAL family only)")
      ->capture_default_str();
  fit_cmd->add_option("--eta", fit.eta, "Stepsize factor (the GD/SGD step itself)")->capture_default_str();
  fit_cmd->add_option("--gamma", fit.gamma, "Relaxation in (0, 1]")->capture_default_str();
  fit_cmd->add_option("--penalty-c", fit.penalty_c, "Penalty multiplier c >= 1 (inf = no cap on tau)")
      ->capture_default_str();
  fit_cmd->add_option("--schedule", fit.schedule, "constant or invsqrt")->capture_default_str();
  fit_cmd->add_option("--s-init", fit.s_init, "atw0 (s_i = f_i(w0)) or zeros")->capture_default_str();
  auto* epochs = fit_cmd->add_option("--epochs", fit.epochs, "Epochs (n steps each for stochastic methods)")
                     ->capture_default_str();
  fit_cmd->add_option("--iters", fit.iters, "Exact number of steps (overrides --epochs)")->excludes(epochs);
  fit_cmd->add_option("--seed", fit.seed, "Sampling seed")->capture_default_str();
  fit_cmd->add_option("--eval-every", fit.eval_every, "Log f every this many steps (0 = once per epoch)")
      ->capture_default_str();
  fit_cmd->add_flag("--store-iterates", fit.store_iterates, "Keep every iterate in memory");
  fit_cmd->add_option("--out", fit.out, "Output directory")->capture_default_str();

  GridArgs grid;
  auto* grid_cmd = app.add_subcommand("grid", "Stepsize sensitivity sweep; writes the sensitivity CSV");
  add_source_options(grid_cmd, grid.src);
  add_reference_options(grid_cmd, grid.ref);
  grid_cmd->add_option("--methods", grid.methods, "Comma list of gd, sgd, fuval, fuval-full, prox-linear")
      ->capture_default_str();
  grid_cmd->add_option("--schemes", grid.schemes, "Comma list of scaling schemes for the FUVAL family")
      ->capture_default_str();
  grid_cmd->add_option("--eta-grid", grid.eta_grid, "logspace:lo,hi,count or a comma list")->capture_default_str();
  grid_cmd->add_option("--iters", grid.iters, "Steps for full-batch methods")->capture_default_str();
  grid_cmd->add_option("--epochs", grid.epochs, "Epochs for stochastic methods")->capture_default_str();
  grid_cmd->add_option("--seeds", grid.seeds, "Comma list of seeds averaged per cell")->capture_default_str();
  grid_cmd->add_option("--jobs", grid.jobs, "Parallel grid cells (0 = number of processors)")->capture_default_str();
  grid_cmd->add_flag("--no-timing", grid.no_timing, "Write 0 in the seconds column for byte-identical reruns");
  grid_cmd->add_option("--gamma", grid.gamma, "Relaxation for the FUVAL family")->capture_default_str();
  grid_cmd->add_option("--penalty-c", grid.penalty_c, "Penalty multiplier for the FUVAL family")->capture_default_str();
  grid_cmd->add_option("--schedule", grid.schedule, "constant or invsqrt")->capture_default_str();
  grid_cmd->add_option("--out", grid.out, "Output CSV path")->capture_default_str();

  std::string suite = "all";
  auto* verify_cmd = app.add_subcommand("verify", "Run a property suite: projections, equivalence, identities, bounds, all");
  verify_cmd->add_option("suite", suite, "Suite name")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (*gen_cmd) return cmd_gen(gen);
  if (*ref_cmd) return cmd_reference(refa);
  if (*fit_cmd) return cmd_fit(fit);
  if (*grid_cmd) return cmd_grid(grid);
  if (*verify_cmd) return cmd_verify(suite);
  return kExitConfig;
}

}  // namespace fuvalkit::cli
