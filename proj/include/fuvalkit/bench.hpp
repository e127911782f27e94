#pragma once

// Reference solutions, convergence-bound evaluation, rate fits, the stepsize
// sensitivity grid, and the CSV / metadata / JSON file formats.

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "fuvalkit/optimizers.hpp"
#include "fuvalkit/problems.hpp"
#include "fuvalkit/reference.hpp"

namespace fuvalkit {

// --- reference solve ------------------------------------------------------------

struct ReferenceOptions {
  double tol = 1e-10;
  std::size_t max_iters = 200000;
  std::optional<Vector> warm_start;
  /// The problem is known to interpolate; f* above 1e-16 then marks the result not converged.
  bool interpolating = false;
  /// If set, receives f(w^k) for every accepted iterate.
  std::vector<double>* history = nullptr;
};

/// Gradient descent with a Barzilai-Borwein trial step and halving Armijo
/// backtracking (constant 0.5e-4) until ||grad f|| <= tol. The Armijo test uses
/// a per-sample evaluation of f(w + d) - f(w) free of cancellation, so steps are
/// still accepted when the decrease is below the rounding level of f.
/// When max_iters is hit the best iterate is returned with converged = false.
ReferenceSolution reference_solve(const Problem& problem, const ReferenceOptions& options = {});

/// f(w + d) - f(w) evaluated sample by sample without cancellation.
double objective_change(const Problem& problem, std::span<const double> w, std::span<const double> d);

// --- constants and bounds -------------------------------------------------------

struct RateConstants {
  double l_max = 0.0;
  double g_max = 0.0;
  double g_sq_sum = 0.0;
  bool lipschitz_available = false;
  /// 1 + c sqrt(G_i^2 + 1).
  Vector m_i;
  /// sqrt(mean M_i^2).
  double m_bar = 0.0;
  /// n / (n + 2 gamma^2).
  double theta = 0.0;
};

RateConstants rate_constants(const Problem& problem, double c_penalty = 1.0, double gamma = 1.0);

enum class BoundKind {
  /// SPS+, G-Lipschitz: min_{1<=t<=T} f(w^t) - f* <= G ||w^0 - w*|| / sqrt(T).
  SpsPlusLipschitz,
  /// SPS+, L-smooth with interpolation: min_{t<T} f(w^t) - f* <= 2 L ||w^0 - w*||^2 / T.
  SpsPlusSmooth,
  /// Relaxed FUVAL, smooth: uniform average of w^0..w^{T-1}.
  SgdConvergence,
  /// FUVAL with InvSqrt schedules and gamma = 1: lambda-weighted average.
  ProxLinearInvSqrt,
  /// Relaxed FUVAL, Lipschitz with lambda G^2 <= delta: theta-weighted average.
  LipschitzTheta,
};

std::string to_string(BoundKind kind);

struct BoundReport {
  double lhs = std::numeric_limits<double>::quiet_NaN();
  double rhs = std::numeric_limits<double>::quiet_NaN();
  bool satisfied = false;
  bool available = false;
  std::string reason;
};

double sps_lipschitz_rhs(double g, double dist0, std::size_t T);
double sps_smooth_rhs(double l, double dist0_sq, std::size_t T);

struct FuvalBoundInputs {
  double lambda = 1.0;
  double delta = 1.0;
  double gamma = 1.0;
  /// ||w^0 - w*||^2 and ||s^0 - s*||^2 with s*_i = f_i(w*).
  double w_dist_sq = 0.0;
  double s_dist_sq = 0.0;
  std::size_t n = 1;
  std::size_t T = 1;
};

double sgd_convergence_rhs(const FuvalBoundInputs& in, double l_max, double sigma);
/// The average covers lambda_t w^{t+1} for t = 0..T-1, i.e. the printed bound at horizon T - 1.
double prox_linear_rhs(const FuvalBoundInputs& in, std::span<const double> g_i);
double lipschitz_theta_rhs(const FuvalBoundInputs& in);

/// Fills inputs from a trace (meta bases, w0, s0) and the reference.
FuvalBoundInputs bound_inputs(const Trace& trace, const ReferenceSolution& reference, std::size_t n);

/// Empirical left-hand side from the trace against the right-hand side. The
/// averaged kinds need stored iterates. Reports available = false (with a
/// reason) when a needed constant or hypothesis is missing.
BoundReport evaluate_bound(BoundKind kind, const Trace& trace, const Problem& problem,
                           const ReferenceSolution& reference, const RateConstants& constants);

// --- rate fits ---------------------------------------------------------------------

/// Running minimum of the logged suboptimality, as (t, value) pairs.
std::vector<std::pair<std::size_t, double>> min_suboptimality_curve(const Trace& trace);

/// Least-squares slope of log(y) against log(t); y is clamped below at `floor`.
double loglog_slope(std::span<const double> t, std::span<const double> y, double floor = 1e-30);

/// `count` log-spaced integers in [lo, hi], deduplicated.
std::vector<std::size_t> log_spaced_steps(std::size_t lo, std::size_t hi, std::size_t count);

// --- sensitivity grid ---------------------------------------------------------------

/// `logspace:lo,hi,k` or a comma list. Must be nonempty, positive and strictly increasing.
std::vector<double> parse_eta_grid(const std::string& text);

struct SensitivityRow {
  std::string method;
  std::string scheme;
  double eta = 0.0;
  double subopt_mean = 0.0;
  double subopt_median = 0.0;
  bool diverged = false;
  double seconds = 0.0;
};

struct SensitivityTable {
  std::vector<SensitivityRow> rows;
};

struct GridOptions {
  /// gd, sgd, fuval, fuval-full, prox-linear.
  std::vector<std::string> methods;
  /// Scaling schemes applied to the FUVAL family; gd and sgd get scheme "none".
  std::vector<std::string> schemes;
  std::vector<double> etas;
  std::size_t full_batch_iterations = 200;
  std::size_t epochs = 20;
  std::vector<std::uint64_t> seeds{0};
  /// 0 means the OpenMP default.
  int jobs = 0;
  bool timing = true;
  double gamma = 1.0;
  double c_penalty = kInfinity;
  ScheduleKind schedule = ScheduleKind::Constant;
};

/// One row per (method, scheme, eta); seeds are averaged. Diverged runs count as
/// +inf. Cells run in parallel; rows are sorted by (method, scheme, eta).
SensitivityTable grid_search(const Problem& problem, const ReferenceSolution& reference, const GridOptions& options);

/// Builds the method for one grid cell.
MethodSpec grid_method(const std::string& method, const std::string& scheme, double eta, const Problem& problem,
                       const GridOptions& options);

// --- file formats ---------------------------------------------------------------------

inline constexpr const char* kTraceHeader = "t,sample,tau,f,subopt,grad_sq,stepsize";
inline constexpr const char* kSensitivityHeader = "method,scheme,eta,subopt_mean,subopt_median,diverged,seconds";

/// %.17g formatting.
std::string format_number(double v);

void write_trace_csv(const Trace& trace, const std::string& path);
std::vector<TraceRecord> read_trace_csv(const std::string& path);
/// `<stem>.meta` next to a `<stem>.csv` path.
std::string meta_path_for(const std::string& csv_path);
void write_run_meta(const RunMetadata& meta, const std::string& path);

void write_sensitivity_csv(const SensitivityTable& table, const std::string& path);
SensitivityTable read_sensitivity_csv(const std::string& path);

void save_reference(const ReferenceSolution& reference, const Problem& problem, const std::string& path);
/// Throws ConfigError if the file was written for a different problem.
ReferenceSolution load_reference(const std::string& path, const Problem& problem);

/// `<dir>/reference-<hash>.json`.
std::string reference_cache_path(const std::string& dir, const Problem& problem);
/// Loads the cached reference for this problem or solves and stores it.
ReferenceSolution cached_reference(const Problem& problem, const std::string& dir, const ReferenceOptions& options = {});

}  // namespace fuvalkit
