#include "fuvalkit/bench.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "fuvalkit/kernels.hpp"

namespace fuvalkit {

// --- reference solve ------------------------------------------------------------

double objective_change(const Problem& problem, std::span<const double> w, std::span<const double> d) {
  if (w.size() != problem.dim() || d.size() != problem.dim())
    throw ContractError("objective_change: dimension mismatch");
  const double scale = problem.scale();
  double acc = 0.0;
  for (std::size_t i = 0; i < problem.n(); ++i) {
    const RowView r = problem.row(i);
    const double z = r.dot(w);
    const double dz = r.dot(d);
    if (problem.loss() == LossKind::LeastSquares) {
      acc += scale * (0.5 * dz * (2.0 * (z - r.label) + dz));
    } else {
      const double u = -r.label * z;
      const double du = -r.label * dz;
      if (std::abs(du) < 30.0) {
        acc += scale * std::log1p(sigmoid(u) * std::expm1(du));
      } else {
        acc += scale * (log1p_exp(u + du) - log1p_exp(u));
      }
    }
  }
  return acc / static_cast<double>(problem.n());
}

ReferenceSolution reference_solve(const Problem& problem, const ReferenceOptions& options) {
  constexpr double kArmijo = 0.5e-4;
  constexpr int kMaxHalvings = 200;
  if (!(options.tol > 0.0)) throw ConfigError("reference tolerance must be positive");

  Vector w = options.warm_start.value_or(Vector(problem.dim(), 0.0));
  if (w.size() != problem.dim()) throw ConfigError("reference warm start has wrong dimension");
  Vector g;
  double f = objective_and_grad(problem, w, g);
  double g_sq = norm_sq(g);
  if (options.history) options.history->assign(1, f);

  double t = g_sq > 0.0 ? 1.0 / std::sqrt(g_sq) : 1.0;
  std::size_t iter = 0;
  Vector d(problem.dim()), w_next(problem.dim()), g_next;
  while (std::sqrt(g_sq) > options.tol && iter < options.max_iters) {
    int halvings = 0;
    double change = 0.0;
    for (;;) {
      for (std::size_t k = 0; k < d.size(); ++k) d[k] = -t * g[k];
      change = objective_change(problem, w, d);
      if (change <= -kArmijo * t * g_sq) break;
      t *= 0.5;
      if (++halvings > kMaxHalvings) break;
    }
    if (halvings > kMaxHalvings) break;

    for (std::size_t k = 0; k < w.size(); ++k) w_next[k] = w[k] + d[k];
    const double f_next = objective_and_grad(problem, w_next, g_next);
    double sy = 0.0;
    for (std::size_t k = 0; k < d.size(); ++k) sy += d[k] * (g_next[k] - g[k]);
    const double ss = norm_sq(d);
    t = sy > 0.0 ? ss / sy : 2.0 * t;

    std::swap(w, w_next);
    std::swap(g, g_next);
    f = f_next;
    g_sq = norm_sq(g);
    ++iter;
    if (options.history) options.history->push_back(f);
  }

  ReferenceSolution ref;
  ref.w_star = w;
  ref.f_star = objective(problem, w);
  ref.per_sample_f_star = kernels::sample_values_omp(problem, w);
  ref.grad_norm_at_solution = std::sqrt(g_sq);
  const SampleConstants constants = sample_constants(problem);
  ref.sigma = ref.f_star - std::accumulate(constants.inf_fi.begin(), constants.inf_fi.end(), 0.0) /
                               static_cast<double>(problem.n());
  ref.tol = options.tol;
  ref.iterations = iter;
  ref.converged = ref.grad_norm_at_solution <= options.tol;
  if (options.interpolating && ref.f_star > 1e-16) ref.converged = false;
  return ref;
}

// --- constants and bounds -------------------------------------------------------

RateConstants rate_constants(const Problem& problem, double c_penalty, double gamma) {
  const SampleConstants sc = sample_constants(problem);
  RateConstants rc;
  rc.l_max = sc.l_max;
  rc.g_max = sc.g_max;
  rc.g_sq_sum = sc.g_sq_sum;
  rc.lipschitz_available = sc.lipschitz_available;
  rc.m_i.resize(problem.n());
  double m_sq = 0.0;
  for (std::size_t i = 0; i < problem.n(); ++i) {
    rc.m_i[i] = 1.0 + c_penalty * std::sqrt(sc.lipschitz[i] * sc.lipschitz[i] + 1.0);
    m_sq += rc.m_i[i] * rc.m_i[i];
  }
  rc.m_bar = std::sqrt(m_sq / static_cast<double>(problem.n()));
  const double n = static_cast<double>(problem.n());
  rc.theta = n / (n + 2.0 * gamma * gamma);
  return rc;
}

std::string to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::SpsPlusLipschitz: return "sps-plus-lipschitz";
    case BoundKind::SpsPlusSmooth: return "sps-plus-smooth";
    case BoundKind::SgdConvergence: return "sgd-convergence";
    case BoundKind::ProxLinearInvSqrt: return "prox-linear-invsqrt";
    case BoundKind::LipschitzTheta: return "lipschitz-theta";
  }
  return "?";
}

double sps_lipschitz_rhs(double g, double dist0, std::size_t T) {
  return g * dist0 / std::sqrt(static_cast<double>(T));
}

double sps_smooth_rhs(double l, double dist0_sq, std::size_t T) {
  return 2.0 * l * dist0_sq / static_cast<double>(T);
}

double sgd_convergence_rhs(const FuvalBoundInputs& in, double l_max, double sigma) {
  const double lL = in.lambda * l_max;
  const double T = static_cast<double>(in.T);
  const double dist = in.w_dist_sq / in.lambda + in.s_dist_sq / in.delta;
  return dist / (2.0 * in.gamma * (1.0 - in.gamma) * (1.0 - lL) * T) +
         sigma * (in.gamma + lL * (1.0 - in.gamma)) / ((1.0 - in.gamma) * (1.0 - lL));
}

double prox_linear_rhs(const FuvalBoundInputs& in, std::span<const double> g_i) {
  const double T = static_cast<double>(in.T) - 1.0;
  const double root = std::sqrt(T + 2.0);
  const double dist = in.w_dist_sq / in.lambda + in.s_dist_sq / in.delta;
  double m = 0.0;
  for (double g : g_i) m += 1.0 + std::sqrt(in.lambda / in.delta * g * g + 1.0);
  m /= static_cast<double>(g_i.size());
  return dist / (4.0 * (root - 1.0)) + m * in.delta * (1.0 + std::log(T + 1.0)) / (2.0 * root - 2.0);
}

double lipschitz_theta_rhs(const FuvalBoundInputs& in) {
  const double n = static_cast<double>(in.n);
  const double theta = n / (n + 2.0 * in.gamma * in.gamma);
  const double dist = in.gamma * in.w_dist_sq / in.lambda + in.gamma * in.s_dist_sq / in.delta;
  return dist / (n * (1.0 - std::pow(theta, static_cast<double>(in.T)))) + 0.5 * in.delta * (in.gamma + 1.0 / n);
}

FuvalBoundInputs bound_inputs(const Trace& trace, const ReferenceSolution& reference, std::size_t n) {
  FuvalBoundInputs in;
  in.lambda = trace.meta.lambda_base;
  in.delta = trace.meta.delta_base;
  in.gamma = trace.meta.gamma;
  in.w_dist_sq = distance_sq(trace.w0, reference.w_star);
  if (trace.s0.size() == 1 && n != 1) {
    const double diff = trace.s0[0] - reference.f_star;
    in.s_dist_sq = diff * diff;
  } else {
    in.s_dist_sq = distance_sq(trace.s0, reference.per_sample_f_star);
  }
  in.n = n;
  in.T = trace.steps;
  return in;
}

namespace {

BoundReport unavailable(std::string reason) {
  BoundReport r;
  r.reason = std::move(reason);
  return r;
}

double min_subopt_in(const Trace& trace, const ReferenceSolution& reference, std::size_t lo, std::size_t hi) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : trace.records)
    if (r.t >= lo && r.t <= hi && std::isfinite(r.f)) best = std::min(best, r.f - reference.f_star);
  return best;
}

}  // namespace

BoundReport evaluate_bound(BoundKind kind, const Trace& trace, const Problem& problem,
                           const ReferenceSolution& reference, const RateConstants& constants) {
  const std::size_t T = trace.steps;
  if (T == 0) return unavailable("trace has no steps");
  if (trace.diverged) return unavailable("run diverged");
  BoundReport rep;
  rep.available = true;
  const double dist_sq = distance_sq(trace.w0, reference.w_star);

  switch (kind) {
    case BoundKind::SpsPlusLipschitz:
      if (!constants.lipschitz_available) return unavailable("Lipschitz constants not available for this loss");
      rep.lhs = min_subopt_in(trace, reference, 1, T);
      rep.rhs = sps_lipschitz_rhs(constants.g_max, std::sqrt(dist_sq), T);
      break;
    case BoundKind::SpsPlusSmooth:
      if (reference.sigma > 1e-12) return unavailable("requires interpolation (sigma = 0)");
      rep.lhs = min_subopt_in(trace, reference, 0, T - 1);
      rep.rhs = sps_smooth_rhs(constants.l_max, dist_sq, T);
      break;
    case BoundKind::SgdConvergence: {
      const FuvalBoundInputs in = bound_inputs(trace, reference, problem.n());
      if (!(in.lambda * constants.l_max < 0.5)) return unavailable("requires lambda < 1/(2 L_max)");
      if (!(in.gamma > 0.0 && in.gamma < 1.0)) return unavailable("requires gamma in (0, 1)");
      const Vector avg = averaged_iterate(trace, {AverageWeighting::Kind::Uniform});
      rep.lhs = objective(problem, avg) - reference.f_star;
      rep.rhs = sgd_convergence_rhs(in, constants.l_max, reference.sigma);
      break;
    }
    case BoundKind::ProxLinearInvSqrt: {
      if (!constants.lipschitz_available) return unavailable("Lipschitz constants not available for this loss");
      const FuvalBoundInputs in = bound_inputs(trace, reference, problem.n());
      if (in.gamma != 1.0) return unavailable("requires gamma = 1");
      if (!(trace.meta.c_penalty >= 1.0)) return unavailable("requires c >= 1");
      const Vector avg = averaged_iterate(trace, {AverageWeighting::Kind::LambdaWeighted});
      rep.lhs = objective(problem, avg) - reference.f_star;
      rep.rhs = prox_linear_rhs(in, sample_constants(problem).lipschitz);
      break;
    }
    case BoundKind::LipschitzTheta: {
      if (!constants.lipschitz_available) return unavailable("Lipschitz constants not available for this loss");
      const FuvalBoundInputs in = bound_inputs(trace, reference, problem.n());
      if (!(in.lambda * constants.g_max * constants.g_max <= in.delta))
        return unavailable("requires lambda G^2 <= delta");
      AverageWeighting weighting{AverageWeighting::Kind::ThetaWeighted, in.gamma, problem.n()};
      const Vector avg = averaged_iterate(trace, weighting);
      rep.lhs = objective(problem, avg) - reference.f_star;
      rep.rhs = lipschitz_theta_rhs(in);
      break;
    }
  }
  rep.satisfied = rep.lhs <= rep.rhs;
  return rep;
}

// --- rate fits ---------------------------------------------------------------------

std::vector<std::pair<std::size_t, double>> min_suboptimality_curve(const Trace& trace) {
  std::vector<std::pair<std::size_t, double>> out;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : trace.records) {
    if (std::isfinite(r.subopt)) best = std::min(best, r.subopt);
    out.emplace_back(r.t, best);
  }
  return out;
}

double loglog_slope(std::span<const double> t, std::span<const double> y, double floor) {
  if (t.size() != y.size() || t.size() < 2) throw ContractError("loglog_slope needs two or more matched points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double m = static_cast<double>(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (!(t[k] > 0.0)) throw ContractError("loglog_slope needs positive abscissae");
    const double x = std::log(t[k]);
    const double v = std::log(std::max(y[k], floor));
    sx += x;
    sy += v;
    sxx += x * x;
    sxy += x * v;
  }
  const double denom = m * sxx - sx * sx;
  if (denom == 0.0) throw ContractError("loglog_slope: abscissae are all equal");
  return (m * sxy - sx * sy) / denom;
}

std::vector<std::size_t> log_spaced_steps(std::size_t lo, std::size_t hi, std::size_t count) {
  if (lo == 0 || hi < lo || count == 0) throw ContractError("log_spaced_steps: need 0 < lo <= hi, count > 0");
  std::vector<std::size_t> out;
  const double a = std::log(static_cast<double>(lo));
  const double b = std::log(static_cast<double>(hi));
  for (std::size_t k = 0; k < count; ++k) {
    const double x = count == 1 ? a : a + (b - a) * static_cast<double>(k) / static_cast<double>(count - 1);
    const auto v = static_cast<std::size_t>(std::llround(std::exp(x)));
    if (out.empty() || v > out.back()) out.push_back(std::min(v, hi));
  }
  return out;
}

// --- sensitivity grid ---------------------------------------------------------------

std::vector<double> parse_eta_grid(const std::string& text) {
  std::vector<double> etas;
  auto number = [](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::logic_error&) {
      throw ConfigError("bad number '" + s + "' in eta grid");
    }
  };
  auto split = [](const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ',')) parts.push_back(part);
    return parts;
  };

  const std::string prefix = "logspace:";
  if (text.rfind(prefix, 0) == 0) {
    const auto parts = split(text.substr(prefix.size()));
    if (parts.size() != 3) throw ConfigError("eta grid must look like logspace:lo,hi,count");
    const double lo = number(parts[0]);
    const double hi = number(parts[1]);
    const double count = number(parts[2]);
    if (!(lo > 0.0) || !(hi > 0.0)) throw ConfigError("logspace bounds must be positive");
    if (count < 1.0 || count != std::floor(count)) throw ConfigError("logspace count must be a positive integer");
    const auto k = static_cast<std::size_t>(count);
    const double a = std::log10(lo), b = std::log10(hi);
    for (std::size_t i = 0; i < k; ++i)
      etas.push_back(k == 1 ? lo : std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(k - 1)));
  } else {
    for (const auto& p : split(text)) etas.push_back(number(p));
  }

  if (etas.empty()) throw ConfigError("eta grid is empty");
  for (std::size_t i = 0; i < etas.size(); ++i) {
    if (!(etas[i] > 0.0) || !std::isfinite(etas[i])) throw ConfigError("eta values must be positive and finite");
    if (i > 0 && !(etas[i] > etas[i - 1]))
      throw ConfigError("eta grid must be strictly increasing without duplicates");
  }
  return etas;
}

MethodSpec grid_method(const std::string& method, const std::string& scheme, double eta, const Problem& problem,
                       const GridOptions& options) {
  if (method == "gd") return GradientDescent{eta};
  if (method == "sgd") return StochasticGradient{eta};
  const Vector w0(problem.dim(), 0.0);
  const ScalingScheme sc{scaling_kind_from_string(scheme), eta};
  if (method == "fuval" || method == "fuval-full") {
    const FuvalParams params = fuval_params_for(sc, problem, w0, options.schedule, options.gamma, options.c_penalty);
    if (method == "fuval") return Fuval{params};
    return FuvalFullBatch{params};
  }
  if (method == "prox-linear") {
    const ScalingBases bases = resolve_scaling(sc, problem, w0, sample_constants(problem));
    return ProxLinearAppC{Schedule{options.schedule, bases.lambda}, options.c_penalty, {}};
  }
  throw ConfigError("method '" + method + "' cannot be swept over a stepsize grid");
}

namespace {

struct GridCell {
  std::string method;
  std::string scheme;
  double eta;
};

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size();
  return m % 2 == 1 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

}  // namespace

SensitivityTable grid_search(const Problem& problem, const ReferenceSolution& reference, const GridOptions& options) {
  if (options.etas.empty()) throw ConfigError("eta grid is empty");
  for (std::size_t i = 1; i < options.etas.size(); ++i)
    if (!(options.etas[i] > options.etas[i - 1]))
      throw ConfigError("eta grid must be strictly increasing without duplicates");
  if (options.seeds.empty()) throw ConfigError("grid needs at least one seed");

  std::vector<GridCell> cells;
  for (const auto& method : options.methods) {
    const bool schemeless = method == "gd" || method == "sgd";
    if (schemeless) {
      for (double eta : options.etas) cells.push_back({method, "none", eta});
      continue;
    }
    for (const auto& scheme : options.schemes) {
      scaling_kind_from_string(scheme);
      for (double eta : options.etas) cells.push_back({method, scheme, eta});
    }
  }

  std::vector<SensitivityRow> rows(cells.size());
  std::vector<std::exception_ptr> errors(cells.size());
  const int threads = options.jobs > 0 ? options.jobs : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::size_t c = 0; c < cells.size(); ++c) {
    try {
      const GridCell& cell = cells[c];
      const auto start = std::chrono::steady_clock::now();
      const MethodSpec spec = grid_method(cell.method, cell.scheme, cell.eta, problem, options);
      const std::size_t iters = is_stochastic(spec) ? options.epochs * problem.n() : options.full_batch_iterations;
      std::vector<double> subopts;
      bool diverged = false;
      for (std::uint64_t seed : options.seeds) {
        RunConfig cfg;
        cfg.iterations = iters;
        cfg.seed = seed;
        cfg.reference = &reference;
        cfg.eval_every = std::max<std::size_t>(iters, 1);
        cfg.scheme_label = cell.scheme;
        const Trace trace = run(problem, spec, cfg);
        if (trace.diverged) {
          diverged = true;
          subopts.push_back(std::numeric_limits<double>::infinity());
        } else {
          subopts.push_back(trace.records.back().f - reference.f_star);
        }
      }
      SensitivityRow row;
      row.method = cell.method;
      row.scheme = cell.scheme;
      row.eta = cell.eta;
      row.diverged = diverged;
      row.subopt_mean = std::accumulate(subopts.begin(), subopts.end(), 0.0) / static_cast<double>(subopts.size());
      row.subopt_median = median(subopts);
      row.seconds = options.timing
                        ? std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()
                        : 0.0;
      rows[c] = std::move(row);
    } catch (...) {
      errors[c] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::sort(rows.begin(), rows.end(), [](const SensitivityRow& a, const SensitivityRow& b) {
    return std::tie(a.method, a.scheme, a.eta) < std::tie(b.method, b.scheme, b.eta);
  });
  return SensitivityTable{std::move(rows)};
}

// --- file formats ---------------------------------------------------------------------

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

void close_checked(std::ofstream& out, const std::string& path) {
  out.close();
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_field(const std::string& s, const std::string& path, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size())
    throw ParseError(line, path + ": bad number '" + s + "'");
  return v;
}

}  // namespace

void write_trace_csv(const Trace& trace, const std::string& path) {
  std::ofstream out = open_out(path);
  out << kTraceHeader << '\n';
  for (const auto& r : trace.records) {
    out << r.t << ',' << r.sample << ',' << format_number(r.tau) << ',' << format_number(r.f) << ','
        << format_number(r.subopt) << ',' << format_number(r.grad_sq) << ',' << format_number(r.stepsize) << '\n';
  }
  close_checked(out, path);
}

std::vector<TraceRecord> read_trace_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) throw ParseError(1, path + ": unexpected trace header");
  std::vector<TraceRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 7) throw ParseError(line_no, path + ": expected 7 fields");
    TraceRecord r;
    r.t = static_cast<std::size_t>(parse_field(f[0], path, line_no));
    r.sample = static_cast<long>(parse_field(f[1], path, line_no));
    r.tau = parse_field(f[2], path, line_no);
    r.f = parse_field(f[3], path, line_no);
    r.subopt = parse_field(f[4], path, line_no);
    r.grad_sq = parse_field(f[5], path, line_no);
    r.stepsize = parse_field(f[6], path, line_no);
    out.push_back(r);
  }
  return out;
}

std::string meta_path_for(const std::string& csv_path) {
  std::filesystem::path p(csv_path);
  p.replace_extension(".meta");
  return p.string();
}

void write_run_meta(const RunMetadata& meta, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "method=" << meta.method << '\n'
      << "seed=" << meta.seed << '\n'
      << "T=" << meta.iterations << '\n'
      << "gamma=" << format_number(meta.gamma) << '\n'
      << "c=" << format_number(meta.c_penalty) << '\n'
      << "lambda_base=" << format_number(meta.lambda_base) << '\n'
      << "delta_base=" << format_number(meta.delta_base) << '\n'
      << "scheme=" << meta.scheme << '\n'
      << "reference_f_star=" << format_number(meta.reference_f_star) << '\n'
      << "reference_tol=" << format_number(meta.reference_tol) << '\n';
  close_checked(out, path);
}

void write_sensitivity_csv(const SensitivityTable& table, const std::string& path) {
  std::ofstream out = open_out(path);
  out << kSensitivityHeader << '\n';
  for (const auto& r : table.rows) {
    out << r.method << ',' << r.scheme << ',' << format_number(r.eta) << ',' << format_number(r.subopt_mean) << ','
        << format_number(r.subopt_median) << ',' << (r.diverged ? 1 : 0) << ',' << format_number(r.seconds) << '\n';
  }
  close_checked(out, path);
}

SensitivityTable read_sensitivity_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != kSensitivityHeader)
    throw ParseError(1, path + ": unexpected sensitivity header");
  SensitivityTable table;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 7) throw ParseError(line_no, path + ": expected 7 fields");
    SensitivityRow r;
    r.method = f[0];
    r.scheme = f[1];
    r.eta = parse_field(f[2], path, line_no);
    r.subopt_mean = parse_field(f[3], path, line_no);
    r.subopt_median = parse_field(f[4], path, line_no);
    r.diverged = f[5] == "1";
    r.seconds = parse_field(f[6], path, line_no);
    table.rows.push_back(r);
  }
  return table;
}

namespace {

std::string hash_hex(const Problem& problem) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(problem.hash()));
  return buf;
}

}  // namespace

void save_reference(const ReferenceSolution& reference, const Problem& problem, const std::string& path) {
  nlohmann::json j;
  j["problem_hash"] = hash_hex(problem);
  j["n"] = problem.n();
  j["dim"] = problem.dim();
  j["w_star"] = reference.w_star;
  j["f_star"] = reference.f_star;
  j["per_sample_f_star"] = reference.per_sample_f_star;
  j["grad_norm_at_solution"] = reference.grad_norm_at_solution;
  j["sigma"] = reference.sigma;
  j["tol"] = reference.tol;
  j["converged"] = reference.converged;
  j["iterations"] = reference.iterations;
  std::ofstream out = open_out(path);
  out << j.dump(1) << '\n';
  close_checked(out, path);
}

ReferenceSolution load_reference(const std::string& path, const Problem& problem) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open reference file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
    if (j.at("problem_hash").get<std::string>() != hash_hex(problem))
      throw ConfigError("reference file '" + path + "' was computed for a different problem");
    ReferenceSolution ref;
    ref.w_star = j.at("w_star").get<Vector>();
    ref.f_star = j.at("f_star").get<double>();
    ref.per_sample_f_star = j.at("per_sample_f_star").get<Vector>();
    ref.grad_norm_at_solution = j.at("grad_norm_at_solution").get<double>();
    ref.sigma = j.at("sigma").get<double>();
    ref.tol = j.at("tol").get<double>();
    ref.converged = j.at("converged").get<bool>();
    ref.iterations = j.at("iterations").get<std::size_t>();
    if (ref.w_star.size() != problem.dim() || ref.per_sample_f_star.size() != problem.n())
      throw ConfigError("reference file '" + path + "' has wrong sizes");
    return ref;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed reference file '" + path + "': " + e.what());
  }
}

std::string reference_cache_path(const std::string& dir, const Problem& problem) {
  return (std::filesystem::path(dir) / ("reference-" + hash_hex(problem) + ".json")).string();
}

ReferenceSolution cached_reference(const Problem& problem, const std::string& dir, const ReferenceOptions& options) {
  const std::string path = reference_cache_path(dir, problem);
  if (std::filesystem::exists(path)) return load_reference(path, problem);
  ReferenceSolution ref = reference_solve(problem, options);
  save_reference(ref, problem, path);
  return ref;
}

}  // namespace fuvalkit
