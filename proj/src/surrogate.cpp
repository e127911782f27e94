#include "fuvalkit/surrogate.hpp"

#include <cmath>

namespace fuvalkit {
namespace {

void check_anchor(const SurrogateAnchor& anchor, const Problem& problem) {
  if (anchor.grad_norms_sq.size() != problem.n()) throw ContractError("surrogate anchor does not match problem");
  if (!(anchor.lambda >= 0.0) || !(anchor.delta > 0.0)) throw ContractError("surrogate needs lambda >= 0, delta > 0");
}

void check_slack(const Problem& problem, std::span<const double> s, std::size_t i) {
  if (s.size() != problem.n()) throw ContractError("slack vector must have n entries");
  if (i >= problem.n()) throw ContractError("sample index out of range");
}

double denominator(const SurrogateAnchor& anchor, std::size_t i) {
  return anchor.delta + anchor.lambda * anchor.grad_norms_sq[i];
}

}  // namespace

SurrogateAnchor anchor_at(const Problem& problem, std::span<const double> w, double lambda, double delta) {
  SurrogateAnchor anchor{Vector(problem.n()), lambda, delta};
  for (std::size_t i = 0; i < problem.n(); ++i) anchor.grad_norms_sq[i] = evaluate_sample(problem, i, w).grad_norm_sq;
  return anchor;
}

double phi_i(const SurrogateAnchor& anchor, const Problem& problem, std::size_t i, std::span<const double> w,
             std::span<const double> s) {
  check_anchor(anchor, problem);
  check_slack(problem, s, i);
  const double gap = positive_part(loss_value(problem, i, w) - s[i] + anchor.delta);
  return 0.5 * gap * gap / denominator(anchor, i) + s[i];
}

double phi(const SurrogateAnchor& anchor, const Problem& problem, std::span<const double> w,
           std::span<const double> s) {
  double acc = 0.0;
  for (std::size_t i = 0; i < problem.n(); ++i) acc += phi_i(anchor, problem, i, w, s);
  return acc / static_cast<double>(problem.n());
}

SurrogateGradient grad_phi_i(const SurrogateAnchor& anchor, const Problem& problem, std::size_t i,
                             std::span<const double> w, std::span<const double> s) {
  check_anchor(anchor, problem);
  check_slack(problem, s, i);
  const SampleEval ev = evaluate_sample(problem, i, w);
  const double r = positive_part(ev.value - s[i] + anchor.delta) / denominator(anchor, i);
  SurrogateGradient out{Vector(problem.dim(), 0.0), Vector(problem.n(), 0.0)};
  const RowView row = problem.row(i);
  for (std::size_t k = 0; k < row.indices.size(); ++k) out.grad_w[row.indices[k]] = r * (ev.derivative * row.values[k]);
  out.grad_s[i] = 1.0 - r;
  return out;
}

double inf_s_phi_i(const SurrogateAnchor& anchor, const Problem& problem, std::size_t i, std::span<const double> w) {
  check_anchor(anchor, problem);
  return loss_value(problem, i, w) + 0.5 * anchor.delta - 0.5 * anchor.lambda * anchor.grad_norms_sq.at(i);
}

double inf_ws_phi_i(const SurrogateAnchor& anchor, double inf_fi, std::size_t i) {
  return inf_fi + 0.5 * anchor.delta - 0.5 * anchor.lambda * anchor.grad_norms_sq.at(i);
}

double inf_s_phi(const SurrogateAnchor& anchor, const Problem& problem, std::span<const double> w) {
  double acc = 0.0;
  for (std::size_t i = 0; i < problem.n(); ++i) acc += inf_s_phi_i(anchor, problem, i, w);
  return acc / static_cast<double>(problem.n());
}

double inf_ws_phi(const SurrogateAnchor& anchor, std::span<const double> inf_fi) {
  if (inf_fi.size() != anchor.grad_norms_sq.size()) throw ContractError("inf_ws_phi: size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < inf_fi.size(); ++i) acc += inf_ws_phi_i(anchor, inf_fi[i], i);
  return acc / static_cast<double>(inf_fi.size());
}

double stationary_slack(const SurrogateAnchor& anchor, const ReferenceSolution& reference, std::size_t i) {
  return reference.per_sample_f_star.at(i) - anchor.lambda * anchor.grad_norms_sq.at(i);
}

double d_norm_sq(const DMetric& metric, std::span<const double> w_part, std::span<const double> s_part) {
  if (!(metric.lambda > 0.0) || !(metric.delta > 0.0)) throw ContractError("D-metric needs positive lambda, delta");
  return norm_sq(w_part) / metric.lambda + norm_sq(s_part) / metric.delta;
}

double gradient_bound_residual(const SurrogateAnchor& anchor, const Problem& problem, const IterateState& state,
                               std::size_t j) {
  const SurrogateGradient g = grad_phi_i(anchor, problem, j, state.w, state.s);
  const double lhs = 0.5 * (anchor.lambda * norm_sq(g.grad_w) + anchor.delta * norm_sq(g.grad_s));

  IterateState next = state;
  const StepRecord rec = fuval_step_inplace(problem, next, 1.0, kInfinity, j, anchor.lambda, anchor.delta);
  const double s_hat = state.s[j] + anchor.delta * (rec.tau - 1.0);
  const double rhs = phi_i(anchor, problem, j, state.w, state.s) - s_hat - 0.5 * anchor.delta;
  return lhs - rhs;
}

double penalty_value(const Problem& problem, std::span<const double> w, std::span<const double> s, double c) {
  if (!(c >= 0.0)) throw ContractError("penalty multiplier must be nonnegative");
  if (s.size() != problem.n()) throw ContractError("slack vector must have n entries");
  double acc = 0.0;
  for (std::size_t i = 0; i < problem.n(); ++i) {
    const double fi = loss_value(problem, i, w);
    // c * 0 stays 0 even for c = inf.
    const double excess = positive_part(fi - s[i]);
    acc += s[i] + (excess > 0.0 ? c * excess : 0.0);
  }
  return acc / static_cast<double>(problem.n());
}

}  // namespace fuvalkit
