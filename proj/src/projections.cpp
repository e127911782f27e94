#include "fuvalkit/projections.hpp"

#include <limits>

namespace fuvalkit {

Vector halfspace_project(std::span<const double> a, double c, std::span<const double> w0) {
  if (a.size() != w0.size()) throw ContractError("halfspace_project: dimension mismatch");
  Vector w(w0.begin(), w0.end());
  const double excess = positive_part(c);
  if (excess == 0.0) return w;
  const double a_sq = norm_sq(a);
  if (a_sq < kZeroNormSq)
    throw InfeasibleError("halfspace_project: zero normal with violated constraint (c > 0)");
  axpy(-excess / a_sq, a, w);
  return w;
}

SlackProjection halfspace_project_slack(const HalfspaceSlackInstance& inst) {
  if (inst.a.size() != inst.w0.size()) throw ContractError("halfspace_project_slack: dimension mismatch");
  if (!(inst.slack_weight > 0.0)) throw ContractError("halfspace_project_slack: slack weight must be positive");
  SlackProjection out{inst.w0, inst.s0};
  const double excess = positive_part(inst.c - inst.s0);
  if (excess == 0.0) return out;
  const double step = excess / (1.0 + inst.slack_weight * norm_sq(inst.a));
  axpy(-inst.slack_weight * step, inst.a, out.w);
  out.s = inst.s0 + step;
  return out;
}

double max_linear_prox_coefficient(double a_norm_sq, double c, double beta) {
  if (!(beta > 0.0)) throw ContractError("max_linear_prox: beta must be positive");
  const double excess = positive_part(c);
  if (excess == 0.0) return 0.0;
  if (a_norm_sq < kZeroNormSq) return beta;
  return std::min(beta, excess / a_norm_sq);
}

Vector max_linear_prox(std::span<const double> y0, std::span<const double> a, double c, double beta) {
  if (a.size() != y0.size()) throw ContractError("max_linear_prox: dimension mismatch");
  Vector y(y0.begin(), y0.end());
  const double coef = max_linear_prox_coefficient(norm_sq(a), c, beta);
  if (coef != 0.0) axpy(-coef, a, y);
  return y;
}

}  // namespace fuvalkit
