#include "fuvalkit/viewpoints.hpp"

#include <cmath>

#include "fuvalkit/projections.hpp"
#include "fuvalkit/surrogate.hpp"

namespace fuvalkit {

IterateState projection_viewpoint_step(const Problem& problem, const IterateState& state, std::size_t j,
                                       double lambda, double delta) {
  HalfspaceSlackInstance inst;
  inst.a = loss_grad(problem, j, state.w);
  inst.c = loss_value(problem, j, state.w);
  inst.w0 = state.w;
  inst.s0 = state.s.at(j) - delta;
  inst.slack_weight = lambda / delta;
  const SlackProjection proj = halfspace_project_slack(inst);

  IterateState out = state;
  out.w = proj.w;
  out.s[j] = proj.s;
  ++out.t;
  return out;
}

IterateState prox_linear_viewpoint_step(const Problem& problem, const IterateState& state, std::size_t j,
                                        double lambda, double delta, double c_penalty) {
  const std::size_t d = problem.dim();
  const double sl = std::sqrt(lambda);
  const double sd = std::sqrt(delta);
  const Vector g = loss_grad(problem, j, state.w);

  // y = (w / sqrt(lambda), s_j / sqrt(delta)); the linear s term shifts the centre by -sqrt(delta).
  Vector y0(d + 1), a(d + 1);
  for (std::size_t k = 0; k < d; ++k) {
    y0[k] = state.w[k] / sl;
    a[k] = sl * g[k];
  }
  y0[d] = (state.s.at(j) - delta) / sd;
  a[d] = -sd;
  const double c0 = loss_value(problem, j, state.w) - state.s[j] + delta;
  const Vector y = max_linear_prox(y0, a, c0, c_penalty);

  IterateState out = state;
  for (std::size_t k = 0; k < d; ++k) out.w[k] = sl * y[k];
  out.s[j] = sd * y[d];
  ++out.t;
  return out;
}

IterateState online_sgd_viewpoint_step(const Problem& problem, const IterateState& state, std::size_t j,
                                       double lambda, double delta, double gamma) {
  const SurrogateAnchor anchor = anchor_at(problem, state.w, lambda, delta);
  const SurrogateGradient g = grad_phi_i(anchor, problem, j, state.w, state.s);
  IterateState out = state;
  axpy(-gamma * lambda, g.grad_w, out.w);
  axpy(-gamma * delta, g.grad_s, out.s);
  ++out.t;
  return out;
}

}  // namespace fuvalkit
