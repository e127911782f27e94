#pragma once

// A FUVAL step assembled three other ways: as a weighted projection onto the
// linearized constraint with slack, as a prox-linear step on the exact penalty,
// and as an SGD step on the online surrogate. Used to cross-check fuval_step.

#include "fuvalkit/optimizers.hpp"

namespace fuvalkit {

/// Projection of (w, s_j - delta) onto {f_j + <g, w' - w> <= s'} in the metric
/// (1/lambda)|.|^2 + (1/delta)|.|^2. Equals fuval_step with gamma = 1, c = inf.
IterateState projection_viewpoint_step(const Problem& problem, const IterateState& state, std::size_t j,
                                       double lambda, double delta);

/// argmin s' + c (f_j + <g, w' - w> - s')_+ + |w' - w|^2/(2 lambda) + (s' - s_j)^2/(2 delta),
/// solved with max_linear_prox in rescaled coordinates. Equals fuval_step with gamma = 1.
IterateState prox_linear_viewpoint_step(const Problem& problem, const IterateState& state, std::size_t j,
                                        double lambda, double delta, double c_penalty);

/// (w, s) - gamma (lambda grad_w phi_j, delta grad_s phi_j) with the surrogate
/// anchored at state.w. Equals fuval_step with c = inf.
IterateState online_sgd_viewpoint_step(const Problem& problem, const IterateState& state, std::size_t j,
                                       double lambda, double delta, double gamma);

}  // namespace fuvalkit
