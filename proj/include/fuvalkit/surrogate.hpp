#pragma once

// The online surrogate
//   phi_i(w, s) = (1/2) (f_i(w) - s_i + delta)_+^2 / (delta + lambda ||grad f_i(w_anchor)||^2) + s_i
// whose SGD step in the D-metric reproduces a FUVAL step, plus its closed-form
// partial minima and the exact penalty objective.

#include <span>

#include "fuvalkit/optimizers.hpp"
#include "fuvalkit/problems.hpp"
#include "fuvalkit/reference.hpp"

namespace fuvalkit {

/// Anchor-dependent denominators, frozen so phi can be evaluated away from the anchor.
struct SurrogateAnchor {
  Vector grad_norms_sq;
  double lambda = 1.0;
  double delta = 1.0;
};

/// Anchor at w: grad_norms_sq[i] = ||grad f_i(w)||^2.
SurrogateAnchor anchor_at(const Problem& problem, std::span<const double> w, double lambda, double delta);

double phi_i(const SurrogateAnchor& anchor, const Problem& problem, std::size_t i, std::span<const double> w,
             std::span<const double> s);
/// Mean of phi_i over samples.
double phi(const SurrogateAnchor& anchor, const Problem& problem, std::span<const double> w,
           std::span<const double> s);

struct SurrogateGradient {
  Vector grad_w;
  /// Dense n-vector; only entry i is nonzero.
  Vector grad_s;
};

/// r (grad f_i(w); -e_i) + (0; e_i) with r = (f_i - s_i + delta)_+ / (delta + lambda g_i).
SurrogateGradient grad_phi_i(const SurrogateAnchor& anchor, const Problem& problem, std::size_t i,
                             std::span<const double> w, std::span<const double> s);

/// f_i(w) + delta/2 - (lambda/2) g_i.
double inf_s_phi_i(const SurrogateAnchor& anchor, const Problem& problem, std::size_t i, std::span<const double> w);
/// inf f_i + delta/2 - (lambda/2) g_i.
double inf_ws_phi_i(const SurrogateAnchor& anchor, double inf_fi, std::size_t i);
double inf_s_phi(const SurrogateAnchor& anchor, const Problem& problem, std::span<const double> w);
double inf_ws_phi(const SurrogateAnchor& anchor, std::span<const double> inf_fi);

/// f_i(w*) - lambda g_i: the slack at which phi is stationary together with w*.
double stationary_slack(const SurrogateAnchor& anchor, const ReferenceSolution& reference, std::size_t i);

struct DMetric {
  double lambda = 1.0;
  double delta = 1.0;
};

/// (1/lambda) ||w_part||^2 + (1/delta) ||s_part||^2.
double d_norm_sq(const DMetric& metric, std::span<const double> w_part, std::span<const double> s_part);

/// (1/2) ||grad phi_j||^2 in the inverse D-metric minus (phi_j - s_hat - delta/2), where
/// s_hat = s_j + delta (tau - 1) is the unrelaxed slack update with c = inf.
/// `anchor` must be taken at state.w.
double gradient_bound_residual(const SurrogateAnchor& anchor, const Problem& problem, const IterateState& state,
                               std::size_t j);

/// (1/n) sum_i (s_i + c (f_i(w) - s_i)_+).
double penalty_value(const Problem& problem, std::span<const double> w, std::span<const double> s, double c);

}  // namespace fuvalkit
