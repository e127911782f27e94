#pragma once

#include "fuvalkit/linalg.hpp"

namespace fuvalkit {

/// High-precision solution of min f, supplying f* and the per-sample values
/// f_i(w*) that SPS and SPS+ need.
struct ReferenceSolution {
  Vector w_star;
  double f_star = 0.0;
  Vector per_sample_f_star;
  double grad_norm_at_solution = 0.0;
  /// f* - mean_i inf f_i.
  double sigma = 0.0;
  double tol = 1e-10;
  bool converged = false;
  std::size_t iterations = 0;
};

}  // namespace fuvalkit
