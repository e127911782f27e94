#pragma once

// Full-batch reductions over the n samples of a Problem.
//
// The `_omp` kernels split the samples into fixed blocks of kBlockSize rows,
// reduce each block independently (in parallel), then add the block partials
// in block order. The result therefore does not depend on the thread count.
// The `_serial` kernels are the plain left-to-right loops, kept as the
// reference the parallel versions are tested against.

#include <cstddef>
#include <span>

#include "fuvalkit/problems.hpp"

namespace fuvalkit::kernels {

inline constexpr std::size_t kBlockSize = 256;

double objective_serial(const Problem& problem, std::span<const double> w);
double objective_and_grad_serial(const Problem& problem, std::span<const double> w, Vector& grad);

double objective_omp(const Problem& problem, std::span<const double> w);
double objective_and_grad_omp(const Problem& problem, std::span<const double> w, Vector& grad);

/// Per-sample values f_i(w) for all i (embarrassingly parallel, exact).
Vector sample_values_omp(const Problem& problem, std::span<const double> w);
Vector sample_values_serial(const Problem& problem, std::span<const double> w);

}  // namespace fuvalkit::kernels
