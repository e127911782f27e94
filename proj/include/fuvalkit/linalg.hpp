#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "fuvalkit/error.hpp"

namespace fuvalkit {

using Vector = std::vector<double>;

inline double positive_part(double x) noexcept { return x > 0.0 ? x : 0.0; }

inline double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ContractError("dot: dimension mismatch");
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * b[k];
  return acc;
}

inline double norm_sq(std::span<const double> a) noexcept {
  double acc = 0.0;
  for (double v : a) acc += v * v;
  return acc;
}

inline double distance_sq(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ContractError("distance_sq: dimension mismatch");
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    acc += diff * diff;
  }
  return acc;
}

/// y += alpha * x
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw ContractError("axpy: dimension mismatch");
  for (std::size_t k = 0; k < x.size(); ++k) y[k] += alpha * x[k];
}

inline bool all_finite(std::span<const double> a) noexcept {
  return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace fuvalkit
