#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "fuvalkit/problems.hpp"

namespace fuvalkit {

struct LibsvmOptions {
  LossKind loss = LossKind::Logistic;
  /// Forces d when the file's maximum index is smaller than the true dimension.
  std::optional<std::size_t> dim_override;
};

/// Parses `<label> <idx>:<val> ...` lines (idx >= 1). Blank lines and `#`
/// comment suffixes are skipped. For logistic loss the two distinct raw labels
/// are mapped smaller -> -1, larger -> +1. Throws ParseError with the line number.
Problem parse_libsvm(std::istream& in, const LibsvmOptions& options = {});
Problem load_libsvm(const std::string& path, const LibsvmOptions& options = {});

/// Writes the problem back in LIBSVM format with round-trip precision.
void write_libsvm(const Problem& problem, std::ostream& out);
void save_libsvm(const Problem& problem, const std::string& path);

enum class SyntheticMode {
  /// Least squares with y_i = <x_i, w>, so every f_i vanishes at the planted w.
  Interpolating,
  /// Least squares with y_i = <x_i, w> + noise_std * z_i.
  NoisyLeastSquares,
  /// Logistic labels drawn as +1 with probability sigmoid(<x_i, w>).
  Logistic,
};

struct SyntheticSpec {
  std::size_t n = 100;
  std::size_t d = 10;
  std::uint64_t seed = 1;
  SyntheticMode mode = SyntheticMode::Interpolating;
  double noise_std = 0.0;
};

struct SyntheticProblem {
  Problem problem;
  /// The planted minimizer; present only for Interpolating.
  std::optional<Vector> known_wstar;
};

/// Pure function of `spec`: the same spec always produces bit-identical data.
SyntheticProblem gen_synthetic(const SyntheticSpec& spec);

/// Parses `interp:n=100,d=10,seed=1`, `noisy:n=..,d=..,seed=..,noise=0.1` or
/// `logistic:n=..,d=..,seed=..`.
SyntheticSpec parse_synthetic_spec(const std::string& text);

}  // namespace fuvalkit
