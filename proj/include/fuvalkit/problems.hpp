#pragma once

// Finite-sum objectives f(w) = (1/n) sum_i f_i(w) over sparse examples, with
// per-sample loss oracles for logistic and least-squares losses.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fuvalkit/linalg.hpp"

namespace fuvalkit {

enum class LossKind { Logistic, LeastSquares };

std::string to_string(LossKind kind);
LossKind loss_kind_from_string(const std::string& name);

/// One data row. Feature indices are 1-based as in LIBSVM files.
struct SparseExample {
  double label = 0.0;
  std::vector<std::pair<std::size_t, double>> features;
  std::size_t dim = 0;
};

/// Read-only view of one stored row; indices are 0-based column ids.
struct RowView {
  double label;
  std::span<const std::uint32_t> indices;
  std::span<const double> values;

  double dot(std::span<const double> w) const noexcept {
    double acc = 0.0;
    for (std::size_t k = 0; k < indices.size(); ++k) acc += values[k] * w[indices[k]];
    return acc;
  }
  double norm_sq() const noexcept { return fuvalkit::norm_sq(values); }
};

/// Immutable CSR-backed dataset plus loss kind. An optional positive `scale`
/// multiplies every f_i, which is how rescaled objectives alpha*f are built.
class Problem {
 public:
  Problem() = default;

  /// Validates every example (strictly increasing indices, index <= dim, finite
  /// values, shared dim) and throws ContractError otherwise.
  static Problem from_examples(const std::vector<SparseExample>& examples, LossKind kind);

  std::size_t n() const noexcept { return labels_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  LossKind loss() const noexcept { return loss_; }
  double scale() const noexcept { return scale_; }
  std::size_t nnz() const noexcept { return values_.size(); }

  RowView row(std::size_t i) const;
  SparseExample example(std::size_t i) const;
  std::vector<SparseExample> examples() const;

  /// Same data, every f_i multiplied by alpha > 0.
  Problem scaled(double alpha) const;

  /// FNV-1a digest of loss kind, scale, labels and CSR arrays.
  std::uint64_t hash() const noexcept;

  bool operator==(const Problem& other) const = default;

 private:
  LossKind loss_ = LossKind::Logistic;
  std::size_t dim_ = 0;
  double scale_ = 1.0;
  std::vector<double> labels_;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::uint32_t> cols_;
  std::vector<double> values_;
};

/// Per-sample Lipschitz (G_i) and smoothness (L_i) constants and infima.
/// For least squares the Lipschitz constants do not exist: `lipschitz_available`
/// is false and every G_i is +inf.
struct SampleConstants {
  std::vector<double> lipschitz;
  std::vector<double> smoothness;
  std::vector<double> inf_fi;
  double g_max = 0.0;
  double l_max = 0.0;
  double g_sq_sum = 0.0;
  bool lipschitz_available = true;
};

/// log(1 + exp(z)) without overflow.
double log1p_exp(double z) noexcept;
/// 1 / (1 + exp(-z)) without overflow.
double sigmoid(double z) noexcept;

/// f_i(w); i is 0-based.
double loss_value(const Problem& problem, std::size_t i, std::span<const double> w);

/// d f_i / d<x_i, w> at margin z, so that grad f_i(w) = derivative * x_i.
double loss_derivative(const Problem& problem, std::size_t i, double margin);

/// Dense grad f_i(w).
Vector loss_grad(const Problem& problem, std::size_t i, std::span<const double> w);

/// f_i(w) together with ||grad f_i(w)||^2, computed from one margin evaluation.
struct SampleEval {
  double value;
  double derivative;
  double grad_norm_sq;
};
SampleEval evaluate_sample(const Problem& problem, std::size_t i, std::span<const double> w);

/// Full objective and gradient (means over samples). Backed by the OpenMP kernels.
double objective(const Problem& problem, std::span<const double> w);
Vector objective_grad(const Problem& problem, std::span<const double> w);
/// Value and gradient in one pass.
double objective_and_grad(const Problem& problem, std::span<const double> w, Vector& grad);

SampleConstants sample_constants(const Problem& problem);

}  // namespace fuvalkit
