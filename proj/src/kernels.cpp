#include "fuvalkit/kernels.hpp"

#include <omp.h>

#include <algorithm>

namespace fuvalkit::kernels {
namespace {

struct MarginLoss {
  LossKind kind;
  double scale;

  double value(double label, double margin) const noexcept {
    if (kind == LossKind::Logistic) return scale * log1p_exp(-label * margin);
    const double r = margin - label;
    return scale * (0.5 * r * r);
  }
  double derivative(double label, double margin) const noexcept {
    if (kind == LossKind::Logistic) return scale * (-label * sigmoid(-label * margin));
    return scale * (margin - label);
  }
};

std::size_t block_count(std::size_t n) { return (n + kBlockSize - 1) / kBlockSize; }

}  // namespace

double objective_serial(const Problem& problem, std::span<const double> w) {
  const MarginLoss loss{problem.loss(), problem.scale()};
  double acc = 0.0;
  for (std::size_t i = 0; i < problem.n(); ++i) {
    const RowView r = problem.row(i);
    acc += loss.value(r.label, r.dot(w));
  }
  return acc / static_cast<double>(problem.n());
}

double objective_and_grad_serial(const Problem& problem, std::span<const double> w, Vector& grad) {
  const MarginLoss loss{problem.loss(), problem.scale()};
  grad.assign(problem.dim(), 0.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < problem.n(); ++i) {
    const RowView r = problem.row(i);
    const double margin = r.dot(w);
    acc += loss.value(r.label, margin);
    const double coef = loss.derivative(r.label, margin);
    for (std::size_t k = 0; k < r.indices.size(); ++k) grad[r.indices[k]] += coef * r.values[k];
  }
  const double inv_n = 1.0 / static_cast<double>(problem.n());
  for (double& g : grad) g *= inv_n;
  return acc * inv_n;
}

double objective_omp(const Problem& problem, std::span<const double> w) {
  const MarginLoss loss{problem.loss(), problem.scale()};
  const std::size_t n = problem.n();
  const std::size_t blocks = block_count(n);
  std::vector<double> partial(blocks, 0.0);

#pragma omp parallel for schedule(static)
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t hi = std::min(n, (b + 1) * kBlockSize);
    double acc = 0.0;
    for (std::size_t i = b * kBlockSize; i < hi; ++i) {
      const RowView r = problem.row(i);
      acc += loss.value(r.label, r.dot(w));
    }
    partial[b] = acc;
  }

  double total = 0.0;
  for (double p : partial) total += p;
  return total / static_cast<double>(n);
}

double objective_and_grad_omp(const Problem& problem, std::span<const double> w, Vector& grad) {
  const MarginLoss loss{problem.loss(), problem.scale()};
  const std::size_t n = problem.n();
  const std::size_t d = problem.dim();
  const std::size_t blocks = block_count(n);
  std::vector<double> partial_value(blocks, 0.0);
  std::vector<double> partial_grad(blocks * d, 0.0);

#pragma omp parallel for schedule(static)
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t hi = std::min(n, (b + 1) * kBlockSize);
    double* g = partial_grad.data() + b * d;
    double acc = 0.0;
    for (std::size_t i = b * kBlockSize; i < hi; ++i) {
      const RowView r = problem.row(i);
      const double margin = r.dot(w);
      acc += loss.value(r.label, margin);
      const double coef = loss.derivative(r.label, margin);
      for (std::size_t k = 0; k < r.indices.size(); ++k) g[r.indices[k]] += coef * r.values[k];
    }
    partial_value[b] = acc;
  }

  grad.assign(d, 0.0);
  double total = 0.0;
  for (std::size_t b = 0; b < blocks; ++b) {
    total += partial_value[b];
    const double* g = partial_grad.data() + b * d;
    for (std::size_t k = 0; k < d; ++k) grad[k] += g[k];
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (double& g : grad) g *= inv_n;
  return total * inv_n;
}

Vector sample_values_serial(const Problem& problem, std::span<const double> w) {
  const MarginLoss loss{problem.loss(), problem.scale()};
  Vector out(problem.n());
  for (std::size_t i = 0; i < problem.n(); ++i) {
    const RowView r = problem.row(i);
    out[i] = loss.value(r.label, r.dot(w));
  }
  return out;
}

Vector sample_values_omp(const Problem& problem, std::span<const double> w) {
  const MarginLoss loss{problem.loss(), problem.scale()};
  const std::size_t n = problem.n();
  Vector out(n);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) {
    const RowView r = problem.row(i);
    out[i] = loss.value(r.label, r.dot(w));
  }
  return out;
}

}  // namespace fuvalkit::kernels
