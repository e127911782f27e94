#include "fuvalkit/problems.hpp"

#include <cmath>
#include <cstring>

#include "fuvalkit/kernels.hpp"

namespace fuvalkit {

std::string to_string(LossKind kind) {
  return kind == LossKind::Logistic ? "logistic" : "lsq";
}

LossKind loss_kind_from_string(const std::string& name) {
  if (name == "logistic") return LossKind::Logistic;
  if (name == "lsq" || name == "least-squares") return LossKind::LeastSquares;
  throw ConfigError("unknown loss '" + name + "' (expected logistic or lsq)");
}

Problem Problem::from_examples(const std::vector<SparseExample>& examples, LossKind kind) {
  if (examples.empty()) throw ContractError("problem needs at least one example");
  Problem p;
  p.loss_ = kind;
  p.dim_ = examples.front().dim;
  if (p.dim_ == 0) throw ContractError("problem dimension must be positive");
  p.labels_.reserve(examples.size());
  p.row_ptr_.reserve(examples.size() + 1);
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto& ex = examples[i];
    const std::string where = "example " + std::to_string(i) + ": ";
    if (ex.dim != p.dim_) throw ContractError(where + "dimension differs from first example");
    if (!std::isfinite(ex.label)) throw ContractError(where + "non-finite label");
    if (kind == LossKind::Logistic && ex.label != 1.0 && ex.label != -1.0)
      throw ContractError(where + "logistic labels must be -1 or +1");
    std::size_t prev = 0;
    for (const auto& [idx, val] : ex.features) {
      if (idx == 0 || idx > p.dim_) throw ContractError(where + "feature index out of range");
      if (idx <= prev) throw ContractError(where + "feature indices not strictly increasing");
      if (!std::isfinite(val)) throw ContractError(where + "non-finite feature value");
      prev = idx;
      p.cols_.push_back(static_cast<std::uint32_t>(idx - 1));
      p.values_.push_back(val);
    }
    p.labels_.push_back(ex.label);
    p.row_ptr_.push_back(p.values_.size());
  }
  return p;
}

RowView Problem::row(std::size_t i) const {
  if (i >= n()) throw ContractError("sample index out of range");
  const std::size_t lo = row_ptr_[i];
  const std::size_t len = row_ptr_[i + 1] - lo;
  return RowView{labels_[i], std::span<const std::uint32_t>(cols_).subspan(lo, len),
                 std::span<const double>(values_).subspan(lo, len)};
}

SparseExample Problem::example(std::size_t i) const {
  const RowView r = row(i);
  SparseExample ex;
  ex.label = r.label;
  ex.dim = dim_;
  ex.features.reserve(r.indices.size());
  for (std::size_t k = 0; k < r.indices.size(); ++k)
    ex.features.emplace_back(static_cast<std::size_t>(r.indices[k]) + 1, r.values[k]);
  return ex;
}

std::vector<SparseExample> Problem::examples() const {
  std::vector<SparseExample> out;
  out.reserve(n());
  for (std::size_t i = 0; i < n(); ++i) out.push_back(example(i));
  return out;
}

Problem Problem::scaled(double alpha) const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ContractError("scale factor must be positive");
  Problem p = *this;
  p.scale_ = scale_ * alpha;
  return p;
}

namespace {

struct Fnv1a {
  std::uint64_t state = 1469598103934665603ULL;
  void bytes(const void* data, std::size_t len) noexcept {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t k = 0; k < len; ++k) {
      state ^= p[k];
      state *= 1099511628211ULL;
    }
  }
  template <typename T>
  void value(const T& v) noexcept { bytes(&v, sizeof(T)); }
  template <typename T>
  void range(const std::vector<T>& v) noexcept {
    value(v.size());
    if (!v.empty()) bytes(v.data(), v.size() * sizeof(T));
  }
};

}  // namespace

std::uint64_t Problem::hash() const noexcept {
  Fnv1a h;
  h.value(static_cast<int>(loss_));
  h.value(dim_);
  h.value(scale_);
  h.range(labels_);
  h.range(row_ptr_);
  h.range(cols_);
  h.range(values_);
  return h.state;
}

double log1p_exp(double z) noexcept { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double sigmoid(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

void check_dim(const Problem& problem, std::span<const double> w) {
  if (w.size() != problem.dim())
    throw ContractError("vector has dimension " + std::to_string(w.size()) + ", problem has " +
                        std::to_string(problem.dim()));
}

double value_at_margin(LossKind kind, double label, double margin) noexcept {
  if (kind == LossKind::Logistic) return log1p_exp(-label * margin);
  const double r = margin - label;
  return 0.5 * r * r;
}

double derivative_at_margin(LossKind kind, double label, double margin) noexcept {
  if (kind == LossKind::Logistic) return -label * sigmoid(-label * margin);
  return margin - label;
}

}  // namespace

double loss_value(const Problem& problem, std::size_t i, std::span<const double> w) {
  check_dim(problem, w);
  const RowView r = problem.row(i);
  return problem.scale() * value_at_margin(problem.loss(), r.label, r.dot(w));
}

double loss_derivative(const Problem& problem, std::size_t i, double margin) {
  const RowView r = problem.row(i);
  return problem.scale() * derivative_at_margin(problem.loss(), r.label, margin);
}

Vector loss_grad(const Problem& problem, std::size_t i, std::span<const double> w) {
  check_dim(problem, w);
  const RowView r = problem.row(i);
  const double coef = problem.scale() * derivative_at_margin(problem.loss(), r.label, r.dot(w));
  Vector g(problem.dim(), 0.0);
  for (std::size_t k = 0; k < r.indices.size(); ++k) g[r.indices[k]] = coef * r.values[k];
  return g;
}

SampleEval evaluate_sample(const Problem& problem, std::size_t i, std::span<const double> w) {
  check_dim(problem, w);
  const RowView r = problem.row(i);
  const double margin = r.dot(w);
  const double s = problem.scale();
  const double deriv = s * derivative_at_margin(problem.loss(), r.label, margin);
  // Same summation order as norm_sq of the dense gradient, so n = 1 full-batch
  // quantities agree bit for bit with the per-sample ones.
  double grad_sq = 0.0;
  for (double v : r.values) {
    const double g = deriv * v;
    grad_sq += g * g;
  }
  return SampleEval{s * value_at_margin(problem.loss(), r.label, margin), deriv, grad_sq};
}

double objective(const Problem& problem, std::span<const double> w) {
  check_dim(problem, w);
  return kernels::objective_omp(problem, w);
}

Vector objective_grad(const Problem& problem, std::span<const double> w) {
  Vector g;
  objective_and_grad(problem, w, g);
  return g;
}

double objective_and_grad(const Problem& problem, std::span<const double> w, Vector& grad) {
  check_dim(problem, w);
  return kernels::objective_and_grad_omp(problem, w, grad);
}

SampleConstants sample_constants(const Problem& problem) {
  SampleConstants c;
  const std::size_t n = problem.n();
  c.lipschitz.resize(n);
  c.smoothness.resize(n);
  c.inf_fi.assign(n, 0.0);
  c.lipschitz_available = problem.loss() == LossKind::Logistic;
  const double s = problem.scale();
  for (std::size_t i = 0; i < n; ++i) {
    const double sq = problem.row(i).norm_sq();
    if (problem.loss() == LossKind::Logistic) {
      c.lipschitz[i] = s * std::sqrt(sq);
      c.smoothness[i] = s * 0.25 * sq;
    } else {
      // Zero rows are constant functions, hence trivially 0-Lipschitz.
      c.lipschitz[i] = sq == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
      c.smoothness[i] = s * sq;
    }
    c.l_max = std::max(c.l_max, c.smoothness[i]);
    c.g_max = std::max(c.g_max, c.lipschitz[i]);
    c.g_sq_sum += c.lipschitz[i] * c.lipschitz[i];
  }
  return c;
}

}  // namespace fuvalkit
