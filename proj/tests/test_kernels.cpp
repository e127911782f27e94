#include <gtest/gtest.h>
#include <omp.h>

#include <random>

#include "fuvalkit/dataio.hpp"
#include "fuvalkit/kernels.hpp"

using namespace fuvalkit;

namespace {

Problem make(SyntheticMode mode, std::size_t n) {
  SyntheticSpec spec;
  spec.n = n;
  spec.d = 17;
  spec.seed = 4;
  spec.mode = mode;
  spec.noise_std = 0.3;
  return gen_synthetic(spec).problem;
}

Vector point(std::size_t d) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal(0.0, 0.5);
  Vector w(d);
  for (double& v : w) v = normal(rng);
  return w;
}

}  // namespace

class KernelAgreement : public ::testing::TestWithParam<std::tuple<SyntheticMode, std::size_t>> {};

TEST_P(KernelAgreement, SerialMatchesOmp) {
  const auto [mode, n] = GetParam();
  const Problem p = make(mode, n);
  const Vector w = point(p.dim());
  const double fs = kernels::objective_serial(p, w);
  const double fo = kernels::objective_omp(p, w);
  EXPECT_NEAR(fs, fo, 1e-13 * std::max(1.0, std::abs(fs)));

  Vector gs, go;
  EXPECT_NEAR(kernels::objective_and_grad_serial(p, w, gs), kernels::objective_and_grad_omp(p, w, go),
              1e-13 * std::max(1.0, std::abs(fs)));
  ASSERT_EQ(gs.size(), go.size());
  for (std::size_t k = 0; k < gs.size(); ++k) EXPECT_NEAR(gs[k], go[k], 1e-13);

  EXPECT_EQ(kernels::sample_values_serial(p, w), kernels::sample_values_omp(p, w));
}

INSTANTIATE_TEST_SUITE_P(Sizes, KernelAgreement,
                         ::testing::Combine(::testing::Values(SyntheticMode::Logistic,
                                                              SyntheticMode::NoisyLeastSquares),
                                            ::testing::Values(std::size_t{1}, std::size_t{255}, std::size_t{256},
                                                              std::size_t{257}, std::size_t{3000})));

TEST(Kernels, ThreadCountInvariant) {
  const Problem p = make(SyntheticMode::Logistic, 5000);
  const Vector w = point(p.dim());
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  Vector g1;
  const double f1 = kernels::objective_and_grad_omp(p, w, g1);
  omp_set_num_threads(4);
  Vector g4;
  const double f4 = kernels::objective_and_grad_omp(p, w, g4);
  omp_set_num_threads(saved);
  EXPECT_EQ(f1, f4);
  EXPECT_EQ(g1, g4);
}

TEST(Kernels, GradientMatchesSampleSum) {
  const Problem p = make(SyntheticMode::NoisyLeastSquares, 40);
  const Vector w = point(p.dim());
  Vector expect(p.dim(), 0.0);
  for (std::size_t i = 0; i < p.n(); ++i) axpy(1.0 / 40.0, loss_grad(p, i, w), expect);
  const Vector g = objective_grad(p, w);
  for (std::size_t k = 0; k < g.size(); ++k) EXPECT_NEAR(g[k], expect[k], 1e-12);
}
