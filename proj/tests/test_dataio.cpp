#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "fuvalkit/dataio.hpp"

using namespace fuvalkit;

namespace {

Problem parse(const std::string& text, LossKind loss = LossKind::Logistic) {
  std::istringstream in(text);
  LibsvmOptions opts;
  opts.loss = loss;
  return parse_libsvm(in, opts);
}

}  // namespace

TEST(Libsvm, ParsesSparseRow) {
  const Problem p = parse("+1 2:0.5 7:-1.25\n-1 1:1\n");
  ASSERT_EQ(p.n(), 2u);
  EXPECT_GE(p.dim(), 7u);
  const SparseExample ex = p.example(0);
  EXPECT_EQ(ex.label, 1.0);
  ASSERT_EQ(ex.features.size(), 2u);
  EXPECT_EQ(ex.features[0], (std::pair<std::size_t, double>{2, 0.5}));
  EXPECT_EQ(ex.features[1], (std::pair<std::size_t, double>{7, -1.25}));
}

TEST(Libsvm, MapsTwoLabels) {
  const Problem p = parse("0 1:1\n1 1:2\n");
  EXPECT_EQ(p.example(0).label, -1.0);
  EXPECT_EQ(p.example(1).label, 1.0);
  const Problem q = parse("1 1:1\n2 1:2\n# comment\n\n2 1:3 # trailing\n");
  EXPECT_EQ(q.n(), 3u);
  EXPECT_EQ(q.example(0).label, -1.0);
  EXPECT_EQ(q.example(2).label, 1.0);
}

TEST(Libsvm, ErrorsCarryLineNumbers) {
  try {
    parse("1 3:a\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
  }
  try {
    parse("1 1:1\n-1 4:1 2:1\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse("1 1:1\n2 1:1\n3 1:1\n"), ParseError);
  EXPECT_THROW(parse("1 0:1\n"), ParseError);
}

TEST(Libsvm, LeastSquaresKeepsLabels) {
  const Problem p = parse("3.5 1:1\n-2 2:1\n7 1:1\n", LossKind::LeastSquares);
  EXPECT_EQ(p.example(0).label, 3.5);
  EXPECT_EQ(p.example(2).label, 7.0);
}

TEST(Libsvm, DimOverride) {
  std::istringstream in("1 2:1\n-1 1:1\n");
  LibsvmOptions opts;
  opts.dim_override = 10;
  EXPECT_EQ(parse_libsvm(in, opts).dim(), 10u);
}

TEST(Libsvm, RoundTrip) {
  SyntheticSpec spec;
  spec.mode = SyntheticMode::Logistic;
  spec.n = 30;
  spec.d = 6;
  const Problem p = gen_synthetic(spec).problem;
  std::ostringstream out;
  write_libsvm(p, out);
  std::istringstream in(out.str());
  LibsvmOptions opts;
  opts.dim_override = p.dim();
  EXPECT_EQ(parse_libsvm(in, opts), p);
}

TEST(Libsvm, MissingFileThrows) { EXPECT_ANY_THROW(load_libsvm("/nonexistent/file.svm")); }

TEST(Synthetic, Deterministic) {
  const SyntheticSpec spec = parse_synthetic_spec("noisy:n=20,d=4,seed=9,noise=0.2");
  EXPECT_EQ(spec.n, 20u);
  EXPECT_EQ(spec.d, 4u);
  EXPECT_EQ(spec.seed, 9u);
  EXPECT_DOUBLE_EQ(spec.noise_std, 0.2);
  EXPECT_EQ(gen_synthetic(spec).problem, gen_synthetic(spec).problem);
  SyntheticSpec other = spec;
  other.seed = 10;
  EXPECT_FALSE(gen_synthetic(spec).problem == gen_synthetic(other).problem);
}

TEST(Synthetic, InterpolatingHasZeroLossAtPlantedPoint) {
  const SyntheticProblem sp = gen_synthetic(parse_synthetic_spec("interp:n=50,d=5,seed=3"));
  ASSERT_TRUE(sp.known_wstar.has_value());
  for (std::size_t i = 0; i < sp.problem.n(); ++i) EXPECT_NEAR(loss_value(sp.problem, i, *sp.known_wstar), 0.0, 1e-28);
}

TEST(Synthetic, BadSpecs) {
  EXPECT_THROW(parse_synthetic_spec("cubic:n=3"), ConfigError);
  EXPECT_ANY_THROW(parse_synthetic_spec("interp:n=abc"));
  EXPECT_ANY_THROW(parse_synthetic_spec("interp:bogus=1"));
}
