#include "automate/nn/gradcheck.hpp"
#include "automate/nn/params.hpp"

#include <gtest/gtest.h>

#include <limits>

using namespace automate::nn;

namespace {

Matrix<double> scalar(double v) { return Matrix<double>(1, 1, std::vector<double>{v}); }

}  // namespace

TEST(Autodiff, EveryPrimitiveMatchesFiniteDifferences) {
  for (const auto& c : primitive_gradient_cases(3)) {
    const GradCheck r = check_gradients(c.inputs, c.op, 1e-5);
    EXPECT_LT(r.max_rel_error, 1e-4) << c.name << " input " << r.worst_input;
    EXPECT_GT(r.entries, 0) << c.name;
  }
}

TEST(Autodiff, ReluBackward) {
  Tape<double> t;
  Var x = t.leaf(Matrix<double>(1, 2, std::vector<double>{-1, 2}));
  Var y = dot_constant(t, relu(t, x), Matrix<double>(1, 2, 1.0));
  t.backward(y);
  EXPECT_EQ(t.grad(x).data, (std::vector<double>{0, 1}));
}

TEST(Autodiff, SegmentMaxSingleNeighborIsIdentity) {
  Tape<double> t;
  Var x = t.leaf(Matrix<double>(1, 3, std::vector<double>{-2, 0.5, 4}));
  Var y = segment_max(t, x, {0}, 1);
  EXPECT_EQ(t.value(y), t.value(x));
  t.backward(dot_constant(t, y, Matrix<double>(1, 3, 1.0)));
  EXPECT_EQ(t.grad(x).data, (std::vector<double>{1, 1, 1}));
}

TEST(Autodiff, SegmentMaxEmptySegmentAndTies) {
  Tape<double> t;
  Var x = t.leaf(Matrix<double>(2, 1, std::vector<double>{3, 3}));
  Var y = segment_max(t, x, {1, 1}, 2);
  EXPECT_EQ(t.value(y).data, (std::vector<double>{0, 3}));
  t.backward(dot_constant(t, y, Matrix<double>(2, 1, 1.0)));
  EXPECT_EQ(t.grad(x).data, (std::vector<double>{1, 0}));
}

TEST(Autodiff, BatchNormModes) {
  Matrix<double> mean(1, 2, 0.0), var(1, 2, 1.0);
  const Matrix<double> x(3, 2, std::vector<double>{1, 2, 3, 4, 5, 9});
  {
    Tape<double> t;
    Var y = batchnorm(t, t.constant(x), t.constant(Matrix<double>(1, 2, 1.0)), t.constant(Matrix<double>(1, 2, 0.0)),
                      mean, var, {false});
    EXPECT_NEAR(t.value(y)(2, 1), 9 / std::sqrt(1 + 1e-5), 1e-12);
    EXPECT_EQ(mean.data, (std::vector<double>{0, 0}));
  }
  Tape<double> t;
  Var y = batchnorm(t, t.constant(x), t.constant(Matrix<double>(1, 2, 1.0)), t.constant(Matrix<double>(1, 2, 0.0)),
                    mean, var, {true});
  double col = 0;
  for (int r = 0; r < 3; ++r) col += t.value(y)(r, 0);
  EXPECT_NEAR(col, 0, 1e-12);
  EXPECT_NEAR(mean.data[0], 0.1 * 3, 1e-12);
  EXPECT_NEAR(var.data[0], 0.9 + 0.1 * 4, 1e-12);
}

TEST(Autodiff, ShapeAndNonFiniteErrors) {
  Tape<double> t;
  Var a = t.leaf(Matrix<double>(2, 3));
  Var b = t.leaf(Matrix<double>(2, 3));
  EXPECT_THROW(matmul(t, a, b), ShapeError);
  EXPECT_THROW(t.backward(a), ShapeError);
  Var inf = t.leaf(Matrix<double>(2, 3, 1e308));
  try {
    add(t, inf, inf);
    FAIL() << "expected non-finite error";
  } catch (const NonFiniteError& e) {
    EXPECT_EQ(e.op(), "add");
  }
  EXPECT_THROW(t.constant(scalar(std::numeric_limits<double>::quiet_NaN())), NonFiniteError);
}

TEST(Autodiff, GradientsAccumulate) {
  Tape<double> t;
  Var x = t.leaf(scalar(2));
  Var y = add(t, x, x);
  t.backward(dot_constant(t, y, scalar(1)));
  EXPECT_EQ(t.grad(x).data[0], 2);
}

TEST(Adam, ZeroGradientLeavesParameters) {
  ParamStore<double> s;
  s.add_parameter("w", Matrix<double>(2, 2, 0.7));
  adam_step(s);
  EXPECT_EQ(s.step(), 1);
  EXPECT_EQ(s.parameter(0).value.data, std::vector<double>(4, 0.7));
}

TEST(Adam, FirstStepMovesByLearningRate) {
  ParamStore<double> s;
  s.add_parameter("w", scalar(1));
  s.parameter(0).grad.data[0] = 1;
  adam_step(s, {0.001, 0.9, 0.999, 1e-8});
  EXPECT_NEAR(s.parameter(0).value.data[0], 1 - 0.001, 1e-10);
  EXPECT_EQ(s.parameter(0).grad.data[0], 0);
}

TEST(Adam, Deterministic) {
  auto run = [] {
    std::mt19937_64 rng(5);
    ParamStore<double> s;
    s.add_parameter("w", uniform_init<double>(3, 3, 3, rng));
    for (int i = 0; i < 10; ++i) {
      for (double& g : s.parameter(0).grad.data) g = std::uniform_real_distribution<double>(-1, 1)(rng);
      adam_step(s);
    }
    return s.parameter(0).value;
  };
  EXPECT_EQ(run(), run());
}

TEST(ParamStore, NamesAreUnique) {
  ParamStore<float> s;
  s.add_parameter("w", Matrix<float>(1, 1));
  EXPECT_THROW(s.add_buffer("w", Matrix<float>(1, 1)), std::invalid_argument);
}

TEST(Checkpoint, RoundTripIsBitExact) {
  std::mt19937_64 rng(9);
  ParamStore<float> s;
  s.add_parameter("a", uniform_init<float>(4, 3, 4, rng));
  s.add_parameter("b", uniform_init<float>(1, 3, 4, rng));
  s.add_buffer("bn.mean", uniform_init<float>(1, 3, 1, rng));
  for (float& g : s.parameter(0).grad.data) g = 0.3f;
  adam_step(s);

  const std::string text = checkpoint_json(s, {{"epoch", 3}}).dump();
  ParamStore<float> r;
  r.add_parameter("a", Matrix<float>(4, 3));
  r.add_parameter("b", Matrix<float>(1, 3));
  r.add_buffer("bn.mean", Matrix<float>(1, 3));
  load_checkpoint(r, Json::parse(text));
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(r.parameter(i).value, s.parameter(i).value);
    EXPECT_EQ(r.parameter(i).m, s.parameter(i).m);
    EXPECT_EQ(r.parameter(i).v, s.parameter(i).v);
  }
  EXPECT_EQ(r.buffer(0).value, s.buffer(0).value);
  EXPECT_EQ(r.step(), 1);
  EXPECT_EQ(checkpoint_json(r, {{"epoch", 3}}).dump(), text);

  ParamStore<float> wrong;
  wrong.add_parameter("a", Matrix<float>(3, 3));
  wrong.add_parameter("b", Matrix<float>(1, 3));
  wrong.add_buffer("bn.mean", Matrix<float>(1, 3));
  EXPECT_THROW(load_checkpoint(wrong, Json::parse(text)), std::runtime_error);
}
