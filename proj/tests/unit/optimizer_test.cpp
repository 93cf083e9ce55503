#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "jointtag/errors.hpp"
#include "jointtag/optimizer.hpp"
#include "tiny_model.hpp"

namespace jointtag {
namespace {

ModelShape small_shape() {
  Hyperparameters h;
  h.embedding_dim = 2;
  h.encoder_hidden = 2;
  h.decoder_hidden = 2;
  return ModelShape::from(h, 3, 9);
}

TEST(Rmsprop, ZeroGradientLeavesParameters) {
  Rng rng(1);
  Parameters p = oracle::random_parameters(small_shape(), rng);
  const Parameters before = p;
  const Gradients g = Parameters::zeros(small_shape());
  RmspropState state;
  for (int k = 0; k < 5; ++k) rmsprop_step(p, g, state, {});
  EXPECT_EQ(p.decoder.input_gate.input, before.decoder.input_gate.input);
  EXPECT_EQ(p.embedding, before.embedding);
}

TEST(Rmsprop, ConstantGradientStepApproachesLearningRate) {
  Parameters p = Parameters::zeros(small_shape());
  Gradients g = Parameters::zeros(small_shape());
  g.softmax_bias(0) = 3.0;
  g.softmax_bias(1) = -0.2;
  RmspropState state;
  const RmspropConfig cfg;
  double prev0 = 0.0, prev1 = 0.0;
  for (int k = 0; k < 200; ++k) {
    prev0 = p.softmax_bias(0);
    prev1 = p.softmax_bias(1);
    rmsprop_step(p, g, state, cfg);
  }
  EXPECT_NEAR(p.softmax_bias(0) - prev0, -cfg.learning_rate, 1e-9);
  EXPECT_NEAR(p.softmax_bias(1) - prev1, cfg.learning_rate, 1e-9);
}

TEST(Rmsprop, FirstStepFromZeroState) {
  Parameters p = Parameters::zeros(small_shape());
  Gradients g = Parameters::zeros(small_shape());
  g.softmax_bias(0) = 2.0;
  RmspropState state;
  rmsprop_step(p, g, state, {});
  EXPECT_NEAR(p.softmax_bias(0), -0.001 * 2.0 / std::sqrt(0.1 * 4.0 + 1e-8), 1e-15);
  EXPECT_NEAR(state.mean_square.softmax_bias(0), 0.4, 1e-15);
}

TEST(Rmsprop, MinimizesQuadratic) {
  Parameters p = Parameters::zeros(small_shape());
  p.softmax_bias(0) = 5.0;
  RmspropState state;
  RmspropConfig cfg;
  cfg.learning_rate = 0.01;
  int steps = 0;
  while (std::abs(p.softmax_bias(0)) >= 0.1 && steps < 2000) {
    Gradients g = Parameters::zeros(small_shape());
    g.softmax_bias(0) = 2.0 * p.softmax_bias(0);
    rmsprop_step(p, g, state, cfg);
    ++steps;
  }
  EXPECT_LT(std::abs(p.softmax_bias(0)), 0.1);
  EXPECT_LT(steps, 2000);
}

TEST(Rmsprop, NonFiniteGradientNamesTensor) {
  Parameters p = Parameters::zeros(small_shape());
  const Parameters before = p;
  Gradients g = Parameters::zeros(small_shape());
  g.softmax_bias(0) = 1.0;
  g.decoder.tag_projection(0, 0) = std::numeric_limits<double>::quiet_NaN();
  RmspropState state;
  try {
    rmsprop_step(p, g, state, {});
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("decoder.tag_projection"), std::string::npos);
  }
  EXPECT_EQ(p.softmax_bias, before.softmax_bias);
  g.decoder.tag_projection(0, 0) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(rmsprop_step(p, g, state, {}), NumericError);
}

TEST(Clip, GlobalNorm) {
  Gradients g = Parameters::zeros(small_shape());
  g.softmax_bias(0) = 3.0;
  g.embedding(1, 1) = 4.0;
  EXPECT_DOUBLE_EQ(global_norm(g), 5.0);
  Gradients same = g;
  EXPECT_DOUBLE_EQ(clip_global_norm(same, 10.0), 5.0);
  EXPECT_EQ(same.softmax_bias, g.softmax_bias);
  EXPECT_DOUBLE_EQ(clip_global_norm(g, 1.0), 5.0);
  EXPECT_NEAR(global_norm(g), 1.0, 1e-15);
  EXPECT_NEAR(g.softmax_bias(0), 0.6, 1e-15);
}

}  // namespace
}  // namespace jointtag
