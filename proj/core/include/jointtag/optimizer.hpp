#pragma once

#include "jointtag/model.hpp"

namespace jointtag {

// Running mean of squared gradients, one entry per parameter.
struct RmspropState {
  Parameters mean_square;
  bool initialized = false;
};

// s <- decay*s + (1-decay)*g^2 ;  theta <- theta - lr*g/sqrt(s + eps).
// Zero-initializes the state on first use. Throws NumericError naming the
// first parameter with a non-finite gradient; nothing is updated then.
void rmsprop_step(Parameters& params, const Gradients& grads, RmspropState& state, const RmspropConfig& config);

double global_norm(const Gradients& grads);

// Rescales grads so their global L2 norm is at most max_norm. Returns the
// norm before clipping. max_norm <= 0 disables clipping.
double clip_global_norm(Gradients& grads, double max_norm);

}  // namespace jointtag
