#include "jointtag/optimizer.hpp"

#include <cmath>

#include "jointtag/errors.hpp"

namespace jointtag {

void rmsprop_step(Parameters& params, const Gradients& grads, RmspropState& state, const RmspropConfig& config) {
  auto theta = params.tensors();
  const auto g = grads.tensors();
  if (theta.size() != g.size()) throw ShapeError("gradient tensor count differs from parameters");
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (theta[k].rows != g[k].rows || theta[k].cols != g[k].cols) throw ShapeError("gradient shape mismatch in " + g[k].name);
    for (double v : g[k].values()) {
      if (!std::isfinite(v)) throw NumericError("non-finite gradient in " + g[k].name);
    }
  }
  if (!state.initialized) {
    state.mean_square = params;
    state.mean_square.set_zero();
    state.initialized = true;
  }
  auto s = state.mean_square.tensors();
  if (s.size() != g.size()) throw ShapeError("optimizer state does not match parameters");

  const double rho = config.decay;
  for (std::size_t k = 0; k < g.size(); ++k) {
    auto tv = theta[k].values();
    auto gv = g[k].values();
    auto sv = s[k].values();
    for (std::size_t i = 0; i < gv.size(); ++i) {
      sv[i] = rho * sv[i] + (1.0 - rho) * gv[i] * gv[i];
      tv[i] -= config.learning_rate * gv[i] / std::sqrt(sv[i] + config.epsilon);
    }
  }
}

double global_norm(const Gradients& grads) {
  double sum = 0.0;
  for (const auto& t : grads.tensors()) {
    for (double v : t.values()) sum += v * v;
  }
  return std::sqrt(sum);
}

double clip_global_norm(Gradients& grads, double max_norm) {
  const double norm = global_norm(grads);
  if (max_norm > 0.0 && norm > max_norm) {
    const double scale = max_norm / norm;
    for (auto& t : grads.tensors()) {
      for (double& v : t.values()) v *= scale;
    }
  }
  return norm;
}

}  // namespace jointtag
