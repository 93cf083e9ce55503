#pragma once

// Central finite differences over parameter coordinates.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "jointtag/model.hpp"
#include "jointtag/random.hpp"

namespace oracle {

struct Coordinate {
  std::size_t tensor;
  std::size_t index;
};

struct GradCheck {
  double max_relative_error = 0.0;
  std::size_t checked = 0;
  std::string worst;
};

inline std::string to_sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

inline double relative_error(double a, double n) {
  return std::abs(a - n) / std::max({std::abs(a), std::abs(n), 1e-8});
}

// All coordinates when there are at most `limit`, otherwise `limit` sampled
// without replacement.
inline std::vector<Coordinate> pick_coordinates(const jointtag::Parameters& p, std::size_t limit, jointtag::Rng& rng) {
  std::vector<Coordinate> all;
  const auto tensors = p.tensors();
  for (std::size_t k = 0; k < tensors.size(); ++k) {
    for (std::size_t i = 0; i < static_cast<std::size_t>(tensors[k].size()); ++i) all.push_back({k, i});
  }
  if (all.size() <= limit) return all;
  rng.shuffle(std::span<Coordinate>(all));
  all.resize(limit);
  return all;
}

// `loss` may return a wider floating type than double; the difference is
// then taken at that width.
template <typename LossFn>
GradCheck check_gradients(jointtag::Parameters params, const jointtag::Gradients& analytic,
                          const std::vector<Coordinate>& coords, const LossFn& loss, double step = 1e-4) {
  GradCheck out;
  auto theta = params.tensors();
  const auto grad = analytic.tensors();
  for (const auto& c : coords) {
    double& v = theta[c.tensor].data[c.index];
    const double saved = v;
    v = saved + step;
    const auto up = loss(params);
    v = saved - step;
    const auto down = loss(params);
    v = saved;
    const double numeric = static_cast<double>((up - down) / (2 * step));
    const double a = grad[c.tensor].data[c.index];
    const double err = relative_error(a, numeric);
    ++out.checked;
    if (err > out.max_relative_error) {
      out.max_relative_error = err;
      out.worst = theta[c.tensor].name + "[" + std::to_string(c.index) + "] analytic=" + to_sci(a) +
                  " numeric=" + to_sci(numeric);
    }
  }
  return out;
}

}  // namespace oracle
