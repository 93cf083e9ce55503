#include "jointtag/stats.hpp"

#include <cmath>

#include "jointtag/errors.hpp"

namespace jointtag {

MeanStd mean_std(std::span<const double> values) {
  if (values.empty()) throw ConfigError("mean of an empty sample");
  MeanStd out;
  for (double v : values) out.mean += v;
  out.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return out;
}

RunStatistics repeat_runs(std::size_t n, std::uint64_t seed, const std::function<RunMetrics(std::uint64_t)>& runner) {
  if (n == 0) throw ConfigError("repeat count must be >= 1");
  RunStatistics stats;
  stats.runs = n;
  for (std::size_t k = 0; k < n; ++k) {
    stats.samples.push_back(runner(seed + k));
    if (k > 0 && stats.samples[k].size() != stats.samples[0].size()) {
      throw ConfigError("runs report different metrics");
    }
  }
  for (const auto& [name, unused] : stats.samples.front()) {
    std::vector<double> values;
    for (const auto& s : stats.samples) {
      auto it = s.find(name);
      if (it == s.end()) throw ConfigError("run is missing metric " + name);
      values.push_back(it->second);
    }
    stats.metrics[name] = mean_std(values);
  }
  return stats;
}

}  // namespace jointtag
