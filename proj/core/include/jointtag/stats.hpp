#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace jointtag {

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single value
};

// Throws ConfigError on an empty sample.
MeanStd mean_std(std::span<const double> values);

// Metric name -> value for one run.
using RunMetrics = std::map<std::string, double>;

struct RunStatistics {
  std::size_t runs = 0;
  std::map<std::string, MeanStd> metrics;
  std::vector<RunMetrics> samples;
};

// Calls runner(seed + k) for k = 0..n-1 and aggregates every metric the
// runs report. Throws ConfigError when n == 0 or runs disagree on metrics.
RunStatistics repeat_runs(std::size_t n, std::uint64_t seed, const std::function<RunMetrics(std::uint64_t)>& runner);

}  // namespace jointtag
