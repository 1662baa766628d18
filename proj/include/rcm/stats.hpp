#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "rcm/lattice.hpp"

namespace rcm {

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
};

// Sample mean and standard error of the mean (n - 1 denominator); the error is
// 0 for fewer than two samples.
inline MeanStderr mean_stderr(std::span<const double> xs) {
  MeanStderr out;
  if (xs.empty()) return out;
  const double n = static_cast<double>(xs.size());
  if (std::all_of(xs.begin(), xs.end(), [&](double x) { return x == xs.front(); })) {
    out.mean = xs.front();  // exact for deterministic samples
    return out;
  }
  out.mean = pairwise_sum(xs) / n;
  if (xs.size() < 2) return out;
  std::vector<double> dev(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) dev[i] = (xs[i] - out.mean) * (xs[i] - out.mean);
  out.stderr_ = std::sqrt(pairwise_sum(dev) / (n - 1.0) / n);
  return out;
}

}  // namespace rcm
