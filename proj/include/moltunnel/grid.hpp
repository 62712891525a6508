#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "moltunnel/errors.hpp"

namespace moltunnel {

/// Uniform grid x_i = start + i*step, i = 0..intervals.
struct UniformGrid {
  double start = 0.0;
  double step = 1.0;
  std::size_t intervals = 0;

  static UniformGrid spanning(double lo, double hi, double step_hint) {
    if (!(hi > lo) || !(step_hint > 0))
      throw domain_error("UniformGrid: need lo < hi and a positive step");
    auto n = static_cast<std::size_t>(std::ceil((hi - lo) / step_hint - 1e-9));
    if (n % 2) ++n;  // even interval count for Simpson weights
    return {lo, (hi - lo) / static_cast<double>(n), n};
  }

  std::size_t size() const { return intervals + 1; }
  double at(std::size_t i) const { return start + static_cast<double>(i) * step; }
  double stop() const { return at(intervals); }
};

/// Composite Simpson weights on a grid with an even number of intervals.
inline std::vector<double> simpson_weights(const UniformGrid& g) {
  if (g.intervals < 2 || g.intervals % 2)
    throw domain_error("simpson_weights: need an even number of intervals");
  std::vector<double> w(g.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    w[i] = (i == 0 || i == g.intervals) ? 1.0 : (i % 2 ? 4.0 : 2.0);
  for (auto& v : w) v *= g.step / 3.0;
  return w;
}

}  // namespace moltunnel
