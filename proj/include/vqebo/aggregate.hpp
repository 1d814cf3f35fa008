// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

namespace vqebo {

/// Piecewise-linear trace (x strictly increasing); evaluation clamps at the ends.
struct Trace {
  std::vector<double> x;
  std::vector<double> y;

  double at(double q) const {
    if (x.empty()) throw std::invalid_argument("Trace::at on an empty trace");
    if (q <= x.front()) return y.front();
    if (q >= x.back()) return y.back();
    const auto it = std::upper_bound(x.begin(), x.end(), q);
    const auto i = static_cast<std::size_t>(it - x.begin());
    const double t = (q - x[i - 1]) / (x[i] - x[i - 1]);
    return y[i - 1] + t * (y[i] - y[i - 1]);
  }
};

/// Linear-interpolated percentile (p in [0, 100]) of an unsorted sample.
inline double percentile(std::vector<double> v, double p) {
  if (v.empty()) throw std::invalid_argument("percentile of an empty sample");
  std::sort(v.begin(), v.end());
  const double pos = p / 100.0 * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

struct Band {
  double x = 0.0;
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
};

/// Median and quartiles of the traces on the union of their x grids. The
/// result does not depend on the order of `traces`.
inline std::vector<Band> aggregate(const std::vector<Trace>& traces) {
  if (traces.empty()) throw std::invalid_argument("aggregate: no traces");
  std::set<double> grid;
  for (const auto& t : traces) {
    if (t.x.empty() || t.x.size() != t.y.size()) throw std::invalid_argument("aggregate: malformed trace");
    grid.insert(t.x.begin(), t.x.end());
  }
  std::vector<Band> out;
  out.reserve(grid.size());
  std::vector<double> vals(traces.size());
  for (double q : grid) {
    for (std::size_t i = 0; i < traces.size(); ++i) vals[i] = traces[i].at(q);
    out.push_back({q, percentile(vals, 50.0), percentile(vals, 25.0), percentile(vals, 75.0)});
  }
  return out;
}

/// Values of every trace at its last point.
inline std::vector<double> final_values(const std::vector<Trace>& traces) {
  std::vector<double> v;
  for (const auto& t : traces) {
    if (!t.y.empty()) v.push_back(t.y.back());
  }
  return v;
}

/// Median of the traces evaluated at x = q.
inline double median_at(const std::vector<Trace>& traces, double q) {
  std::vector<double> v;
  for (const auto& t : traces) v.push_back(t.at(q));
  return percentile(v, 50.0);
}

}  // namespace vqebo
