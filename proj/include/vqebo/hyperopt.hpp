// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "vqebo/common.hpp"
#include "vqebo/gp.hpp"
#include "vqebo/kernel.hpp"
#include "vqebo/options.hpp"

namespace vqebo {

/// Update schedule "count*period+count*period+...": each segment fires
/// `count` times, `period` iterations apart, continuing from where the
/// previous segment stopped. After the last segment its period repeats.
class IntervalSchedule {
 public:
  struct Segment {
    long count;
    long period;
  };

  IntervalSchedule() : segments_{{1, 1}} {}
  explicit IntervalSchedule(std::vector<Segment> segments) : segments_(std::move(segments)) {
    if (segments_.empty()) throw std::invalid_argument("interval schedule needs at least one segment");
    for (const auto& s : segments_) {
      if (s.count < 1 || s.period < 1) throw std::invalid_argument("interval schedule: count and period must be >= 1");
    }
  }

  static IntervalSchedule parse(const std::string& text) {
    std::vector<Segment> segs;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, '+')) {
      const auto star = part.find('*');
      if (star == std::string::npos) throw std::invalid_argument("interval segment '" + part + "' lacks '*'");
      try {
        std::size_t used = 0;
        const long count = std::stol(part.substr(0, star), &used);
        if (used != star) throw std::invalid_argument("trailing characters");
        const std::string p = part.substr(star + 1);
        const long period = std::stol(p, &used);
        if (used != p.size()) throw std::invalid_argument("trailing characters");
        segs.push_back({count, period});
      } catch (const std::logic_error&) {
        throw std::invalid_argument("malformed interval segment '" + part + "'");
      }
    }
    return IntervalSchedule(std::move(segs));
  }

  std::string to_string() const {
    std::string s;
    for (const auto& seg : segments_) {
      if (!s.empty()) s += '+';
      s += std::to_string(seg.count) + "*" + std::to_string(seg.period);
    }
    return s;
  }

  const std::vector<Segment>& segments() const { return segments_; }

  /// True if hyperparameters are refit at iteration t (1-based).
  bool should_update(long t) const {
    if (t < 1) return false;
    long last = 0;
    for (const auto& s : segments_) {
      const long end = last + s.count * s.period;
      if (t <= end) return (t - last) % s.period == 0;
      last = end;
    }
    return (t - last) % segments_.back().period == 0;
  }

  friend bool operator==(const IntervalSchedule& a, const IntervalSchedule& b) { return a.to_string() == b.to_string(); }

 private:
  std::vector<Segment> segments_;
};

struct HyperoptConfig {
  bool enabled = true;  // optim=grid; optim=none keeps gamma fixed
  int steps = 120;
  double max_gamma = 20.0;
  IntervalSchedule interval = IntervalSchedule::parse("100*1+20*9+10*100");

  void validate() const {
    if (steps < 1) throw std::invalid_argument("hyperopt steps must be >= 1");
    if (!(max_gamma > 0.0)) throw std::invalid_argument("max_gamma must be positive");
  }

  /// gamma_i = max_gamma * i / steps, i = 1..steps.
  std::vector<double> grid() const {
    std::vector<double> g;
    g.reserve(static_cast<std::size_t>(steps));
    for (int i = 1; i <= steps; ++i) g.push_back(max_gamma * i / steps);
    return g;
  }

  static HyperoptConfig parse(const std::string& text) {
    HyperoptConfig c;
    for (const auto& [k, v] : parse_options(text, ',', '=')) {
      if (k == "optim") {
        if (v == "grid") c.enabled = true;
        else if (v == "none") c.enabled = false;
        else throw std::invalid_argument("hyperopt optim must be grid or none, got " + v);
      } else if (k == "steps") {
        c.steps = parse_int(v, k);
      } else if (k == "max_gamma") {
        c.max_gamma = parse_double(v, k);
      } else if (k == "interval") {
        c.interval = IntervalSchedule::parse(v);
      } else if (k == "loss") {
        if (v != "mll") throw std::invalid_argument("only loss=mll is supported");
      } else {
        throw std::invalid_argument("unknown hyperopt key: " + k);
      }
    }
    c.validate();
    return c;
  }

  std::string to_string() const {
    return std::string("optim=") + (enabled ? "grid" : "none") + ",steps=" + std::to_string(steps) +
           ",max_gamma=" + format_double(max_gamma) + ",interval=" + interval.to_string() + ",loss=mll";
  }
};

/// Grid argmax of the log marginal likelihood over gamma; ties go to the
/// smallest gamma. Grid points whose factorization fails are skipped; if all
/// fail the input config is returned unchanged.
inline KernelConfig optimize_gamma(const KernelConfig& kernel, double noise_sq, const Dataset& data,
                                   const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("optimize_gamma: empty grid");
  if (data.empty()) return kernel;
  KernelConfig best = kernel;
  double best_lml = -std::numeric_limits<double>::infinity();
  for (double g : grid) {
    KernelConfig trial = kernel;
    trial.gamma = g;
    try {
      const double lml = GPModel(trial, noise_sq, data).log_marginal_likelihood();
      if (std::isfinite(lml) && lml > best_lml) {
        best_lml = lml;
        best = trial;
      }
    } catch (const FactorizationError&) {
    }
  }
  return best;
}

inline KernelConfig optimize_gamma(const KernelConfig& kernel, double noise_sq, const Dataset& data,
                                   const HyperoptConfig& cfg) {
  return optimize_gamma(kernel, noise_sq, data, cfg.grid());
}

/// Pooled sample variance of repeated observations at random points.
inline double estimate_noise_variance(const std::function<double(const Eigen::VectorXd&)>& observe_at,
                                      Eigen::Index dim, Rng& rng, int points = 10, int repeats = 10) {
  if (points < 1 || repeats < 2) throw std::invalid_argument("estimate_noise_variance: need >=1 points, >=2 repeats");
  double pooled = 0.0;
  for (int p = 0; p < points; ++p) {
    const Eigen::VectorXd x = uniform_point(dim, rng);
    std::vector<double> ys;
    double mean = 0.0;
    for (int r = 0; r < repeats; ++r) {
      ys.push_back(observe_at(x));
      mean += ys.back();
    }
    mean /= repeats;
    double ss = 0.0;
    for (double y : ys) ss += (y - mean) * (y - mean);
    pooled += ss / (repeats - 1);
  }
  return pooled / points;
}

}  // namespace vqebo
