// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vqebo/gp.hpp"
#include "vqebo/options.hpp"

namespace vqebo {

enum class AxisMode { sequential, random };

/// Training-set truncation for the GP: when the set reaches retain + slack
/// points the `slack` oldest ones are discarded.
struct InducerConfig {
  bool enabled = false;
  long retain = 100;
  long slack = 20;

  void validate() const {
    if (enabled && (retain < 2 || slack < 1)) throw std::invalid_argument("inducer needs retain >= 2 and slack >= 1");
  }

  static InducerConfig parse(const std::string& text) {
    InducerConfig c;
    const std::string t = trim(text);
    if (t.empty() || t == "none") return c;
    const auto colon = t.find(':');
    if (t.substr(0, colon) != "last_slack") throw std::invalid_argument("unknown inducer: " + t.substr(0, colon));
    c.enabled = true;
    if (colon != std::string::npos) {
      for (const auto& [k, v] : parse_options(t.substr(colon + 1), ':', '=')) {
        if (k == "retain") c.retain = parse_int(v, k);
        else if (k == "slack") c.slack = parse_int(v, k);
        else throw std::invalid_argument("unknown inducer key: " + k);
      }
    }
    c.validate();
    return c;
  }

  std::string to_string() const {
    if (!enabled) return "none";
    return "last_slack:retain=" + std::to_string(retain) + ":slack=" + std::to_string(slack);
  }

  /// Applies the policy in place; returns the number of dropped points.
  Eigen::Index apply(Dataset& data) const {
    if (!enabled || data.size() < retain + slack) return 0;
    const Eigen::Index before = data.size();
    data.drop_oldest(slack);
    return before - data.size();
  }

  friend bool operator==(const InducerConfig&, const InducerConfig&) = default;
};

struct RunConfig {
  long t_max = 300;             // iteration budget
  long max_observations = 0;    // observation budget, 0 = unlimited
  long t_nft = 0;               // plain NFT warm-up iterations before EMICoRe
  long t_reset = 32;            // NFT reset interval, 0 = never
  long t_ave = 10;              // kappa averaging window
  double c0_scale = 0.0;        // kappa floor, in units of the noise std
  double c1_scale = 1.0;        // kappa slope
  double kappa_init = 1.0;
  AxisMode axis = AxisMode::sequential;
  InducerConfig inducer;
  int bo_restarts = 16;
  bool record_wall_time = true;

  void validate() const {
    if (t_max < 0) throw std::invalid_argument("t_max must be >= 0");
    if (max_observations < 0) throw std::invalid_argument("max_observations must be >= 0");
    if (t_nft < 0 || t_reset < 0) throw std::invalid_argument("t_nft and t_reset must be >= 0");
    if (t_ave < 1) throw std::invalid_argument("t_ave must be >= 1");
    if (c0_scale < 0.0 || c1_scale < 0.0) throw std::invalid_argument("kappa scales must be >= 0");
    if (kappa_init < 0.0) throw std::invalid_argument("initial kappa must be >= 0");
    if (bo_restarts < 1) throw std::invalid_argument("bo_restarts must be >= 1");
    inducer.validate();
  }

  /// True if `cost` more observations still fit the budget.
  bool fits(long n_obs, long cost) const { return max_observations == 0 || n_obs + cost <= max_observations; }
};

struct Metrics {
  double energy = 0.0;
  std::optional<double> fidelity;
};

/// Black-box VQE objective as seen by an optimizer. `observe` is the costed
/// noisy reading; `metrics` is a free noiseless probe used only for logging.
struct Objective {
  Eigen::Index dim = 0;
  std::function<double(const Eigen::VectorXd&)> observe;
  std::function<Metrics(const Eigen::VectorXd&)> metrics;
};

struct InitialPoint {
  Eigen::VectorXd x;
  double y = 0.0;
};

struct TrialRow {
  long n_obs = 0;
  double energy = 0.0;
  std::optional<double> fidelity;
  std::optional<double> kappa;
  std::optional<double> gamma;
  double wall_ms = 0.0;
};

struct TrialRecord {
  std::string method;
  std::uint64_t seed = 0;
  std::vector<TrialRow> rows;
  Eigen::VectorXd final_x;
  bool aborted = false;
  std::string diagnostic;
  std::vector<std::string> warnings;
};

struct RunResult {
  TrialRecord record;
  Dataset observations;  // every costed observation, in order
};

namespace detail {

/// Bookkeeping shared by all optimizers: observation log, clock, checkpoints.
class TrialLog {
 public:
  TrialLog(const Objective& obj, const RunConfig& cfg) : obj_(obj), cfg_(cfg), start_(std::chrono::steady_clock::now()) {
    if (!obj_.observe) throw std::invalid_argument("objective has no observe callback");
    if (obj_.dim < 1) throw std::invalid_argument("objective dimension must be >= 1");
  }

  double observe(const Eigen::VectorXd& x) {
    const double y = obj_.observe(x);
    result.observations.add(x, y);
    return y;
  }

  void record_initial(const InitialPoint& init) { result.observations.add(init.x, init.y); }

  long n_obs() const { return static_cast<long>(result.observations.size()); }

  void checkpoint(const Eigen::VectorXd& incumbent, std::optional<double> kappa, std::optional<double> gamma) {
    TrialRow row;
    row.n_obs = n_obs();
    if (obj_.metrics) {
      const Metrics m = obj_.metrics(incumbent);
      row.energy = m.energy;
      row.fidelity = m.fidelity;
    }
    row.kappa = kappa;
    row.gamma = gamma;
    if (cfg_.record_wall_time)
      row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    result.record.rows.push_back(row);
    result.record.final_x = incumbent;
  }

  RunResult result;

 private:
  const Objective& obj_;
  const RunConfig& cfg_;
  std::chrono::steady_clock::time_point start_;
};

inline void check_initial(const Objective& obj, const InitialPoint& init) {
  if (init.x.size() != obj.dim) throw std::invalid_argument("initial point has wrong dimension");
}

}  // namespace detail

}  // namespace vqebo
