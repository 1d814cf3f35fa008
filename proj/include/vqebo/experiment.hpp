// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <atomic>
#include <boost/version.hpp>
#include <ceres/version.h>
#include <condition_variable>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "vqebo/bo.hpp"
#include "vqebo/cache.hpp"
#include "vqebo/config.hpp"
#include "vqebo/emicore_optimizer.hpp"
#include "vqebo/hyperopt.hpp"
#include "vqebo/nft.hpp"
#include "vqebo/report.hpp"
#include "vqebo/simulator.hpp"

namespace vqebo {

struct Cell {
  Method method;
  std::uint64_t seed;
};

struct ExperimentResult {
  std::vector<TrialRecord> records;
  std::size_t aborted = 0;
  std::filesystem::path csv_path;
  std::filesystem::path manifest_path;
  std::optional<double> ground_energy;
};

/// Runs one (method, seed) trial. Noise calibration and metric probes do not
/// count as observations.
inline TrialRecord run_cell(const ExperimentConfig& cfg, const VqeProblem& problem, const GroundState* gs,
                            const InitialPoint& init, const Cell& cell) {
  const std::string tag = to_string(cell.method);
  Objective obj;
  obj.dim = static_cast<Eigen::Index>(problem.dim());
  Rng observe_rng = make_stream(cell.seed, tag + "/observe");
  obj.observe = [&](const Eigen::VectorXd& x) { return observe_energy(problem, cfg.observation, x, observe_rng); };
  obj.metrics = [&](const Eigen::VectorXd& x) { return evaluate_metrics(x, problem, gs); };

  Rng rng = make_stream(cell.seed, tag + "/optimizer");
  const RunConfig run = cfg.run_config(cell.method);
  auto noise_sq = [&] {
    if (cfg.noise_sq) return *cfg.noise_sq;
    Rng noise_rng = make_stream(cell.seed, "noise");
    return estimate_noise_variance(
        [&](const Eigen::VectorXd& x) { return observe_energy(problem, cfg.observation, x, noise_rng); }, obj.dim,
        noise_rng);
  };

  RunResult res;
  switch (cell.method) {
    case Method::nft_seq:
    case Method::nft_rand:
      res = run_nft(obj, run, init, rng);
      break;
    case Method::emicore:
      res = run_nft_emicore(obj, run, init, cfg.kernel_config(), cfg.hyperopt, cfg.acq.emicore, noise_sq(), rng);
      break;
    case Method::bo_ei:
      res = run_plain_bo(obj, cfg.kernel_config(), cfg.hyperopt, run, init, noise_sq(), rng);
      break;
  }
  res.record.method = tag;
  res.record.seed = cell.seed;
  return std::move(res.record);
}

inline nlohmann::json manifest_json(const ExperimentConfig& cfg, const ExperimentResult& res,
                                    const std::string& cache_file) {
  nlohmann::json m;
  m["tool"] = "vqebo";
  m["version"] = kVersion;
  m["config"] = cfg.to_json();
  m["config_hash"] = hex64(cfg.hash());
  m["initial_point_cache"] = cache_file;
  m["libraries"] = {{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                  std::to_string(EIGEN_MINOR_VERSION)},
                    {"boost", BOOST_LIB_VERSION},
                    {"ceres", CERES_VERSION_STRING}};
  m["cells"] = cfg.methods.size() * cfg.seeds.size();
  m["aborted"] = nlohmann::json::array();
  std::size_t warnings = 0;
  for (const auto& r : res.records) {
    warnings += r.warnings.size();
    if (r.aborted) m["aborted"].push_back({{"method", r.method}, {"seed", r.seed}, {"diagnostic", r.diagnostic}});
  }
  m["warnings"] = warnings;
  if (res.ground_energy) m["ground_energy"] = *res.ground_energy;
  return m;
}

/// Executes every (method, seed) cell on a bounded pool and writes
/// results.csv, manifest.json, summary.txt and optionally curves.svg.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                                       std::ostream* progress = nullptr) {
  cfg.validate();
  std::filesystem::create_directories(out_dir);
  const VqeProblem problem = cfg.problem.problem();
  ExperimentResult res;

  std::optional<GroundState> gs;
  if (problem.hamiltonian.qubits() <= kMaxDiagonalizationQubits) {
    gs = ground_state(problem.hamiltonian);
    res.ground_energy = gs->energy;
  }

  InitialPointCache cache(out_dir, cfg.cache_key(), problem.dim());
  const std::vector<InitialPoint> inits = cache.get(cfg.seeds, problem, cfg.observation);

  std::vector<Cell> cells;
  std::vector<std::size_t> init_index;
  for (auto m : cfg.methods) {
    for (std::size_t s = 0; s < cfg.seeds.size(); ++s) {
      cells.push_back({m, cfg.seeds[s]});
      init_index.push_back(s);
    }
  }

  std::vector<TrialRecord> slots(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::condition_variable cv;
  std::vector<std::size_t> finished;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      TrialRecord rec;
      try {
        rec = run_cell(cfg, problem, gs ? &*gs : nullptr, inits[init_index[i]], cells[i]);
      } catch (const std::exception& e) {
        rec.method = to_string(cells[i].method);
        rec.seed = cells[i].seed;
        rec.aborted = true;
        rec.diagnostic = e.what();
      }
      std::lock_guard<std::mutex> lock(mu);
      slots[i] = std::move(rec);
      finished.push_back(i);
      cv.notify_one();
    }
  };

  const auto n_workers = static_cast<std::size_t>(std::max(1, cfg.jobs));
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(n_workers, cells.size()); ++w) pool.emplace_back(worker);

  // Single collector: reports cells in completion order.
  for (std::size_t done = 0; done < cells.size();) {
    std::unique_lock<std::mutex> lock(mu);
    cv.wait(lock, [&] { return !finished.empty(); });
    for (auto i : finished) {
      ++done;
      const auto& r = slots[i];
      if (progress) {
        *progress << "[" << done << "/" << cells.size() << "] " << r.method << " seed=" << r.seed;
        if (r.aborted) *progress << " ABORTED: " << r.diagnostic;
        else if (!r.rows.empty())
          *progress << " n_obs=" << r.rows.back().n_obs << " energy=" << format_double(r.rows.back().energy);
        *progress << "\n";
      }
    }
    finished.clear();
  }
  for (auto& t : pool) t.join();

  res.records = std::move(slots);
  for (const auto& r : res.records) res.aborted += r.aborted ? 1 : 0;

  const auto rows = to_csv_rows(res.records);
  res.csv_path = out_dir / "results.csv";
  {
    std::ofstream out(res.csv_path);
    write_csv(out, rows);
  }
  res.manifest_path = out_dir / "manifest.json";
  {
    std::ofstream out(res.manifest_path);
    out << manifest_json(cfg, res, cache.path().filename().string()).dump(2) << "\n";
  }
  if (!rows.empty()) {
    std::ofstream out(out_dir / "summary.txt");
    print_summary(out, summarize(rows));
  }
  if (cfg.svg && !rows.empty()) {
    std::ofstream out(out_dir / "curves.svg");
    write_svg(out, rows, res.ground_energy);
  }
  return res;
}

}  // namespace vqebo
