// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "vqebo/common.hpp"
#include "vqebo/run.hpp"
#include "vqebo/simulator.hpp"

namespace vqebo {

class CacheMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Noisy objective on a VQE problem; draws come from the caller's stream.
inline double observe_energy(const VqeProblem& p, const ObservationConfig& cfg, const Eigen::VectorXd& x, Rng& rng) {
  return observe(p.hamiltonian, apply_circuit(p.circuit, x), cfg, rng);
}

/// Initial point for one seed: x0 ~ U[0, 2pi)^D and one observation, both
/// from the (seed, "init") stream.
inline InitialPoint draw_initial_point(const VqeProblem& p, const ObservationConfig& cfg, std::uint64_t seed) {
  Rng rng = make_stream(seed, "init");
  InitialPoint ip;
  ip.x = uniform_point(static_cast<Eigen::Index>(p.dim()), rng);
  ip.y = observe_energy(p, cfg, ip.x, rng);
  return ip;
}

/// JSON file of (seed -> x0, y0) keyed by a hash of the problem. Loading a
/// file whose key differs throws CacheMismatch; new seeds are appended.
class InitialPointCache {
 public:
  InitialPointCache(std::filesystem::path dir, std::string key, std::size_t dim)
      : key_(std::move(key)), hash_(fnv1a64(key_)), dim_(dim) {
    path_ = dir / ("init_" + hex_hash() + ".json");
  }

  const std::filesystem::path& path() const { return path_; }
  std::string hex_hash() const { return hex64(hash_); }

  /// Returns cached pairs for `seeds`, generating and persisting missing ones.
  std::vector<InitialPoint> get(const std::vector<std::uint64_t>& seeds, const VqeProblem& p,
                                const ObservationConfig& cfg) {
    if (p.dim() != dim_) throw CacheMismatch("objective dimension differs from cache dimension");
    load();
    bool dirty = false;
    std::vector<InitialPoint> out;
    for (auto s : seeds) {
      auto it = entries_.find(s);
      if (it == entries_.end()) {
        it = entries_.emplace(s, draw_initial_point(p, cfg, s)).first;
        dirty = true;
      }
      out.push_back(it->second);
    }
    if (dirty || !std::filesystem::exists(path_)) save();
    return out;
  }

  std::size_t size() const { return entries_.size(); }

 private:
  void load() {
    entries_.clear();
    if (!std::filesystem::exists(path_)) return;
    std::ifstream in(path_);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw CacheMismatch("unreadable initial-point cache " + path_.string() + ": " + e.what());
    }
    if (j.value("key", "") != key_ || j.value("dim", std::size_t{0}) != dim_)
      throw CacheMismatch("initial-point cache " + path_.string() + " belongs to a different problem");
    for (const auto& e : j.at("entries")) {
      const auto xs = e.at("x").get<std::vector<double>>();
      if (xs.size() != dim_) throw CacheMismatch("cache entry has wrong dimension");
      InitialPoint ip;
      ip.x = Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
      ip.y = e.at("y").get<double>();
      entries_[e.at("seed").get<std::uint64_t>()] = ip;
    }
  }

  void save() const {
    nlohmann::json j;
    j["key"] = key_;
    j["hash"] = hex_hash();
    j["dim"] = dim_;
    j["entries"] = nlohmann::json::array();
    for (const auto& [seed, ip] : entries_) {
      j["entries"].push_back({{"seed", seed}, {"x", std::vector<double>(ip.x.data(), ip.x.data() + ip.x.size())}, {"y", ip.y}});
    }
    std::filesystem::create_directories(path_.parent_path());
    const auto tmp = path_.string() + ".tmp";
    {
      std::ofstream out(tmp);
      out << j.dump(1) << "\n";
    }
    std::filesystem::rename(tmp, path_);
  }

  std::string key_;
  std::uint64_t hash_;
  std::size_t dim_;
  std::filesystem::path path_;
  std::map<std::uint64_t, InitialPoint> entries_;
};

/// Noiseless energy and ground-space fidelity of the state prepared at x.
/// Fidelity is absent when no ground state is supplied (too many qubits).
inline Metrics evaluate_metrics(const Eigen::VectorXd& x, const VqeProblem& p, const GroundState* gs) {
  const Statevector psi = apply_circuit(p.circuit, x);
  Metrics m;
  m.energy = expectation(p.hamiltonian, psi);
  if (gs) m.fidelity = gs->fidelity_of(psi);
  return m;
}

}  // namespace vqebo
