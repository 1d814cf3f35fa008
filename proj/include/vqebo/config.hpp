// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "vqebo/acquisition.hpp"
#include "vqebo/circuit.hpp"
#include "vqebo/hamiltonian.hpp"
#include "vqebo/hyperopt.hpp"
#include "vqebo/kernel.hpp"
#include "vqebo/options.hpp"
#include "vqebo/run.hpp"
#include "vqebo/simulator.hpp"

namespace vqebo {

inline constexpr const char* kVersion = "0.3.0";

/// Spin-chain problem plus ansatz, serializable as "key = value" lines.
struct ProblemConfig {
  std::size_t qubits = 3;
  std::size_t layers = 3;
  std::string circuit = "esu2";
  Boundary boundary = Boundary::open;
  Entanglement entanglement = Entanglement::open;
  Couplings j{-1.0, 0.0, 0.0};
  Couplings h{0.0, 0.0, -1.0};

  void validate() const {
    if (qubits < 1) throw std::invalid_argument("qubits must be >= 1");
    if (circuit != "esu2") throw std::invalid_argument("only the esu2 circuit is available, got " + circuit);
  }

  Hamiltonian hamiltonian() const { return build_hamiltonian(qubits, j, h, boundary); }
  CircuitSpec ansatz() const { return build_ansatz(qubits, layers, entanglement); }
  VqeProblem problem() const { return VqeProblem{ansatz(), hamiltonian()}; }
  std::size_t dim() const { return 2 * qubits + 2 * layers * qubits; }

  std::string to_text() const {
    std::ostringstream os;
    os << "qubits = " << qubits << "\n"
       << "layers = " << layers << "\n"
       << "circuit = " << circuit << "\n"
       << "boundary = " << to_string(boundary) << "\n"
       << "entanglement = " << to_string(entanglement) << "\n"
       << "j_couplings = " << format_double(j[0]) << ", " << format_double(j[1]) << ", " << format_double(j[2]) << "\n"
       << "h_couplings = " << format_double(h[0]) << ", " << format_double(h[1]) << ", " << format_double(h[2]) << "\n";
    return os.str();
  }

  static ProblemConfig from_text(const std::string& text) {
    ProblemConfig c;
    bool entanglement_given = false;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.resize(hash);
      if (trim(line).empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("problem config line lacks '=': " + line);
      const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
      if (key == "qubits") c.qubits = static_cast<std::size_t>(parse_int(value, key));
      else if (key == "layers") c.layers = static_cast<std::size_t>(parse_int(value, key));
      else if (key == "circuit") c.circuit = value;
      else if (key == "boundary") c.boundary = boundary_from_string(value);
      else if (key == "entanglement") {
        c.entanglement = entanglement_from_string(value);
        entanglement_given = true;
      } else if (key == "j_couplings") c.j = parse_triple(value);
      else if (key == "h_couplings") c.h = parse_triple(value);
      else throw std::invalid_argument("unknown problem config key: " + key);
    }
    if (!entanglement_given) c.entanglement = c.boundary == Boundary::open ? Entanglement::open : Entanglement::periodic;
    c.validate();
    return c;
  }

  static Boundary boundary_from_string(const std::string& s) {
    if (s == "open") return Boundary::open;
    if (s == "periodic") return Boundary::periodic;
    throw std::invalid_argument("boundary must be open or periodic, got " + s);
  }

  static Entanglement entanglement_from_string(const std::string& s) {
    if (s == "open" || s == "linear") return Entanglement::open;
    if (s == "periodic" || s == "circular") return Entanglement::periodic;
    if (s == "full") return Entanglement::full;
    throw std::invalid_argument("entanglement must be open, periodic or full, got " + s);
  }

  friend bool operator==(const ProblemConfig&, const ProblemConfig&) = default;
};

enum class Method { nft_seq, nft_rand, emicore, bo_ei };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::nft_seq: return "nft-seq";
    case Method::nft_rand: return "nft-rand";
    case Method::emicore: return "emicore";
    case Method::bo_ei: return "bo-ei";
  }
  return "?";
}

inline Method method_from_string(const std::string& s) {
  if (s == "nft-seq") return Method::nft_seq;
  if (s == "nft-rand") return Method::nft_rand;
  if (s == "emicore") return Method::emicore;
  if (s == "bo-ei" || s == "bo") return Method::bo_ei;
  throw std::invalid_argument("unknown method: " + s);
}

inline std::vector<Method> parse_methods(const std::string& s) {
  std::vector<Method> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!trim(item).empty()) out.push_back(method_from_string(trim(item)));
  }
  return out;
}

/// "0-49", "1,2,3" or mixes such as "0-4,10".
inline std::vector<std::uint64_t> parse_seeds(const std::string& s) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto dash = item.find('-');
    if (dash != std::string::npos && dash > 0) {
      const long a = parse_int(item.substr(0, dash), "seed"), b = parse_int(item.substr(dash + 1), "seed");
      if (a < 0 || b < a) throw std::invalid_argument("bad seed range: " + item);
      for (long v = a; v <= b; ++v) out.push_back(static_cast<std::uint64_t>(v));
    } else {
      const long v = parse_int(item, "seed");
      if (v < 0) throw std::invalid_argument("seeds must be >= 0");
      out.push_back(static_cast<std::uint64_t>(v));
    }
  }
  std::set<std::uint64_t> uniq(out.begin(), out.end());
  if (uniq.size() != out.size()) throw std::invalid_argument("seeds must be distinct");
  return out;
}

inline std::string format_seeds(const std::vector<std::uint64_t>& seeds) {
  std::string s;
  std::size_t i = 0;
  while (i < seeds.size()) {
    std::size_t j = i;
    while (j + 1 < seeds.size() && seeds[j + 1] == seeds[j] + 1) ++j;
    if (!s.empty()) s += ',';
    s += std::to_string(seeds[i]);
    if (j > i) s += "-" + std::to_string(seeds[j]);
    i = j + 1;
  }
  return s;
}

/// Prior std heuristic: 4, 6, 9 at Q = 3, 5, 7, linear in between and beyond.
inline double default_sigma0(std::size_t qubits) {
  const double q = static_cast<double>(qubits);
  if (q <= 5.0) return std::max(1.0, 4.0 + (q - 3.0));
  return 6.0 + 1.5 * (q - 5.0);
}

/// "sigma_0=1.0,gamma=2.0"; sigma_0 is a standard deviation.
struct KernelParams {
  std::optional<double> sigma0;
  double gamma = 2.0;

  static KernelParams parse(const std::string& text) {
    KernelParams p;
    for (const auto& [k, v] : parse_options(text, ',', '=')) {
      if (k == "sigma_0" || k == "sigma0") p.sigma0 = parse_double(v, k);
      else if (k == "gamma") p.gamma = parse_double(v, k);
      else throw std::invalid_argument("unknown kernel parameter: " + k);
    }
    if (p.sigma0 && !(*p.sigma0 > 0.0)) throw std::invalid_argument("sigma_0 must be positive");
    if (!(p.gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
    return p;
  }

  std::string to_string() const {
    std::string s;
    if (sigma0) s += "sigma_0=" + format_double(*sigma0) + ",";
    return s + "gamma=" + format_double(gamma);
  }

  friend bool operator==(const KernelParams&, const KernelParams&) = default;
};

/// EMICoRe acquisition settings plus the NFT-side schedule knobs that share
/// the same option string.
struct AcqParams {
  EmicoreParams emicore;
  double kappa_init = 1.0;
  long t_ave = 10;
  double c0_scale = 0.0;
  double c1_scale = 1.0;
  long t_nft = 0;
  bool sequential_axis = true;

  static AcqParams parse(const std::string& text) {
    AcqParams a;
    for (const auto& [k, v] : parse_options(text, ',', '=')) {
      if (k == "func") {
        if (v != "ei") throw std::invalid_argument("only func=ei is supported");
      } else if (k == "optim") {
        if (v != "emicore") throw std::invalid_argument("only optim=emicore is supported");
      } else if (k == "pairsize") a.emicore.j_sg = parse_int(v, k);
      else if (k == "gridsize") a.emicore.j_og = parse_int(v, k);
      else if (k == "corethresh") a.kappa_init = parse_double(v, k);
      else if (k == "corethresh_width") a.t_ave = parse_int(v, k);
      else if (k == "coremin_scale") a.c0_scale = parse_double(v, k);
      else if (k == "corethresh_scale") a.c1_scale = parse_double(v, k);
      else if (k == "samplesize") a.emicore.n_mc = parse_int(v, k);
      else if (k == "smo-steps" || k == "smo_steps") a.t_nft = parse_int(v, k);
      else if (k == "smo-axis" || k == "smo_axis") a.sequential_axis = parse_bool(v, k);
      else if (k == "sampler") a.emicore.sampler = sampler_from_string(v);
      else if (k == "corecap") a.emicore.max_core_points = parse_int(v, k);
      else throw std::invalid_argument("unknown acquisition parameter: " + k);
    }
    a.emicore.validate();
    if (a.t_ave < 1 || a.t_nft < 0 || a.kappa_init < 0.0 || a.c0_scale < 0.0 || a.c1_scale < 0.0)
      throw std::invalid_argument("invalid acquisition schedule parameters");
    return a;
  }

  std::string to_string() const {
    return "func=ei,optim=emicore,pairsize=" + std::to_string(emicore.j_sg) +
           ",gridsize=" + std::to_string(emicore.j_og) + ",corethresh=" + format_double(kappa_init) +
           ",corethresh_width=" + std::to_string(t_ave) + ",coremin_scale=" + format_double(c0_scale) +
           ",corethresh_scale=" + format_double(c1_scale) + ",samplesize=" + std::to_string(emicore.n_mc) +
           ",smo-steps=" + std::to_string(t_nft) + ",smo-axis=" + (sequential_axis ? "True" : "False") +
           ",sampler=" + vqebo::to_string(emicore.sampler) + ",corecap=" + std::to_string(emicore.max_core_points);
  }

  friend bool operator==(const AcqParams& a, const AcqParams& b) { return a.to_string() == b.to_string(); }
};

inline ObservationMode observation_mode_from_string(const std::string& s) {
  if (s == "binomial") return ObservationMode::binomial;
  if (s == "gaussian") return ObservationMode::gaussian;
  if (s == "exact") return ObservationMode::exact;
  throw std::invalid_argument("unknown observation mode: " + s);
}

struct ExperimentConfig {
  ProblemConfig problem;
  ObservationConfig observation;
  std::vector<Method> methods{Method::nft_seq, Method::nft_rand, Method::emicore};
  KernelFamily kernel = KernelFamily::vqe;
  KernelParams kernel_params;
  HyperoptConfig hyperopt;
  AcqParams acq;
  InducerConfig inducer;
  long n_iter = 300;
  long max_obs = 0;
  long t_reset = 32;
  int bo_restarts = 16;
  std::optional<double> noise_sq;  // fixed GP noise; estimated per trial when absent
  std::vector<std::uint64_t> seeds{0};
  int jobs = 1;
  bool wall_time = true;
  bool svg = false;

  void validate() const {
    problem.validate();
    observation.validate();
    hyperopt.validate();
    inducer.validate();
    if (methods.empty()) throw std::invalid_argument("at least one method is required");
    if (n_iter < 0 || max_obs < 0 || t_reset < 0) throw std::invalid_argument("iteration counts must be >= 0");
    if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
    if (noise_sq && *noise_sq < 0.0) throw std::invalid_argument("noise variance must be >= 0");
    std::set<std::uint64_t> uniq(seeds.begin(), seeds.end());
    if (uniq.size() != seeds.size()) throw std::invalid_argument("seeds must be distinct");
  }

  KernelConfig kernel_config() const {
    KernelConfig k;
    k.family = kernel;
    const double s0 = kernel_params.sigma0.value_or(default_sigma0(problem.qubits));
    k.sigma0_sq = s0 * s0;
    k.gamma = kernel_params.gamma;
    if (kernel == KernelFamily::vqe_higher_order) k.orders = problem.ansatz().multiplicities();
    return k;
  }

  RunConfig run_config(Method m) const {
    RunConfig r;
    r.t_max = n_iter;
    r.max_observations = max_obs;
    r.t_reset = t_reset;
    r.t_nft = acq.t_nft;
    r.t_ave = acq.t_ave;
    r.c0_scale = acq.c0_scale;
    r.c1_scale = acq.c1_scale;
    r.kappa_init = acq.kappa_init;
    r.inducer = inducer;
    r.bo_restarts = bo_restarts;
    r.record_wall_time = wall_time;
    if (m == Method::nft_rand) r.axis = AxisMode::random;
    else if (m == Method::emicore) r.axis = acq.sequential_axis ? AxisMode::sequential : AxisMode::random;
    return r;
  }

  /// Key for the initial-point cache: everything that changes (x0, y0).
  std::string cache_key() const {
    const auto h = problem.hamiltonian();
    return "hamiltonian=" + h.describe() + ";circuit=" + problem.circuit + ";layers=" + std::to_string(problem.layers) +
           ";entanglement=" + to_string(problem.entanglement) + ";dim=" + std::to_string(problem.dim()) +
           ";shots=" + std::to_string(observation.n_shots) + ";mode=" + to_string(observation.mode);
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["problem"] = problem.to_text();
    j["n_shots"] = observation.n_shots;
    j["observation_mode"] = to_string(observation.mode);
    std::vector<std::string> ms;
    for (auto m : methods) ms.push_back(to_string(m));
    j["methods"] = ms;
    j["kernel"] = to_string(kernel);
    j["kernel_params"] = kernel_params.to_string();
    j["hyperopt"] = hyperopt.to_string();
    j["acq_params"] = acq.to_string();
    j["inducer"] = inducer.to_string();
    j["n_iter"] = n_iter;
    j["max_obs"] = max_obs;
    j["t_reset"] = t_reset;
    j["bo_restarts"] = bo_restarts;
    j["noise_sq"] = noise_sq ? nlohmann::json(*noise_sq) : nlohmann::json(nullptr);
    j["seeds"] = seeds;
    j["jobs"] = jobs;
    j["wall_time"] = wall_time;
    j["svg"] = svg;
    return j;
  }

  static ExperimentConfig from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    c.problem = ProblemConfig::from_text(j.at("problem").get<std::string>());
    c.observation.n_shots = j.at("n_shots").get<long>();
    c.observation.mode = observation_mode_from_string(j.at("observation_mode").get<std::string>());
    c.methods.clear();
    for (const auto& m : j.at("methods")) c.methods.push_back(method_from_string(m.get<std::string>()));
    c.kernel = kernel_family_from_string(j.at("kernel").get<std::string>());
    c.kernel_params = KernelParams::parse(j.at("kernel_params").get<std::string>());
    c.hyperopt = HyperoptConfig::parse(j.at("hyperopt").get<std::string>());
    c.acq = AcqParams::parse(j.at("acq_params").get<std::string>());
    c.inducer = InducerConfig::parse(j.at("inducer").get<std::string>());
    c.n_iter = j.at("n_iter").get<long>();
    c.max_obs = j.at("max_obs").get<long>();
    c.t_reset = j.at("t_reset").get<long>();
    c.bo_restarts = j.at("bo_restarts").get<int>();
    if (!j.at("noise_sq").is_null()) c.noise_sq = j.at("noise_sq").get<double>();
    c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    c.jobs = j.at("jobs").get<int>();
    c.wall_time = j.at("wall_time").get<bool>();
    c.svg = j.at("svg").get<bool>();
    c.validate();
    return c;
  }

  /// FNV-1a of the canonical JSON without execution-only fields.
  std::uint64_t hash() const {
    nlohmann::json j = to_json();
    j.erase("jobs");
    j.erase("svg");
    return fnv1a64(j.dump());
  }
};

}  // namespace vqebo
