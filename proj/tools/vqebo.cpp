// SPDX-License-Identifier: Apache-2.0
// Command-line front end: run experiments, rerun from a manifest, summarize CSVs.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <glog/logging.h>
#include <json.hpp>

#include "vqebo/vqebo.hpp"

namespace fs = std::filesystem;
using namespace vqebo;

namespace {

struct RunFlags {
  std::string problem_file;
  long qubits = 3;
  long layers = 3;
  std::string circuit = "esu2";
  std::string pbc = "False";
  std::string entanglement;
  std::string j_couplings = "(-1.0, 0.0, 0.0)";
  std::string h_couplings = "(0.0, 0.0, -1.0)";
  long n_readout = 1024;
  std::string observation = "binomial";
  long n_iter = 300;
  long max_obs = 0;
  long t_reset = 32;
  std::string kernel = "vqe";
  std::string kernel_params;
  std::string hyperopt = "optim=grid,steps=120,max_gamma=20,interval=100*1+20*9+10*100,loss=mll";
  std::string acq_params = "func=ei,optim=emicore,pairsize=20,gridsize=100,corethresh=1.0,corethresh_width=10,"
                           "coremin_scale=0.0,corethresh_scale=1.0,samplesize=100,smo-steps=0,smo-axis=True";
  std::string inducer = "none";
  std::string methods = "nft-seq,nft-rand,emicore";
  std::string seeds = "0";
  double noise_sq = -1.0;
  int bo_restarts = 16;
  std::string out_dir = "results";
  int jobs = 1;
  bool no_wall_time = false;
  bool svg = false;
};

ExperimentConfig build_config(const RunFlags& f, const CLI::App& app) {
  ExperimentConfig c;
  if (!f.problem_file.empty()) {
    std::ifstream in(f.problem_file);
    if (!in) throw std::runtime_error("cannot read problem file " + f.problem_file);
    std::stringstream ss;
    ss << in.rdbuf();
    c.problem = ProblemConfig::from_text(ss.str());
  }
  auto given = [&](const char* name) { return f.problem_file.empty() || app.count(name) > 0; };
  if (given("--n-qbits")) c.problem.qubits = static_cast<std::size_t>(f.qubits);
  if (given("--n-layers")) c.problem.layers = static_cast<std::size_t>(f.layers);
  if (given("--circuit")) c.problem.circuit = f.circuit;
  if (given("--pbc")) {
    c.problem.boundary = parse_bool(f.pbc, "--pbc") ? Boundary::periodic : Boundary::open;
    c.problem.entanglement = c.problem.boundary == Boundary::open ? Entanglement::open : Entanglement::periodic;
  }
  if (!f.entanglement.empty()) c.problem.entanglement = ProblemConfig::entanglement_from_string(f.entanglement);
  if (given("--j-couplings")) c.problem.j = parse_triple(f.j_couplings);
  if (given("--h-couplings")) c.problem.h = parse_triple(f.h_couplings);
  c.problem.validate();

  c.observation.n_shots = f.n_readout;
  c.observation.mode = observation_mode_from_string(f.observation);
  c.methods = parse_methods(f.methods);
  c.kernel = kernel_family_from_string(f.kernel);
  c.kernel_params = KernelParams::parse(f.kernel_params);
  c.hyperopt = HyperoptConfig::parse(f.hyperopt);
  c.acq = AcqParams::parse(f.acq_params);
  c.inducer = InducerConfig::parse(f.inducer);
  c.n_iter = f.n_iter;
  c.max_obs = f.max_obs;
  c.t_reset = f.t_reset;
  c.bo_restarts = f.bo_restarts;
  if (f.noise_sq >= 0.0) c.noise_sq = f.noise_sq;
  c.seeds = parse_seeds(f.seeds);
  c.jobs = f.jobs;
  c.wall_time = !f.no_wall_time;
  c.svg = f.svg;
  c.validate();
  return c;
}

int execute(const ExperimentConfig& cfg, const fs::path& out_dir) {
  std::cerr << "problem: Q=" << cfg.problem.qubits << " L=" << cfg.problem.layers << " D=" << cfg.problem.dim()
            << ", " << cfg.methods.size() * cfg.seeds.size() << " cells, " << cfg.jobs << " worker(s)\n";
  const ExperimentResult res = run_experiment(cfg, out_dir, &std::cerr);
  const auto rows = to_csv_rows(res.records);
  if (!rows.empty()) print_summary(std::cout, summarize(rows));
  if (res.ground_energy) std::cout << "ground energy: " << format_double(*res.ground_energy) << "\n";
  std::cout << "wrote " << res.csv_path.string() << " and " << res.manifest_path.string() << "\n";
  if (res.aborted > 0) {
    std::cerr << res.aborted << " cell(s) aborted; see manifest\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  google::InitGoogleLogging(argv[0]);
  FLAGS_minloglevel = google::GLOG_ERROR;
  CLI::App app{"Bayesian-optimization VQE benchmark harness"};
  app.require_subcommand(1);

  RunFlags f;
  auto* run = app.add_subcommand("run", "run an experiment grid of (method, seed) cells");
  run->add_option("--problem-file", f.problem_file, "key = value problem description");
  run->add_option("--n-qbits", f.qubits, "number of qubits");
  run->add_option("--n-layers", f.layers, "number of ansatz layers");
  run->add_option("--circuit", f.circuit, "ansatz name (esu2)");
  run->add_option("--pbc", f.pbc, "periodic boundary conditions (True/False)");
  run->add_option("--entanglement", f.entanglement, "CNOT block: open, periodic or full");
  run->add_option("--j-couplings", f.j_couplings, "(J_X, J_Y, J_Z)");
  run->add_option("--h-couplings", f.h_couplings, "(h_X, h_Y, h_Z)");
  run->add_option("--n-readout", f.n_readout, "shots per Pauli term")->check(CLI::PositiveNumber);
  run->add_option("--observation", f.observation, "binomial, gaussian or exact");
  run->add_option("--n-iter", f.n_iter, "iteration budget per trial");
  run->add_option("--max-obs", f.max_obs, "observation budget per trial (0 = none)");
  run->add_option("--t-reset", f.t_reset, "NFT reset interval (0 = never)");
  run->add_option("--kernel", f.kernel, "vqe, vqe-higher-order, rbf or periodic");
  run->add_option("--kernel-params", f.kernel_params, "sigma_0=...,gamma=...");
  run->add_option("--hyperopt", f.hyperopt, "gamma tuning: optim=grid,steps=..,max_gamma=..,interval=..,loss=mll");
  run->add_option("--acq-params", f.acq_params, "EMICoRe parameters");
  run->add_option("--inducer", f.inducer, "none or last_slack:retain=R:slack=S");
  run->add_option("--method,--methods", f.methods, "comma list of nft-seq, nft-rand, emicore, bo-ei");
  run->add_option("--seeds", f.seeds, "e.g. 0-49 or 1,2,3");
  run->add_option("--noise-sq", f.noise_sq, "fixed GP noise variance (default: estimated per trial)");
  run->add_option("--bo-restarts", f.bo_restarts, "L-BFGS restarts for EI maximization");
  run->add_option("--out-dir", f.out_dir, "output directory");
  run->add_option("--jobs", f.jobs, "worker threads")->check(CLI::PositiveNumber);
  run->add_flag("--no-wall-time", f.no_wall_time, "write 0 wall time for byte-identical reruns");
  run->add_flag("--svg", f.svg, "also render curves.svg");

  std::string manifest, rerun_out;
  int rerun_jobs = 0;
  auto* rerun = app.add_subcommand("rerun", "repeat an experiment from its manifest");
  rerun->add_option("--manifest", manifest, "manifest.json of a previous run")->required();
  rerun->add_option("--out-dir", rerun_out, "output directory (default: <manifest dir>/rerun)");
  rerun->add_option("--jobs", rerun_jobs, "override worker count");

  std::string csv, svg_out;
  auto* summ = app.add_subcommand("summarize", "final-checkpoint quartiles from a results CSV");
  summ->add_option("--csv", csv, "results.csv")->required();
  summ->add_option("--svg", svg_out, "render curves to this SVG path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return execute(build_config(f, *run), f.out_dir);
    if (rerun->parsed()) {
      std::ifstream in(manifest);
      if (!in) throw std::runtime_error("cannot read " + manifest);
      nlohmann::json m;
      in >> m;
      ExperimentConfig cfg = ExperimentConfig::from_json(m.at("config"));
      if (rerun_jobs > 0) cfg.jobs = rerun_jobs;
      const fs::path out = rerun_out.empty() ? fs::path(manifest).parent_path() / "rerun" : fs::path(rerun_out);
      return execute(cfg, out);
    }
    if (summ->parsed()) {
      std::ifstream in(csv);
      if (!in) throw std::runtime_error("cannot read " + csv);
      const auto rows = read_csv(in);
      print_summary(std::cout, summarize(rows));
      if (!svg_out.empty()) {
        std::ofstream out(svg_out);
        write_svg(out, rows, std::nullopt);
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
