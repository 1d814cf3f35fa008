// SPDX-License-Identifier: Apache-2.0
// Minimizes a 3-qubit transverse-field Ising chain with NFT and with
// NFT+EMICoRe from the same starting point, printing the energy traces.

#include <iomanip>
#include <iostream>

#include "vqebo/vqebo.hpp"

using namespace vqebo;

int main() {
  ProblemConfig pc;
  pc.qubits = 3;
  pc.layers = 1;
  const VqeProblem problem = pc.problem();
  const GroundState gs = ground_state(problem.hamiltonian);
  const ObservationConfig shots{1024, ObservationMode::binomial};

  Rng observe_rng = make_stream(7, "observe");
  Objective obj;
  obj.dim = static_cast<Eigen::Index>(problem.dim());
  obj.observe = [&](const Eigen::VectorXd& x) { return observe_energy(problem, shots, x, observe_rng); };
  obj.metrics = [&](const Eigen::VectorXd& x) { return evaluate_metrics(x, problem, &gs); };

  const InitialPoint init = draw_initial_point(problem, shots, 7);
  RunConfig cfg;
  cfg.max_observations = 120;

  Rng nft_rng = make_stream(7, "nft");
  const RunResult nft = run_nft(obj, cfg, init, nft_rng);

  KernelConfig kernel;
  kernel.sigma0_sq = 16.0;
  Rng noise_rng = make_stream(7, "noise");
  const double noise_sq = estimate_noise_variance(
      [&](const Eigen::VectorXd& x) { return observe_energy(problem, shots, x, noise_rng); }, obj.dim, noise_rng);
  Rng emi_rng = make_stream(7, "emicore");
  const RunResult emi = run_nft_emicore(obj, cfg, init, kernel, HyperoptConfig{}, EmicoreParams{}, noise_sq, emi_rng);

  std::cout << "ground energy " << gs.energy << ", D = " << problem.dim() << ", noise var " << noise_sq << "\n";
  std::cout << std::fixed << std::setprecision(4);
  for (const auto* r : {&nft, &emi}) {
    const auto& last = r->record.rows.back();
    std::cout << std::setw(8) << r->record.method << ": " << last.n_obs << " observations, energy " << last.energy
              << ", fidelity " << last.fidelity.value_or(0.0) << "\n";
  }
  return 0;
}
