// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "vqebo/acquisition.hpp"
#include "vqebo/aggregate.hpp"
#include "vqebo/bo.hpp"
#include "vqebo/cache.hpp"
#include "vqebo/circuit.hpp"
#include "vqebo/common.hpp"
#include "vqebo/config.hpp"
#include "vqebo/emicore_optimizer.hpp"
#include "vqebo/experiment.hpp"
#include "vqebo/gp.hpp"
#include "vqebo/hamiltonian.hpp"
#include "vqebo/hyperopt.hpp"
#include "vqebo/kernel.hpp"
#include "vqebo/nft.hpp"
#include "vqebo/options.hpp"
#include "vqebo/pauli.hpp"
#include "vqebo/report.hpp"
#include "vqebo/run.hpp"
#include "vqebo/sampling.hpp"
#include "vqebo/simulator.hpp"
#include "vqebo/sinusoid.hpp"
