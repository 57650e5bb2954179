#pragma once

// Seeded generators for small random networks used across test suites.

#include <random>
#include <vector>

#include "tinfer/network.hpp"

namespace testgen {

struct NetOptions {
  int min_vars = 2;
  int max_vars = 10;
  int max_card = 3;
  int max_factors = 8;
  int max_scope = 3;
  double lo = 0.25;  // entries stay well away from 0 so gradients do too
  double hi = 1.0;
};

// Random factor graph; every variable appears in at least one factor.
tinfer::TensorNetwork random_network(std::mt19937_64& rng, const NetOptions& opt = {});

// Same topology process, but entries are small integers. Sums of these are
// exact in double arithmetic, so max-plus contraction results are
// association-independent.
tinfer::TensorNetwork random_integer_log_network(std::mt19937_64& rng,
                                                 const NetOptions& opt = {});

// Evidence on up to max_obs distinct variables.
tinfer::Assignment random_evidence(std::mt19937_64& rng, const tinfer::TensorNetwork& net,
                                   int max_obs = 2);

}  // namespace testgen
