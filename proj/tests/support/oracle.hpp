#pragma once

// Brute-force reference implementations. These enumerate joint states
// directly from tensor data with their own index arithmetic, sharing no
// contraction machinery with the library under test.

#include <vector>

#include "tinfer/network.hpp"

namespace oracle {

// Product of all tensor entries at the given full assignment. The assignment
// must cover every variable appearing in some tensor scope.
long double eval_config(const tinfer::TensorNetwork& net, const tinfer::Assignment& state);

// Sum over all states of the variables present in some tensor scope,
// restricted to those consistent with the evidence.
long double partition(const tinfer::TensorNetwork& net, const tinfer::Assignment& evidence);

// Normalized posterior over one variable given evidence.
std::vector<long double> marginal(const tinfer::TensorNetwork& net,
                                  const tinfer::Assignment& evidence, tinfer::VarId v);

struct MaxState {
  tinfer::Assignment assignment;  // over the maximized variables
  long double value = 0.0;        // probability mass, not log
};

// Maximizes the joint over every unobserved model variable. Ties resolve to
// the first state in row-major order over ascending variable ids.
MaxState best_explanation(const tinfer::TensorNetwork& net, const tinfer::Assignment& evidence);

// Maximizes over the query variables after summing out the rest.
MaxState best_marginal_map(const tinfer::TensorNetwork& net, const tinfer::Assignment& evidence,
                           const std::vector<tinfer::VarId>& query);

}  // namespace oracle
