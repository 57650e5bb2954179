#pragma once

#include <cstdint>
#include <vector>

#include "tinfer/tensor.hpp"

namespace tinfer {

// A tensor network: variable universe with cardinalities, a multiset of
// labeled tensors, and the set of output (kept) variables. Variables may
// appear in any number of tensor scopes; contraction sums over every
// non-output variable that appears in some scope.
struct TensorNetwork {
  std::int64_t num_vars = 0;
  std::vector<std::int64_t> cards;      // indexed by VarId, size num_vars
  std::vector<LabeledTensor> tensors;
  std::vector<VarId> output_vars;       // ascending, distinct

  // Union of tensor scopes, ascending.
  std::vector<VarId> present_vars() const;
};

// Checks ids, dims-vs-cards agreement and output_vars ordering.
void validate_network(const TensorNetwork& net);

// Slices every tensor at the evidence and removes the observed variables from
// the output set. Values are range-checked against the cardinalities.
TensorNetwork apply_evidence(const TensorNetwork& net, const Assignment& evidence);

}  // namespace tinfer
