#pragma once

#include <cstdint>
#include <vector>

#include "tinfer/contraction_order.hpp"

namespace tinfer {

// Forward contraction with every node's value cached, ready for a backward
// sweep. values is indexed by tree node; leaf entries are copies of the,
// possibly rescaled, input tensors.
struct Tape {
  ContractionTree tree;
  std::vector<LabeledTensor> values;
  std::uint64_t forward_ops = 0;

  const LabeledTensor& root_value() const { return values.back(); }
};

Tape forward(Algebra alg, const TensorNetwork& net, const ContractionTree& tree);

// Adjoints of the contraction result with respect to every leaf, one tensor
// per tensor index, each with its leaf's scope. Seeded with the scalar one,
// so for a scalar root the adjoint of leaf T_V is the contraction of the
// network with T_V removed and V kept as output. Costs exactly two
// contractions per branch over the branch's own index space, hence twice the
// forward multiplication count; backward_ops records the actual tally.
std::vector<LabeledTensor> backward_real(const TensorNetwork& net, const Tape& tape,
                                         std::uint64_t* backward_ops = nullptr);

// One-hot selection mask over a tensor's index space.
struct MaskTensor {
  std::vector<VarId> vars;
  std::vector<std::int64_t> dims;
  std::vector<BoolMask> data;

  // Multi-index (aligned with vars) of the single true entry.
  std::vector<std::int64_t> arg_true() const;
};

// Backward sweep under max-plus: walks the tape root to leaves and, at each
// branch, selects the first (row-major over the branch's eliminated indices)
// joint child configuration whose entries add exactly to the branch output at
// the already-selected index. Every returned mask is one-hot, the selections
// are mutually consistent, and adding the selected leaf entries along the
// tree reproduces the root value bit for bit. Requires a scalar root with a
// finite value (a -inf root has no satisfying configuration).
std::vector<MaskTensor> backward_tropical(const TensorNetwork& net, const Tape& tape);

}  // namespace tinfer
