#pragma once

#include <cstdint>
#include <vector>

#include "tinfer/network.hpp"

namespace tinfer {

// One node of a contraction tree. Leaves point at a tensor index; branches
// join two earlier nodes and keep out_vars (ascending), which must equal the
// union of the child scopes intersected with the variables still needed later
// (by some other subtree or by the network's output set).
struct TreeNode {
  int left = -1;
  int right = -1;
  int tensor = -1;                  // leaves only
  std::vector<VarId> out_vars;      // branch output scope; for leaves, the tensor scope ascending

  bool is_leaf() const { return tensor >= 0; }
};

// Nodes are stored in evaluation (post) order: children precede parents and
// nodes.back() is the root. Leaves form a permutation of the tensor indices.
struct ContractionTree {
  std::vector<TreeNode> nodes;

  int root() const { return static_cast<int>(nodes.size()) - 1; }
  bool empty() const { return nodes.empty(); }
};

// Element-count view of a planned contraction, all on a log2 scale:
//   space: largest tensor touched (leaves and every branch output),
//   time:  total semiring multiplications, counting the full index space
//          (product of the union dims) per branch,
//   rw:    total elements read plus written across branches.
// For trees with at least one branch, space <= time. A leaf-only tree has
// zero multiplications; time and rw then clamp at log2(1) = 0.
struct ComplexityReport {
  double space = 0.0;
  double time = 0.0;
  double rw = 0.0;
};

// Pairwise merge order chosen by repeatedly contracting the pair with the
// smallest result-minus-inputs element-count delta; ties break toward the
// lexicographically smallest node-index pair. Networks with fewer than two
// tensors yield an empty or single-leaf tree.
ContractionTree greedy_order(const TensorNetwork& net);

// Exact search over all binary trees (subset dynamic program) minimizing
// space, then time. Refuses networks with more than max_tensors tensors.
ContractionTree exhaustive_order(const TensorNetwork& net, int max_tensors = 10);

// Structural check: leaves are a permutation of the tensor indices, children
// precede parents, every branch's out_vars matches the needed-later rule and
// the root's out_vars equals the network's output set. Throws ShapeError.
void validate_tree(const TensorNetwork& net, const ContractionTree& tree);

ComplexityReport complexity_report(const TensorNetwork& net, const ContractionTree& tree);

// Evaluates the tree over the network's tensors. An empty tree (no tensors)
// gives the scalar one of the algebra; a single-leaf tree gives that tensor.
LabeledTensor contract_network(Algebra alg, const TensorNetwork& net,
                               const ContractionTree& tree,
                               std::uint64_t* mul_counter = nullptr);

}  // namespace tinfer
