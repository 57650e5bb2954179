#include "tinfer/autodiff.hpp"

#include <algorithm>
#include <cmath>

#include "detail.hpp"

namespace tinfer {

namespace {

LabeledTensor algebra_one() { return scalar_tensor(RealOps::one()); }

std::vector<std::int64_t> dims_for(const std::vector<VarId>& vars,
                                   const std::vector<std::int64_t>& cards) {
  std::vector<std::int64_t> dims;
  dims.reserve(vars.size());
  for (VarId v : vars) dims.push_back(cards[static_cast<std::size_t>(v)]);
  return dims;
}

}  // namespace

Tape forward(Algebra alg, const TensorNetwork& net, const ContractionTree& tree) {
  Tape tape;
  tape.tree = tree;
  tape.values.resize(tree.nodes.size());
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const TreeNode& node = tree.nodes[i];
    if (node.is_leaf()) {
      LabeledTensor leaf = net.tensors[static_cast<std::size_t>(node.tensor)];
      if (alg == Algebra::real) {
        // Inputs land in [0.5, 1) max-abs so no pairwise product can overflow.
        renormalize(leaf);
      } else if (leaf.scale != 0) {
        throw ShapeError("tropical tensors must be unscaled");
      }
      tape.values[i] = std::move(leaf);
    } else {
      tape.values[i] = contract_pair(alg, tape.values[static_cast<std::size_t>(node.left)],
                                     tape.values[static_cast<std::size_t>(node.right)],
                                     node.out_vars, &net.cards, &tape.forward_ops);
    }
  }
  return tape;
}

LabeledTensor contract_network(Algebra alg, const TensorNetwork& net,
                               const ContractionTree& tree, std::uint64_t* mul_counter) {
  if (tree.empty()) {
    // Empty product: the scalar one of the algebra.
    return scalar_tensor(alg == Algebra::real ? RealOps::one() : TropicalOps::one());
  }
  Tape tape = forward(alg, net, tree);
  if (mul_counter) *mul_counter += tape.forward_ops;
  return std::move(tape.values.back());
}

std::vector<LabeledTensor> backward_real(const TensorNetwork& net, const Tape& tape,
                                         std::uint64_t* backward_ops) {
  const auto& nodes = tape.tree.nodes;
  std::vector<LabeledTensor> adjoint(nodes.size());
  std::uint64_t ops = 0;

  const std::vector<VarId>& root_scope = nodes.back().out_vars;
  adjoint.back() = root_scope.empty()
                       ? algebra_one()
                       : unity_tensor(root_scope, dims_for(root_scope, net.cards), Algebra::real);

  for (std::size_t i = nodes.size(); i-- > 0;) {
    const TreeNode& node = nodes[i];
    if (node.is_leaf()) continue;
    const LabeledTensor& a = tape.values[static_cast<std::size_t>(node.left)];
    const LabeledTensor& b = tape.values[static_cast<std::size_t>(node.right)];
    // Each child adjoint is one contraction over this branch's own variable
    // set, with the child's scope kept; together exactly twice the branch's
    // forward multiplications.
    adjoint[static_cast<std::size_t>(node.left)] =
        contract_pair(Algebra::real, adjoint[i], b, a.vars, &net.cards, &ops);
    adjoint[static_cast<std::size_t>(node.right)] =
        contract_pair(Algebra::real, a, adjoint[i], b.vars, &net.cards, &ops);
  }

  std::vector<LabeledTensor> by_tensor(net.tensors.size());
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].is_leaf())
      by_tensor[static_cast<std::size_t>(nodes[i].tensor)] = std::move(adjoint[i]);
  if (backward_ops) *backward_ops += ops;
  return by_tensor;
}

std::vector<std::int64_t> MaskTensor::arg_true() const {
  std::int64_t lin = -1;
  for (std::size_t i = 0; i < data.size(); ++i)
    if (data[i].flag) {
      lin = static_cast<std::int64_t>(i);
      break;
    }
  if (lin < 0) throw ShapeError("mask has no selected entry");
  std::vector<std::int64_t> idx(vars.size());
  for (std::size_t ax = vars.size(); ax-- > 0;) {
    idx[ax] = lin % dims[ax];
    lin /= dims[ax];
  }
  return idx;
}

namespace {

MaskTensor one_hot_mask(const LabeledTensor& shaped, const Assignment& values) {
  MaskTensor m;
  m.vars = shaped.vars;
  m.dims = shaped.dims;
  m.data.assign(shaped.data.size(), BoolMask{false});
  std::int64_t lin = 0;
  std::vector<std::int64_t> strides = detail::strides_of(shaped.dims);
  for (std::size_t ax = 0; ax < m.vars.size(); ++ax) lin += *values.find(m.vars[ax]) * strides[ax];
  m.data[static_cast<std::size_t>(lin)].flag = true;
  return m;
}

}  // namespace

std::vector<MaskTensor> backward_tropical(const TensorNetwork& net, const Tape& tape) {
  const auto& nodes = tape.tree.nodes;
  const LabeledTensor& root = tape.values.back();
  if (!root.is_scalar()) throw ShapeError("tropical backward needs a scalar root");
  if (root.data[0] == TropicalOps::zero())
    throw EvidenceError("no satisfying configuration: contraction value is zero");

  // Per node: the selected index of its single true mask entry, as var values.
  std::vector<Assignment> selected(nodes.size());

  for (std::size_t i = nodes.size(); i-- > 0;) {
    const TreeNode& node = nodes[i];
    if (node.is_leaf()) continue;
    const LabeledTensor& a = tape.values[static_cast<std::size_t>(node.left)];
    const LabeledTensor& b = tape.values[static_cast<std::size_t>(node.right)];
    const LabeledTensor& c = tape.values[i];
    const Assignment& fixed = selected[i];

    std::vector<std::int64_t> sa = detail::strides_of(a.dims);
    std::vector<std::int64_t> sb = detail::strides_of(b.dims);
    std::vector<std::int64_t> sc = detail::strides_of(c.dims);

    std::int64_t target_lin = 0;
    for (std::size_t ax = 0; ax < c.vars.size(); ++ax)
      target_lin += *fixed.find(c.vars[ax]) * sc[ax];
    const double target = c.data[static_cast<std::size_t>(target_lin)];

    // Free variables of this branch, ascending; scan their joint index space
    // row-major and take the first configuration whose entries add exactly to
    // the already-selected output entry. One such configuration must exist:
    // the output was computed as the max of exactly these sums.
    std::vector<VarId> free_vars;
    std::vector<std::int64_t> free_dims;
    std::vector<std::int64_t> fa, fb;
    std::int64_t base_a = 0, base_b = 0;
    for (VarId v : detail::sorted_union(a.vars, b.vars)) {
      auto ia = std::find(a.vars.begin(), a.vars.end(), v);
      auto ib = std::find(b.vars.begin(), b.vars.end(), v);
      std::int64_t stride_a =
          ia == a.vars.end() ? 0 : sa[static_cast<std::size_t>(ia - a.vars.begin())];
      std::int64_t stride_b =
          ib == b.vars.end() ? 0 : sb[static_cast<std::size_t>(ib - b.vars.begin())];
      if (const std::int64_t* val = fixed.find(v)) {
        base_a += *val * stride_a;
        base_b += *val * stride_b;
      } else {
        free_vars.push_back(v);
        free_dims.push_back(ia != a.vars.end()
                                ? a.dims[static_cast<std::size_t>(ia - a.vars.begin())]
                                : b.dims[static_cast<std::size_t>(ib - b.vars.begin())]);
        fa.push_back(stride_a);
        fb.push_back(stride_b);
      }
    }

    std::int64_t n_free = detail::checked_product(free_dims);
    detail::Odometer odo(free_dims, {fa, fb});
    bool found = false;
    for (std::int64_t m = 0; m < n_free; ++m) {
      double sum = a.data[static_cast<std::size_t>(base_a + odo.offset(0))] +
                   b.data[static_cast<std::size_t>(base_b + odo.offset(1))];
      if (sum == target) {
        // Decode m into per-variable values.
        std::int64_t lin = m;
        Assignment chosen = fixed;
        for (std::size_t ax = free_vars.size(); ax-- > 0;) {
          chosen.set(free_vars[ax], lin % free_dims[ax]);
          lin /= free_dims[ax];
        }
        selected[static_cast<std::size_t>(node.left)] = chosen;
        selected[static_cast<std::size_t>(node.right)] = std::move(chosen);
        found = true;
        break;
      }
      odo.next();
    }
    if (!found) throw ShapeError("internal: branch output is not attained by any configuration");
  }

  std::vector<MaskTensor> by_tensor(net.tensors.size());
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].is_leaf())
      by_tensor[static_cast<std::size_t>(nodes[i].tensor)] =
          one_hot_mask(tape.values[i], selected[i]);
  return by_tensor;
}

}  // namespace tinfer
