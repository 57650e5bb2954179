#include "tinfer/contraction_order.hpp"

#include <algorithm>
#include <bit>
#include <bitset>
#include <cmath>
#include <limits>

#include "detail.hpp"

namespace tinfer {

namespace {

constexpr std::int64_t kSizeCap = std::int64_t(1) << 53;

std::vector<VarId> sorted_scope(const LabeledTensor& t) {
  std::vector<VarId> s(t.vars);
  std::sort(s.begin(), s.end());
  return s;
}

std::int64_t scope_size(const std::vector<VarId>& scope, const std::vector<std::int64_t>& cards) {
  std::vector<std::int64_t> dims;
  dims.reserve(scope.size());
  for (VarId v : scope) dims.push_back(cards[static_cast<std::size_t>(v)]);
  return detail::checked_product(dims, kSizeCap);
}

}  // namespace

ContractionTree greedy_order(const TensorNetwork& net) {
  const std::int64_t k = static_cast<std::int64_t>(net.tensors.size());
  ContractionTree tree;
  if (k == 0) return tree;
  for (std::int64_t i = 0; i < k; ++i) {
    TreeNode leaf;
    leaf.tensor = static_cast<int>(i);
    leaf.out_vars = sorted_scope(net.tensors[static_cast<std::size_t>(i)]);
    tree.nodes.push_back(std::move(leaf));
  }
  if (k == 1) return tree;

  // Reference counts over the active tensors; output variables are pinned by
  // membership in out_set instead of a count.
  std::vector<std::int64_t> refcount(static_cast<std::size_t>(net.num_vars), 0);
  for (std::int64_t i = 0; i < k; ++i)
    for (VarId v : tree.nodes[static_cast<std::size_t>(i)].out_vars)
      ++refcount[static_cast<std::size_t>(v)];
  const std::vector<VarId>& out_set = net.output_vars;

  std::vector<int> active;  // node ids, ascending (new nodes get larger ids)
  for (std::int64_t i = 0; i < k; ++i) active.push_back(static_cast<int>(i));

  auto merged_scope = [&](const std::vector<VarId>& sl, const std::vector<VarId>& sr) {
    std::vector<VarId> kept;
    for (VarId v : detail::sorted_union(sl, sr)) {
      std::int64_t inside = (detail::contains(sl, v) ? 1 : 0) + (detail::contains(sr, v) ? 1 : 0);
      if (refcount[static_cast<std::size_t>(v)] - inside > 0 || detail::contains(out_set, v))
        kept.push_back(v);
    }
    return kept;
  };

  while (active.size() > 1) {
    std::int64_t best_delta = std::numeric_limits<std::int64_t>::max();
    std::size_t best_i = 0, best_j = 0;
    std::vector<VarId> best_scope;
    for (std::size_t i = 0; i < active.size(); ++i) {
      for (std::size_t j = i + 1; j < active.size(); ++j) {
        const auto& sl = tree.nodes[static_cast<std::size_t>(active[i])].out_vars;
        const auto& sr = tree.nodes[static_cast<std::size_t>(active[j])].out_vars;
        std::vector<VarId> kept = merged_scope(sl, sr);
        std::int64_t delta = scope_size(kept, net.cards) - scope_size(sl, net.cards) -
                             scope_size(sr, net.cards);
        // Strict improvement keeps the lexicographically smallest index pair
        // on ties (pairs are visited in lexicographic order).
        if (delta < best_delta) {
          best_delta = delta;
          best_i = i;
          best_j = j;
          best_scope = std::move(kept);
        }
      }
    }

    int l = active[best_i], r = active[best_j];
    for (VarId v : tree.nodes[static_cast<std::size_t>(l)].out_vars)
      --refcount[static_cast<std::size_t>(v)];
    for (VarId v : tree.nodes[static_cast<std::size_t>(r)].out_vars)
      --refcount[static_cast<std::size_t>(v)];
    for (VarId v : best_scope) ++refcount[static_cast<std::size_t>(v)];

    TreeNode branch;
    branch.left = l;
    branch.right = r;
    branch.out_vars = std::move(best_scope);
    tree.nodes.push_back(std::move(branch));

    active.erase(active.begin() + static_cast<std::ptrdiff_t>(best_j));
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(best_i));
    active.push_back(static_cast<int>(tree.nodes.size()) - 1);
  }
  return tree;
}

namespace {

// Subset state for the exact search. Variables are compacted to bit positions.
struct SubsetTables {
  std::vector<VarId> vars;                    // compact index -> VarId
  std::vector<std::int64_t> var_dims;         // by compact index
  std::vector<std::uint32_t> occurrence;      // by compact index: tensor bitmask
  std::vector<std::bitset<128>> scope_bits;   // by tensor
  std::bitset<128> output_bits;
};

std::int64_t bits_size(const std::bitset<128>& bits, const std::vector<std::int64_t>& var_dims) {
  std::int64_t p = 1;
  for (std::size_t i = 0; i < var_dims.size(); ++i)
    if (bits[i]) {
      if (p > kSizeCap / var_dims[i]) return kSizeCap;
      p *= var_dims[i];
    }
  return p;
}

}  // namespace

ContractionTree exhaustive_order(const TensorNetwork& net, int max_tensors) {
  const int k = static_cast<int>(net.tensors.size());
  if (k > max_tensors)
    throw CapacityError("exhaustive order is limited to " + std::to_string(max_tensors) +
                        " tensors (got " + std::to_string(k) + "); use greedy_order");
  if (k <= 1) return greedy_order(net);

  SubsetTables tab;
  {
    std::vector<VarId> all;
    for (const LabeledTensor& t : net.tensors) all.insert(all.end(), t.vars.begin(), t.vars.end());
    for (VarId v : net.output_vars) all.push_back(v);
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    if (all.size() > 128)
      throw CapacityError("exhaustive order is limited to 128 distinct variables");
    tab.vars = std::move(all);
  }
  auto compact = [&](VarId v) {
    return static_cast<std::size_t>(
        std::lower_bound(tab.vars.begin(), tab.vars.end(), v) - tab.vars.begin());
  };
  tab.var_dims.resize(tab.vars.size());
  tab.occurrence.assign(tab.vars.size(), 0);
  for (std::size_t i = 0; i < tab.vars.size(); ++i)
    tab.var_dims[i] = net.cards[static_cast<std::size_t>(tab.vars[i])];
  tab.scope_bits.resize(static_cast<std::size_t>(k));
  for (int t = 0; t < k; ++t)
    for (VarId v : net.tensors[static_cast<std::size_t>(t)].vars) {
      tab.scope_bits[static_cast<std::size_t>(t)].set(compact(v));
      tab.occurrence[compact(v)] |= 1u << t;
    }
  for (VarId v : net.output_vars) tab.output_bits.set(compact(v));

  const std::uint32_t full = (k == 32) ? 0xffffffffu : ((1u << k) - 1);
  const std::size_t n_sets = static_cast<std::size_t>(full) + 1;

  // Per subset: variables present, variables kept after contracting it.
  std::vector<std::bitset<128>> present(n_sets), kept(n_sets);
  std::vector<std::int64_t> out_size(n_sets, 1);
  for (std::uint32_t s = 1; s <= full; ++s) {
    std::uint32_t low = s & (~s + 1);
    int low_idx = std::countr_zero(low);
    present[s] = (s == low) ? tab.scope_bits[static_cast<std::size_t>(low_idx)]
                            : (present[s ^ low] | tab.scope_bits[static_cast<std::size_t>(low_idx)]);
    std::bitset<128> keep;
    for (std::size_t i = 0; i < tab.vars.size(); ++i)
      if (present[s][i] && ((tab.occurrence[i] & full & ~s) != 0 || tab.output_bits[i]))
        keep.set(i);
    kept[s] = keep;
    out_size[s] = bits_size(keep, tab.var_dims);
  }

  const double inf = std::numeric_limits<double>::infinity();

  // Pass 1: minimize the largest tensor (leaves included).
  std::vector<double> sp(n_sets, inf);
  for (int t = 0; t < k; ++t)
    sp[1u << t] = static_cast<double>(net.tensors[static_cast<std::size_t>(t)].size());
  for (std::uint32_t s = 1; s <= full; ++s) {
    if ((s & (s - 1)) == 0) continue;  // singleton
    std::uint32_t low = s & (~s + 1);
    double best = inf;
    for (std::uint32_t l = (s - 1) & s; l; l = (l - 1) & s) {
      if (!(l & low)) continue;  // canonical half contains the lowest tensor
      best = std::min(best, std::max(sp[l], sp[s ^ l]));
    }
    sp[s] = std::max(best, static_cast<double>(out_size[s]));
  }

  // Pass 2: among trees meeting that space, minimize total multiplications.
  const double cap = sp[full];
  std::vector<double> tm(n_sets, inf);
  std::vector<std::uint32_t> split(n_sets, 0);
  for (int t = 0; t < k; ++t) tm[1u << t] = 0.0;
  for (std::uint32_t s = 1; s <= full; ++s) {
    if ((s & (s - 1)) == 0) continue;
    if (static_cast<double>(out_size[s]) > cap) continue;
    std::uint32_t low = s & (~s + 1);
    for (std::uint32_t l = (s - 1) & s; l; l = (l - 1) & s) {
      if (!(l & low)) continue;
      std::uint32_t r = s ^ l;
      if (tm[l] == inf || tm[r] == inf) continue;
      double ops = static_cast<double>(bits_size(kept[l] | kept[r], tab.var_dims));
      double cand = tm[l] + tm[r] + ops;
      if (cand < tm[s]) {
        tm[s] = cand;
        split[s] = l;
      }
    }
  }

  ContractionTree tree;
  auto decode = [&](const std::bitset<128>& bits) {
    std::vector<VarId> out;
    for (std::size_t i = 0; i < tab.vars.size(); ++i)
      if (bits[i]) out.push_back(tab.vars[i]);
    return out;
  };
  // Emit post-order; returns the node id for subset s.
  auto emit = [&](auto&& self, std::uint32_t s) -> int {
    if ((s & (s - 1)) == 0) {
      TreeNode leaf;
      leaf.tensor = std::countr_zero(s);
      leaf.out_vars = sorted_scope(net.tensors[static_cast<std::size_t>(leaf.tensor)]);
      tree.nodes.push_back(std::move(leaf));
      return static_cast<int>(tree.nodes.size()) - 1;
    }
    int l = self(self, split[s]);
    int r = self(self, s ^ split[s]);
    TreeNode branch;
    branch.left = l;
    branch.right = r;
    branch.out_vars = decode(kept[s]);
    tree.nodes.push_back(std::move(branch));
    return static_cast<int>(tree.nodes.size()) - 1;
  };
  emit(emit, full);
  return tree;
}

void validate_tree(const TensorNetwork& net, const ContractionTree& tree) {
  const std::size_t k = net.tensors.size();
  if (tree.empty()) {
    if (k != 0) throw ShapeError("empty tree for a nonempty network");
    if (!net.output_vars.empty()) throw ShapeError("empty network cannot keep output variables");
    return;
  }
  const std::size_t n = tree.nodes.size();
  if (n != 2 * k - 1) throw ShapeError("tree node count disagrees with tensor count");

  std::vector<int> parents(n, 0);
  std::vector<char> leaf_seen(k, 0);
  // Tensor membership of each subtree, for the needed-later recomputation.
  std::vector<std::vector<char>> members(n, std::vector<char>(k, 0));

  for (std::size_t i = 0; i < n; ++i) {
    const TreeNode& node = tree.nodes[i];
    if (node.is_leaf()) {
      if (node.left >= 0 || node.right >= 0) throw ShapeError("leaf with children");
      if (static_cast<std::size_t>(node.tensor) >= k) throw ShapeError("leaf tensor out of range");
      if (leaf_seen[static_cast<std::size_t>(node.tensor)]) throw ShapeError("tensor used twice");
      leaf_seen[static_cast<std::size_t>(node.tensor)] = 1;
      members[i][static_cast<std::size_t>(node.tensor)] = 1;
      if (node.out_vars != sorted_scope(net.tensors[static_cast<std::size_t>(node.tensor)]))
        throw ShapeError("leaf scope disagrees with its tensor");
    } else {
      if (node.left < 0 || node.right < 0 || static_cast<std::size_t>(node.left) >= i ||
          static_cast<std::size_t>(node.right) >= i || node.left == node.right)
        throw ShapeError("branch children must precede it");
      ++parents[static_cast<std::size_t>(node.left)];
      ++parents[static_cast<std::size_t>(node.right)];
      for (std::size_t t = 0; t < k; ++t)
        members[i][t] = static_cast<char>(members[static_cast<std::size_t>(node.left)][t] |
                                          members[static_cast<std::size_t>(node.right)][t]);
      if (!std::is_sorted(node.out_vars.begin(), node.out_vars.end()) ||
          std::adjacent_find(node.out_vars.begin(), node.out_vars.end()) != node.out_vars.end())
        throw ShapeError("branch output variables must be ascending and distinct");

      // Recompute the needed-later rule for this branch.
      const auto& sl = tree.nodes[static_cast<std::size_t>(node.left)].out_vars;
      const auto& sr = tree.nodes[static_cast<std::size_t>(node.right)].out_vars;
      std::vector<VarId> expected;
      for (VarId v : detail::sorted_union(sl, sr)) {
        bool needed = detail::contains(net.output_vars, v);
        for (std::size_t t = 0; t < k && !needed; ++t) {
          if (members[i][t]) continue;
          const auto& scope = net.tensors[t].vars;
          needed = std::find(scope.begin(), scope.end(), v) != scope.end();
        }
        if (needed) expected.push_back(v);
      }
      if (node.out_vars != expected)
        throw ShapeError("branch output scope violates the needed-later rule");
    }
  }

  for (std::size_t t = 0; t < k; ++t)
    if (!leaf_seen[t]) throw ShapeError("tensor " + std::to_string(t) + " missing from tree");
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (parents[i] != 1) throw ShapeError("every non-root node needs exactly one parent");
  if (parents[n - 1] != 0) throw ShapeError("root must not have a parent");
  if (tree.nodes[n - 1].out_vars != net.output_vars)
    throw ShapeError("root scope disagrees with the network output set");
}

ComplexityReport complexity_report(const TensorNetwork& net, const ContractionTree& tree) {
  ComplexityReport rep;
  if (tree.empty()) return rep;

  double max_elems = 1.0;
  double ops = 0.0;
  double moved = 0.0;
  std::vector<double> node_size(tree.nodes.size(), 1.0);
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const TreeNode& node = tree.nodes[i];
    if (node.is_leaf()) {
      node_size[i] =
          static_cast<double>(net.tensors[static_cast<std::size_t>(node.tensor)].size());
    } else {
      const auto& sl = tree.nodes[static_cast<std::size_t>(node.left)].out_vars;
      const auto& sr = tree.nodes[static_cast<std::size_t>(node.right)].out_vars;
      double union_size = 1.0;
      for (VarId v : detail::sorted_union(sl, sr))
        union_size *= static_cast<double>(net.cards[static_cast<std::size_t>(v)]);
      node_size[i] = static_cast<double>(scope_size(node.out_vars, net.cards));
      ops += union_size;
      moved += node_size[static_cast<std::size_t>(node.left)] +
               node_size[static_cast<std::size_t>(node.right)] + node_size[i];
    }
    max_elems = std::max(max_elems, node_size[i]);
  }
  rep.space = std::log2(max_elems);
  rep.time = std::log2(std::max(ops, 1.0));
  rep.rw = std::log2(std::max(moved, 1.0));
  return rep;
}

}  // namespace tinfer
