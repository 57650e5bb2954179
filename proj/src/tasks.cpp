#include "tinfer/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include "detail.hpp"

namespace tinfer {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

ContractionTree plan_tree(const TensorNetwork& net, const TaskOptions& opts, const char* task) {
  ContractionTree tree = opts.order == OrderStrategy::greedy
                             ? greedy_order(net)
                             : exhaustive_order(net, opts.exhaustive_max_tensors);
  ComplexityReport rep = complexity_report(net, tree);
  if (rep.space > opts.space_cap) {
    char msg[160];
    std::snprintf(msg, sizeof(msg),
                  "%s needs space complexity %.2f, above the cap %.2f; "
                  "raise the cap or simplify the model",
                  task, rep.space, opts.space_cap);
    throw CapacityError(msg);
  }
  return tree;
}

// A lone non-scalar tensor still needs one branch to reduce it to the output
// set; a scalar identity partner supplies that branch without changing the
// value.
void pad_for_reduction(TensorNetwork& net, Algebra alg) {
  if (net.tensors.size() != 1) return;
  std::vector<VarId> scope(net.tensors[0].vars);
  std::sort(scope.begin(), scope.end());
  if (scope != net.output_vars)
    net.tensors.push_back(
        scalar_tensor(alg == Algebra::real ? RealOps::one() : TropicalOps::one()));
}

std::vector<VarId> unobserved_vars(const TensorNetwork& net, const Assignment& evidence) {
  std::vector<VarId> vars;
  for (VarId v = 0; v < net.num_vars; ++v)
    if (!evidence.find(v)) vars.push_back(v);
  return vars;
}

LabeledTensor log_tensor(const LabeledTensor& t) {
  LabeledTensor out(t.vars, t.dims, std::vector<double>(t.data.size()), 0);
  const double scale_term = static_cast<double>(t.scale) * 0.69314718055994530942;
  for (std::size_t i = 0; i < t.data.size(); ++i)
    out.data[i] = t.data[i] == 0.0 ? kNegInf : std::log(t.data[i]) + scale_term;
  return out;
}

LabeledTensor single_var_unity(VarId v, const TensorNetwork& net, Algebra alg) {
  const VarId vars[1] = {v};
  const std::int64_t dims[1] = {net.cards[static_cast<std::size_t>(v)]};
  return unity_tensor(vars, dims, alg);
}

// Shared max-plus stage: attaches a unity leaf per decision variable,
// contracts, and decodes the maximizing assignment from the leaf masks.
MpeSolution tropical_max(TensorNetwork net, const std::vector<VarId>& decide_vars,
                         const TaskOptions& opts, const char* task) {
  std::vector<std::size_t> leaf_of_var;
  for (VarId v : decide_vars) {
    leaf_of_var.push_back(net.tensors.size());
    net.tensors.push_back(single_var_unity(v, net, Algebra::tropical));
  }
  if (net.tensors.empty()) return {};

  pad_for_reduction(net, Algebra::tropical);
  ContractionTree tree = plan_tree(net, opts, task);
  Tape tape = forward(Algebra::tropical, net, tree);
  double root = tape.root_value().data[0];
  if (root == kNegInf)
    throw EvidenceError("no satisfying configuration: every assignment has probability zero");

  std::vector<MaskTensor> masks = backward_tropical(net, tape);
  MpeSolution sol;
  sol.log_prob = root;
  for (std::size_t i = 0; i < decide_vars.size(); ++i)
    sol.assignment.set(decide_vars[i], masks[leaf_of_var[i]].arg_true()[0]);
  return sol;
}

}  // namespace

ScaledReal compute_pr(const TensorNetwork& net, const Assignment& evidence,
                      const TaskOptions& opts) {
  validate_network(net);
  TensorNetwork sliced = apply_evidence(net, evidence);
  sliced.output_vars.clear();
  if (sliced.tensors.empty()) return ScaledReal(1.0);
  pad_for_reduction(sliced, Algebra::real);
  ContractionTree tree = plan_tree(sliced, opts, "pr");
  LabeledTensor root = contract_network(Algebra::real, sliced, tree);
  return ScaledReal::from_parts(root.data[0], root.scale);
}

MarginalTable compute_mar(const TensorNetwork& net, const Assignment& evidence,
                          const std::vector<std::vector<VarId>>& queries,
                          const TaskOptions& opts) {
  validate_network(net);
  TensorNetwork sliced = apply_evidence(net, evidence);
  sliced.output_vars.clear();

  std::vector<std::vector<VarId>> query_sets = queries;
  if (query_sets.empty())
    for (VarId v : unobserved_vars(net, evidence)) query_sets.push_back({v});
  for (auto& q : query_sets) {
    std::sort(q.begin(), q.end());
    if (q.empty() || std::adjacent_find(q.begin(), q.end()) != q.end())
      throw ShapeError("each query set must name distinct variables");
    for (VarId v : q) {
      if (v < 0 || v >= net.num_vars)
        throw ShapeError("query names unknown variable " + std::to_string(v));
      if (evidence.find(v))
        throw ShapeError("query variable " + std::to_string(v) + " is observed");
    }
  }

  // One unity leaf per query set; its adjoint is the unnormalized marginal.
  std::vector<std::size_t> leaf_of_query;
  for (const auto& q : query_sets) {
    std::vector<std::int64_t> dims;
    for (VarId v : q) dims.push_back(net.cards[static_cast<std::size_t>(v)]);
    leaf_of_query.push_back(sliced.tensors.size());
    sliced.tensors.push_back(unity_tensor(q, dims, Algebra::real));
  }

  if (sliced.tensors.empty())  // no factors and no unobserved variables
    return {};
  pad_for_reduction(sliced, Algebra::real);
  ContractionTree tree = plan_tree(sliced, opts, "mar");
  Tape tape = forward(Algebra::real, sliced, tree);
  const LabeledTensor& root = tape.root_value();
  if (root.data[0] == 0.0) throw EvidenceError("inconsistent evidence: p(e) = 0");

  std::vector<LabeledTensor> adjoints = backward_real(sliced, tape);

  MarginalTable table;
  table.queries = std::move(query_sets);
  for (std::size_t qi = 0; qi < table.queries.size(); ++qi) {
    LabeledTensor adj = std::move(adjoints[leaf_of_query[qi]]);
    int shift = static_cast<int>(std::clamp<std::int64_t>(adj.scale - root.scale, -4000, 4000));
    for (double& x : adj.data) x = std::ldexp(x / root.data[0], shift);
    adj.scale = 0;
    table.probs.push_back(std::move(adj));
  }
  return table;
}

MpeSolution compute_mpe(const TensorNetwork& net, const Assignment& evidence,
                        const TaskOptions& opts) {
  validate_network(net);
  TensorNetwork sliced = apply_evidence(net, evidence);
  sliced.output_vars.clear();
  for (LabeledTensor& t : sliced.tensors) t = log_tensor(t);
  return tropical_max(std::move(sliced), unobserved_vars(net, evidence), opts, "mpe");
}

MpeSolution compute_mmap(const TensorNetwork& net, const Assignment& evidence,
                         const std::vector<VarId>& query_vars, const TaskOptions& opts) {
  validate_network(net);
  if (query_vars.empty())
    throw ShapeError("empty query: use compute_mpe to maximize over every unobserved variable");
  std::vector<VarId> query(query_vars);
  std::sort(query.begin(), query.end());
  if (std::adjacent_find(query.begin(), query.end()) != query.end())
    throw ShapeError("repeated variable in query");
  for (VarId v : query) {
    if (v < 0 || v >= net.num_vars)
      throw ShapeError("query names unknown variable " + std::to_string(v));
    if (evidence.find(v))
      throw ShapeError("query variable " + std::to_string(v) + " is observed");
  }

  TensorNetwork sliced = apply_evidence(net, evidence);
  sliced.output_vars.clear();

  // Group tensors so every marginalized variable is summed inside exactly one
  // group: seed with the lowest unprocessed marginalized variable, absorb
  // tensors sharing any marginalized variable with the group until closed.
  const std::size_t k = sliced.tensors.size();
  std::vector<char> assigned(k, 0);
  std::vector<char> marg(static_cast<std::size_t>(net.num_vars), 0);
  for (VarId v : sliced.present_vars())
    if (!detail::contains(query, v)) marg[static_cast<std::size_t>(v)] = 1;

  std::vector<std::vector<std::size_t>> groups;
  std::vector<char> processed(static_cast<std::size_t>(net.num_vars), 0);
  for (VarId seed = 0; seed < net.num_vars; ++seed) {
    if (!marg[static_cast<std::size_t>(seed)] || processed[static_cast<std::size_t>(seed)])
      continue;
    std::vector<char> in_group_var(static_cast<std::size_t>(net.num_vars), 0);
    in_group_var[static_cast<std::size_t>(seed)] = 1;
    std::vector<std::size_t> group;
    bool grew = true;
    while (grew) {
      grew = false;
      for (std::size_t t = 0; t < k; ++t) {
        if (assigned[t]) continue;
        bool touches = false;
        for (VarId v : sliced.tensors[t].vars)
          if (marg[static_cast<std::size_t>(v)] && in_group_var[static_cast<std::size_t>(v)]) {
            touches = true;
            break;
          }
        if (!touches) continue;
        assigned[t] = 1;
        group.push_back(t);
        grew = true;
        for (VarId v : sliced.tensors[t].vars)
          if (marg[static_cast<std::size_t>(v)]) in_group_var[static_cast<std::size_t>(v)] = 1;
      }
    }
    for (VarId v = 0; v < net.num_vars; ++v)
      if (in_group_var[static_cast<std::size_t>(v)]) processed[static_cast<std::size_t>(v)] = 1;
    groups.push_back(std::move(group));
  }
  for (std::size_t t = 0; t < k; ++t)
    if (!assigned[t]) groups.push_back({t});

  // Sum each group down to its query variables, then maximize over the query.
  TensorNetwork stage;
  stage.num_vars = net.num_vars;
  stage.cards = net.cards;
  for (const auto& group : groups) {
    TensorNetwork part;
    part.num_vars = net.num_vars;
    part.cards = net.cards;
    std::vector<VarId> part_vars;
    for (std::size_t t : group) {
      part.tensors.push_back(sliced.tensors[t]);
      part_vars.insert(part_vars.end(), sliced.tensors[t].vars.begin(),
                       sliced.tensors[t].vars.end());
    }
    std::sort(part_vars.begin(), part_vars.end());
    part_vars.erase(std::unique(part_vars.begin(), part_vars.end()), part_vars.end());
    for (VarId v : part_vars)
      if (detail::contains(query, v)) part.output_vars.push_back(v);
    pad_for_reduction(part, Algebra::real);
    ContractionTree tree = plan_tree(part, opts, "mmap");
    stage.tensors.push_back(
        log_tensor(contract_network(Algebra::real, part, tree)));
  }

  return tropical_max(std::move(stage), query, opts, "mmap");
}

namespace {

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + (index + 1) * 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double next_u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

SampleBatch draw_samples(const TensorNetwork& net, const Assignment& evidence, std::int64_t n,
                         std::uint64_t seed, const TaskOptions& opts) {
  validate_network(net);
  if (n < 1) throw ShapeError("sample count must be at least 1");

  TensorNetwork sliced = apply_evidence(net, evidence);
  sliced.output_vars.clear();
  pad_for_reduction(sliced, Algebra::real);

  SampleBatch batch;
  batch.vars = unobserved_vars(net, evidence);
  batch.seed = seed;
  batch.rng = "mt19937_64";

  Tape tape;
  if (!sliced.tensors.empty()) {
    ContractionTree tree = plan_tree(sliced, opts, "sample");
    tape = forward(Algebra::real, sliced, tree);
    if (tape.root_value().data[0] <= 0.0)
      throw EvidenceError("inconsistent evidence: p(e) = 0");
  }

  // Variables never touched by a tensor are independent and uniform.
  std::vector<VarId> isolated;
  {
    std::vector<VarId> present = sliced.present_vars();
    for (VarId v : batch.vars)
      if (!detail::contains(present, v)) isolated.push_back(v);
  }

  const auto& nodes = tape.tree.nodes;
  batch.rows.reserve(static_cast<std::size_t>(n));
  for (std::int64_t s = 0; s < n; ++s) {
    std::mt19937_64 rng(stream_seed(seed, static_cast<std::uint64_t>(s)));
    Assignment value;

    // Parents precede children when walking indices downward, so every
    // branch sees its own output variables already assigned.
    for (std::size_t i = nodes.size(); i-- > 0;) {
      const TreeNode& node = nodes[i];
      if (node.is_leaf()) continue;
      const LabeledTensor& a = tape.values[static_cast<std::size_t>(node.left)];
      const LabeledTensor& b = tape.values[static_cast<std::size_t>(node.right)];
      std::vector<std::int64_t> sa = detail::strides_of(a.dims);
      std::vector<std::int64_t> sb = detail::strides_of(b.dims);

      std::vector<VarId> free_vars;
      std::vector<std::int64_t> free_dims, fa, fb;
      std::int64_t base_a = 0, base_b = 0;
      for (VarId v : detail::sorted_union(a.vars, b.vars)) {
        auto ia = std::find(a.vars.begin(), a.vars.end(), v);
        auto ib = std::find(b.vars.begin(), b.vars.end(), v);
        std::int64_t stride_a =
            ia == a.vars.end() ? 0 : sa[static_cast<std::size_t>(ia - a.vars.begin())];
        std::int64_t stride_b =
            ib == b.vars.end() ? 0 : sb[static_cast<std::size_t>(ib - b.vars.begin())];
        if (const std::int64_t* val = value.find(v)) {
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
      if (free_vars.empty()) continue;

      // The conditional over this branch's eliminated variables is the
      // elementwise product of the child slices, normalized. Two passes:
      // total mass, then inverse-CDF walk in the same enumeration order.
      std::int64_t n_free = detail::checked_product(free_dims);
      double total = 0.0;
      {
        detail::Odometer odo(free_dims, {fa, fb});
        for (std::int64_t m = 0; m < n_free; ++m) {
          total += a.data[static_cast<std::size_t>(base_a + odo.offset(0))] *
                   b.data[static_cast<std::size_t>(base_b + odo.offset(1))];
          odo.next();
        }
      }
      if (total <= 0.0)
        throw ShapeError("internal: sampled prefix has zero conditional mass");
      const double target = next_u01(rng) * total;
      double cum = 0.0;
      std::int64_t picked = n_free - 1;
      {
        detail::Odometer odo(free_dims, {fa, fb});
        for (std::int64_t m = 0; m < n_free; ++m) {
          cum += a.data[static_cast<std::size_t>(base_a + odo.offset(0))] *
                 b.data[static_cast<std::size_t>(base_b + odo.offset(1))];
          if (cum > target) {
            picked = m;
            break;
          }
          odo.next();
        }
      }
      std::int64_t lin = picked;
      for (std::size_t ax = free_vars.size(); ax-- > 0;) {
        value.set(free_vars[ax], lin % free_dims[ax]);
        lin /= free_dims[ax];
      }
    }

    for (VarId v : isolated) {
      std::int64_t card = net.cards[static_cast<std::size_t>(v)];
      std::int64_t val = static_cast<std::int64_t>(next_u01(rng) * static_cast<double>(card));
      value.set(v, std::min(val, card - 1));
    }

    std::vector<std::int64_t> row;
    row.reserve(batch.vars.size());
    for (VarId v : batch.vars) row.push_back(*value.find(v));
    batch.rows.push_back(std::move(row));
  }
  return batch;
}

}  // namespace tinfer
