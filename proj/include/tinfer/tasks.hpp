#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "tinfer/autodiff.hpp"

namespace tinfer {

enum class OrderStrategy { greedy, exhaustive };

struct TaskOptions {
  OrderStrategy order = OrderStrategy::greedy;
  // Refuse any planned contraction whose space complexity (log2 elements of
  // the largest tensor) exceeds this. Unlimited by default; the CLI caps it.
  double space_cap = std::numeric_limits<double>::infinity();
  int exhaustive_max_tensors = 10;
};

// Probability of evidence: the full contraction of the evidence-sliced
// network. Returned scaled since it may underflow a plain double.
ScaledReal compute_pr(const TensorNetwork& net, const Assignment& evidence,
                      const TaskOptions& opts = {});

// Posterior marginals, one probability tensor per query set.
struct MarginalTable {
  std::vector<std::vector<VarId>> queries;  // each ascending
  std::vector<LabeledTensor> probs;         // plain doubles, scale == 0, sum 1
};

// queries may name any disjoint-from-evidence variable sets; empty means one
// singleton query per unobserved variable. One forward pass and one backward
// sweep serve all sets.
MarginalTable compute_mar(const TensorNetwork& net, const Assignment& evidence,
                          const std::vector<std::vector<VarId>>& queries = {},
                          const TaskOptions& opts = {});

// A maximizing assignment together with its natural-log score.
struct MpeSolution {
  Assignment assignment;
  double log_prob = 0.0;
};

// Most probable explanation over every unobserved variable. Ties resolve to
// the row-major-first maximizer.
MpeSolution compute_mpe(const TensorNetwork& net, const Assignment& evidence,
                        const TaskOptions& opts = {});

// Marginal MAP: maximizes over query_vars after summing out the remaining
// unobserved variables. log_prob is ln max_q sum_m p(q, m, e). query_vars
// must be nonempty (an empty query leaves nothing to maximize; compute_mpe
// covers the everything-is-query case) and disjoint from the evidence.
MpeSolution compute_mmap(const TensorNetwork& net, const Assignment& evidence,
                         const std::vector<VarId>& query_vars, const TaskOptions& opts = {});

// Exact unbiased samples from the posterior given evidence.
struct SampleBatch {
  std::vector<VarId> vars;                     // unobserved variables, ascending
  std::vector<std::vector<std::int64_t>> rows; // one assignment per sample, aligned with vars
  std::uint64_t seed = 0;
  std::string rng;                             // RNG algorithm identifier
};

// Draws n independent samples by walking the contraction tree from the root,
// sampling each branch's eliminated variables from their exact conditional.
// Each sample uses its own RNG stream derived from (seed, sample index), so
// batches are reproducible and order-independent.
SampleBatch draw_samples(const TensorNetwork& net, const Assignment& evidence,
                         std::int64_t n, std::uint64_t seed, const TaskOptions& opts = {});

}  // namespace tinfer
