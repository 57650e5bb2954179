#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "tinfer/algebra.hpp"
#include "tinfer/errors.hpp"

namespace tinfer {

using VarId = std::int32_t;

// Sparse variable-to-value map kept sorted by variable id.
class Assignment {
 public:
  Assignment() = default;

  void set(VarId var, std::int64_t value);
  // nullptr when the variable is unassigned.
  const std::int64_t* find(VarId var) const;

  bool empty() const { return items_.empty(); }
  std::size_t size() const { return items_.size(); }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }

 private:
  std::vector<std::pair<VarId, std::int64_t>> items_;
};

// Dense tensor with one axis per variable. Data is row-major with vars.front()
// varying slowest. Under the real algebra the entry value is data[i] * 2^scale;
// tropical tensors hold natural-log values directly and keep scale == 0.
struct LabeledTensor {
  std::vector<VarId> vars;
  std::vector<std::int64_t> dims;
  std::vector<double> data;
  std::int64_t scale = 0;

  LabeledTensor() = default;
  LabeledTensor(std::vector<VarId> v, std::vector<std::int64_t> d, std::vector<double> x,
                std::int64_t s = 0);

  std::int64_t size() const { return static_cast<std::int64_t>(data.size()); }
  bool is_scalar() const { return vars.empty(); }
  // Entry value with the scale applied (real algebra).
  double scaled_entry(std::int64_t i) const;
};

LabeledTensor scalar_tensor(double value);

// All-ones (real) or all-zeros (tropical) tensor: the multiplicative identity
// pattern whose insertion leaves a contraction unchanged. Empty vars gives the
// scalar one of the algebra.
LabeledTensor unity_tensor(std::span<const VarId> vars, std::span<const std::int64_t> dims,
                           Algebra alg);

// Fixes the assigned variables and drops their axes. Variables absent from the
// tensor's scope are ignored, so a disjoint assignment returns a copy.
LabeledTensor slice(const LabeledTensor& t, const Assignment& assignment);

// Divides the buffer by a power of two so its max-abs entry lands in [0.5, 1)
// and folds that power into scale. Exact: no entry is rounded. All-zero
// buffers reset scale to 0.
void renormalize(LabeledTensor& t);

// Pairwise contraction: variables of a and b that are not in out_vars are
// eliminated (summed under the algebra's add, in row-major order over the
// eliminated indices for bitwise reproducibility); out_vars orders the result
// axes. out_vars may include variables absent from both inputs, in which case
// the result is constant along those axes and dim_table (indexed by VarId)
// must supply their dimensions. Real results are renormalized; mul_counter,
// when given, is incremented by the product of the dimensions of
// vars(a) u vars(b) u out_vars.
LabeledTensor contract_pair(Algebra alg, const LabeledTensor& a, const LabeledTensor& b,
                            std::span<const VarId> out_vars,
                            const std::vector<std::int64_t>* dim_table = nullptr,
                            std::uint64_t* mul_counter = nullptr);

}  // namespace tinfer
