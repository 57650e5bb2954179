#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "tinfer/tensor.hpp"

namespace tinfer::detail {

inline std::vector<VarId> sorted_union(const std::vector<VarId>& a, const std::vector<VarId>& b) {
  std::vector<VarId> out(a);
  out.insert(out.end(), b.begin(), b.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline bool contains(const std::vector<VarId>& sorted, VarId v) {
  return std::binary_search(sorted.begin(), sorted.end(), v);
}

// Row-major strides: last axis fastest.
inline std::vector<std::int64_t> strides_of(const std::vector<std::int64_t>& dims) {
  std::vector<std::int64_t> s(dims.size());
  std::int64_t acc = 1;
  for (std::size_t i = dims.size(); i-- > 0;) {
    s[i] = acc;
    acc *= dims[i];
  }
  return s;
}

// Saturating product guard for element counts.
inline std::int64_t checked_product(const std::vector<std::int64_t>& dims,
                                    std::int64_t cap = std::int64_t(1) << 62) {
  std::int64_t p = 1;
  for (std::int64_t d : dims) {
    if (d <= 0) return 0;
    if (p > cap / d) return cap;
    p *= d;
  }
  return p;
}

// Walks a multi-dimensional index space in row-major order while maintaining
// precomputed linear offsets into any number of target buffers.
class Odometer {
 public:
  // strides[t][axis] is the step the t-th tracked offset takes when axis
  // increments (0 when the target tensor lacks that variable).
  Odometer(std::vector<std::int64_t> dims, std::vector<std::vector<std::int64_t>> strides)
      : dims_(std::move(dims)), strides_(std::move(strides)), pos_(dims_.size(), 0),
        offsets_(strides_.size(), 0) {}

  std::int64_t offset(std::size_t target) const { return offsets_[target]; }

  // Advances to the next index; false after the last one wraps around.
  bool next() {
    for (std::size_t ax = dims_.size(); ax-- > 0;) {
      if (++pos_[ax] < dims_[ax]) {
        for (std::size_t t = 0; t < offsets_.size(); ++t) offsets_[t] += strides_[t][ax];
        return true;
      }
      pos_[ax] = 0;
      for (std::size_t t = 0; t < offsets_.size(); ++t)
        offsets_[t] -= strides_[t][ax] * (dims_[ax] - 1);
    }
    return false;
  }

 private:
  std::vector<std::int64_t> dims_;
  std::vector<std::vector<std::int64_t>> strides_;
  std::vector<std::int64_t> pos_;
  std::vector<std::int64_t> offsets_;
};

}  // namespace tinfer::detail
