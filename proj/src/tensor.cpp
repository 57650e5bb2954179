#include "tinfer/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "detail.hpp"

namespace tinfer {

void Assignment::set(VarId var, std::int64_t value) {
  auto it = std::lower_bound(items_.begin(), items_.end(), var,
                             [](const auto& p, VarId v) { return p.first < v; });
  if (it != items_.end() && it->first == var) {
    it->second = value;
  } else {
    items_.insert(it, {var, value});
  }
}

const std::int64_t* Assignment::find(VarId var) const {
  auto it = std::lower_bound(items_.begin(), items_.end(), var,
                             [](const auto& p, VarId v) { return p.first < v; });
  if (it != items_.end() && it->first == var) return &it->second;
  return nullptr;
}

LabeledTensor::LabeledTensor(std::vector<VarId> v, std::vector<std::int64_t> d,
                             std::vector<double> x, std::int64_t s)
    : vars(std::move(v)), dims(std::move(d)), data(std::move(x)), scale(s) {
  if (vars.size() != dims.size())
    throw ShapeError("tensor has " + std::to_string(vars.size()) + " variables but " +
                     std::to_string(dims.size()) + " dimensions");
  std::set<VarId> seen(vars.begin(), vars.end());
  if (seen.size() != vars.size()) throw ShapeError("repeated variable in tensor scope");
  std::int64_t n = 1;
  for (std::int64_t dim : dims) {
    if (dim < 1) throw ShapeError("tensor dimension must be positive");
    n *= dim;
  }
  if (n != size())
    throw ShapeError("tensor data has " + std::to_string(size()) + " entries, expected " +
                     std::to_string(n));
}

double LabeledTensor::scaled_entry(std::int64_t i) const {
  return std::ldexp(data[static_cast<std::size_t>(i)],
                    static_cast<int>(std::clamp<std::int64_t>(scale, -100000, 100000)));
}

LabeledTensor scalar_tensor(double value) { return LabeledTensor({}, {}, {value}); }

LabeledTensor unity_tensor(std::span<const VarId> vars, std::span<const std::int64_t> dims,
                           Algebra alg) {
  std::vector<std::int64_t> d(dims.begin(), dims.end());
  std::int64_t n = detail::checked_product(d);
  double fill = alg == Algebra::real ? RealOps::one() : TropicalOps::one();
  return LabeledTensor(std::vector<VarId>(vars.begin(), vars.end()), std::move(d),
                       std::vector<double>(static_cast<std::size_t>(n), fill));
}

LabeledTensor slice(const LabeledTensor& t, const Assignment& assignment) {
  std::vector<std::int64_t> src_strides = detail::strides_of(t.dims);

  std::vector<VarId> kept_vars;
  std::vector<std::int64_t> kept_dims;
  std::vector<std::int64_t> kept_strides;
  std::int64_t base = 0;
  for (std::size_t ax = 0; ax < t.vars.size(); ++ax) {
    if (const std::int64_t* val = assignment.find(t.vars[ax])) {
      if (*val < 0 || *val >= t.dims[ax])
        throw ShapeError("value " + std::to_string(*val) + " out of range for variable " +
                         std::to_string(t.vars[ax]));
      base += *val * src_strides[ax];
    } else {
      kept_vars.push_back(t.vars[ax]);
      kept_dims.push_back(t.dims[ax]);
      kept_strides.push_back(src_strides[ax]);
    }
  }

  std::int64_t out_size = detail::checked_product(kept_dims);
  std::vector<double> out(static_cast<std::size_t>(out_size));
  detail::Odometer odo(kept_dims, {kept_strides});
  for (std::int64_t i = 0; i < out_size; ++i) {
    out[static_cast<std::size_t>(i)] = t.data[static_cast<std::size_t>(base + odo.offset(0))];
    odo.next();
  }
  return LabeledTensor(std::move(kept_vars), std::move(kept_dims), std::move(out), t.scale);
}

void renormalize(LabeledTensor& t) {
  double max_abs = 0.0;
  for (double x : t.data) max_abs = std::max(max_abs, std::fabs(x));
  if (max_abs == 0.0) {
    t.scale = 0;
    return;
  }
  int k = 0;
  std::frexp(max_abs, &k);
  if (k == 0) return;
  // Per-entry ldexp: exact, and safe even when 2^-k itself would overflow.
  for (double& x : t.data) x = std::ldexp(x, -k);
  t.scale += k;
}

namespace {

struct AxisPlan {
  std::vector<std::int64_t> dims;
  std::vector<std::int64_t> a_strides;
  std::vector<std::int64_t> b_strides;
};

// Looks up each variable's axis in a tensor, 0-stride when absent.
void push_axis(AxisPlan& plan, VarId v, std::int64_t dim, const LabeledTensor& a,
               const std::vector<std::int64_t>& sa, const LabeledTensor& b,
               const std::vector<std::int64_t>& sb) {
  plan.dims.push_back(dim);
  auto ia = std::find(a.vars.begin(), a.vars.end(), v);
  plan.a_strides.push_back(ia == a.vars.end() ? 0 : sa[static_cast<std::size_t>(ia - a.vars.begin())]);
  auto ib = std::find(b.vars.begin(), b.vars.end(), v);
  plan.b_strides.push_back(ib == b.vars.end() ? 0 : sb[static_cast<std::size_t>(ib - b.vars.begin())]);
}

std::int64_t dim_of(VarId v, const LabeledTensor& a, const LabeledTensor& b,
                    const std::vector<std::int64_t>* dim_table) {
  auto ia = std::find(a.vars.begin(), a.vars.end(), v);
  std::int64_t da = ia == a.vars.end() ? -1 : a.dims[static_cast<std::size_t>(ia - a.vars.begin())];
  auto ib = std::find(b.vars.begin(), b.vars.end(), v);
  std::int64_t db = ib == b.vars.end() ? -1 : b.dims[static_cast<std::size_t>(ib - b.vars.begin())];
  if (da > 0 && db > 0 && da != db)
    throw ShapeError("variable " + std::to_string(v) + " has dimension " + std::to_string(da) +
                     " in one operand and " + std::to_string(db) + " in the other");
  if (da > 0) return da;
  if (db > 0) return db;
  if (dim_table && v >= 0 && static_cast<std::size_t>(v) < dim_table->size())
    return (*dim_table)[static_cast<std::size_t>(v)];
  throw ShapeError("no dimension known for output variable " + std::to_string(v));
}

template <typename Ops>
void contract_fill(const LabeledTensor& a, const LabeledTensor& b, const AxisPlan& out_plan,
                   const AxisPlan& elim_plan, std::int64_t out_size, std::int64_t elim_size,
                   std::vector<double>& out) {
  detail::Odometer out_odo(out_plan.dims, {out_plan.a_strides, out_plan.b_strides});
  for (std::int64_t i = 0; i < out_size; ++i) {
    std::int64_t ia = out_odo.offset(0), ib = out_odo.offset(1);
    detail::Odometer elim_odo(elim_plan.dims, {elim_plan.a_strides, elim_plan.b_strides});
    double acc = Ops::zero();
    for (std::int64_t k = 0; k < elim_size; ++k) {
      acc = Ops::add(acc, Ops::mul(a.data[static_cast<std::size_t>(ia + elim_odo.offset(0))],
                                   b.data[static_cast<std::size_t>(ib + elim_odo.offset(1))]));
      elim_odo.next();
    }
    out[static_cast<std::size_t>(i)] = acc;
    out_odo.next();
  }
}

}  // namespace

LabeledTensor contract_pair(Algebra alg, const LabeledTensor& a, const LabeledTensor& b,
                            std::span<const VarId> out_vars,
                            const std::vector<std::int64_t>* dim_table,
                            std::uint64_t* mul_counter) {
  std::vector<VarId> out_sorted(out_vars.begin(), out_vars.end());
  std::sort(out_sorted.begin(), out_sorted.end());
  if (std::adjacent_find(out_sorted.begin(), out_sorted.end()) != out_sorted.end())
    throw ShapeError("repeated variable in contraction output");

  std::vector<std::int64_t> sa = detail::strides_of(a.dims);
  std::vector<std::int64_t> sb = detail::strides_of(b.dims);

  AxisPlan out_plan;
  std::vector<std::int64_t> out_dims;
  for (VarId v : out_vars) {
    std::int64_t d = dim_of(v, a, b, dim_table);
    push_axis(out_plan, v, d, a, sa, b, sb);
    out_dims.push_back(d);
  }

  // Eliminated variables, ascending: their row-major enumeration fixes the
  // accumulation order of every output entry.
  AxisPlan elim_plan;
  for (VarId v : detail::sorted_union(a.vars, b.vars)) {
    if (detail::contains(out_sorted, v)) continue;
    push_axis(elim_plan, v, dim_of(v, a, b, nullptr), a, sa, b, sb);
  }

  std::int64_t out_size = detail::checked_product(out_plan.dims);
  std::int64_t elim_size = detail::checked_product(elim_plan.dims);
  if (mul_counter) *mul_counter += static_cast<std::uint64_t>(out_size * elim_size);

  std::vector<double> out(static_cast<std::size_t>(out_size));
  if (alg == Algebra::real) {
    contract_fill<RealOps>(a, b, out_plan, elim_plan, out_size, elim_size, out);
  } else {
    if (a.scale != 0 || b.scale != 0)
      throw ShapeError("tropical tensors must be unscaled");
    contract_fill<TropicalOps>(a, b, out_plan, elim_plan, out_size, elim_size, out);
  }

  LabeledTensor result(std::vector<VarId>(out_vars.begin(), out_vars.end()), std::move(out_dims),
                       std::move(out), alg == Algebra::real ? a.scale + b.scale : 0);
  if (alg == Algebra::real) renormalize(result);
  return result;
}

}  // namespace tinfer
