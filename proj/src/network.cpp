#include "tinfer/network.hpp"

#include <algorithm>

#include "detail.hpp"

namespace tinfer {

std::vector<VarId> TensorNetwork::present_vars() const {
  std::vector<VarId> all;
  for (const LabeledTensor& t : tensors) all.insert(all.end(), t.vars.begin(), t.vars.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return all;
}

void validate_network(const TensorNetwork& net) {
  if (net.num_vars < 0) throw ShapeError("negative variable count");
  if (static_cast<std::int64_t>(net.cards.size()) != net.num_vars)
    throw ShapeError("cardinality table size disagrees with variable count");
  for (std::int64_t c : net.cards)
    if (c < 1) throw ShapeError("variable cardinality must be positive");
  for (const LabeledTensor& t : net.tensors) {
    for (std::size_t ax = 0; ax < t.vars.size(); ++ax) {
      VarId v = t.vars[ax];
      if (v < 0 || v >= net.num_vars)
        throw ShapeError("tensor scope names unknown variable " + std::to_string(v));
      if (t.dims[ax] != net.cards[static_cast<std::size_t>(v)])
        throw ShapeError("tensor dimension disagrees with cardinality of variable " +
                         std::to_string(v));
    }
  }
  if (!std::is_sorted(net.output_vars.begin(), net.output_vars.end()) ||
      std::adjacent_find(net.output_vars.begin(), net.output_vars.end()) !=
          net.output_vars.end())
    throw ShapeError("output variables must be ascending and distinct");
  for (VarId v : net.output_vars)
    if (v < 0 || v >= net.num_vars)
      throw ShapeError("output set names unknown variable " + std::to_string(v));
}

TensorNetwork apply_evidence(const TensorNetwork& net, const Assignment& evidence) {
  for (const auto& [v, val] : evidence) {
    if (v < 0 || v >= net.num_vars)
      throw ShapeError("evidence names unknown variable " + std::to_string(v));
    if (val < 0 || val >= net.cards[static_cast<std::size_t>(v)])
      throw ShapeError("evidence value " + std::to_string(val) +
                       " out of range for variable " + std::to_string(v));
  }
  TensorNetwork out;
  out.num_vars = net.num_vars;
  out.cards = net.cards;
  out.tensors.reserve(net.tensors.size());
  for (const LabeledTensor& t : net.tensors) out.tensors.push_back(slice(t, evidence));
  for (VarId v : net.output_vars)
    if (!evidence.find(v)) out.output_vars.push_back(v);
  return out;
}

}  // namespace tinfer
