#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tinfer/network.hpp"
#include "tinfer/tasks.hpp"

namespace tinfer {

// A discrete graphical model in UAI form: preamble (kind, cardinalities,
// factor scopes) plus one row-major table per factor. BAYES and MARKOV load
// identically; the header only records which keyword the file used.
struct ModelSpec {
  enum class Kind { markov, bayes };
  Kind kind = Kind::markov;
  std::int64_t num_vars = 0;
  std::vector<std::int64_t> cards;
  std::vector<std::vector<VarId>> scopes;
  std::vector<std::vector<double>> tables;
};

// Whitespace-agnostic token parsers. All failures throw ParseError carrying
// the offending token's index; no input crashes them.
ModelSpec parse_model(std::string_view text);
Assignment parse_evidence(std::string_view text, const ModelSpec& model);
std::vector<VarId> parse_query(std::string_view text, const ModelSpec& model);

// Inverse of parse_model up to whitespace.
std::string serialize_model(const ModelSpec& model);

// One tensor per factor, scope order preserved, empty output set.
TensorNetwork build_network(const ModelSpec& model);

// Result-file renderers. Each returns the full text including the trailing
// newline.
std::string format_pr(const ScaledReal& p);
std::string format_mar(const MarginalTable& table);        // singleton queries only
std::string format_assignment(const std::string& task, const MpeSolution& sol);
std::string format_samples(const SampleBatch& batch);

}  // namespace tinfer
