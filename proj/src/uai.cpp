#include "tinfer/uai.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace tinfer {

namespace {

constexpr std::int64_t kMaxCount = 1000000;       // vars, factors, cardinality
constexpr std::int64_t kMaxTableEntries = 100000000;

struct TokenStream {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;

  explicit TokenStream(std::string_view text) {
    std::size_t i = 0;
    while (i < text.size()) {
      while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
      std::size_t start = i;
      while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
      if (i > start) tokens.push_back(text.substr(start, i - start));
    }
  }

  bool done() const { return pos >= tokens.size(); }

  std::string_view take(const std::string& what) {
    if (done()) throw ParseError("unexpected end of input while reading " + what, pos);
    return tokens[pos++];
  }

  std::int64_t take_int(const std::string& what, std::int64_t lo, std::int64_t hi) {
    std::string_view tok = take(what);
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
      throw ParseError("expected " + what + ", got '" + std::string(tok) + "'", pos - 1);
    if (v < lo || v > hi)
      throw ParseError(what + " " + std::to_string(v) + " out of range [" + std::to_string(lo) +
                           ", " + std::to_string(hi) + "]",
                       pos - 1);
    return v;
  }

  double take_real(const std::string& what) {
    std::string_view tok = take(what);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
      throw ParseError("expected " + what + ", got '" + std::string(tok) + "'", pos - 1);
    return v;
  }

  void expect_done() {
    if (!done())
      throw ParseError("trailing content '" + std::string(tokens[pos]) + "'", pos);
  }
};

}  // namespace

ModelSpec parse_model(std::string_view text) {
  TokenStream ts(text);
  ModelSpec model;

  std::string_view header = ts.take("network kind");
  if (header == "MARKOV") {
    model.kind = ModelSpec::Kind::markov;
  } else if (header == "BAYES") {
    model.kind = ModelSpec::Kind::bayes;
  } else {
    throw ParseError("unknown header '" + std::string(header) + "'", ts.pos - 1);
  }

  model.num_vars = ts.take_int("variable count", 0, kMaxCount);
  model.cards.reserve(static_cast<std::size_t>(model.num_vars));
  for (std::int64_t i = 0; i < model.num_vars; ++i)
    model.cards.push_back(ts.take_int("cardinality of variable " + std::to_string(i), 1, kMaxCount));

  std::int64_t num_factors = ts.take_int("factor count", 0, kMaxCount);
  model.scopes.reserve(static_cast<std::size_t>(num_factors));
  for (std::int64_t f = 0; f < num_factors; ++f) {
    std::int64_t arity = ts.take_int("scope size of factor " + std::to_string(f), 0, model.num_vars);
    std::vector<VarId> scope;
    std::set<VarId> seen;
    for (std::int64_t i = 0; i < arity; ++i) {
      std::int64_t v = ts.take_int("variable id in factor " + std::to_string(f), 0,
                                   model.num_vars - 1);
      if (!seen.insert(static_cast<VarId>(v)).second)
        throw ParseError("repeated variable " + std::to_string(v) + " in factor " +
                             std::to_string(f),
                         ts.pos - 1);
      scope.push_back(static_cast<VarId>(v));
    }
    model.scopes.push_back(std::move(scope));
  }

  model.tables.reserve(static_cast<std::size_t>(num_factors));
  for (std::int64_t f = 0; f < num_factors; ++f) {
    std::int64_t expected = 1;
    for (VarId v : model.scopes[static_cast<std::size_t>(f)]) {
      std::int64_t card = model.cards[static_cast<std::size_t>(v)];
      if (expected > kMaxTableEntries / card)
        throw ParseError("table of factor " + std::to_string(f) + " too large", ts.pos);
      expected *= card;
    }
    std::int64_t count = ts.take_int("table entry count of factor " + std::to_string(f), 0,
                                     kMaxTableEntries);
    if (count != expected)
      throw ParseError("table of factor " + std::to_string(f) + " declares " +
                           std::to_string(count) + " entries, scope implies " +
                           std::to_string(expected),
                       ts.pos - 1);
    std::vector<double> table;
    // Trust the declared count only up to a page's worth; growth handles the rest.
    table.reserve(static_cast<std::size_t>(std::min<std::int64_t>(count, 1 << 16)));
    for (std::int64_t i = 0; i < count; ++i) {
      double x = ts.take_real("table entry of factor " + std::to_string(f));
      if (std::isnan(x) || std::isinf(x))
        throw ParseError("non-finite table entry in factor " + std::to_string(f), ts.pos - 1);
      if (x < 0.0)
        throw ParseError("negative table entry in factor " + std::to_string(f), ts.pos - 1);
      table.push_back(x);
    }
    model.tables.push_back(std::move(table));
  }

  ts.expect_done();
  return model;
}

Assignment parse_evidence(std::string_view text, const ModelSpec& model) {
  TokenStream ts(text);
  std::int64_t k = ts.take_int("evidence count", 0, kMaxCount);
  Assignment ev;
  for (std::int64_t i = 0; i < k; ++i) {
    std::int64_t v = ts.take_int("evidence variable id", 0, model.num_vars - 1);
    if (ev.find(static_cast<VarId>(v)))
      throw ParseError("repeated variable " + std::to_string(v) + " in evidence", ts.pos - 1);
    std::int64_t val = ts.take_int("evidence value for variable " + std::to_string(v), 0,
                                   model.cards[static_cast<std::size_t>(v)] - 1);
    ev.set(static_cast<VarId>(v), val);
  }
  ts.expect_done();
  return ev;
}

std::vector<VarId> parse_query(std::string_view text, const ModelSpec& model) {
  TokenStream ts(text);
  std::int64_t k = ts.take_int("query count", 0, kMaxCount);
  std::vector<VarId> query;
  std::set<VarId> seen;
  for (std::int64_t i = 0; i < k; ++i) {
    std::int64_t v = ts.take_int("query variable id", 0, model.num_vars - 1);
    if (!seen.insert(static_cast<VarId>(v)).second)
      throw ParseError("repeated variable " + std::to_string(v) + " in query", ts.pos - 1);
    query.push_back(static_cast<VarId>(v));
  }
  ts.expect_done();
  return query;
}

std::string serialize_model(const ModelSpec& model) {
  std::ostringstream out;
  out << (model.kind == ModelSpec::Kind::bayes ? "BAYES" : "MARKOV") << "\n";
  out << model.num_vars << "\n";
  for (std::size_t i = 0; i < model.cards.size(); ++i)
    out << (i ? " " : "") << model.cards[i];
  out << "\n" << model.scopes.size() << "\n";
  for (const auto& scope : model.scopes) {
    out << scope.size();
    for (VarId v : scope) out << " " << v;
    out << "\n";
  }
  char buf[64];
  for (const auto& table : model.tables) {
    out << "\n" << table.size() << "\n";
    for (std::size_t i = 0; i < table.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", table[i]);
      out << (i ? " " : "") << buf;
    }
    out << "\n";
  }
  return out.str();
}

TensorNetwork build_network(const ModelSpec& model) {
  TensorNetwork net;
  net.num_vars = model.num_vars;
  net.cards = model.cards;
  net.tensors.reserve(model.scopes.size());
  for (std::size_t f = 0; f < model.scopes.size(); ++f) {
    std::vector<std::int64_t> dims;
    dims.reserve(model.scopes[f].size());
    for (VarId v : model.scopes[f]) dims.push_back(model.cards[static_cast<std::size_t>(v)]);
    net.tensors.emplace_back(model.scopes[f], std::move(dims), model.tables[f]);
  }
  validate_network(net);
  return net;
}

namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

std::string format_pr(const ScaledReal& p) { return "PR\n" + fixed6(p.log10()) + "\n"; }

std::string format_mar(const MarginalTable& table) {
  std::string out = "MAR\n" + std::to_string(table.queries.size());
  for (std::size_t q = 0; q < table.queries.size(); ++q) {
    if (table.queries[q].size() != 1)
      throw ShapeError("marginal result files hold single-variable marginals");
    out += " " + std::to_string(table.probs[q].size());
    for (double p : table.probs[q].data) out += " " + fixed6(p);
  }
  out += "\n";
  return out;
}

std::string format_assignment(const std::string& task, const MpeSolution& sol) {
  std::string out = task + "\n" + std::to_string(sol.assignment.size());
  for (const auto& [var, val] : sol.assignment) out += " " + std::to_string(val);
  out += "\n";
  return out;
}

std::string format_samples(const SampleBatch& batch) {
  std::string out;
  for (const auto& row : batch.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += " ";
      out += std::to_string(row[i]);
    }
    out += "\n";
  }
  return out;
}

}  // namespace tinfer
