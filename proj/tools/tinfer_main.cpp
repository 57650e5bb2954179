#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "tinfer/contraction_order.hpp"
#include "tinfer/tasks.hpp"
#include "tinfer/uai.hpp"

namespace {

struct RunConfig {
  std::string model_path;
  std::string evidence_path;
  std::string query_path;
  std::string output_path;
  std::int64_t num_samples = 1;
  std::uint64_t seed = 0;
  std::string order = "greedy";
  double space_cap = 28.0;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw tinfer::InferenceError(tinfer::ErrorCategory::parse, "cannot read file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const RunConfig& cfg, const std::string& text) {
  if (cfg.output_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(cfg.output_path, std::ios::binary);
  if (!out)
    throw tinfer::InferenceError(tinfer::ErrorCategory::parse,
                                 "cannot write file " + cfg.output_path);
  out << text;
}

tinfer::TaskOptions task_options(const RunConfig& cfg) {
  tinfer::TaskOptions opts;
  opts.order = cfg.order == "exhaustive" ? tinfer::OrderStrategy::exhaustive
                                         : tinfer::OrderStrategy::greedy;
  opts.space_cap = cfg.space_cap;
  return opts;
}

struct LoadedModel {
  tinfer::ModelSpec spec;
  tinfer::TensorNetwork net;
  tinfer::Assignment evidence;
};

LoadedModel load(const RunConfig& cfg) {
  LoadedModel m;
  m.spec = tinfer::parse_model(read_file(cfg.model_path));
  m.net = tinfer::build_network(m.spec);
  if (!cfg.evidence_path.empty())
    m.evidence = tinfer::parse_evidence(read_file(cfg.evidence_path), m.spec);
  return m;
}

int run(const std::string& task, const RunConfig& cfg) {
  LoadedModel m = load(cfg);
  tinfer::TaskOptions opts = task_options(cfg);

  if (task == "pr") {
    write_output(cfg, tinfer::format_pr(tinfer::compute_pr(m.net, m.evidence, opts)));
  } else if (task == "mar") {
    write_output(cfg, tinfer::format_mar(tinfer::compute_mar(m.net, m.evidence, {}, opts)));
  } else if (task == "mpe") {
    write_output(cfg,
                 tinfer::format_assignment("MPE", tinfer::compute_mpe(m.net, m.evidence, opts)));
  } else if (task == "mmap") {
    std::vector<tinfer::VarId> query = tinfer::parse_query(read_file(cfg.query_path), m.spec);
    write_output(cfg, tinfer::format_assignment(
                          "MMAP", tinfer::compute_mmap(m.net, m.evidence, query, opts)));
  } else if (task == "sample") {
    write_output(cfg, tinfer::format_samples(
                          tinfer::draw_samples(m.net, m.evidence, cfg.num_samples, cfg.seed, opts)));
  } else {  // stats
    tinfer::TensorNetwork sliced = tinfer::apply_evidence(m.net, m.evidence);
    tinfer::ContractionTree tree = opts.order == tinfer::OrderStrategy::exhaustive
                                       ? tinfer::exhaustive_order(sliced)
                                       : tinfer::greedy_order(sliced);
    tinfer::ComplexityReport rep = tinfer::complexity_report(sliced, tree);
    char line[96];
    std::snprintf(line, sizeof(line), "space=%.1f time=%.1f rw=%.1f\n", rep.space, rep.time,
                  rep.rw);
    write_output(cfg, line);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact inference on discrete graphical models by tensor network contraction"};
  app.require_subcommand(1);

  RunConfig cfg;
  const char* const task_names[] = {"pr", "mar", "mpe", "mmap", "sample", "stats"};
  const char* const task_blurbs[] = {
      "Probability of evidence (log10)",
      "Posterior marginal of every unobserved variable",
      "Most probable explanation",
      "Marginal MAP over a query set",
      "Draw exact posterior samples",
      "Report contraction complexity without running inference"};

  for (int i = 0; i < 6; ++i) {
    CLI::App* sub = app.add_subcommand(task_names[i], task_blurbs[i]);
    sub->add_option("--model,-m", cfg.model_path, "model file (UAI format)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--evidence,-e", cfg.evidence_path, "evidence file")
        ->check(CLI::ExistingFile);
    sub->add_option("--order", cfg.order, "contraction order strategy")
        ->check(CLI::IsMember({"greedy", "exhaustive"}))
        ->capture_default_str();
    sub->add_option("--space-cap", cfg.space_cap,
                    "refuse plans whose largest tensor exceeds 2^cap elements")
        ->capture_default_str();
    sub->add_option("--output,-o", cfg.output_path, "result file (default stdout)");
    if (std::string(task_names[i]) == "mmap")
      sub->add_option("--query,-q", cfg.query_path, "query variable file")
          ->required()
          ->check(CLI::ExistingFile);
    if (std::string(task_names[i]) == "sample") {
      sub->add_option("--num-samples,-n", cfg.num_samples, "number of samples")
          ->check(CLI::PositiveNumber)
          ->capture_default_str();
      sub->add_option("--seed,-s", cfg.seed, "RNG seed")->capture_default_str();
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    return run(app.get_subcommands().front()->get_name(), cfg);
  } catch (const tinfer::InferenceError& e) {
    std::cerr << tinfer::category_name(e.category()) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
