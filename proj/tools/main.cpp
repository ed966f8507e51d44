// laplace — solves probability puzzles by exact finite-model counting.
//
//   laplace count <theory.in>
//   laplace solve --possible <all.in> --favorable <fav.in>
//   laplace models <theory.in> [--limit N]
//   laplace corpus [--dir corpus]

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "laplace/cli.hpp"

namespace {

struct FormatOption {
  std::string name = "text";

  laplace::OutputFormat value() const { return laplace::parse_output_format(name); }
};

void add_format_flag(CLI::App* cmd, FormatOption& fmt) {
  cmd->add_option("--format", fmt.name, "Output format")
      ->check(CLI::IsMember({"text", "json", "structured", "json-like-structured"}))
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Solves probability puzzles by exact finite-model counting over bounded domains"};
  app.require_subcommand(1);

  FormatOption fmt;
  bool oracle = false;
  unsigned long long budget = laplace::OracleBudget{}.max_assignments;

  std::string count_path;
  CLI::App* count = app.add_subcommand("count", "Count all models of a theory file");
  count->add_option("file", count_path, "Theory file")->required();
  count->add_flag("--oracle", oracle, "Cross-check the count with the brute-force oracle");
  count->add_option("--oracle-budget", budget, "Assignment-space cap for the oracle");
  add_format_flag(count, fmt);

  std::string possible_path, favorable_path;
  CLI::App* solve =
      app.add_subcommand("solve", "Count possible and favorable models and report the ratio");
  solve->add_option("--possible", possible_path, "Theory of all possible models")->required();
  solve->add_option("--favorable", favorable_path, "Favorable constraints to merge on top")
      ->required();
  solve->add_flag("--oracle", oracle, "Cross-check both counts with the brute-force oracle");
  solve->add_option("--oracle-budget", budget, "Assignment-space cap for the oracle");
  add_format_flag(solve, fmt);

  std::string models_path;
  long long limit = -1;
  CLI::App* models = app.add_subcommand("models", "List models, one line of cell values each");
  models->add_option("file", models_path, "Theory file")->required();
  models->add_option("--limit", limit, "Stop after this many models (-1 = all)");
  add_format_flag(models, fmt);

  laplace::CorpusOptions corpus_opts;
  CLI::App* corpus =
      app.add_subcommand("corpus", "Run the bundled puzzle corpus against its published counts");
  corpus->add_option("--dir", corpus_opts.dir, "Corpus directory")->capture_default_str();
  corpus->add_flag("--oracle,!--no-oracle", corpus_opts.cross_check,
                   "Cross-check each case with the brute-force oracle (default on)");
  corpus->add_option("--oracle-budget", budget, "Assignment-space cap for the oracle");
  add_format_flag(corpus, fmt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : laplace::exit_code::kUsageOrIo;
  }

  laplace::RunOptions opts;
  try {
    opts.format = fmt.value();
  } catch (const laplace::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return laplace::exit_code::kUsageOrIo;
  }
  opts.oracle = oracle;
  opts.budget.max_assignments = budget;
  corpus_opts.budget.max_assignments = budget;

  if (count->parsed()) return laplace::run_count(count_path, opts, std::cout, std::cerr);
  if (solve->parsed())
    return laplace::run_solve(possible_path, favorable_path, opts, std::cout, std::cerr);
  if (models->parsed()) return laplace::run_models(models_path, limit, opts, std::cout, std::cerr);
  return laplace::run_corpus(corpus_opts, opts.format, std::cout, std::cerr);
}
