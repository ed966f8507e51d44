// The operations behind the command-line verbs, kept in the library so
// they can be driven in-process by tests: count, solve, models, corpus.
// Each returns the process exit code and writes to caller-supplied
// streams.
//
// Exit codes: 0 ok, 1 usage/IO, 2 parse, 3 semantic/grounding,
// 4 zero possible models, 5 corpus mismatch.
#pragma once

#include <iomanip>
#include <ostream>
#include <string>

#include <json.hpp>

#include "laplace/corpus.hpp"
#include "laplace/oracle.hpp"
#include "laplace/parser.hpp"
#include "laplace/probability.hpp"
#include "laplace/solver.hpp"

namespace laplace {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kUsageOrIo = 1;
inline constexpr int kParse = 2;
inline constexpr int kSemantic = 3;
inline constexpr int kZeroPossible = 4;
inline constexpr int kCorpusMismatch = 5;
}  // namespace exit_code

enum class OutputFormat { Text, Structured };

// "json", "structured" and "json-like-structured" are synonyms.
inline OutputFormat parse_output_format(std::string_view name) {
  if (name == "text") return OutputFormat::Text;
  if (name == "json" || name == "structured" || name == "json-like-structured")
    return OutputFormat::Structured;
  throw Error("unknown output format '" + std::string(name) + "'");
}

struct RunOptions {
  OutputFormat format = OutputFormat::Text;
  bool oracle = false;  // cross-check counts against the brute-force sweep
  OracleBudget budget;
};

namespace detail {

template <class Fn>
int run_guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const ParseFailed& e) {
    for (const ParseDiagnostic& d : e.diagnostics)
      err << e.origin << ":" << d.line << ":" << d.column << ": error: " << d.message << "\n";
    return exit_code::kParse;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kUsageOrIo;
  } catch (const ZeroPossibleModels& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kZeroPossible;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kSemantic;
  }
}

inline nlohmann::ordered_json probability_json(const PuzzleOutcome& o) {
  return {{"num", o.probability.num},
          {"den", o.probability.den},
          {"raw_num", o.favorable.count},
          {"raw_den", o.possible.count},
          {"decimal", o.decimal}};
}

inline nlohmann::ordered_json oracle_json(const OracleCheck& oc) {
  nlohmann::ordered_json j{{"attempted", oc.attempted}, {"agreed", oc.agreed}};
  if (oc.attempted) j["count"] = oc.count;
  return j;
}

inline std::string cell_label(const TableLayout& lay, size_t cell) {
  auto [sym, args] = lay.decode(cell);
  std::string label = lay.symbols[static_cast<size_t>(sym)].name;
  if (!args.empty()) {
    label += '(';
    for (size_t i = 0; i < args.size(); ++i) {
      if (i) label += ',';
      label += std::to_string(args[i]);
    }
    label += ')';
  }
  return label;
}

}  // namespace detail

// ------------------------------------------------------------- count

inline int run_count(const std::string& path, const RunOptions& opts, std::ostream& out,
                     std::ostream& err) {
  return detail::run_guarded(err, [&] {
    Theory th = load_theory_file(path);
    ModelCount mc = count_models(th);

    OracleCheck oc;
    if (opts.oracle) oc = detail::oracle_check(th, mc.count, opts.budget);

    if (opts.format == OutputFormat::Structured) {
      nlohmann::ordered_json j{{"count", mc.count}, {"exhausted", mc.exhausted}};
      if (opts.oracle) j["oracle"] = detail::oracle_json(oc);
      out << j.dump(2) << "\n";
    } else {
      out << mc.count;
      if (!mc.exhausted) out << " (stopped at the max_models limit)";
      out << "\n";
      if (opts.oracle) out << "oracle cross-check: " << oc.describe() << "\n";
    }
    if (opts.oracle && oc.attempted && !oc.agreed) {
      err << "error: solver and oracle disagree on the model count\n";
      return exit_code::kSemantic;
    }
    return exit_code::kOk;
  });
}

// ------------------------------------------------------------- solve

inline int run_solve(const std::string& possible_path, const std::string& favorable_path,
                     const RunOptions& opts, std::ostream& out, std::ostream& err) {
  return detail::run_guarded(err, [&] {
    Theory possible = load_theory_file(possible_path);
    Theory favorable = load_theory_file(favorable_path);
    PuzzleOutcome o = solve_puzzle(possible, favorable);

    OracleCheck oc_possible, oc_favorable;
    if (opts.oracle) {
      oc_possible = detail::oracle_check(possible, o.possible.count, opts.budget);
      oc_favorable =
          detail::oracle_check(merge_theories(possible, favorable), o.favorable.count, opts.budget);
    }

    if (opts.format == OutputFormat::Structured) {
      nlohmann::ordered_json j{{"possible", o.possible.count},
                               {"favorable", o.favorable.count},
                               {"probability", detail::probability_json(o)}};
      if (opts.oracle)
        j["oracle"] = {{"possible", detail::oracle_json(oc_possible)},
                       {"favorable", detail::oracle_json(oc_favorable)}};
      out << j.dump(2) << "\n";
    } else {
      out << "possible models:  " << o.possible.count << "\n";
      out << "favorable models: " << o.favorable.count << "\n";
      out << "probability: " << o.favorable.count << " / " << o.possible.count << " = "
          << o.probability.num << "/" << o.probability.den << " ≈ " << o.decimal << "\n";
      if (opts.oracle)
        out << "oracle cross-check: possible " << oc_possible.describe() << ", favorable "
            << oc_favorable.describe() << "\n";
    }
    if (opts.oracle && (!oc_possible.agreed || !oc_favorable.agreed)) {
      err << "error: solver and oracle disagree on a model count\n";
      return exit_code::kSemantic;
    }
    return exit_code::kOk;
  });
}

// ------------------------------------------------------------- models

inline int run_models(const std::string& path, long long limit, const RunOptions& opts,
                      std::ostream& out, std::ostream& err) {
  return detail::run_guarded(err, [&] {
    Theory th = load_theory_file(path);
    // Fetch one extra model so truncation can be reported.
    std::vector<Interpretation> models =
        enumerate_models(th, limit < 0 ? kNoLimit : limit + 1);
    bool truncated = limit >= 0 && models.size() > static_cast<size_t>(limit);
    if (truncated) models.resize(static_cast<size_t>(limit));

    auto layout = TableLayout::make(th.signature, th.required_domain_size());
    std::vector<std::string> labels;
    labels.reserve(layout->total_cells);
    for (size_t c = 0; c < layout->total_cells; ++c)
      labels.push_back(detail::cell_label(*layout, c));

    if (opts.format == OutputFormat::Structured) {
      nlohmann::ordered_json j;
      j["cells"] = labels;
      auto rows = nlohmann::ordered_json::array();
      for (const Interpretation& m : models) rows.push_back(m.cells);
      j["models"] = std::move(rows);
      j["truncated"] = truncated;
      out << j.dump(2) << "\n";
    } else {
      out << "% cells:";
      for (const std::string& l : labels) out << ' ' << l;
      out << "\n";
      for (const Interpretation& m : models) {
        for (size_t c = 0; c < m.cells.size(); ++c) out << (c ? " " : "") << m.cells[c];
        out << "\n";
      }
      out << "% " << models.size() << " model" << (models.size() == 1 ? "" : "s");
      if (truncated) out << " (truncated at --limit " << limit << ")";
      out << "\n";
    }
    return exit_code::kOk;
  });
}

// ------------------------------------------------------------- corpus

inline nlohmann::ordered_json report_json(const RunReport& report) {
  auto arr = nlohmann::ordered_json::array();
  for (const CaseResult& c : report.cases) {
    nlohmann::ordered_json j{
        {"case", c.name},
        {"possible", c.possible.count},
        {"favorable", c.favorable.count},
        {"probability",
         {{"num", c.probability.num},
          {"den", c.probability.den},
          {"raw_num", c.favorable.count},
          {"raw_den", c.possible.count},
          {"decimal", c.decimal}}},
        {"elapsed_ms", c.elapsed_ms},
        {"pass", c.pass}};
    j["expected"] = {{"possible", c.expected_possible}, {"favorable", c.expected_favorable}};
    if (c.alt_favorable) j["favorable_improved"] = *c.alt_favorable;
    j["oracle"] = {{"possible", detail::oracle_json(c.oracle_possible)},
                   {"favorable", detail::oracle_json(c.oracle_favorable)}};
    if (!c.pass) j["failure"] = c.failure;
    arr.push_back(std::move(j));
  }
  return arr;
}

inline int run_corpus(const CorpusOptions& corpus_opts, OutputFormat format, std::ostream& out,
                      std::ostream& err) {
  return detail::run_guarded(err, [&] {
    RunReport report = run_corpus_cases(corpus_opts);

    if (format == OutputFormat::Structured) {
      out << report_json(report).dump(2) << "\n";
    } else {
      size_t passed = 0;
      for (const CaseResult& c : report.cases) {
        out << c.name << ": possible " << c.possible.count << "/" << c.expected_possible
            << ", favorable " << c.favorable.count << "/" << c.expected_favorable
            << ", probability " << c.probability.num << "/" << c.probability.den << " ≈ "
            << c.decimal << " — " << (c.pass ? "PASS" : "FAIL") << " [" << std::fixed
            << std::setprecision(1) << c.elapsed_ms << " ms]\n";
        out.unsetf(std::ios_base::floatfield);
        if (c.alt_favorable)
          out << "  improved encoding favorable: " << *c.alt_favorable << "\n";
        if (corpus_opts.cross_check)
          out << "  oracle: possible " << c.oracle_possible.describe() << ", favorable "
              << c.oracle_favorable.describe() << "\n";
        if (!c.pass) out << "  FAIL: " << c.failure << "\n";
        if (c.pass) ++passed;
      }
      out << passed << "/" << report.cases.size() << " cases pass\n";
    }
    return report.all_pass ? exit_code::kOk : exit_code::kCorpusMismatch;
  });
}

}  // namespace laplace
