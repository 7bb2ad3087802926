#include "ccall/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ccall/bridges.hpp"
#include "ccall/engine.hpp"
#include "ccall/error.hpp"
#include "ccall/oracle.hpp"
#include "ccall/syntax.hpp"

namespace ccall {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (config.gen && !config.input_path.empty()) {
      throw Error("--gen and an input file are mutually exclusive");
    }
    if (!config.gen && config.input_path.empty()) {
      throw Error("no input: give a program file or --gen=<kind>:<size>");
    }
    if (config.translate_only && !config.query.empty()) {
      throw Error("--translate-only does not run queries");
    }
    const std::string text =
        config.gen ? gen_fixture(config.gen->kind, config.gen->size)
                   : read_file(config.input_path);

    std::vector<Diagnostic> warnings;
    Program source = parse_program(text, &warnings);
    Program marked = with_computed_bridges(source);
    if (config.show_bridges) {
      for (const auto& b : marked.bridges) out << b.str() << "\n";
    }

    Program translated = translate(marked, config.mode, &warnings);
    for (const auto& w : warnings) err << "warning: " << w.str() << "\n";
    if (config.translate_only) {
      out << print_program(translated);
      return kExitOk;
    }
    if (config.query.empty()) {
      if (config.show_bridges) return kExitOk;
      throw Error("no query given (use --query=<goal>)");
    }

    Term goal = parse_term(config.query);
    Engine engine(translated, {.mode = config.mode, .max_steps = config.depth});
    const Counters before = engine.counters();
    std::vector<Term> answers;
    {
      auto q = engine.query(goal);
      while (auto a = q.next()) {
        out << print_term(*a, {.compact = true}) << "\n";
        answers.push_back(std::move(*a));
      }
    }
    if (config.stats) out << (engine.counters() - before) << "\n";

    if (config.oracle_check) {
      GroundFactStore facts = bottom_up_eval(source);
      AnswerComparison cmp = compare_answer_sets(answers, facts, goal);
      if (cmp.equal) {
        out << "OK\n";
      } else {
        for (const auto& t : cmp.missing) {
          out << "missing: " << print_term(t, {.compact = true}) << "\n";
        }
        for (const auto& t : cmp.extra) {
          out << "extra: " << print_term(t, {.compact = true}) << "\n";
        }
        return kExitMismatch;
      }
    }
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Continuation-call tabling for a Prolog subset"};
  RunConfig config;
  std::string mode = "general";
  std::string gen;
  app.add_option("file", config.input_path, "Program file");
  app.add_option("--query", config.query, "Goal to run, e.g. \"path(1, X)\"");
  app.add_option("--mode", mode, "Translation mode")
      ->check(CLI::IsMember({"general", "legacy"}));
  app.add_flag("--translate-only", config.translate_only,
               "Print the translated program and stop");
  app.add_flag("--show-bridges", config.show_bridges,
               "Print declared and computed bridge predicates");
  app.add_flag("--stats", config.stats, "Print tabling counters");
  app.add_flag("--oracle-check", config.oracle_check,
               "Compare the answers with bottom-up evaluation");
  app.add_option("--depth", config.depth, "Resolution step budget")
      ->check(CLI::PositiveNumber);
  app.add_option("--gen", gen, "Generate a fixture: chain|cycle|grid:<size>");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }
  config.mode =
      mode == "legacy" ? TranslationMode::Legacy : TranslationMode::General;
  if (!gen.empty()) {
    auto colon = gen.find(':');
    std::optional<FixtureKind> kind =
        colon == std::string::npos ? std::nullopt
                                   : parse_fixture_kind(gen.substr(0, colon));
    int size = 0;
    try {
      if (kind) size = std::stoi(gen.substr(colon + 1));
    } catch (const std::exception&) {
      kind.reset();
    }
    if (!kind || size < 1) {
      err << "error: --gen expects <chain|cycle|grid>:<positive size>, got "
          << gen << "\n";
      return kExitError;
    }
    config.gen = FixtureSpec{*kind, size};
  }
  return run(config, out, err);
}

}  // namespace ccall
