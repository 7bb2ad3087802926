#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "ccall/fixtures.hpp"
#include "ccall/translate.hpp"

namespace ccall {

struct FixtureSpec {
  FixtureKind kind;
  int size;
};

struct RunConfig {
  std::string input_path;  // empty when a fixture is generated
  std::string query;       // empty: no query is run
  TranslationMode mode = TranslationMode::General;
  bool show_bridges = false;
  bool translate_only = false;
  bool stats = false;
  bool oracle_check = false;
  std::uint64_t depth = 10'000'000;
  std::optional<FixtureSpec> gen;
};

enum ExitStatus : int { kExitOk = 0, kExitMismatch = 1, kExitError = 2 };

/// Load, analyse, translate and run one query. Answers go to `out` one per
/// line in table order, followed by the stats line and the oracle verdict
/// when requested. Diagnostics go to `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses command-line flags into a RunConfig and runs it.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace ccall
