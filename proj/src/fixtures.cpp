#include "ccall/fixtures.hpp"

#include <stdexcept>

namespace ccall {

std::optional<FixtureKind> parse_fixture_kind(std::string_view name) {
  if (name == "chain") return FixtureKind::Chain;
  if (name == "cycle") return FixtureKind::Cycle;
  if (name == "grid") return FixtureKind::Grid;
  return std::nullopt;
}

const char* to_string(FixtureKind kind) {
  switch (kind) {
    case FixtureKind::Chain:
      return "chain";
    case FixtureKind::Cycle:
      return "cycle";
    case FixtureKind::Grid:
      return "grid";
  }
  return "?";
}

std::string gen_fixture(FixtureKind kind, int size) {
  if (size < 1) throw std::invalid_argument("fixture size must be at least 1");
  std::string out =
      ":- table path/2.\n"
      "\n"
      "path(X, Z) :-\n"
      "    edge(X, Y),\n"
      "    path(Y, Z).\n"
      "path(X, Z) :-\n"
      "    edge(X, Z).\n"
      "\n";
  auto edge = [&](long a, long b) {
    out += "edge(" + std::to_string(a) + ", " + std::to_string(b) + ").\n";
  };
  switch (kind) {
    case FixtureKind::Chain:
    case FixtureKind::Cycle:
      for (long i = 1; i <= size; ++i) edge(i, i + 1);
      if (kind == FixtureKind::Cycle) edge(size + 1, 1);
      break;
    case FixtureKind::Grid:
      for (long r = 0; r < size; ++r) {
        for (long c = 0; c < size; ++c) {
          long node = r * size + c + 1;
          if (c + 1 < size) edge(node, node + 1);
          if (r + 1 < size) edge(node, node + size);
        }
      }
      break;
  }
  return out;
}

}  // namespace ccall
