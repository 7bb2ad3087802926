#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace ccall {

enum class FixtureKind { Chain, Cycle, Grid };

std::optional<FixtureKind> parse_fixture_kind(std::string_view name);
const char* to_string(FixtureKind kind);

/// Program text: the right-recursive tabled `path/2` rules followed by
/// `edge/2` facts over integer nodes.
///   chain n: i -> i+1 for i in 1..n (n+1 nodes)
///   cycle n: chain n plus n+1 -> 1
///   grid n:  n x n lattice, node (r, c) numbered r*n + c + 1, edges to the
///            right and down neighbours
/// Throws std::invalid_argument when size < 1.
std::string gen_fixture(FixtureKind kind, int size);

}  // namespace ccall
