#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "kb/diagnostics.hpp"
#include "kb/flogic_ast.hpp"

namespace kb::flogic {

// Parses a whole source text. Total: on errors it reports diagnostics,
// skips to the next statement and keeps whatever parsed cleanly.
Program parse_program(std::string_view text, const std::string& file, Diagnostics& diags);

// Parses a source text that must contain exactly one query statement.
std::optional<Query> parse_query(std::string_view text, const std::string& file,
                                 Diagnostics& diags);

}  // namespace kb::flogic
