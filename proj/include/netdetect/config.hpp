#pragma once

// Flat TOML-style documents: `key = value` lines grouped under optional `[section]`
// headers, one level deep. Values are JSON literals (numbers, booleans, quoted strings,
// arrays, possibly spanning lines); anything else is kept as a bare string, so
// `b = none` and `T_E = inf` read naturally.

#include "netdetect/io.hpp"

#include <string>

namespace netdetect {

/// Returns {"section": {"key": value}}; top-level keys live under "".
Json parse_config(const std::string& text);

std::string render_config(const Json& doc);

/// Interprets a command-line value with the same literal rules as the parser.
Json parse_config_value(const std::string& text);

}  // namespace netdetect
