#pragma once

// Command-line front end. Subcommands: simulate, integrate, persist, predict,
// validate, enumerate. Exit status: 0 success, 1 failed check, 2 bad
// configuration (reported as "file:line: message" when a file is involved).

#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"

namespace eulerfield::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfig = 2;

int run(int argc, char** argv);

/// Parses JSON text; a syntax error becomes ConfigError carrying the line.
nlohmann::json parse_config_text(const std::string& text);

/// 1-based line of the first occurrence of "key" in `text`, or 0.
int line_of_key(const std::string& text, const std::string& key);

/// Seed precedence: --seed flag, then EULERFIELD_SEED, then the config value.
std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, std::uint64_t from_config);

}  // namespace eulerfield::cli
