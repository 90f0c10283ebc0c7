#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "entlen/spin_model.hpp"

namespace entlen {

// Model description files are JSON objects:
//
//   { "family": "tfi", "params": {"coupling": 1.0, "field": 1.0},
//     "sites": 8, "seed": 0, "local_dim": 2 }
//
// Family "explicit" additionally carries "range" and "terms", each term being
// {"support": [i, ...], "data": [[re, im], ...]} in row-major order.
// See docs/model_format.md.

/// Sorted keys, two-space indent, shortest round-trip doubles.
std::string to_canonical_json(const ModelSpec& spec);

/// Throws ConfigError on malformed input.
ModelSpec parse_model_spec(std::string_view text);
ModelSpec load_model_file(const std::filesystem::path& path);

/// Explicit-family description reproducing `ia` term by term.
ModelSpec explicit_spec(const Interaction& ia);

/// FNV-1a 64-bit hash as 16 hex digits.
std::string fnv1a_hex(std::string_view text);

}  // namespace entlen
