#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace atlas::text {

/// Lowercase word tokens. A word is a maximal run of ASCII letters, digits
/// or non-ASCII bytes (so UTF-8 sequences stay inside words).
std::vector<std::string> tokenize(std::string_view input);

/// Lowercase, punctuation removed, whitespace collapsed and trimmed.
std::string normalize_title(std::string_view title);

/// True when `needle` occurs in `haystack` as a contiguous token run.
bool contains_token_sequence(const std::vector<std::string>& haystack,
                             const std::vector<std::string>& needle);

std::string to_lower(std::string_view input);

std::string sha256_hex(std::string_view input);

}  // namespace atlas::text
