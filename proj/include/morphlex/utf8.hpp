#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// Code-point-aware helpers. Strings stay UTF-8 encoded; only the positions at
// which they are cut are restricted to character boundaries.
namespace morphlex::utf8 {

/// Byte offsets at which each code point starts, followed by s.size().
std::vector<std::size_t> boundaries(std::string_view s);

/// Number of code points.
std::size_t length(std::string_view s);

/// Longest common prefix, cut back to a character boundary. Returns bytes.
std::size_t common_prefix(std::string_view a, std::string_view b);

/// All suffixes of s from the whole string down to "" (longest first).
std::vector<std::string_view> suffixes(std::string_view s);

/// Removes the last n code points. n larger than the length yields "".
std::string_view drop_last(std::string_view s, std::size_t n);

bool ends_with(std::string_view s, std::string_view suffix);

/// All substrings with a code-point length in [min_n, max_n], in order of
/// start position then length.
std::vector<std::string_view> ngrams(std::string_view s, std::size_t min_n, std::size_t max_n);

}  // namespace morphlex::utf8
