#include "morphlex/utf8.hpp"

#include <algorithm>

namespace morphlex::utf8 {

namespace {

bool is_continuation(unsigned char c) { return (c & 0xC0) == 0x80; }

}  // namespace

std::vector<std::size_t> boundaries(std::string_view s) {
    std::vector<std::size_t> out;
    out.reserve(s.size() + 1);
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!is_continuation(static_cast<unsigned char>(s[i]))) out.push_back(i);
    }
    out.push_back(s.size());
    return out;
}

std::size_t length(std::string_view s) {
    return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) {
        return !is_continuation(static_cast<unsigned char>(c));
    }));
}

std::size_t common_prefix(std::string_view a, std::string_view b) {
    std::size_t n = 0;
    const std::size_t limit = std::min(a.size(), b.size());
    while (n < limit && a[n] == b[n]) ++n;
    // The first differing byte may sit inside a multi-byte character.
    if (n < a.size() || n < b.size()) {
        while (n > 0 && ((n < a.size() && is_continuation(static_cast<unsigned char>(a[n]))) ||
                         (n < b.size() && is_continuation(static_cast<unsigned char>(b[n]))))) {
            --n;
        }
    }
    return n;
}

std::vector<std::string_view> suffixes(std::string_view s) {
    std::vector<std::string_view> out;
    for (std::size_t start : boundaries(s)) out.push_back(s.substr(start));
    return out;
}

std::string_view drop_last(std::string_view s, std::size_t n) {
    const auto b = boundaries(s);
    const std::size_t chars = b.size() - 1;
    if (n >= chars) return s.substr(0, 0);
    return s.substr(0, b[chars - n]);
}

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::vector<std::string_view> ngrams(std::string_view s, std::size_t min_n, std::size_t max_n) {
    std::vector<std::string_view> out;
    const auto b = boundaries(s);
    const std::size_t chars = b.size() - 1;
    for (std::size_t i = 0; i < chars; ++i) {
        for (std::size_t n = min_n; n <= max_n && i + n <= chars; ++n) {
            out.push_back(s.substr(b[i], b[i + n] - b[i]));
        }
    }
    return out;
}

}  // namespace morphlex::utf8
