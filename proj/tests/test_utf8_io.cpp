#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "morphlex/error.hpp"
#include "morphlex/io.hpp"
#include "morphlex/utf8.hpp"

using namespace morphlex;

TEST_CASE("utf8 length and boundaries count code points") {
    CHECK(utf8::length("") == 0);
    CHECK(utf8::length("abc") == 3);
    CHECK(utf8::length("canción") == 7);
    CHECK(utf8::length("ü") == 1);
    CHECK(utf8::boundaries("aé").size() == 3);
}

TEST_CASE("common_prefix never splits a character") {
    // "é" (C3 A9) and "è" (C3 A8) share their lead byte.
    CHECK(utf8::common_prefix("canté", "cantè") == 4);
    CHECK(utf8::common_prefix("cantar", "canto") == 4);
    CHECK(utf8::common_prefix("ir", "voy") == 0);
    CHECK(utf8::common_prefix("abc", "abc") == 3);
    CHECK(utf8::common_prefix("ab", "abc") == 2);
}

TEST_CASE("suffixes run from the whole string down to empty") {
    const auto s = utf8::suffixes("aé");
    REQUIRE(s.size() == 3);
    CHECK(s[0] == "aé");
    CHECK(s[1] == "é");
    CHECK(s[2] == "");
}

TEST_CASE("drop_last removes code points") {
    CHECK(utf8::drop_last("cantó", 1) == "cant");
    CHECK(utf8::drop_last("ab", 5) == "");
    CHECK(utf8::drop_last("ab", 0) == "ab");
}

TEST_CASE("ngrams enumerate every substring in the length range") {
    const auto grams = utf8::ngrams("<abc>", 3, 6);
    // Brute force over start/length pairs.
    std::vector<std::string> expected;
    const std::string s = "<abc>";
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t n = 3; n <= 6 && i + n <= s.size(); ++n) expected.push_back(s.substr(i, n));
    REQUIRE(grams.size() == expected.size());
    for (std::size_t i = 0; i < grams.size(); ++i) CHECK(grams[i] == expected[i]);
    CHECK(utf8::ngrams("<é>", 3, 6).size() == 1);
}

TEST_CASE("format_double round-trips exactly") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(rng) * std::pow(10.0, (i % 21) - 10);
        CHECK(io::parse_double(io::format_double(v), "t") == v);
    }
    CHECK(io::parse_double(io::format_double(0.1), "t") == 0.1);
}

TEST_CASE("parse helpers reject junk with the location in the message") {
    CHECK_THROWS_AS(io::parse_double("1.5x", "f:3"), FormatError);
    CHECK_THROWS_AS(io::parse_double("", "f:3"), FormatError);
    CHECK_THROWS_AS(io::parse_long("12.0", "f:3"), FormatError);
    try {
        io::parse_double("abc", "file.vec:7");
        FAIL("expected an exception");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("file.vec:7") != std::string::npos);
    }
    CHECK(io::parse_double("+2.5", "t") == 2.5);
    CHECK(io::parse_double("-1e-3", "t") == -1e-3);
}

TEST_CASE("split keeps empty fields, split_ws drops them") {
    const auto f = io::split("a\t\tb", '\t');
    REQUIRE(f.size() == 3);
    CHECK(f[1].empty());
    const auto w = io::split_ws("  a  b\tc ");
    REQUIRE(w.size() == 3);
    CHECK(w[2] == "c");
}

TEST_CASE("opening a missing file is a format error") {
    CHECK_THROWS_AS(io::open_input("/nonexistent/definitely/missing.txt"), FormatError);
}
