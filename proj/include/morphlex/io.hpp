#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace morphlex::io {

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

/// Strict parse of a whole token; throws FormatError naming `where` on failure.
double parse_double(std::string_view token, std::string_view where);
long parse_long(std::string_view token, std::string_view where);

std::vector<std::string_view> split(std::string_view line, char sep);

/// Splits on runs of spaces/tabs, dropping empty fields.
std::vector<std::string_view> split_ws(std::string_view line);

std::string_view trim(std::string_view s);

/// Strips a trailing '\r' left by CRLF files.
void chomp(std::string& line);

std::ifstream open_input(const std::filesystem::path& path);
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace morphlex::io
