#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace punn::text {

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double v);

/// Strict decimal parse of the whole token. Returns false on any trailing garbage.
bool parse_double(std::string_view token, double& out);

std::string_view trim(std::string_view s) noexcept;

/// Splits on a single delimiter; no quoting support (numeric CSV only).
std::vector<std::string_view> split(std::string_view line, char delim);

/// Whitespace tokenizer.
std::vector<std::string_view> tokens(std::string_view line);

/// Writes to a sibling temporary file and renames it over `path`, so readers
/// never observe a partially written artifact.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace punn::text
