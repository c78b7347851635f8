// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace bigfive::detail {

inline std::string_view trim(std::string_view s) noexcept {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
  };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

/// Splits on '\n', dropping a trailing '\r' from each line.
std::vector<std::string_view> split_lines(std::string_view text);

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temp file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// Decodes Latin-1 bytes to UTF-8 when `bytes` is not already valid UTF-8.
std::string ensure_utf8(std::string_view bytes);

std::string lowercase_ascii(std::string_view s);

std::string iso8601_utc(std::chrono::system_clock::time_point t);

}  // namespace bigfive::detail

namespace bigfive::detail {

/// Quotes a CSV field when it contains a comma, quote, or newline.
std::string csv_field(std::string_view s);
/// Splits one RFC 4180 line (no embedded newlines).
std::vector<std::string> parse_csv_line(std::string_view line);
/// Shortest decimal form that reads back to the same double.
std::string format_double(double v);
double parse_double(std::string_view s);

}  // namespace bigfive::detail
