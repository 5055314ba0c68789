#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace docmine {

/// Reads a UTF-8 text file as lines, accepting LF or CRLF endings.
std::vector<std::string> read_lines(const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, std::string_view content);

/// Fixed six-decimal rendering used by every TSV/JSON artifact.
std::string fixed6(double value);

/// TSV fields escape backslash, tab, CR and LF as \\, \t, \r, \n.
std::string escape_tsv(std::string_view field);
std::string unescape_tsv(std::string_view field);

std::vector<std::string_view> split_tabs(std::string_view line);

std::string_view trim(std::string_view text);

}  // namespace docmine
