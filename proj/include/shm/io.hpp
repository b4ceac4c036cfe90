#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace shm {

// Whole-file helpers; failures throw Error(Errc::Io).
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

// Shortest decimal text that re-parses to the same double.
std::string format_double(double value);

// Rounds to `digits` significant decimal digits (report formatting).
double round_significant(double value, int digits = 9);

// Splits one CSV line on commas and trims surrounding blanks of each field.
std::vector<std::string_view> split_csv_line(std::string_view line);

// Whole-token numeric parse; false on trailing garbage or empty input.
bool parse_number(std::string_view text, double& out);
bool parse_number(std::string_view text, long long& out);

// Non-blank lines of a text document, CR stripped.
std::vector<std::string_view> text_lines(std::string_view text);

}  // namespace shm
