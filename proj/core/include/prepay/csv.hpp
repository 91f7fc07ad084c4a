#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace prepay::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;  // 1-based source line per row
};

// Comma-separated, no quoting; blank lines and lines starting with '#' are
// skipped. Throws InputError naming the path when the file cannot be opened.
Table read(const std::filesystem::path& path);

// Index of a header column, or InputError naming the missing column.
std::size_t column(const Table& t, std::string_view name, const std::filesystem::path& path);

// Strict numeric parse of a whole cell (std::from_chars); InputError on failure.
double to_double(std::string_view cell, const std::string& context);
long long to_int(std::string_view cell, const std::string& context);

std::string trim(std::string_view s);

}  // namespace prepay::csv
