#include "prepay/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "prepay/errors.hpp"

namespace prepay::csv {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(',', start);
        out.push_back(trim(std::string_view(line).substr(start, pos - start)));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

}  // namespace

Table read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open file: " + path.string());
    Table t;
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string s = trim(line);
        if (s.empty() || s.front() == '#') continue;
        auto cells = split(s);
        if (!have_header) {
            t.header = std::move(cells);
            have_header = true;
            continue;
        }
        if (cells.size() != t.header.size()) {
            std::ostringstream msg;
            msg << path.string() << ":" << lineno << ": expected " << t.header.size()
                << " fields, got " << cells.size();
            throw InputError(msg.str());
        }
        t.rows.push_back(std::move(cells));
        t.line_numbers.push_back(lineno);
    }
    if (!have_header) throw InputError(path.string() + ": empty file");
    return t;
}

std::size_t column(const Table& t, std::string_view name, const std::filesystem::path& path) {
    for (std::size_t i = 0; i < t.header.size(); ++i)
        if (t.header[i] == name) return i;
    throw InputError(path.string() + ": missing column '" + std::string(name) + "'");
}

double to_double(std::string_view cell, const std::string& context) {
    double v = 0.0;
    const auto* first = cell.data();
    const auto* last = cell.data() + cell.size();
    if (!cell.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || cell.empty())
        throw InputError(context + ": not a number: '" + std::string(cell) + "'");
    return v;
}

long long to_int(std::string_view cell, const std::string& context) {
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size() || cell.empty())
        throw InputError(context + ": not an integer: '" + std::string(cell) + "'");
    return v;
}

}  // namespace prepay::csv
