#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace emrsim {

/// One parsed data row: comma-separated fields plus the 1-based source line.
struct CsvRow {
    std::vector<std::string> fields;
    int line = 0;
};

/// Splits comma-separated table text into rows, skipping blank lines and
/// `#` comment lines. Fields are whitespace-trimmed; CRLF tolerated.
/// There is no quoting; free-text columns are handled by the callers that
/// know their own column layout.
std::vector<CsvRow> parse_csv(std::string_view text);

std::string trim(std::string_view s);

/// Whole-file read; throws emrsim::IoError when unreadable.
std::string read_file(const std::string& path);

/// Parse helpers returning false on malformed numeric text.
bool parse_double(std::string_view s, double& out);
bool parse_u64(std::string_view s, std::uint64_t& out);
bool parse_int(std::string_view s, int& out);

}  // namespace emrsim
