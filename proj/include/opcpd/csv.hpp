#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace opcpd {

// Malformed input data. `row` is the 1-based line number where the
// offending record starts (0 when not tied to a row).
class DataError : public std::runtime_error {
public:
    DataError(std::size_t row, const std::string& what);
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

struct SeriesFile {
    // Column name (requires a header) or 0-based index. Empty: first column
    // whose first data value is numeric.
    std::optional<std::variant<std::string, std::size_t>> column;
    // Empty: header present iff some field of the first record is not a number.
    std::optional<bool> has_header;
    char delimiter = ',';
};

struct Series {
    std::vector<double> values;
    std::string column_name; // header text, or "column <k>" without a header
    std::size_t column_index = 0;
};

// Splits RFC-4180 style records: quoted fields may hold delimiters,
// doubled quotes and line breaks. Returns (starting line, fields) pairs;
// blank lines are skipped.
std::vector<std::pair<std::size_t, std::vector<std::string>>> read_records(std::istream& in,
                                                                          char delimiter);

// Parses a real number; accepts surrounding blanks and a leading '+'.
std::optional<double> parse_real(std::string_view text);

// Reads one column of finite reals. Throws DataError on unparseable or
// non-finite entries, an unknown column, or an empty selection.
Series read_series(std::istream& in, const SeriesFile& options);

// %.17g: round-trips every double exactly.
std::string format_real(double value);

// Header `header`, then one value per line at 17 significant digits.
void write_series(std::ostream& out, std::span<const double> values,
                  const std::string& header = "value");

} // namespace opcpd
