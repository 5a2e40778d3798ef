#include "opcpd/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <iterator>
#include <ostream>

namespace opcpd {

DataError::DataError(std::size_t row, const std::string& what)
    : std::runtime_error(row > 0 ? "row " + std::to_string(row) + ": " + what : what), row_(row) {}

std::vector<std::pair<std::size_t, std::vector<std::string>>> read_records(std::istream& in,
                                                                          char delimiter) {
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    std::vector<std::pair<std::size_t, std::vector<std::string>>> records;

    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    bool record_has_content = false;
    std::size_t line = 1;
    std::size_t record_line = 1;

    auto end_record = [&] {
        if (record_has_content) {
            fields.push_back(std::move(field));
            records.emplace_back(record_line, std::move(fields));
        }
        fields.clear();
        field.clear();
        record_has_content = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') {
                    ++line;
                }
                field.push_back(c);
            }
            continue;
        }
        if (c == '\r') {
            continue;
        }
        if (c == '\n') {
            end_record();
            ++line;
            record_line = line;
            continue;
        }
        if (!record_has_content) {
            record_line = line;
        }
        if (c == '"') {
            in_quotes = true;
            record_has_content = true;
        } else if (c == delimiter) {
            fields.push_back(std::move(field));
            field.clear();
            record_has_content = true;
        } else {
            field.push_back(c);
            if (c != ' ' && c != '\t') {
                record_has_content = true;
            }
        }
    }
    if (in_quotes) {
        throw DataError(record_line, "unterminated quoted field");
    }
    end_record();
    return records;
}

std::optional<double> parse_real(std::string_view text) {
    auto is_blank = [](char c) { return c == ' ' || c == '\t'; };
    while (!text.empty() && is_blank(text.front())) text.remove_prefix(1);
    while (!text.empty() && is_blank(text.back())) text.remove_suffix(1);
    if (!text.empty() && text.front() == '+') {
        text.remove_prefix(1);
    }
    if (text.empty()) {
        return std::nullopt;
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        return std::nullopt;
    }
    return value;
}

Series read_series(std::istream& in, const SeriesFile& options) {
    const auto records = read_records(in, options.delimiter);
    if (records.empty()) {
        throw DataError(0, "input contains no records");
    }

    bool header = false;
    if (options.has_header) {
        header = *options.has_header;
    } else {
        const auto& first = records.front().second;
        header = std::any_of(first.begin(), first.end(),
                             [](const std::string& f) { return !parse_real(f).has_value(); });
    }
    const std::size_t first_data = header ? 1 : 0;
    if (first_data >= records.size()) {
        throw DataError(0, "input contains a header but no data rows");
    }

    Series out;
    if (!options.column) {
        const auto& [row, fields] = records[first_data];
        const auto it = std::find_if(fields.begin(), fields.end(),
                                     [](const std::string& f) { return parse_real(f).has_value(); });
        if (it == fields.end()) {
            throw DataError(row, "no numeric column found");
        }
        out.column_index = static_cast<std::size_t>(it - fields.begin());
    } else if (const auto* index = std::get_if<std::size_t>(&*options.column)) {
        out.column_index = *index;
    } else {
        const auto& name = std::get<std::string>(*options.column);
        if (!header) {
            throw DataError(0, "column '" + name + "' selected by name but the input has no header");
        }
        const auto& names = records.front().second;
        const auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) {
            throw DataError(records.front().first, "no column named '" + name + "'");
        }
        out.column_index = static_cast<std::size_t>(it - names.begin());
    }

    if (header && out.column_index < records.front().second.size()) {
        out.column_name = records.front().second[out.column_index];
    } else {
        out.column_name = "column " + std::to_string(out.column_index);
    }

    out.values.reserve(records.size() - first_data);
    for (std::size_t r = first_data; r < records.size(); ++r) {
        const auto& [row, fields] = records[r];
        if (out.column_index >= fields.size()) {
            throw DataError(row, "missing column " + std::to_string(out.column_index));
        }
        const auto& field = fields[out.column_index];
        const auto value = parse_real(field);
        if (!value) {
            throw DataError(row, "cannot parse '" + field + "' as a number");
        }
        if (!std::isfinite(*value)) {
            throw DataError(row, "non-finite value '" + field + "'");
        }
        out.values.push_back(*value);
    }
    return out;
}

std::string format_real(double value) {
    char buffer[64];
    const auto [ptr, ec] =
        std::to_chars(buffer, buffer + sizeof buffer, value, std::chars_format::general, 17);
    return std::string(buffer, ec == std::errc{} ? ptr : buffer);
}

void write_series(std::ostream& out, std::span<const double> values, const std::string& header) {
    out << header << '\n';
    for (double v : values) {
        out << format_real(v) << '\n';
    }
}

} // namespace opcpd
