#ifndef PLACEMETRICS_IO_CSV_HPP
#define PLACEMETRICS_IO_CSV_HPP

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "../core.hpp"
#include "../error.hpp"

/**
 * @file csv.hpp
 *
 * Response-matrix CSV: header `student_id,q1,...,qM[,category]`, one row per
 * student, cells exactly `0` or `1`, category one of `college_algebra`,
 * `precalculus`, `calculus_1`. See docs/csv_format.md.
 */

namespace placemetrics::io {

struct LoadResult {
    ResponseMatrix matrix;
    /// Rows whose category disagrees with the cut-score rule.
    std::vector<std::string> warnings;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

inline std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return fields;
}

inline bool is_item_header(std::string_view field, std::size_t expected) {
    if (field.size() < 2 || (field[0] != 'q' && field[0] != 'Q')) {
        return false;
    }
    return field.substr(1) == std::to_string(expected);
}

} // namespace detail

inline LoadResult parse_csv(std::istream& in, std::optional<std::size_t> item_count = std::nullopt) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string_view> header;
    std::string header_line;
    while (std::getline(in, line)) {
        ++line_no;
        if (!detail::trim(line).empty()) {
            header_line = line;
            header = detail::split(header_line);
            break;
        }
    }
    if (header.empty()) {
        throw Error(ErrorKind::Validation, "CSV is empty: missing header");
    }
    if (header[0] != "student_id") {
        throw Error(ErrorKind::Validation, "CSV header must start with student_id");
    }
    const bool labelled = header.back() == "category";
    const std::size_t items = header.size() - 1 - (labelled ? 1 : 0);
    if (items == 0) {
        throw Error(ErrorKind::Validation, "CSV header declares no item columns");
    }
    for (std::size_t j = 0; j < items; ++j) {
        if (!detail::is_item_header(header[j + 1], j + 1)) {
            throw Error(ErrorKind::Validation, "CSV header column " + std::to_string(j + 2) + " must be q" +
                                                   std::to_string(j + 1) + ", got '" + std::string(header[j + 1]) + "'");
        }
    }
    if (item_count && *item_count != items) {
        throw Error(ErrorKind::Validation, "CSV has " + std::to_string(items) + " items but " +
                                               std::to_string(*item_count) + " were expected");
    }

    LoadResult result;
    std::vector<StudentRecord> students;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) {
            continue;
        }
        const auto fields = detail::split(line);
        if (fields.size() != header.size()) {
            throw Error(ErrorKind::Validation, "row " + std::to_string(line_no) + ": expected " +
                                                   std::to_string(header.size()) + " fields, got " +
                                                   std::to_string(fields.size()));
        }
        StudentRecord record;
        record.id = std::string(fields[0]);
        if (record.id.empty()) {
            throw Error(ErrorKind::Validation, "row " + std::to_string(line_no) + ": empty student_id");
        }
        record.responses.reserve(items);
        for (std::size_t j = 0; j < items; ++j) {
            const auto cell = fields[j + 1];
            if (cell != "0" && cell != "1") {
                throw Error(ErrorKind::Validation, "row " + std::to_string(line_no) + ", column " +
                                                       std::to_string(j + 2) + " (" + std::string(header[j + 1]) +
                                                       "): invalid cell '" + std::string(cell) + "'");
            }
            record.responses.push_back(cell == "1" ? 1 : 0);
        }
        if (labelled) {
            const auto label = parse_label(fields.back());
            if (!label) {
                throw Error(ErrorKind::Validation, "row " + std::to_string(line_no) + ", column " +
                                                       std::to_string(fields.size()) + " (category): unknown category '" +
                                                       std::string(fields.back()) + "'");
            }
            record.label = label;
            const auto expected = placement(total_score(record).percent);
            if (expected != *label) {
                result.warnings.push_back("row " + std::to_string(line_no) + " (" + record.id + "): category " +
                                          std::string(to_string(*label)) + " but cut score gives " +
                                          std::string(to_string(expected)));
            }
        }
        students.push_back(std::move(record));
    }
    result.matrix = ResponseMatrix(std::move(students), items);
    return result;
}

inline LoadResult load_csv(const std::filesystem::path& path, std::optional<std::size_t> item_count = std::nullopt) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::Io, "cannot open " + path.string());
    }
    return parse_csv(in, item_count);
}

inline void write_csv(const ResponseMatrix& matrix, std::ostream& out) {
    using detail::trim;
    out << "student_id";
    for (std::size_t j = 0; j < matrix.item_count(); ++j) {
        out << ",q" << (j + 1);
    }
    if (matrix.has_labels()) {
        out << ",category";
    }
    out << '\n';
    for (const auto& s : matrix.students()) {
        if (s.id.find_first_of(",\r\n") != std::string::npos || trim(s.id) != s.id) {
            throw Error(ErrorKind::Validation, "student id '" + s.id + "' cannot be written to CSV");
        }
        out << s.id;
        for (auto x : s.responses) {
            out << ',' << static_cast<int>(x);
        }
        if (s.label) {
            out << ',' << to_string(*s.label);
        }
        out << '\n';
    }
}

inline std::string to_csv(const ResponseMatrix& matrix) {
    std::ostringstream out;
    write_csv(matrix, out);
    return out.str();
}

inline void save_csv(const ResponseMatrix& matrix, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorKind::Io, "cannot write " + path.string());
    }
    write_csv(matrix, out);
}

} // namespace placemetrics::io

#endif
