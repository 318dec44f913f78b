#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "statetrace/errors.hpp"
#include "statetrace/matrix.hpp"

namespace statetrace {

namespace detail {

inline std::vector<std::string_view> split_csv_line(std::string_view line,
                                                    std::vector<std::string_view>& out) {
    out.clear();
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        std::string_view field = (comma == std::string_view::npos)
                                     ? line.substr(start)
                                     : line.substr(start, comma - start);
        while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) {
            field.remove_prefix(1);
        }
        while (!field.empty() &&
               (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
            field.remove_suffix(1);
        }
        out.push_back(field);
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

inline bool parse_double(std::string_view field, double& value) {
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    return ec == std::errc() && ptr == end && !field.empty();
}

/// Shortest text that parses back to the identical double.
inline std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

}  // namespace detail

/// Parse a TimeCourses CSV: an optional header row followed by T rows of K
/// comma-separated decimal values ('.' separator).
inline TimeCourses read_time_courses_csv(std::istream& in, const std::string& subject_id) {
    std::vector<std::vector<double>> rows;
    std::vector<std::string_view> fields;
    std::string line;
    std::size_t line_no = 0;
    std::size_t cols = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) {
            continue;
        }
        detail::split_csv_line(line, fields);
        std::vector<double> row(fields.size());
        bool numeric = true;
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (!detail::parse_double(fields[i], row[i])) {
                numeric = false;
                break;
            }
        }
        if (!numeric) {
            // Only the first row may be non-numeric (the header).
            if (rows.empty() && !saw_header) {
                saw_header = true;
                cols = fields.size();
                continue;
            }
            throw ParseError("CSV line " + std::to_string(line_no) +
                             ": non-numeric field in data row");
        }
        for (double v : row) {
            if (!std::isfinite(v)) {
                throw ParseError("CSV line " + std::to_string(line_no) + ": non-finite value");
            }
        }
        if (cols == 0) {
            cols = row.size();
        } else if (row.size() != cols) {
            throw ParseError("CSV line " + std::to_string(line_no) +
                             ": expected " + std::to_string(cols) + " columns, got " +
                             std::to_string(row.size()));
        }
        rows.push_back(std::move(row));
    }
    if (rows.size() < 2 || cols == 0) {
        throw ParseError("CSV: need at least 2 data rows and 1 column");
    }
    TimeCourses tc;
    tc.subject_id = subject_id;
    tc.data = Matrix(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            tc.data(r, c) = rows[r][c];
        }
    }
    return tc;
}

inline TimeCourses read_time_courses_csv(const std::filesystem::path& path,
                                         std::string subject_id = "") {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open " + path.string());
    }
    if (subject_id.empty()) {
        subject_id = path.stem().string();
    }
    return read_time_courses_csv(in, subject_id);
}

inline void write_time_courses_csv(std::ostream& out, const TimeCourses& tc) {
    for (std::size_t c = 0; c < tc.channels(); ++c) {
        out << (c ? ",c" : "c") << (c + 1);
    }
    out << '\n';
    for (std::size_t r = 0; r < tc.length(); ++r) {
        for (std::size_t c = 0; c < tc.channels(); ++c) {
            if (c) {
                out << ',';
            }
            out << detail::format_double(tc.data(r, c));
        }
        out << '\n';
    }
}

/// Atomic file write: stream into <path>.tmp, then rename over the target.
template <typename WriteFn>
void write_file_atomic(const std::filesystem::path& path, WriteFn&& write) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        }
        write(out);
        out.flush();
        if (!out) {
            throw std::runtime_error("write failed: " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

inline void write_time_courses_csv(const std::filesystem::path& path, const TimeCourses& tc) {
    write_file_atomic(path, [&](std::ostream& out) { write_time_courses_csv(out, tc); });
}

}  // namespace statetrace
