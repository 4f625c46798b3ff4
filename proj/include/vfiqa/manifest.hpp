#pragma once

#include <cmath>
#include <istream>
#include <string>
#include <vector>

#include "vfiqa/errors.hpp"

namespace vfiqa {

// One dataset entry binding a reference/distorted pair to its subjective
// score.
struct ManifestRow {
    std::string ref_path;
    std::string dis_path;
    double dmos = 0.0;
    std::string group;
};

namespace detail {

inline std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    size_t start = 0;
    while (true) {
        size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(trim(line.substr(start)));
            break;
        }
        fields.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return fields;
}

}  // namespace detail

// Parses `ref,dis,dmos[,group]` CSV. Quoting is not supported; paths must not
// contain commas. Errors carry 1-based line numbers.
inline std::vector<ManifestRow> parse_manifest(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw IoError("manifest: empty file, expected header ref,dis,dmos[,group]");
    auto header = detail::split_csv_line(line);
    bool with_group;
    if (header.size() == 3 && header[0] == "ref" && header[1] == "dis" && header[2] == "dmos")
        with_group = false;
    else if (header.size() == 4 && header[0] == "ref" && header[1] == "dis" &&
             header[2] == "dmos" && header[3] == "group")
        with_group = true;
    else
        throw IoError("manifest line 1: header must be ref,dis,dmos[,group]");

    std::vector<ManifestRow> rows;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        auto fields = detail::split_csv_line(line);
        const size_t expected = with_group ? 4 : 3;
        if (fields.size() != expected)
            throw IoError("manifest line " + std::to_string(line_no) + ": expected " +
                          std::to_string(expected) + " fields, got " + std::to_string(fields.size()));
        ManifestRow row;
        row.ref_path = fields[0];
        row.dis_path = fields[1];
        try {
            size_t pos = 0;
            row.dmos = std::stod(fields[2], &pos);
            if (pos != fields[2].size()) throw std::invalid_argument(fields[2]);
        } catch (const std::exception&) {
            throw IoError("manifest line " + std::to_string(line_no) + ": bad dmos value \"" +
                          fields[2] + "\"");
        }
        if (!std::isfinite(row.dmos))
            throw IoError("manifest line " + std::to_string(line_no) + ": dmos must be finite");
        if (row.ref_path.empty() || row.dis_path.empty())
            throw IoError("manifest line " + std::to_string(line_no) + ": empty path");
        if (with_group) row.group = fields[3];
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace vfiqa
