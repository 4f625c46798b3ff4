#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "vfiqa/errors.hpp"
#include "vfiqa/plane.hpp"

namespace vfiqa {

// Lossless CSV dump, one row per image row.
inline void write_map_csv(const ScalarFieldMap& map, std::ostream& out) {
    char buf[40];
    for (int y = 0; y < map.height; ++y) {
        for (int x = 0; x < map.width; ++x) {
            std::snprintf(buf, sizeof(buf), "%.17g", map.at(y, x));
            if (x) out << ',';
            out << buf;
        }
        out << '\n';
    }
    if (!out) throw IoError("map csv write failed");
}

// Binary PGM heat map, normalized so the largest value maps to 255.
inline void write_map_pgm(const ScalarFieldMap& map, std::ostream& out) {
    double max_value = 0.0;
    for (double v : map.data) max_value = std::max(max_value, v);
    out << "P5\n" << map.width << " " << map.height << "\n255\n";
    const double scale = max_value > 0.0 ? 255.0 / max_value : 0.0;
    for (double v : map.data) {
        const int q = static_cast<int>(std::lround(v * scale));
        out.put(static_cast<char>(std::clamp(q, 0, 255)));
    }
    if (!out) throw IoError("map pgm write failed");
}

}  // namespace vfiqa
