#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "vfiqa/errors.hpp"
#include "vfiqa/motion_field.hpp"

namespace vfiqa {

// Middlebury ".flo" container: float32 sanity constant, int32 width and
// height, then interleaved (u, v) float32 pairs in raster order. All fields
// little-endian.
inline constexpr float kFloMagic = 202021.25f;

// Components at or beyond this magnitude follow the "unknown flow" convention
// and are zeroed on read.
inline constexpr double kFloUnknownThreshold = 1e9;

namespace detail {

inline uint32_t le_bytes_to_u32(const unsigned char b[4]) {
    return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
           (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

inline void u32_to_le_bytes(uint32_t v, unsigned char b[4]) {
    b[0] = static_cast<unsigned char>(v & 0xff);
    b[1] = static_cast<unsigned char>((v >> 8) & 0xff);
    b[2] = static_cast<unsigned char>((v >> 16) & 0xff);
    b[3] = static_cast<unsigned char>((v >> 24) & 0xff);
}

inline bool read_f32_le(std::istream& in, float& out) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) return false;
    uint32_t bits = le_bytes_to_u32(b);
    std::memcpy(&out, &bits, 4);
    return true;
}

inline bool read_i32_le(std::istream& in, int32_t& out) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) return false;
    uint32_t bits = le_bytes_to_u32(b);
    std::memcpy(&out, &bits, 4);
    return true;
}

inline void write_f32_le(std::ostream& out, float v) {
    uint32_t bits;
    std::memcpy(&bits, &v, 4);
    unsigned char b[4];
    u32_to_le_bytes(bits, b);
    out.write(reinterpret_cast<const char*>(b), 4);
}

inline void write_i32_le(std::ostream& out, int32_t v) {
    uint32_t bits = static_cast<uint32_t>(v);
    unsigned char b[4];
    u32_to_le_bytes(bits, b);
    out.write(reinterpret_cast<const char*>(b), 4);
}

}  // namespace detail

struct FloReadResult {
    MotionField field;
    // Non-finite or unknown-flow components zeroed during ingestion.
    uint64_t replaced_samples = 0;
};

inline FloReadResult read_flo(std::istream& in) {
    float magic = 0.0f;
    if (!detail::read_f32_le(in, magic)) throw IoError("not a flow file: stream too short for magic");
    if (magic != kFloMagic)
        throw IoError("not a flow file: bad magic " + std::to_string(magic) + ", expected " +
                      std::to_string(kFloMagic));

    int32_t w = 0, h = 0;
    if (!detail::read_i32_le(in, w) || !detail::read_i32_le(in, h))
        throw IoError("flow file truncated in header");
    if (w <= 0 || h <= 0)
        throw IoError("flow file has nonpositive dimensions " + std::to_string(w) + "x" +
                      std::to_string(h));

    FloReadResult result;
    result.field = MotionField(w, h);
    const size_t n = result.field.pixel_count();
    for (size_t i = 0; i < n; ++i) {
        float fu, fv;
        if (!detail::read_f32_le(in, fu) || !detail::read_f32_le(in, fv))
            throw IoError("flow file truncated: payload ends at sample " + std::to_string(i) +
                          " of " + std::to_string(n));
        double du = fu, dv = fv;
        if (!std::isfinite(du) || std::abs(du) > kFloUnknownThreshold) {
            du = 0.0;
            ++result.replaced_samples;
        }
        if (!std::isfinite(dv) || std::abs(dv) > kFloUnknownThreshold) {
            dv = 0.0;
            ++result.replaced_samples;
        }
        result.field.u[i] = du;
        result.field.v[i] = dv;
    }
    return result;
}

inline void write_flo(const MotionField& field, std::ostream& out) {
    if (field.width <= 0 || field.height <= 0)
        throw std::invalid_argument("write_flo: empty field");
    const size_t n = field.pixel_count();
    for (size_t i = 0; i < n; ++i) {
        if (!std::isfinite(field.u[i]) || !std::isfinite(field.v[i]))
            throw std::invalid_argument("write_flo: non-finite component at sample " +
                                        std::to_string(i));
    }
    detail::write_f32_le(out, kFloMagic);
    detail::write_i32_le(out, field.width);
    detail::write_i32_le(out, field.height);
    for (size_t i = 0; i < n; ++i) {
        float fu = static_cast<float>(field.u[i]);
        float fv = static_cast<float>(field.v[i]);
        if (!std::isfinite(fu) || !std::isfinite(fv))
            throw std::invalid_argument("write_flo: component exceeds float32 range at sample " +
                                        std::to_string(i));
        detail::write_f32_le(out, fu);
        detail::write_f32_le(out, fv);
    }
    if (!out) throw IoError("write_flo: stream write failed");
}

}  // namespace vfiqa
