#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace vfiqa {

// One planar 8-bit 4:2:0 picture. Chroma planes are quarter size, so both
// dimensions must be even.
struct Frame {
    int width = 0;
    int height = 0;
    int64_t index = 0;
    std::vector<uint8_t> y;
    std::vector<uint8_t> u;
    std::vector<uint8_t> v;

    size_t luma_size() const { return static_cast<size_t>(width) * static_cast<size_t>(height); }
    size_t chroma_size() const {
        return (static_cast<size_t>(width) / 2) * (static_cast<size_t>(height) / 2);
    }
};

inline void check_yuv420_dimensions(int width, int height) {
    if (width <= 0 || height <= 0)
        throw std::invalid_argument("frame dimensions must be positive, got " +
                                    std::to_string(width) + "x" + std::to_string(height));
    if (width % 2 != 0 || height % 2 != 0)
        throw std::invalid_argument("4:2:0 requires even dimensions, got " +
                                    std::to_string(width) + "x" + std::to_string(height));
}

inline Frame make_frame(int width, int height, int64_t index = 0) {
    check_yuv420_dimensions(width, height);
    Frame f;
    f.width = width;
    f.height = height;
    f.index = index;
    f.y.assign(f.luma_size(), 0);
    f.u.assign(f.chroma_size(), 128);
    f.v.assign(f.chroma_size(), 128);
    return f;
}

struct FrameRate {
    int64_t num = 0;
    int64_t den = 1;
    double fps() const { return den != 0 ? static_cast<double>(num) / static_cast<double>(den) : 0.0; }
};

struct VideoSequence {
    std::vector<Frame> frames;
    FrameRate frame_rate{};
};

// Non-owning view of a frame's Y plane; image metrics operate on this.
struct LumaView {
    int width = 0;
    int height = 0;
    const uint8_t* data = nullptr;

    const uint8_t& at(int y, int x) const {
        return data[static_cast<size_t>(y) * static_cast<size_t>(width) + static_cast<size_t>(x)];
    }
    bool same_shape(const LumaView& other) const {
        return width == other.width && height == other.height;
    }
};

inline LumaView luma(const Frame& frame) {
    return LumaView{frame.width, frame.height, frame.y.data()};
}

}  // namespace vfiqa
