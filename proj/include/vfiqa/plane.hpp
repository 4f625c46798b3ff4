#pragma once

#include <cstddef>
#include <vector>

namespace vfiqa {

// Dense row-major 2-D grid of samples.
template <typename T>
struct Plane {
    int width = 0;
    int height = 0;
    std::vector<T> data;

    Plane() = default;
    Plane(int w, int h, T fill = T{})
        : width(w), height(h), data(static_cast<size_t>(w) * static_cast<size_t>(h), fill) {}

    size_t index(int y, int x) const {
        return static_cast<size_t>(y) * static_cast<size_t>(width) + static_cast<size_t>(x);
    }
    T& at(int y, int x) { return data[index(y, x)]; }
    const T& at(int y, int x) const { return data[index(y, x)]; }
    size_t size() const { return data.size(); }
    bool same_shape(const Plane& other) const {
        return width == other.width && height == other.height;
    }
};

// Per-pixel nonnegative scalars (error maps, divergence maps).
using ScalarFieldMap = Plane<double>;

// Per-pixel nonnegative weights summing to one.
using WeightMap = Plane<double>;

}  // namespace vfiqa
