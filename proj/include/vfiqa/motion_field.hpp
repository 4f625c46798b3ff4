#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace vfiqa {

// Dense per-pixel motion: u is the horizontal and v the vertical displacement
// in pixels/frame, forward in time (t -> t+1). Components are kept in double;
// the .flo container quantises to float32 on write.
struct MotionField {
    int width = 0;
    int height = 0;
    std::vector<double> u;
    std::vector<double> v;

    MotionField() = default;
    MotionField(int w, int h)
        : width(w),
          height(h),
          u(static_cast<size_t>(w) * static_cast<size_t>(h), 0.0),
          v(static_cast<size_t>(w) * static_cast<size_t>(h), 0.0) {}

    size_t index(int y, int x) const {
        return static_cast<size_t>(y) * static_cast<size_t>(width) + static_cast<size_t>(x);
    }
    double& u_at(int y, int x) { return u[index(y, x)]; }
    double& v_at(int y, int x) { return v[index(y, x)]; }
    double u_at(int y, int x) const { return u[index(y, x)]; }
    double v_at(int y, int x) const { return v[index(y, x)]; }

    size_t pixel_count() const { return u.size(); }
    bool same_shape(const MotionField& other) const {
        return width == other.width && height == other.height;
    }
    bool finite() const {
        for (double c : u)
            if (!std::isfinite(c)) return false;
        for (double c : v)
            if (!std::isfinite(c)) return false;
        return true;
    }
};

inline void require_same_shape(const MotionField& a, const MotionField& b, const char* op) {
    if (!a.same_shape(b))
        throw std::invalid_argument(std::string(op) + ": field dimensions differ, " +
                                    std::to_string(a.width) + "x" + std::to_string(a.height) +
                                    " vs " + std::to_string(b.width) + "x" +
                                    std::to_string(b.height));
}

}  // namespace vfiqa
