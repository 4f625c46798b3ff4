#pragma once

#include <cmath>
#include <cstdint>

#include "vfiqa/motion_field.hpp"
#include "vfiqa/plane.hpp"

namespace vfiqa {

// Per-pixel endpoint error between two co-located motion fields.
inline ScalarFieldMap epe_map(const MotionField& ref, const MotionField& dis) {
    require_same_shape(ref, dis, "epe_map");
    ScalarFieldMap map(ref.width, ref.height);
    const size_t n = ref.pixel_count();
    for (size_t i = 0; i < n; ++i) {
        double du = ref.u[i] - dis.u[i];
        double dv = ref.v[i] - dis.v[i];
        map.data[i] = std::sqrt(du * du + dv * dv);
    }
    return map;
}

// Mean endpoint error over the frame. Lower is better. Summation is fixed
// raster order so results are bit-reproducible.
inline double epe(const MotionField& ref, const MotionField& dis) {
    require_same_shape(ref, dis, "epe");
    const size_t n = ref.pixel_count();
    double sum = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double du = ref.u[i] - dis.u[i];
        double dv = ref.v[i] - dis.v[i];
        sum += std::sqrt(du * du + dv * dv);
    }
    return sum / static_cast<double>(n);
}

// Endpoint-error map normalised to sum to one, usable as a spatial
// distortion-sensitivity weighting. A perfectly matching pair has no error
// anywhere; the uniform map preserves the unit-sum contract in that case.
inline WeightMap epe_weight_map(const MotionField& ref, const MotionField& dis) {
    ScalarFieldMap map = epe_map(ref, dis);
    const size_t n = map.size();
    double total = 0.0;
    for (size_t i = 0; i < n; ++i) total += map.data[i];

    WeightMap weights(map.width, map.height);
    if (total == 0.0) {
        double uniform = 1.0 / static_cast<double>(n);
        for (size_t i = 0; i < n; ++i) weights.data[i] = uniform;
        return weights;
    }
    for (size_t i = 0; i < n; ++i) weights.data[i] = map.data[i] / total;
    return weights;
}

struct TemporalSmoothnessResult {
    double value = 0.0;
    int64_t valid_pixels = 0;
    // Trajectory endpoints landing outside the frame are excluded from the
    // mean rather than clamped.
    int64_t excluded_pixels = 0;
};

// Motion-compensated change between consecutive motion fields. Each vector of
// current is treated as a trajectory: it is compared against the vector of
// next sampled (bilinearly) where the trajectory lands. No-reference; lower
// means motion evolves more smoothly.
inline TemporalSmoothnessResult temporal_smoothness_stats(const MotionField& current,
                                                          const MotionField& next) {
    require_same_shape(current, next, "temporal_smoothness");
    const int w = current.width;
    const int h = current.height;

    TemporalSmoothnessResult result;
    double sum = 0.0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double u0 = current.u_at(y, x);
            const double v0 = current.v_at(y, x);
            const double px = static_cast<double>(x) + u0;
            const double py = static_cast<double>(y) + v0;
            if (px < 0.0 || px > static_cast<double>(w - 1) || py < 0.0 ||
                py > static_cast<double>(h - 1)) {
                ++result.excluded_pixels;
                continue;
            }
            const int x0 = static_cast<int>(std::floor(px));
            const int y0 = static_cast<int>(std::floor(py));
            const int x1 = x0 + 1 < w ? x0 + 1 : w - 1;
            const int y1 = y0 + 1 < h ? y0 + 1 : h - 1;
            const double fx = px - static_cast<double>(x0);
            const double fy = py - static_cast<double>(y0);

            const double u1 = (1.0 - fy) * ((1.0 - fx) * next.u_at(y0, x0) + fx * next.u_at(y0, x1)) +
                              fy * ((1.0 - fx) * next.u_at(y1, x0) + fx * next.u_at(y1, x1));
            const double v1 = (1.0 - fy) * ((1.0 - fx) * next.v_at(y0, x0) + fx * next.v_at(y0, x1)) +
                              fy * ((1.0 - fx) * next.v_at(y1, x0) + fx * next.v_at(y1, x1));

            const double du = u0 - u1;
            const double dv = v0 - v1;
            sum += std::sqrt(du * du + dv * dv);
            ++result.valid_pixels;
        }
    }
    result.value = result.valid_pixels > 0 ? sum / static_cast<double>(result.valid_pixels) : 0.0;
    return result;
}

inline double temporal_smoothness(const MotionField& current, const MotionField& next) {
    return temporal_smoothness_stats(current, next).value;
}

}  // namespace vfiqa
