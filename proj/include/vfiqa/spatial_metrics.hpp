#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "vfiqa/motion_field.hpp"
#include "vfiqa/plane.hpp"
#include "vfiqa/temporal_metrics.hpp"

namespace vfiqa {

struct VmConfig {
    int patch_size = 3;  // odd, >= 3
};

inline void validate(const VmConfig& cfg) {
    if (cfg.patch_size < 3 || cfg.patch_size % 2 == 0)
        throw std::invalid_argument("vector median patch size must be odd and >= 3, got " +
                                    std::to_string(cfg.patch_size));
}

// Replaces each vector by the member of its n x n neighbourhood that
// minimises the sum of Euclidean distances to all neighbours. Neighbourhoods
// are clipped at the frame borders, never padded. Tie-break: the centre
// vector wins if it reaches the minimum, otherwise the first minimiser in
// raster order.
inline MotionField vector_median_filter(const MotionField& field, const VmConfig& cfg = {}) {
    validate(cfg);
    const int w = field.width;
    const int h = field.height;
    const int half = cfg.patch_size / 2;

    MotionField out(w, h);
    std::vector<double> energy(static_cast<size_t>(cfg.patch_size) * cfg.patch_size);

    for (int y = 0; y < h; ++y) {
        const int wy0 = y - half < 0 ? 0 : y - half;
        const int wy1 = y + half >= h ? h - 1 : y + half;
        for (int x = 0; x < w; ++x) {
            const int wx0 = x - half < 0 ? 0 : x - half;
            const int wx1 = x + half >= w ? w - 1 : x + half;

            int count = 0;
            int center_slot = -1;
            for (int cy = wy0; cy <= wy1; ++cy) {
                for (int cx = wx0; cx <= wx1; ++cx) {
                    const double cu = field.u_at(cy, cx);
                    const double cv = field.v_at(cy, cx);
                    double e = 0.0;
                    for (int jy = wy0; jy <= wy1; ++jy) {
                        for (int jx = wx0; jx <= wx1; ++jx) {
                            const double du = cu - field.u_at(jy, jx);
                            const double dv = cv - field.v_at(jy, jx);
                            e += std::sqrt(du * du + dv * dv);
                        }
                    }
                    if (cy == y && cx == x) center_slot = count;
                    energy[count++] = e;
                }
            }

            double best = energy[0];
            for (int i = 1; i < count; ++i)
                if (energy[i] < best) best = energy[i];

            int pick;
            if (energy[center_slot] == best) {
                pick = center_slot;
            } else {
                pick = 0;
                while (energy[pick] != best) ++pick;
            }

            const int py = wy0 + pick / (wx1 - wx0 + 1);
            const int px = wx0 + pick % (wx1 - wx0 + 1);
            out.u_at(y, x) = field.u_at(py, px);
            out.v_at(y, x) = field.v_at(py, px);
        }
    }
    return out;
}

// Mean deviation of a field from its vector-median smoothed version. Lower
// means the field is spatially smoother.
inline double vm_epe(const MotionField& field, const VmConfig& cfg = {}) {
    return epe(field, vector_median_filter(field, cfg));
}

// Difference in spatial-smoothness behaviour between two fields.
inline double smoothness_dissimilarity(const MotionField& ref, const MotionField& dis,
                                       const VmConfig& cfg = {}) {
    require_same_shape(ref, dis, "smoothness_dissimilarity");
    return std::abs(vm_epe(dis, cfg) - vm_epe(ref, cfg));
}

namespace detail {

inline void require_divergence_size(const MotionField& field) {
    if (field.width < 3 || field.height < 3)
        throw std::invalid_argument("divergence needs a field of at least 3x3, got " +
                                    std::to_string(field.width) + "x" +
                                    std::to_string(field.height));
}

inline double divergence_at(const MotionField& f, int y, int x) {
    double dudx;
    if (x == 0)
        dudx = f.u_at(y, 1) - f.u_at(y, 0);
    else if (x == f.width - 1)
        dudx = f.u_at(y, x) - f.u_at(y, x - 1);
    else
        dudx = 0.5 * (f.u_at(y, x + 1) - f.u_at(y, x - 1));

    double dvdy;
    if (y == 0)
        dvdy = f.v_at(1, x) - f.v_at(0, x);
    else if (y == f.height - 1)
        dvdy = f.v_at(y, x) - f.v_at(y - 1, x);
    else
        dvdy = 0.5 * (f.v_at(y + 1, x) - f.v_at(y - 1, x));

    return std::abs(dudx + dvdy);
}

}  // namespace detail

// Absolute divergence of the field: central differences in the interior,
// one-sided at the borders. Values near zero mean the motion is not flowing
// towards or away from the point.
inline ScalarFieldMap divergence_map(const MotionField& field) {
    detail::require_divergence_size(field);
    ScalarFieldMap map(field.width, field.height);
    for (int y = 0; y < field.height; ++y)
        for (int x = 0; x < field.width; ++x) map.at(y, x) = detail::divergence_at(field, y, x);
    return map;
}

// Mean absolute divergence over the frame. Computed in one pass; pixel values
// and summation order match divergence_map exactly.
inline double div_metric(const MotionField& field) {
    detail::require_divergence_size(field);
    double sum = 0.0;
    for (int y = 0; y < field.height; ++y)
        for (int x = 0; x < field.width; ++x) sum += detail::divergence_at(field, y, x);
    return sum / static_cast<double>(field.pixel_count());
}

}  // namespace vfiqa
