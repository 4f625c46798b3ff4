#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "vfiqa/frame.hpp"
#include "vfiqa/motion_field.hpp"
#include "vfiqa/plane.hpp"
#include "vfiqa/spatial_metrics.hpp"
#include "vfiqa/threading.hpp"

namespace vfiqa {

// Knobs of the built-in dense estimator: coarse-to-fine block matching on
// luma with SAD cost, a small prediction penalty, one 3x3 vector-median
// smoothing pass per level, and 1-D parabola sub-pixel refinement.
struct EstimatorConfig {
    int pyramid_levels = 3;
    int block_size = 9;        // odd, >= 3
    int search_radius = 4;     // integer candidates per level, >= 1
    double smoothing_weight = 1.0;  // penalty on deviating from the coarse prediction
};

inline void validate(const EstimatorConfig& cfg) {
    if (cfg.pyramid_levels < 1)
        throw std::invalid_argument("estimator: pyramid_levels must be >= 1");
    if (cfg.block_size < 3 || cfg.block_size % 2 == 0)
        throw std::invalid_argument("estimator: block_size must be odd and >= 3, got " +
                                    std::to_string(cfg.block_size));
    if (cfg.search_radius < 1)
        throw std::invalid_argument("estimator: search_radius must be >= 1");
    if (!(cfg.smoothing_weight >= 0.0) || !std::isfinite(cfg.smoothing_weight))
        throw std::invalid_argument("estimator: smoothing_weight must be finite and >= 0");
}

// Upper bound on output displacement magnitude per component.
inline double max_displacement(const EstimatorConfig& cfg) {
    return (static_cast<double>(cfg.search_radius) + 0.5) *
           (static_cast<double>(1 << cfg.pyramid_levels) - 1.0);
}

namespace detail {

inline Plane<uint8_t> downsample2(const Plane<uint8_t>& src) {
    const int w = std::max(1, src.width / 2);
    const int h = std::max(1, src.height / 2);
    Plane<uint8_t> dst(w, h);
    for (int y = 0; y < h; ++y) {
        const int y0 = 2 * y;
        const int y1 = std::min(2 * y + 1, src.height - 1);
        for (int x = 0; x < w; ++x) {
            const int x0 = 2 * x;
            const int x1 = std::min(2 * x + 1, src.width - 1);
            const int sum = src.at(y0, x0) + src.at(y0, x1) + src.at(y1, x0) + src.at(y1, x1);
            dst.at(y, x) = static_cast<uint8_t>((sum + 2) / 4);
        }
    }
    return dst;
}

// Grid node pixel coordinates: regular stride plus a final node pinned to the
// last pixel so interpolation covers the full extent.
inline std::vector<int> grid_coords(int extent, int stride) {
    std::vector<int> coords;
    for (int p = 0; p < extent; p += stride) coords.push_back(p);
    if (coords.back() != extent - 1) coords.push_back(extent - 1);
    return coords;
}

inline int64_t sad_block(const Plane<uint8_t>& a, const Plane<uint8_t>& b, int cx, int cy, int dx,
                         int dy, int half) {
    const int w = a.width;
    const int h = a.height;
    int64_t acc = 0;
    for (int oy = -half; oy <= half; ++oy) {
        const int ay = std::clamp(cy + oy, 0, h - 1);
        const int by = std::clamp(cy + oy + dy, 0, h - 1);
        for (int ox = -half; ox <= half; ++ox) {
            const int ax = std::clamp(cx + ox, 0, w - 1);
            const int bx = std::clamp(cx + ox + dx, 0, w - 1);
            acc += std::abs(static_cast<int>(a.at(ay, ax)) - static_cast<int>(b.at(by, bx)));
        }
    }
    return acc;
}

// Piecewise-bilinear sample of a grid-resident flow at an arbitrary pixel
// position. coords_x/coords_y are the node pixel coordinates.
inline void sample_grid_flow(const MotionField& grid, const std::vector<int>& coords_x,
                             const std::vector<int>& coords_y, double px, double py, double& out_u,
                             double& out_v) {
    px = std::clamp(px, 0.0, static_cast<double>(coords_x.back()));
    py = std::clamp(py, 0.0, static_cast<double>(coords_y.back()));

    auto locate = [](const std::vector<int>& coords, double p, int stride_hint) {
        if (coords.size() == 1) return size_t{0};
        size_t j = std::min<size_t>(static_cast<size_t>(p) / static_cast<size_t>(stride_hint),
                                    coords.size() - 2);
        while (j + 2 < coords.size() && static_cast<double>(coords[j + 1]) <= p) ++j;
        while (j > 0 && static_cast<double>(coords[j]) > p) --j;
        return j;
    };
    const int stride_x = coords_x.size() > 1 ? coords_x[1] - coords_x[0] : 1;
    const int stride_y = coords_y.size() > 1 ? coords_y[1] - coords_y[0] : 1;
    const size_t jx = locate(coords_x, px, stride_x);
    const size_t jy = locate(coords_y, py, stride_y);

    double fx = 0.0, fy = 0.0;
    size_t jx1 = jx, jy1 = jy;
    if (coords_x.size() > 1) {
        jx1 = jx + 1;
        fx = (px - coords_x[jx]) / static_cast<double>(coords_x[jx1] - coords_x[jx]);
    }
    if (coords_y.size() > 1) {
        jy1 = jy + 1;
        fy = (py - coords_y[jy]) / static_cast<double>(coords_y[jy1] - coords_y[jy]);
    }

    const int gx0 = static_cast<int>(jx), gx1 = static_cast<int>(jx1);
    const int gy0 = static_cast<int>(jy), gy1 = static_cast<int>(jy1);
    out_u = (1.0 - fy) * ((1.0 - fx) * grid.u_at(gy0, gx0) + fx * grid.u_at(gy0, gx1)) +
            fy * ((1.0 - fx) * grid.u_at(gy1, gx0) + fx * grid.u_at(gy1, gx1));
    out_v = (1.0 - fy) * ((1.0 - fx) * grid.v_at(gy0, gx0) + fx * grid.v_at(gy0, gx1)) +
            fy * ((1.0 - fx) * grid.v_at(gy1, gx0) + fx * grid.v_at(gy1, gx1));
}

struct GridLevel {
    MotionField flow;            // one vector per grid node
    std::vector<int> coords_x;   // node pixel x positions
    std::vector<int> coords_y;   // node pixel y positions
};

}  // namespace detail

// Dense forward motion (t -> t+1) between two frames of equal size. Pure and
// deterministic: per-node searches may run on several threads but each node
// writes only its own slot.
inline MotionField estimate_flow(const Frame& from, const Frame& to,
                                 const EstimatorConfig& cfg = {}, int threads = 0) {
    validate(cfg);
    if (from.width != to.width || from.height != to.height)
        throw std::invalid_argument("estimate_flow: frame dimensions differ, " +
                                    std::to_string(from.width) + "x" + std::to_string(from.height) +
                                    " vs " + std::to_string(to.width) + "x" +
                                    std::to_string(to.height));

    // Luma pyramids; stop early once a level would be smaller than one block.
    std::vector<Plane<uint8_t>> pyr_a, pyr_b;
    {
        Plane<uint8_t> a(from.width, from.height), b(to.width, to.height);
        a.data.assign(from.y.begin(), from.y.end());
        b.data.assign(to.y.begin(), to.y.end());
        pyr_a.push_back(std::move(a));
        pyr_b.push_back(std::move(b));
    }
    for (int l = 1; l < cfg.pyramid_levels; ++l) {
        const Plane<uint8_t>& prev = pyr_a.back();
        if (std::min(prev.width, prev.height) / 2 < cfg.block_size) break;
        pyr_a.push_back(detail::downsample2(pyr_a.back()));
        pyr_b.push_back(detail::downsample2(pyr_b.back()));
    }

    const int half = cfg.block_size / 2;
    const int radius = cfg.search_radius;
    const int span = 2 * radius + 1;
    const double block_area = static_cast<double>(cfg.block_size) * cfg.block_size;
    const int stride = std::max(2, (cfg.block_size + 1) / 2);

    detail::GridLevel coarse;
    for (int level = static_cast<int>(pyr_a.size()) - 1; level >= 0; --level) {
        const Plane<uint8_t>& a = pyr_a[static_cast<size_t>(level)];
        const Plane<uint8_t>& b = pyr_b[static_cast<size_t>(level)];

        detail::GridLevel current;
        current.coords_x = detail::grid_coords(a.width, stride);
        current.coords_y = detail::grid_coords(a.height, stride);
        const int gw = static_cast<int>(current.coords_x.size());
        const int gh = static_cast<int>(current.coords_y.size());
        current.flow = MotionField(gw, gh);

        const bool coarsest = coarse.flow.width == 0;
        detail::parallel_for_rows(gh, threads, [&](int gy) {
            std::vector<int64_t> sad(static_cast<size_t>(span) * span);
            const int ny = current.coords_y[static_cast<size_t>(gy)];
            for (int gx = 0; gx < gw; ++gx) {
                const int nx = current.coords_x[static_cast<size_t>(gx)];

                double pred_u = 0.0, pred_v = 0.0;
                if (!coarsest) {
                    detail::sample_grid_flow(coarse.flow, coarse.coords_x, coarse.coords_y,
                                             static_cast<double>(nx) / 2.0,
                                             static_cast<double>(ny) / 2.0, pred_u, pred_v);
                    pred_u *= 2.0;
                    pred_v *= 2.0;
                }
                const int base_dx = static_cast<int>(std::lround(pred_u));
                const int base_dy = static_cast<int>(std::lround(pred_v));

                double best_cost = 0.0;
                double best_mag = 0.0;
                int best_i = -1;
                for (int iy = 0; iy < span; ++iy) {
                    const int dy = base_dy - radius + iy;
                    for (int ix = 0; ix < span; ++ix) {
                        const int dx = base_dx - radius + ix;
                        const int64_t s = detail::sad_block(a, b, nx, ny, dx, dy, half);
                        sad[static_cast<size_t>(iy) * span + ix] = s;
                        const double penalty =
                            cfg.smoothing_weight *
                            (std::abs(dx - pred_u) + std::abs(dy - pred_v)) * block_area;
                        const double cost = static_cast<double>(s) + penalty;
                        const double mag =
                            static_cast<double>(dx) * dx + static_cast<double>(dy) * dy;
                        if (best_i < 0 || cost < best_cost ||
                            (cost == best_cost && mag < best_mag)) {
                            best_cost = cost;
                            best_mag = mag;
                            best_i = iy * span + ix;
                        }
                    }
                }

                const int bi_y = best_i / span;
                const int bi_x = best_i % span;
                double du = static_cast<double>(base_dx - radius + bi_x);
                double dv = static_cast<double>(base_dy - radius + bi_y);

                // Parabola vertex through the SAD slice; skipped on an exact
                // match or a non-convex slice.
                const int64_t s0 = sad[static_cast<size_t>(best_i)];
                if (s0 > 0) {
                    if (bi_x > 0 && bi_x + 1 < span) {
                        const int64_t sm = sad[static_cast<size_t>(bi_y) * span + bi_x - 1];
                        const int64_t sp = sad[static_cast<size_t>(bi_y) * span + bi_x + 1];
                        const int64_t denom = sm - 2 * s0 + sp;
                        if (sm >= s0 && sp >= s0 && denom > 0)
                            du += std::clamp(0.5 * static_cast<double>(sm - sp) /
                                                 static_cast<double>(denom),
                                             -0.5, 0.5);
                    }
                    if (bi_y > 0 && bi_y + 1 < span) {
                        const int64_t sm = sad[static_cast<size_t>(bi_y - 1) * span + bi_x];
                        const int64_t sp = sad[static_cast<size_t>(bi_y + 1) * span + bi_x];
                        const int64_t denom = sm - 2 * s0 + sp;
                        if (sm >= s0 && sp >= s0 && denom > 0)
                            dv += std::clamp(0.5 * static_cast<double>(sm - sp) /
                                                 static_cast<double>(denom),
                                             -0.5, 0.5);
                    }
                }

                current.flow.u_at(gy, gx) = du;
                current.flow.v_at(gy, gx) = dv;
            }
        });

        current.flow = vector_median_filter(current.flow, VmConfig{3});
        coarse = std::move(current);
    }

    // Expand the finest grid to one vector per pixel.
    MotionField dense(from.width, from.height);
    detail::parallel_for_rows(from.height, threads, [&](int y) {
        for (int x = 0; x < from.width; ++x) {
            double u, v;
            detail::sample_grid_flow(coarse.flow, coarse.coords_x, coarse.coords_y,
                                     static_cast<double>(x), static_cast<double>(y), u, v);
            dense.u_at(y, x) = u;
            dense.v_at(y, x) = v;
        }
    });
    return dense;
}

}  // namespace vfiqa
