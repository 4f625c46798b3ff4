#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "vfiqa/frame.hpp"

namespace vfiqa {

// Per-frame PSNR of identical frames is reported as infinity; sequence
// aggregation substitutes this cap so means stay finite.
inline constexpr double kPsnrAggregationCap = 100.0;

inline void require_same_shape(const LumaView& a, const LumaView& b, const char* op) {
    if (!a.same_shape(b))
        throw std::invalid_argument(std::string(op) + ": image dimensions differ, " +
                                    std::to_string(a.width) + "x" + std::to_string(a.height) +
                                    " vs " + std::to_string(b.width) + "x" + std::to_string(b.height));
}

inline double mse(const LumaView& ref, const LumaView& dis) {
    require_same_shape(ref, dis, "mse");
    const size_t n = static_cast<size_t>(ref.width) * static_cast<size_t>(ref.height);
    double sum = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double d = static_cast<double>(ref.data[i]) - static_cast<double>(dis.data[i]);
        sum += d * d;
    }
    return sum / static_cast<double>(n);
}

inline double psnr(const LumaView& ref, const LumaView& dis) {
    double m = mse(ref, dis);
    if (m == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(255.0 * 255.0 / m);
}

inline double psnr_capped(double value) {
    return value < kPsnrAggregationCap ? value : kPsnrAggregationCap;
}

namespace detail {

inline constexpr int kSsimWindow = 11;

inline const std::array<double, kSsimWindow>& ssim_gaussian_taps() {
    static const std::array<double, kSsimWindow> taps = [] {
        std::array<double, kSsimWindow> t{};
        const double sigma = 1.5;
        double sum = 0.0;
        for (int i = 0; i < kSsimWindow; ++i) {
            double d = i - kSsimWindow / 2;
            t[i] = std::exp(-(d * d) / (2.0 * sigma * sigma));
            sum += t[i];
        }
        for (double& w : t) w /= sum;
        return t;
    }();
    return taps;
}

// Separable valid-region Gaussian filtering: output is (w-10) x (h-10).
inline std::vector<double> ssim_filter(const std::vector<double>& img, int w, int h) {
    const auto& taps = ssim_gaussian_taps();
    const int ow = w - kSsimWindow + 1;
    const int oh = h - kSsimWindow + 1;
    std::vector<double> tmp(static_cast<size_t>(ow) * h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < ow; ++x) {
            double s = 0.0;
            for (int k = 0; k < kSsimWindow; ++k) s += taps[k] * img[static_cast<size_t>(y) * w + x + k];
            tmp[static_cast<size_t>(y) * ow + x] = s;
        }
    }
    std::vector<double> out(static_cast<size_t>(ow) * oh);
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            double s = 0.0;
            for (int k = 0; k < kSsimWindow; ++k) s += taps[k] * tmp[static_cast<size_t>(y + k) * ow + x];
            out[static_cast<size_t>(y) * ow + x] = s;
        }
    }
    return out;
}

}  // namespace detail

// Single-scale SSIM on luma: 11x11 Gaussian window (sigma 1.5), K1=0.01,
// K2=0.03, L=255, averaged over window positions fully inside the image.
inline double ssim(const LumaView& ref, const LumaView& dis) {
    require_same_shape(ref, dis, "ssim");
    const int w = ref.width;
    const int h = ref.height;
    if (w < detail::kSsimWindow || h < detail::kSsimWindow)
        throw std::invalid_argument("ssim: image smaller than the 11x11 window: " +
                                    std::to_string(w) + "x" + std::to_string(h));

    const size_t n = static_cast<size_t>(w) * static_cast<size_t>(h);
    std::vector<double> a(n), b(n), aa(n), bb(n), ab(n);
    for (size_t i = 0; i < n; ++i) {
        a[i] = static_cast<double>(ref.data[i]);
        b[i] = static_cast<double>(dis.data[i]);
        aa[i] = a[i] * a[i];
        bb[i] = b[i] * b[i];
        ab[i] = a[i] * b[i];
    }

    const auto mu_a = detail::ssim_filter(a, w, h);
    const auto mu_b = detail::ssim_filter(b, w, h);
    const auto m_aa = detail::ssim_filter(aa, w, h);
    const auto m_bb = detail::ssim_filter(bb, w, h);
    const auto m_ab = detail::ssim_filter(ab, w, h);

    const double c1 = (0.01 * 255.0) * (0.01 * 255.0);
    const double c2 = (0.03 * 255.0) * (0.03 * 255.0);

    double sum = 0.0;
    for (size_t i = 0; i < mu_a.size(); ++i) {
        const double var_a = m_aa[i] - mu_a[i] * mu_a[i];
        const double var_b = m_bb[i] - mu_b[i] * mu_b[i];
        const double cov = m_ab[i] - mu_a[i] * mu_b[i];
        const double num = (2.0 * mu_a[i] * mu_b[i] + c1) * (2.0 * cov + c2);
        const double den = (mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + c1) * (var_a + var_b + c2);
        sum += num / den;
    }
    return sum / static_cast<double>(mu_a.size());
}

// Maps a nonnegative motion error onto (0, 1]: zero error keeps the full
// image score, large errors drive the weight towards zero.
inline double motion_weight(double alpha) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
        throw std::invalid_argument("motion_weight: alpha must be finite and >= 0, got " +
                                    std::to_string(alpha));
    return 1.0 / (1.0 + alpha);
}

inline double weighted_metric(double image_score, double alpha) {
    return motion_weight(alpha) * image_score;
}

}  // namespace vfiqa
