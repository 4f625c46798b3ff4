#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "vfiqa/errors.hpp"
#include "vfiqa/flo_io.hpp"
#include "vfiqa/frame.hpp"
#include "vfiqa/image_metrics.hpp"
#include "vfiqa/map_export.hpp"
#include "vfiqa/motion_estimation.hpp"
#include "vfiqa/spatial_metrics.hpp"
#include "vfiqa/temporal_metrics.hpp"

namespace vfiqa {

enum class FlowSourceKind { Builtin, Directory };

// Where motion fields come from: the built-in estimator, or pre-computed
// .flo files named ref_NNNNNN.flo / dis_NNNNNN.flo by pair index.
struct FlowSource {
    FlowSourceKind kind = FlowSourceKind::Builtin;
    std::string directory;
};

inline const std::vector<std::string>& all_metric_names() {
    static const std::vector<std::string> names = {
        "div",      "epe",      "psnr",    "psnr_div", "psnr_epe", "psnr_ts", "sdis",
        "ssim",     "ssim_div", "ssim_epe", "ssim_ts",  "ts",       "vm_epe"};
    return names;
}

// Motion metric a weighted metric multiplies into its image score, empty for
// plain metrics.
inline std::string weighted_base(const std::string& metric) {
    if (metric == "psnr_epe" || metric == "ssim_epe") return "epe";
    if (metric == "psnr_ts" || metric == "ssim_ts") return "ts";
    if (metric == "psnr_div" || metric == "ssim_div") return "div";
    return {};
}

struct MetricConfig {
    std::vector<std::string> metrics = all_metric_names();
    EstimatorConfig estimator{};
    VmConfig vm{};
    FlowSource flow{};
    int threads = 0;  // 0 = auto
    // When set, per-pair endpoint-error and divergence maps are written here
    // as PGM and CSV (visualization aid; directory must exist).
    std::string map_dump_dir;
};

inline void validate(const MetricConfig& cfg) {
    const auto& known = all_metric_names();
    auto listing = [&known] {
        std::string s;
        for (size_t i = 0; i < known.size(); ++i) s += (i ? ", " : "") + known[i];
        return s;
    };
    for (const auto& m : cfg.metrics) {
        if (std::find(known.begin(), known.end(), m) == known.end())
            throw std::invalid_argument("unknown metric \"" + m + "\"; valid names: " + listing());
    }
    if (cfg.metrics.empty()) throw std::invalid_argument("no metrics enabled; valid names: " + listing());
    auto enabled = [&cfg](const std::string& m) {
        return std::find(cfg.metrics.begin(), cfg.metrics.end(), m) != cfg.metrics.end();
    };
    for (const auto& m : cfg.metrics) {
        const std::string base = weighted_base(m);
        if (!base.empty() && !enabled(base))
            throw std::invalid_argument("metric \"" + m + "\" requires its motion metric \"" +
                                        base + "\" to be enabled");
    }
    validate(cfg.estimator);
    validate(cfg.vm);
}

struct MetricSeries {
    // "pair": one sample per consecutive frame pair; "frame": one per frame.
    std::string sample_kind;
    std::vector<int64_t> indices;
    std::vector<double> values;  // plain psnr may hold +inf for identical frames
    double aggregate = 0.0;
};

struct MetricReport {
    int width = 0;
    int height = 0;
    int64_t frame_count = 0;
    std::map<std::string, MetricSeries> metrics;
    int64_t ts_excluded_pixels = 0;
    int64_t psnr_infinite_frames = 0;
    int64_t flo_replaced_samples = 0;
    std::map<std::string, double> stage_ms;
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

inline double series_mean(const std::string& name, const std::vector<double>& values) {
    if (values.empty()) return 0.0;
    double sum = 0.0;
    for (double v : values) sum += (name == "psnr") ? psnr_capped(v) : v;
    return sum / static_cast<double>(values.size());
}

inline std::string flo_pair_path(const std::string& dir, const char* role, int64_t pair_index) {
    char name[32];
    std::snprintf(name, sizeof(name), "%s_%06lld.flo", role, static_cast<long long>(pair_index));
    return (std::filesystem::path(dir) / name).string();
}

inline MotionField load_pair_flow(const std::string& dir, const char* role, int64_t pair_index,
                                  int width, int height, int64_t& replaced) {
    const std::string path = flo_pair_path(dir, role, pair_index);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("missing flow file: " + path);
    FloReadResult r = read_flo(in);
    if (r.field.width != width || r.field.height != height)
        throw std::invalid_argument("flow file " + path + " is " + std::to_string(r.field.width) +
                                    "x" + std::to_string(r.field.height) + ", frames are " +
                                    std::to_string(width) + "x" + std::to_string(height));
    replaced += static_cast<int64_t>(r.replaced_samples);
    return std::move(r.field);
}

}  // namespace detail

// Scores a distorted sequence against its reference: flow per consecutive
// pair, every enabled metric per pair (image metrics per frame), arithmetic
// mean across samples as the sequence aggregate.
inline MetricReport score_sequences(const VideoSequence& ref, const VideoSequence& dis,
                                    const MetricConfig& cfg = {}) {
    validate(cfg);
    if (ref.frames.size() != dis.frames.size())
        throw std::invalid_argument("sequences differ in frame count: " +
                                    std::to_string(ref.frames.size()) + " vs " +
                                    std::to_string(dis.frames.size()));
    if (ref.frames.empty()) throw std::invalid_argument("empty sequences");
    const int w = ref.frames.front().width;
    const int h = ref.frames.front().height;
    for (const auto& seq : {std::cref(ref), std::cref(dis)})
        for (const Frame& f : seq.get().frames)
            if (f.width != w || f.height != h)
                throw std::invalid_argument("all frames must share dimensions");

    auto enabled = [&cfg](const char* m) {
        return std::find(cfg.metrics.begin(), cfg.metrics.end(), m) != cfg.metrics.end();
    };

    MetricReport report;
    report.width = w;
    report.height = h;
    report.frame_count = static_cast<int64_t>(ref.frames.size());

    auto series = [&report](const char* name, const char* kind) -> MetricSeries& {
        MetricSeries& s = report.metrics[name];
        if (s.sample_kind.empty()) s.sample_kind = kind;
        return s;
    };
    auto push = [&series](const char* name, const char* kind, int64_t index, double value) {
        MetricSeries& s = series(name, kind);
        s.indices.push_back(index);
        s.values.push_back(value);
    };
    auto timed = [&report](const char* stage, auto&& fn) {
        const auto start = detail::Clock::now();
        if constexpr (std::is_void_v<decltype(fn())>) {
            fn();
            report.stage_ms[stage] += detail::ms_since(start);
        } else {
            auto value = fn();
            report.stage_ms[stage] += detail::ms_since(start);
            return value;
        }
    };

    const bool need_ref_flow = enabled("epe") || enabled("sdis");
    const bool need_dis_flow = need_ref_flow || enabled("ts") || enabled("div") || enabled("vm_epe");
    const bool need_psnr = enabled("psnr") || enabled("psnr_epe") || enabled("psnr_ts") || enabled("psnr_div");
    const bool need_ssim = enabled("ssim") || enabled("ssim_epe") || enabled("ssim_ts") || enabled("ssim_div");

    const int64_t pairs = report.frame_count - 1;
    std::optional<MotionField> prev_dis_flow;

    for (int64_t t = 0; t < pairs; ++t) {
        MotionField f_ref, f_dis;
        if (need_dis_flow) {
            auto start = detail::Clock::now();
            if (cfg.flow.kind == FlowSourceKind::Builtin) {
                if (need_ref_flow)
                    f_ref = estimate_flow(ref.frames[static_cast<size_t>(t)],
                                          ref.frames[static_cast<size_t>(t + 1)], cfg.estimator,
                                          cfg.threads);
                f_dis = estimate_flow(dis.frames[static_cast<size_t>(t)],
                                      dis.frames[static_cast<size_t>(t + 1)], cfg.estimator,
                                      cfg.threads);
            } else {
                if (need_ref_flow)
                    f_ref = detail::load_pair_flow(cfg.flow.directory, "ref", t, w, h,
                                                   report.flo_replaced_samples);
                f_dis = detail::load_pair_flow(cfg.flow.directory, "dis", t, w, h,
                                               report.flo_replaced_samples);
            }
            report.stage_ms["motion_estimation"] += detail::ms_since(start);
        }

        if (enabled("epe"))
            push("epe", "pair", t, timed("epe", [&] { return epe(f_ref, f_dis); }));
        if (enabled("div"))
            push("div", "pair", t, timed("div", [&] { return div_metric(f_dis); }));

        double vm_dis = 0.0;
        if (enabled("vm_epe") || enabled("sdis")) {
            const char* stage = enabled("vm_epe") ? "vm_epe" : "sdis";
            vm_dis = timed(stage, [&] { return vm_epe(f_dis, cfg.vm); });
            if (enabled("vm_epe")) push("vm_epe", "pair", t, vm_dis);
        }
        if (enabled("sdis")) {
            const double vm_ref = timed("sdis", [&] { return vm_epe(f_ref, cfg.vm); });
            push("sdis", "pair", t, std::abs(vm_dis - vm_ref));
        }

        if (!cfg.map_dump_dir.empty()) {
            auto dump = [&](const char* stem, const ScalarFieldMap& map) {
                char name[48];
                std::snprintf(name, sizeof(name), "%s_%06lld", stem, static_cast<long long>(t));
                const auto base = std::filesystem::path(cfg.map_dump_dir) / name;
                std::ofstream pgm(base.string() + ".pgm", std::ios::binary);
                if (!pgm) throw IoError("cannot write map file " + base.string() + ".pgm");
                write_map_pgm(map, pgm);
                std::ofstream csv(base.string() + ".csv");
                if (!csv) throw IoError("cannot write map file " + base.string() + ".csv");
                write_map_csv(map, csv);
            };
            if (enabled("epe")) {
                dump("epe", epe_map(f_ref, f_dis));
                dump("epe_weight", epe_weight_map(f_ref, f_dis));
            }
            if (enabled("div")) dump("div", divergence_map(f_dis));
        }

        if (enabled("ts")) {
            if (prev_dis_flow) {
                const auto stats = timed("ts", [&] {
                    return temporal_smoothness_stats(*prev_dis_flow, f_dis);
                });
                report.ts_excluded_pixels += stats.excluded_pixels;
                push("ts", "pair", t - 1, stats.value);
            }
            prev_dis_flow = std::move(f_dis);
        }
    }

    std::vector<double> psnr_per_frame, ssim_per_frame;
    if (need_psnr || need_ssim) {
        for (int64_t i = 0; i < report.frame_count; ++i) {
            const LumaView a = luma(ref.frames[static_cast<size_t>(i)]);
            const LumaView b = luma(dis.frames[static_cast<size_t>(i)]);
            if (need_psnr) {
                const double v = timed("psnr", [&] { return psnr(a, b); });
                if (std::isinf(v)) ++report.psnr_infinite_frames;
                psnr_per_frame.push_back(v);
                if (enabled("psnr")) push("psnr", "frame", i, v);
            }
            if (need_ssim) {
                const double v = timed("ssim", [&] { return ssim(a, b); });
                ssim_per_frame.push_back(v);
                if (enabled("ssim")) push("ssim", "frame", i, v);
            }
        }
    }

    // Weighted samples pair an image score with the motion error of the pair
    // starting at that frame; PSNR enters at its aggregation cap so weighted
    // means stay finite.
    for (const auto& name : cfg.metrics) {
        const std::string base = weighted_base(name);
        if (base.empty()) continue;
        const bool is_psnr = name.rfind("psnr", 0) == 0;
        const MetricSeries& alpha = report.metrics.at(base);
        const std::vector<double>& image = is_psnr ? psnr_per_frame : ssim_per_frame;
        for (size_t k = 0; k < alpha.indices.size(); ++k) {
            const int64_t pair_index = alpha.indices[k];
            double score = image[static_cast<size_t>(pair_index)];
            if (is_psnr) score = psnr_capped(score);
            push(name.c_str(), "pair", pair_index, weighted_metric(score, alpha.values[k]));
        }
    }

    for (auto& [name, s] : report.metrics) s.aggregate = detail::series_mean(name, s.values);
    return report;
}

struct BenchRow {
    std::string metric;
    double motion_est_ms = 0.0;
    double calc_ms = 0.0;
    double total_ms = 0.0;
};

struct BenchTable {
    int width = 0;
    int height = 0;
    int repetitions = 0;
    std::vector<BenchRow> rows;
    std::string note;
};

namespace detail {

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline Frame random_textured_frame(int width, int height, uint32_t seed) {
    Frame f = make_frame(width, height);
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> dist(0, 255);
    for (auto& s : f.y) s = static_cast<uint8_t>(dist(rng));
    return f;
}

inline MotionField random_flow(int width, int height, uint32_t seed, double amplitude = 8.0) {
    MotionField f(width, height);
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-amplitude, amplitude);
    for (auto& c : f.u) c = dist(rng);
    for (auto& c : f.v) c = dist(rng);
    return f;
}

}  // namespace detail

// Per-frame stage timings on synthetic inputs, shaped like a three-column
// runtime table: motion-estimation time, metric calculation time, and their
// sum. EPE compares reference and distorted fields so it pays for two
// estimations per pair; the no-reference metrics pay for one. I/O is
// excluded throughout.
inline BenchTable benchmark(int width, int height, int repetitions,
                            const EstimatorConfig& est = {}, const VmConfig& vm = {},
                            int threads = 0) {
    if (repetitions < 10)
        throw std::invalid_argument("benchmark: need at least 10 repetitions, got " +
                                    std::to_string(repetitions));
    check_yuv420_dimensions(width, height);
    validate(est);
    validate(vm);

    const Frame frame_a = detail::random_textured_frame(width, height, 0xbead5u);
    const Frame frame_b = detail::random_textured_frame(width, height, 0xfeed5u);
    const MotionField flow_a = detail::random_flow(width, height, 11u);
    const MotionField flow_b = detail::random_flow(width, height, 23u);

    volatile double sink = 0.0;
    auto time_reps = [&](auto&& fn) {
        std::vector<double> samples;
        samples.reserve(static_cast<size_t>(repetitions));
        for (int r = 0; r < repetitions; ++r) {
            const auto start = detail::Clock::now();
            sink = sink + fn();
            samples.push_back(detail::ms_since(start));
        }
        return detail::median(samples);
    };

    const double est_ms = time_reps([&] {
        return estimate_flow(frame_a, frame_b, est, threads).u[0];
    });
    const double epe_ms = time_reps([&] { return epe(flow_a, flow_b); });
    const double ts_ms = time_reps([&] { return temporal_smoothness(flow_a, flow_b); });
    const double div_ms = time_reps([&] { return div_metric(flow_a); });
    const double vm_ms = time_reps([&] { return vm_epe(flow_a, vm); });

    BenchTable table;
    table.width = width;
    table.height = height;
    table.repetitions = repetitions;
    table.note = "synthetic frames and flow fields; timings exclude I/O";
    table.rows = {
        BenchRow{"EPE", 2.0 * est_ms, epe_ms, 2.0 * est_ms + epe_ms},
        BenchRow{"TS", est_ms, ts_ms, est_ms + ts_ms},
        BenchRow{"DIV", est_ms, div_ms, est_ms + div_ms},
        BenchRow{"VM-EPE", est_ms, vm_ms, est_ms + vm_ms},
    };
    return table;
}

}  // namespace vfiqa
