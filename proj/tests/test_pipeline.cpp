#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <random>

#include "vfiqa/flo_io.hpp"
#include "vfiqa/pipeline.hpp"

#include "cli_helpers.hpp"
#include "oracles.hpp"

using namespace vfiqa;

namespace {

// Bright square on a dark background translating horizontally by `speed`
// pixels per frame.
VideoSequence translating_square(int frames, int speed, int size = 32) {
    VideoSequence seq;
    seq.frame_rate = {30, 1};
    for (int t = 0; t < frames; ++t) {
        Frame f = make_frame(size, size, t);
        std::fill(f.y.begin(), f.y.end(), 30);
        const int x0 = 4 + t * speed;
        for (int y = 10; y < 18 && y < size; ++y)
            for (int x = x0; x < x0 + 8 && x < size; ++x)
                f.y[static_cast<size_t>(y) * size + x] = 220;
        seq.frames.push_back(std::move(f));
    }
    return seq;
}

VideoSequence noise_sequence(int frames, int w, int h, uint32_t seed) {
    VideoSequence seq;
    seq.frame_rate = {30, 1};
    std::mt19937 rng(seed);
    for (int t = 0; t < frames; ++t) {
        Frame f = oracle::random_frame(w, h, rng());
        f.index = t;
        seq.frames.push_back(std::move(f));
    }
    return seq;
}

}  // namespace

TEST_CASE("scoring a sequence against itself gives the fixed points") {
    VideoSequence seq = translating_square(4, 1);
    MetricReport r = score_sequences(seq, seq);

    CHECK(r.metrics.at("epe").aggregate == 0.0);
    for (double v : r.metrics.at("epe").values) CHECK(v == 0.0);
    CHECK(r.metrics.at("sdis").aggregate == 0.0);
    CHECK(r.metrics.at("ssim").aggregate == 1.0);
    CHECK(r.metrics.at("psnr").aggregate == 100.0);  // capped infinities
    CHECK(r.psnr_infinite_frames == 4);
    for (double v : r.metrics.at("psnr").values) CHECK(std::isinf(v));
    // dis == ref, so TS and DIV are the reference's own values; just check presence
    CHECK(r.metrics.at("ts").values.size() == 2);
    CHECK(r.metrics.at("div").values.size() == 3);
}

TEST_CASE("three frames produce two flow pairs and one TS sample") {
    VideoSequence seq = translating_square(3, 1);
    MetricReport r = score_sequences(seq, seq);
    CHECK(r.frame_count == 3);
    CHECK(r.metrics.at("epe").values.size() == 2);
    CHECK(r.metrics.at("ts").values.size() == 1);
    CHECK(r.metrics.at("psnr").values.size() == 3);
    CHECK(r.metrics.at("psnr_epe").values.size() == 2);
    CHECK(r.metrics.at("psnr_ts").values.size() == 1);
}

TEST_CASE("aggregates equal the mean of per-sample values") {
    VideoSequence ref = translating_square(4, 1);
    VideoSequence dis = translating_square(4, 2);
    MetricReport r = score_sequences(ref, dis);
    for (const auto& [name, series] : r.metrics) {
        REQUIRE(!series.values.empty());
        double sum = 0.0;
        for (double v : series.values) sum += name == "psnr" ? psnr_capped(v) : v;
        CHECK(r.metrics.at(name).aggregate ==
              Catch::Approx(sum / static_cast<double>(series.values.size())).margin(1e-12));
    }
}

TEST_CASE("pipeline values equal composing the modules directly") {
    VideoSequence ref = translating_square(3, 1);
    VideoSequence dis = translating_square(3, 2);
    MetricConfig cfg;
    MetricReport r = score_sequences(ref, dis, cfg);

    for (int t = 0; t < 2; ++t) {
        MotionField f_ref = estimate_flow(ref.frames[t], ref.frames[t + 1], cfg.estimator);
        MotionField f_dis = estimate_flow(dis.frames[t], dis.frames[t + 1], cfg.estimator);
        CHECK(r.metrics.at("epe").values[t] == epe(f_ref, f_dis));
        CHECK(r.metrics.at("div").values[t] == div_metric(f_dis));
        CHECK(r.metrics.at("vm_epe").values[t] == vm_epe(f_dis, cfg.vm));
        CHECK(r.metrics.at("sdis").values[t] ==
              std::abs(vm_epe(f_dis, cfg.vm) - vm_epe(f_ref, cfg.vm)));
        const double alpha = epe(f_ref, f_dis);
        CHECK(r.metrics.at("psnr_epe").values[t] ==
              weighted_metric(psnr_capped(psnr(luma(ref.frames[t]), luma(dis.frames[t]))), alpha));
        CHECK(r.metrics.at("ssim_epe").values[t] ==
              weighted_metric(ssim(luma(ref.frames[t]), luma(dis.frames[t])), alpha));
    }
    MotionField d0 = estimate_flow(dis.frames[0], dis.frames[1], cfg.estimator);
    MotionField d1 = estimate_flow(dis.frames[1], dis.frames[2], cfg.estimator);
    CHECK(r.metrics.at("ts").values[0] == temporal_smoothness(d0, d1));
}

TEST_CASE("reports are identical across thread counts") {
    VideoSequence ref = noise_sequence(3, 48, 32, 1);
    VideoSequence dis = noise_sequence(3, 48, 32, 2);
    MetricConfig one, many;
    one.threads = 1;
    many.threads = 4;
    MetricReport r1 = score_sequences(ref, dis, one);
    MetricReport r2 = score_sequences(ref, dis, many);
    REQUIRE(r1.metrics.size() == r2.metrics.size());
    for (const auto& [name, series] : r1.metrics) {
        CHECK(series.values == r2.metrics.at(name).values);
        CHECK(series.indices == r2.metrics.at(name).indices);
        CHECK(series.aggregate == r2.metrics.at(name).aggregate);
    }
}

TEST_CASE("config validation catches unknown and dependent metrics") {
    VideoSequence seq = translating_square(2, 1);
    MetricConfig cfg;
    cfg.metrics = {"epe", "nonsense"};
    REQUIRE_THROWS_MATCHES(score_sequences(seq, seq, cfg), std::invalid_argument,
                           Catch::Matchers::MessageMatches(
                               Catch::Matchers::ContainsSubstring("unknown metric") &&
                               Catch::Matchers::ContainsSubstring("vm_epe")));
    cfg.metrics = {"psnr_epe"};
    REQUIRE_THROWS_MATCHES(score_sequences(seq, seq, cfg), std::invalid_argument,
                           Catch::Matchers::MessageMatches(
                               Catch::Matchers::ContainsSubstring("requires its motion metric")));
    cfg.metrics = {"psnr_epe", "epe"};
    CHECK_NOTHROW(score_sequences(seq, seq, cfg));
}

TEST_CASE("sequence shape mismatches are rejected") {
    VideoSequence a = translating_square(3, 1);
    VideoSequence b = translating_square(2, 1);
    CHECK_THROWS_AS(score_sequences(a, b), std::invalid_argument);
    VideoSequence c = translating_square(3, 1, 16);
    CHECK_THROWS_AS(score_sequences(a, c), std::invalid_argument);
}

TEST_CASE("external flow directory is honoured and misses are named") {
    cli::TempDir tmp;
    VideoSequence ref = noise_sequence(3, 12, 10, 3);
    VideoSequence dis = noise_sequence(3, 12, 10, 4);

    std::mt19937 rng(5);
    std::vector<MotionField> ref_flows, dis_flows;
    for (int t = 0; t < 2; ++t) {
        ref_flows.push_back(oracle::random_float_field(12, 10, rng()));
        dis_flows.push_back(oracle::random_float_field(12, 10, rng()));
        char name[32];
        std::snprintf(name, sizeof(name), "ref_%06d.flo", t);
        std::ofstream r(tmp.file(name), std::ios::binary);
        write_flo(ref_flows.back(), r);
        std::snprintf(name, sizeof(name), "dis_%06d.flo", t);
        std::ofstream d(tmp.file(name), std::ios::binary);
        write_flo(dis_flows.back(), d);
    }

    MetricConfig cfg;
    cfg.metrics = {"epe", "div"};
    cfg.flow.kind = FlowSourceKind::Directory;
    cfg.flow.directory = tmp.path().string();
    MetricReport r = score_sequences(ref, dis, cfg);
    for (int t = 0; t < 2; ++t) {
        CHECK(r.metrics.at("epe").values[t] == epe(ref_flows[t], dis_flows[t]));
        CHECK(r.metrics.at("div").values[t] == div_metric(dis_flows[t]));
    }

    // a third pair has no files
    VideoSequence ref4 = noise_sequence(4, 12, 10, 3);
    VideoSequence dis4 = noise_sequence(4, 12, 10, 4);
    REQUIRE_THROWS_MATCHES(score_sequences(ref4, dis4, cfg), IoError,
                           Catch::Matchers::MessageMatches(
                               Catch::Matchers::ContainsSubstring("ref_000002.flo")));
}

TEST_CASE("map dumps are written when requested") {
    cli::TempDir tmp;
    VideoSequence ref = translating_square(2, 1);
    VideoSequence dis = translating_square(2, 2);
    MetricConfig cfg;
    cfg.metrics = {"epe", "div"};
    cfg.map_dump_dir = tmp.path().string();
    score_sequences(ref, dis, cfg);
    CHECK(std::filesystem::exists(tmp.file("epe_000000.pgm")));
    CHECK(std::filesystem::exists(tmp.file("epe_000000.csv")));
    CHECK(std::filesystem::exists(tmp.file("epe_weight_000000.pgm")));
    CHECK(std::filesystem::exists(tmp.file("div_000000.csv")));
}

TEST_CASE("benchmark validates repetitions and keeps its totals consistent") {
    CHECK_THROWS_AS(benchmark(64, 64, 1), std::invalid_argument);

    BenchTable t = benchmark(64, 64, 10);
    REQUIRE(t.rows.size() == 4);
    CHECK(t.rows[0].metric == "EPE");
    CHECK(t.rows[1].metric == "TS");
    CHECK(t.rows[2].metric == "DIV");
    CHECK(t.rows[3].metric == "VM-EPE");
    for (const auto& row : t.rows) {
        CHECK(row.total_ms == row.motion_est_ms + row.calc_ms);
        CHECK(row.calc_ms >= 0.0);
    }
    // EPE needs reference and distorted fields: twice the estimation cost
    CHECK(t.rows[0].motion_est_ms == Catch::Approx(2.0 * t.rows[2].motion_est_ms));
}

TEST_CASE("epe calculation time grows with pixel count") {
    auto median_epe_ms = [](int w, int h) {
        MotionField a = oracle::random_field(w, h, 1);
        MotionField b = oracle::random_field(w, h, 2);
        volatile double sink = 0.0;
        std::vector<double> samples;
        for (int rep = 0; rep < 11; ++rep) {
            const auto start = std::chrono::steady_clock::now();
            sink = sink + epe(a, b);
            samples.push_back(
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                    .count());
        }
        std::sort(samples.begin(), samples.end());
        return samples[samples.size() / 2];
    };
    const double t_small = median_epe_ms(960, 540);
    const double t_large = median_epe_ms(1920, 1080);
    CHECK(t_large > t_small);
    CHECK(t_large < 20.0 * std::max(t_small, 1e-3));
}
