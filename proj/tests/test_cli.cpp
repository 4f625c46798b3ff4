#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <string>

#include <json.hpp>

#include "vfiqa/video_io.hpp"

#include "cli_helpers.hpp"
#include "oracles.hpp"

using namespace vfiqa;

namespace {

VideoSequence small_sequence(int frames, uint32_t seed, int w = 24, int h = 16) {
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

void save_y4m(const VideoSequence& seq, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    write_y4m(seq, out);
}

// Flips `amount` luma bytes per frame so PSNR degrades with amount.
VideoSequence degrade(VideoSequence seq, int amount, uint32_t seed) {
    std::mt19937 rng(seed);
    for (auto& frame : seq.frames)
        for (int k = 0; k < amount; ++k)
            frame.y[rng() % frame.y.size()] ^= 0x7f;
    return seq;
}

}  // namespace

TEST_CASE("compute on identical inputs reports zero epe and capped psnr") {
    cli::TempDir tmp;
    VideoSequence seq = small_sequence(3, 77);
    save_y4m(seq, tmp.file("ref.y4m"));

    auto res = cli::run("compute --ref " + tmp.file("ref.y4m") + " --dis " + tmp.file("ref.y4m") +
                        " --metrics epe,psnr,ssim --out " + tmp.file("report.json"));
    INFO(res.output);
    REQUIRE(res.exit_code == 0);

    std::ifstream in(tmp.file("report.json"));
    nlohmann::json j = nlohmann::json::parse(in);
    CHECK(j["schema_version"] == 1);
    CHECK(j["metrics"]["epe"]["aggregate"] == 0.0);
    CHECK(j["metrics"]["ssim"]["aggregate"] == 1.0);
    CHECK(j["metrics"]["psnr"]["aggregate"] == 100.0);
    CHECK(j["metrics"]["psnr"]["values"][0] == "infinite");
    CHECK(j["exclusions"]["psnr_infinite_frames"] == 3);
}

TEST_CASE("compute writes csv when asked") {
    cli::TempDir tmp;
    VideoSequence ref = small_sequence(2, 78);
    VideoSequence dis = degrade(ref, 20, 5);
    save_y4m(ref, tmp.file("ref.y4m"));
    save_y4m(dis, tmp.file("dis.y4m"));
    auto res = cli::run("compute --ref " + tmp.file("ref.y4m") + " --dis " + tmp.file("dis.y4m") +
                        " --metrics psnr,ssim --out " + tmp.file("report.csv"));
    REQUIRE(res.exit_code == 0);
    std::ifstream in(tmp.file("report.csv"));
    std::string header;
    std::getline(in, header);
    CHECK(header == "sample_kind,index,psnr,ssim");
}

TEST_CASE("unknown metric names exit 2 and list the valid ones") {
    cli::TempDir tmp;
    VideoSequence seq = small_sequence(2, 79);
    save_y4m(seq, tmp.file("ref.y4m"));
    auto res = cli::run("compute --ref " + tmp.file("ref.y4m") + " --dis " + tmp.file("ref.y4m") +
                        " --metrics epe,bogus");
    CHECK(res.exit_code == 2);
    CHECK(res.output.find("unknown metric") != std::string::npos);
    CHECK(res.output.find("vm_epe") != std::string::npos);
}

TEST_CASE("missing flow files exit 3 and name the file") {
    cli::TempDir tmp;
    VideoSequence seq = small_sequence(2, 80);
    save_y4m(seq, tmp.file("ref.y4m"));
    std::filesystem::create_directories(tmp.file("flows"));
    auto res = cli::run("compute --ref " + tmp.file("ref.y4m") + " --dis " + tmp.file("ref.y4m") +
                        " --metrics epe --flow dir:" + tmp.file("flows"));
    CHECK(res.exit_code == 3);
    CHECK(res.output.find("ref_000000.flo") != std::string::npos);
}

TEST_CASE("raw input without dimensions exits 2") {
    cli::TempDir tmp;
    std::ofstream raw(tmp.file("clip.yuv"), std::ios::binary);
    raw << std::string(24 * 16 * 3 / 2, '\x40');
    raw.close();
    auto res = cli::run("compute --ref " + tmp.file("clip.yuv") + " --dis " + tmp.file("clip.yuv") +
                        " --metrics psnr");
    CHECK(res.exit_code == 2);
    CHECK(res.output.find("--width") != std::string::npos);

    auto ok = cli::run("compute --ref " + tmp.file("clip.yuv") + " --dis " + tmp.file("clip.yuv") +
                       " --metrics psnr --width 24 --height 16");
    CHECK(ok.exit_code == 0);
}

TEST_CASE("unreadable inputs exit 3") {
    cli::TempDir tmp;
    auto res = cli::run("compute --ref " + tmp.file("absent.y4m") + " --dis " +
                        tmp.file("absent.y4m") + " --metrics psnr");
    CHECK(res.exit_code == 3);
}

TEST_CASE("bench rejects too few repetitions and emits the four rows") {
    auto res = cli::run("bench --reps 1");
    CHECK(res.exit_code == 2);
    CHECK(res.output.find("10") != std::string::npos);

    auto ok = cli::run("bench --width 64 --height 64 --reps 10");
    REQUIRE(ok.exit_code == 0);
    for (const char* name : {"EPE", "TS", "DIV", "VM-EPE"})
        CHECK(ok.output.find(name) != std::string::npos);
    CHECK(ok.output.find("exclude I/O") != std::string::npos);
}

TEST_CASE("correlate fits the metrics in a manifest") {
    cli::TempDir tmp;
    // six rows with increasing degradation; dmos decreasing with quality
    std::ofstream manifest(tmp.file("manifest.csv"));
    manifest << "ref,dis,dmos,group\n";
    for (int i = 0; i < 6; ++i) {
        VideoSequence ref = small_sequence(2, 100 + i);
        VideoSequence dis = degrade(ref, 4 + 10 * i, 200 + i);
        const std::string ref_path = tmp.file("ref" + std::to_string(i) + ".y4m");
        const std::string dis_path = tmp.file("dis" + std::to_string(i) + ".y4m");
        save_y4m(ref, ref_path);
        save_y4m(dis, dis_path);
        manifest << ref_path << "," << dis_path << "," << (20.0 + 10.0 * i) << ","
                 << (i < 2 ? "small" : "big") << "\n";
    }
    manifest.close();

    auto res = cli::run("correlate --manifest " + tmp.file("manifest.csv") +
                        " --metrics psnr,ssim --out " + tmp.file("table.csv"));
    INFO(res.output);
    REQUIRE(res.exit_code == 0);
    std::ifstream in(tmp.file("table.csv"));
    std::string header, line;
    std::getline(in, header);
    CHECK(header == "metric,group,n,plcc,srcc,krcc,rmse,beta1,beta2,beta3,beta4");
    int rows = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 2);  // psnr + ssim, overall only

    // grouping skips the 2-row group with a warning but still exits 0
    auto grouped = cli::run("correlate --manifest " + tmp.file("manifest.csv") +
                            " --metrics psnr --group-by group --out " + tmp.file("grouped.csv"));
    INFO(grouped.output);
    REQUIRE(grouped.exit_code == 0);
    CHECK(grouped.output.find("warning") != std::string::npos);
    CHECK(grouped.output.find("small") != std::string::npos);
}

TEST_CASE("manifest parse errors carry line numbers") {
    cli::TempDir tmp;
    std::ofstream manifest(tmp.file("bad.csv"));
    manifest << "ref,dis,dmos\n";
    manifest << "a.y4m,b.y4m,not_a_number\n";
    manifest.close();
    auto res = cli::run("correlate --manifest " + tmp.file("bad.csv"));
    CHECK(res.exit_code == 3);
    CHECK(res.output.find("line 2") != std::string::npos);
}

TEST_CASE("identical invocations produce identical report bytes") {
    cli::TempDir tmp;
    VideoSequence ref = small_sequence(3, 90);
    VideoSequence dis = degrade(ref, 12, 6);
    save_y4m(ref, tmp.file("ref.y4m"));
    save_y4m(dis, tmp.file("dis.y4m"));
    const std::string args = "compute --ref " + tmp.file("ref.y4m") + " --dis " +
                             tmp.file("dis.y4m") + " --out ";
    REQUIRE(cli::run(args + tmp.file("a.json")).exit_code == 0);
    REQUIRE(cli::run(args + tmp.file("b.json")).exit_code == 0);

    auto strip_timings = [](const std::string& path) {
        std::ifstream in(path);
        nlohmann::json j = nlohmann::json::parse(in);
        j.erase("stage_ms");
        return j.dump();
    };
    CHECK(strip_timings(tmp.file("a.json")) == strip_timings(tmp.file("b.json")));
}
