// Command-line front end: per-sequence metric reports, DMOS correlation
// tables, and the stage-timing benchmark.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vfiqa/report_io.hpp"
#include "vfiqa/vfiqa.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBadArguments = 2;
constexpr int kExitIoFailure = 3;

struct CommonOptions {
    std::string flow = "builtin";
    std::vector<std::string> metrics;
    int vm_n = 3;
    int levels = 3;
    int block = 9;
    int radius = 4;
    double smoothing = 1.0;
    int threads = 0;
    int width = 0;
    int height = 0;
};

void add_common_options(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--flow", opt.flow, "Flow source: builtin, or dir:<path> with ref_/dis_ .flo files");
    cmd->add_option("--metrics", opt.metrics, "Comma-separated metric list")->delimiter(',');
    cmd->add_option("--vm-n", opt.vm_n, "Vector-median patch size (odd)");
    cmd->add_option("--levels", opt.levels, "Estimator pyramid levels");
    cmd->add_option("--block", opt.block, "Estimator block size (odd)");
    cmd->add_option("--radius", opt.radius, "Estimator search radius per level");
    cmd->add_option("--smoothing", opt.smoothing, "Estimator prediction penalty weight");
    cmd->add_option("--threads", opt.threads, "Worker thread cap (default: VFIQA_THREADS or all cores)");
    cmd->add_option("--width", opt.width, "Frame width for raw YUV inputs");
    cmd->add_option("--height", opt.height, "Frame height for raw YUV inputs");
}

vfiqa::MetricConfig build_config(const CommonOptions& opt) {
    vfiqa::MetricConfig cfg;
    if (!opt.metrics.empty()) cfg.metrics = opt.metrics;
    cfg.vm.patch_size = opt.vm_n;
    cfg.estimator.pyramid_levels = opt.levels;
    cfg.estimator.block_size = opt.block;
    cfg.estimator.search_radius = opt.radius;
    cfg.estimator.smoothing_weight = opt.smoothing;
    cfg.threads = opt.threads;
    if (opt.flow == "builtin") {
        cfg.flow.kind = vfiqa::FlowSourceKind::Builtin;
    } else if (opt.flow.rfind("dir:", 0) == 0) {
        cfg.flow.kind = vfiqa::FlowSourceKind::Directory;
        cfg.flow.directory = opt.flow.substr(4);
        if (cfg.flow.directory.empty())
            throw std::invalid_argument("--flow dir: needs a path, e.g. --flow dir:flows/");
    } else {
        throw std::invalid_argument("--flow must be builtin or dir:<path>, got \"" + opt.flow + "\"");
    }
    vfiqa::validate(cfg);
    return cfg;
}

vfiqa::VideoSequence load_sequence(const std::string& path, const CommonOptions& opt) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw vfiqa::IoError("cannot open " + path);
    const std::string ext = std::filesystem::path(path).extension().string();
    if (ext == ".y4m") return vfiqa::read_y4m(in);
    if (opt.width <= 0 || opt.height <= 0)
        throw std::invalid_argument("raw YUV input " + path +
                                    " needs explicit --width and --height");
    return vfiqa::read_raw_yuv420(in, opt.width, opt.height);
}

void write_text_output(const std::string& out_path, const std::string& default_kind,
                       const std::function<void(std::ostream&, const std::string&)>& writer) {
    if (out_path.empty() || out_path == "-") {
        writer(std::cout, default_kind);
        return;
    }
    std::string kind = default_kind;
    const std::string ext = std::filesystem::path(out_path).extension().string();
    if (ext == ".json") kind = "json";
    if (ext == ".csv") kind = "csv";
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw vfiqa::IoError("cannot write " + out_path);
    writer(out, kind);
}

int run_compute(const CommonOptions& opt, const std::string& ref_path, const std::string& dis_path,
                const std::string& out_path, const std::string& maps_dir) {
    vfiqa::MetricConfig cfg = build_config(opt);
    if (!maps_dir.empty()) {
        std::filesystem::create_directories(maps_dir);
        cfg.map_dump_dir = maps_dir;
    }
    vfiqa::VideoSequence ref = load_sequence(ref_path, opt);
    vfiqa::VideoSequence dis = load_sequence(dis_path, opt);
    vfiqa::MetricReport report = vfiqa::score_sequences(ref, dis, cfg);
    write_text_output(out_path, "json", [&](std::ostream& out, const std::string& kind) {
        if (kind == "csv")
            vfiqa::write_report_csv(report, out);
        else
            vfiqa::write_report_json(report, out);
    });
    return kExitOk;
}

int run_correlate(const CommonOptions& opt, const std::string& manifest_path,
                  const std::string& group_by, const std::string& out_path) {
    if (!group_by.empty() && group_by != "group")
        throw std::invalid_argument("--group-by supports only the manifest's \"group\" column");
    vfiqa::MetricConfig cfg = build_config(opt);

    std::ifstream min(manifest_path);
    if (!min) throw vfiqa::IoError("cannot open manifest " + manifest_path);
    std::vector<vfiqa::ManifestRow> rows = vfiqa::parse_manifest(min);
    if (rows.empty()) throw vfiqa::IoError("manifest " + manifest_path + " has no data rows");

    std::map<std::string, std::vector<double>> scores;  // metric -> per-row aggregate
    std::vector<double> dmos;
    for (const auto& row : rows) {
        vfiqa::VideoSequence ref = load_sequence(row.ref_path, opt);
        vfiqa::VideoSequence dis = load_sequence(row.dis_path, opt);
        vfiqa::MetricReport report = vfiqa::score_sequences(ref, dis, cfg);
        for (const auto& [name, series] : report.metrics)
            scores[name].push_back(series.aggregate);
        dmos.push_back(row.dmos);
    }

    auto evaluate_subset = [&](const std::string& group,
                               const std::vector<size_t>& idx) -> std::vector<vfiqa::EvalTableRow> {
        std::vector<vfiqa::EvalTableRow> out;
        for (const auto& [metric, all_scores] : scores) {
            std::vector<double> s, d;
            for (size_t i : idx) {
                s.push_back(all_scores[i]);
                d.push_back(dmos[i]);
            }
            out.push_back({metric, group, vfiqa::evaluate_metric(s, d)});
        }
        return out;
    };

    std::vector<size_t> all_idx(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) all_idx[i] = i;
    std::vector<vfiqa::EvalTableRow> table = evaluate_subset("overall", all_idx);

    if (!group_by.empty()) {
        std::map<std::string, std::vector<size_t>> groups;
        for (size_t i = 0; i < rows.size(); ++i) groups[rows[i].group].push_back(i);
        for (const auto& [group, idx] : groups) {
            if (idx.size() < 5) {
                std::cerr << "warning: group \"" << group << "\" has only " << idx.size()
                          << " rows (need 5); skipped\n";
                continue;
            }
            auto rows_for_group = evaluate_subset(group, idx);
            table.insert(table.end(), rows_for_group.begin(), rows_for_group.end());
        }
    }

    write_text_output(out_path, "csv", [&](std::ostream& out, const std::string& kind) {
        if (kind == "json")
            out << vfiqa::eval_to_json(table).dump(2) << '\n';
        else
            vfiqa::write_eval_csv(table, out);
    });
    return kExitOk;
}

int run_bench(const CommonOptions& opt, int width, int height, int reps,
              const std::string& out_path) {
    vfiqa::EstimatorConfig est;
    est.pyramid_levels = opt.levels;
    est.block_size = opt.block;
    est.search_radius = opt.radius;
    est.smoothing_weight = opt.smoothing;
    vfiqa::BenchTable table =
        vfiqa::benchmark(width, height, reps, est, vfiqa::VmConfig{opt.vm_n}, opt.threads);
    write_text_output(out_path, "text", [&](std::ostream& out, const std::string& kind) {
        if (kind == "csv")
            vfiqa::write_bench_csv(table, out);
        else
            vfiqa::write_bench_text(table, out);
    });
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Motion-field video quality metrics for frame-interpolated video"};
    app.require_subcommand(1);

    CommonOptions compute_opt, correlate_opt, bench_opt;
    std::string ref_path, dis_path, compute_out, maps_dir;
    std::string manifest_path, group_by, correlate_out;
    int bench_width = 1920, bench_height = 1080, bench_reps = 50;
    std::string bench_out;

    CLI::App* compute = app.add_subcommand("compute", "Score a distorted sequence against its reference");
    compute->add_option("--ref", ref_path, "Reference video (.y4m or raw .yuv)")->required();
    compute->add_option("--dis", dis_path, "Distorted video (.y4m or raw .yuv)")->required();
    compute->add_option("--out", compute_out, "Report file (.json or .csv; default: stdout JSON)");
    compute->add_option("--maps", maps_dir, "Directory for per-pair EPE/divergence map dumps");
    add_common_options(compute, compute_opt);

    CLI::App* correlate = app.add_subcommand("correlate", "Fit metrics against a DMOS manifest");
    correlate->add_option("--manifest", manifest_path, "CSV manifest: ref,dis,dmos[,group]")->required();
    correlate->add_option("--group-by", group_by, "Also evaluate per manifest group");
    correlate->add_option("--out", correlate_out, "Table file (.csv or .json; default: stdout CSV)");
    add_common_options(correlate, correlate_opt);

    CLI::App* bench = app.add_subcommand("bench", "Time motion estimation and metric stages");
    bench->add_option("--width", bench_width, "Benchmark frame width");
    bench->add_option("--height", bench_height, "Benchmark frame height");
    bench->add_option("--reps", bench_reps, "Repetitions per stage (>= 10)");
    bench->add_option("--out", bench_out, "Optional CSV output file");
    add_common_options(bench, bench_opt);
    // bench synthesizes its own frames; hide the raw-input dimensions
    bench->get_option("--flow")->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitBadArguments;
    }

    try {
        if (compute->parsed()) return run_compute(compute_opt, ref_path, dis_path, compute_out, maps_dir);
        if (correlate->parsed()) return run_correlate(correlate_opt, manifest_path, group_by, correlate_out);
        if (bench->parsed()) return run_bench(bench_opt, bench_width, bench_height, bench_reps, bench_out);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBadArguments;
    } catch (const vfiqa::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIoFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return kExitBadArguments;
}
