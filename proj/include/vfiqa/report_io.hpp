#pragma once

#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vfiqa/correlation.hpp"
#include "vfiqa/pipeline.hpp"

namespace vfiqa {

inline constexpr int kReportSchemaVersion = 1;

namespace detail {

inline std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "infinite" : "-infinite";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline nlohmann::json value_to_json(double v) {
    if (std::isinf(v)) return v > 0 ? "infinite" : "-infinite";
    return v;
}

}  // namespace detail

inline nlohmann::json report_to_json(const MetricReport& report, bool include_timings = true) {
    nlohmann::json j;
    j["schema_version"] = kReportSchemaVersion;
    j["width"] = report.width;
    j["height"] = report.height;
    j["frames"] = report.frame_count;
    nlohmann::json metrics = nlohmann::json::object();
    for (const auto& [name, series] : report.metrics) {
        nlohmann::json m;
        m["sample_kind"] = series.sample_kind;
        m["indices"] = series.indices;
        nlohmann::json values = nlohmann::json::array();
        for (double v : series.values) values.push_back(detail::value_to_json(v));
        m["values"] = std::move(values);
        m["aggregate"] = detail::value_to_json(series.aggregate);
        metrics[name] = std::move(m);
    }
    j["metrics"] = std::move(metrics);
    j["exclusions"] = {{"ts_excluded_pixels", report.ts_excluded_pixels},
                       {"psnr_infinite_frames", report.psnr_infinite_frames},
                       {"flo_replaced_samples", report.flo_replaced_samples}};
    if (include_timings) j["stage_ms"] = report.stage_ms;
    return j;
}

inline void write_report_json(const MetricReport& report, std::ostream& out) {
    out << report_to_json(report).dump(2) << '\n';
    if (!out) throw IoError("report json write failed");
}

// Flat CSV: rows are (sample_kind, index), columns are the metrics in
// alphabetical order, then one final aggregate row. Cells are empty where a
// metric has no sample at that position.
inline void write_report_csv(const MetricReport& report, std::ostream& out) {
    out << "sample_kind,index";
    for (const auto& [name, series] : report.metrics) out << ',' << name;
    out << '\n';

    auto emit_rows = [&](const char* kind, int64_t count) {
        for (int64_t i = 0; i < count; ++i) {
            out << kind << ',' << i;
            for (const auto& [name, series] : report.metrics) {
                out << ',';
                if (series.sample_kind != kind) continue;
                for (size_t k = 0; k < series.indices.size(); ++k) {
                    if (series.indices[k] == i) {
                        out << detail::format_double(series.values[k]);
                        break;
                    }
                }
            }
            out << '\n';
        }
    };
    emit_rows("frame", report.frame_count);
    emit_rows("pair", report.frame_count > 0 ? report.frame_count - 1 : 0);

    out << "aggregate,";
    for (const auto& [name, series] : report.metrics)
        out << ',' << detail::format_double(series.aggregate);
    out << '\n';
    if (!out) throw IoError("report csv write failed");
}

// One correlation result row: a metric, optionally restricted to a manifest
// group ("overall" otherwise).
struct EvalTableRow {
    std::string metric;
    std::string group;
    EvalReport report;
};

inline void write_eval_csv(const std::vector<EvalTableRow>& rows, std::ostream& out) {
    out << "metric,group,n,plcc,srcc,krcc,rmse,beta1,beta2,beta3,beta4\n";
    for (const auto& row : rows) {
        out << row.metric << ',' << row.group << ',' << row.report.n << ','
            << detail::format_double(row.report.plcc) << ','
            << detail::format_double(row.report.srcc) << ','
            << detail::format_double(row.report.krcc) << ','
            << detail::format_double(row.report.rmse) << ','
            << detail::format_double(row.report.params.beta1) << ','
            << detail::format_double(row.report.params.beta2) << ','
            << detail::format_double(row.report.params.beta3) << ','
            << detail::format_double(row.report.params.beta4) << '\n';
    }
    if (!out) throw IoError("evaluation csv write failed");
}

inline nlohmann::json eval_to_json(const std::vector<EvalTableRow>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& row : rows) {
        arr.push_back({{"metric", row.metric},
                       {"group", row.group},
                       {"n", row.report.n},
                       {"plcc", row.report.plcc},
                       {"srcc", row.report.srcc},
                       {"krcc", row.report.krcc},
                       {"rmse", row.report.rmse},
                       {"beta", {row.report.params.beta1, row.report.params.beta2,
                                 row.report.params.beta3, row.report.params.beta4}}});
    }
    return arr;
}

inline void write_bench_text(const BenchTable& table, std::ostream& out) {
    char buf[128];
    out << "Benchmark " << table.width << "x" << table.height << ", " << table.repetitions
        << " repetitions (" << table.note << ")\n";
    std::snprintf(buf, sizeof(buf), "%-8s %18s %14s %14s\n", "Metric", "Motion Est. (ms)",
                  "Calc. (ms)", "Total (ms)");
    out << buf;
    for (const auto& row : table.rows) {
        std::snprintf(buf, sizeof(buf), "%-8s %18.3f %14.3f %14.3f\n", row.metric.c_str(),
                      row.motion_est_ms, row.calc_ms, row.total_ms);
        out << buf;
    }
    if (!out) throw IoError("benchmark write failed");
}

inline void write_bench_csv(const BenchTable& table, std::ostream& out) {
    out << "metric,motion_est_ms,calc_ms,total_ms\n";
    for (const auto& row : table.rows)
        out << row.metric << ',' << detail::format_double(row.motion_est_ms) << ','
            << detail::format_double(row.calc_ms) << ',' << detail::format_double(row.total_ms)
            << '\n';
    if (!out) throw IoError("benchmark csv write failed");
}

}  // namespace vfiqa
