#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "rumour/eval.hpp"

namespace rumour {

/// One line of report.csv.
struct ReportRow {
    std::string run_id;
    std::string representation;
    std::string algorithm;
    std::string fold = "holdout";  // "holdout", fold number, or "mean"
    std::uint64_t seed = 0;
    std::string config_hash;
    std::string model_tag;
    std::array<double, 10> metrics{};  // kMetricNames order

    bool operator==(const ReportRow&) const = default;
};

ReportRow to_row(const RunReport& report, const std::string& fold, const std::string& config_hash);
/// Per-fold rows followed by a "mean" row.
std::vector<ReportRow> to_rows(const CVReport& report, const std::string& config_hash);

std::string report_csv(std::span<const ReportRow> rows);
std::string report_text(std::span<const ReportRow> rows);
std::vector<ReportRow> parse_report_csv(const std::string& text, const std::string& source);
std::vector<ReportRow> read_report_csv(const std::filesystem::path& path);

struct Comparison {
    std::string csv;
    std::string text;
    /// Per algorithm with both representations: embedding minus features39.
    std::vector<ReportRow> improvements;
};

/// Table of all rows plus improvement rows. Holdout or mean rows take part in deltas.
Comparison compare_report(std::span<const ReportRow> rows);

void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace rumour
