#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "chromnet/metrics.hpp"

namespace chromnet::metrics {

struct ReportRow {
    std::string metric;
    std::string target;
    std::string model;
    double value = 0;

    friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

/// Rows mae, p_0.5, p_1 (fractions), mape (percent) and n.
std::vector<ReportRow> report_rows(const EvalReport& r, const std::string& target, const std::string& model);

// CSV header `metric,target,model,value`; values in shortest round-trip form.
std::string report_csv(const std::vector<ReportRow>& rows);
std::vector<ReportRow> parse_report_csv(const std::string& text);

// CSV header `bin_lo,bin_hi,n,q1,median,q3,whisker_lo,whisker_hi`; empty bins
// leave the statistic columns blank.
std::string grouped_csv(const std::vector<GroupStats>& groups);

std::string svg_histogram(const std::map<int, std::size_t>& histogram, const std::string& title,
                          const std::string& x_label);
std::string svg_boxplot(const std::vector<GroupStats>& groups, const std::string& title, const std::string& y_label);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

} // namespace chromnet::metrics
