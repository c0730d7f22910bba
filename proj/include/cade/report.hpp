#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cade/eval.hpp"
#include "cade/stats.hpp"

namespace cade::report {

std::string report_to_json(const eval::EvalReport& report);
eval::EvalReport report_from_json_text(const std::string& text);
eval::EvalReport load_report(const std::filesystem::path& path);
void save_report(const eval::EvalReport& report, const std::filesystem::path& path);

// A model's evaluation reports keyed by test set.
struct ModelReport {
    std::string model;
    std::map<std::string, eval::EvalReport> test_sets;
};

// Merging refuses inputs whose manifest hashes disagree for the same test set.
ModelReport merge_reports(const std::string& model,
                          const std::vector<eval::EvalReport>& reports);

std::string model_report_to_json(const ModelReport& report);
ModelReport load_model_report(const std::filesystem::path& path);
void save_model_report(const ModelReport& report, const std::filesystem::path& path);

// Mean values per (test set, metric) for the statistics module.
stats::ModelGrid to_grid(const ModelReport& report);

std::string comparison_to_json(const stats::ComparisonResult& result);

// Tables over a shared metric grid: CSV keeps full precision, the text table
// prints mean+-std at 3 decimals with the best value per column marked.
struct TableInput {
    std::string row_label;  // model or configuration name
    std::map<std::string, eval::MetricSummary> metrics;
};

std::string render_csv(const std::vector<TableInput>& rows);
std::string render_text_table(const std::vector<TableInput>& rows);

// "0.974+-.004" style cell used by the text table.
std::string format_cell(double mean, double std);

struct PlotBar {
    std::string label;
    double mean = 0.0;
    double std = 0.0;
};

struct PlotSpec {
    std::string title;
    std::vector<PlotBar> bars;
    std::optional<std::pair<double, double>> reference;  // mean, std
    std::optional<std::pair<double, double>> y_range;

    void validate() const;
};

// Deterministic SVG: one rect per bar, an error bar per bar, and a dashed
// reference line with a translucent band when present.
std::string render_barplot_svg(const PlotSpec& spec);
void render_barplot(const PlotSpec& spec, const std::filesystem::path& path);

}  // namespace cade::report
