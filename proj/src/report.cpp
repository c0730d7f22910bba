#include "cade/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cade/error.hpp"

using nlohmann::json;

namespace cade::report {

namespace {

json summary_to_json(const eval::MetricSummary& s) {
    return {{"mean", s.mean}, {"std", s.std}, {"per_run", s.per_run}};
}

eval::MetricSummary summary_from_json(const json& j) {
    eval::MetricSummary s;
    s.mean = j.at("mean").get<double>();
    s.std = j.at("std").get<double>();
    s.per_run = j.at("per_run").get<std::vector<double>>();
    return s;
}

json report_to_json_obj(const eval::EvalReport& r) {
    json metrics = json::object();
    for (const auto& [name, s] : r.metrics) metrics[name] = summary_to_json(s);
    return {{"test_set", r.test_set},
            {"gt_strategy", r.gt_strategy},
            {"fusion", r.fusion},
            {"n_runs", r.n_runs},
            {"single_run", r.single_run},
            {"metrics", metrics},
            {"provenance",
             {{"manifest", r.manifest_hash}, {"predictions", r.prediction_hashes}}}};
}

eval::EvalReport report_from_json_obj(const json& j) {
    eval::EvalReport r;
    r.test_set = j.at("test_set").get<std::string>();
    r.gt_strategy = j.at("gt_strategy").get<std::string>();
    r.fusion = j.at("fusion").get<std::string>();
    r.n_runs = j.at("n_runs").get<int>();
    r.single_run = j.at("single_run").get<bool>();
    for (const auto& [name, s] : j.at("metrics").items())
        r.metrics.emplace(name, summary_from_json(s));
    if (j.contains("provenance")) {
        r.manifest_hash = j.at("provenance").at("manifest").get<std::string>();
        r.prediction_hashes =
            j.at("provenance").at("predictions").get<std::vector<std::string>>();
    }
    return r;
}

}  // namespace

std::string report_to_json(const eval::EvalReport& report) {
    return report_to_json_obj(report).dump(2) + "\n";
}

eval::EvalReport report_from_json_text(const std::string& text) {
    try {
        return report_from_json_obj(json::parse(text));
    } catch (const json::exception& e) {
        throw ValidationError(std::string("bad report JSON: ") + e.what());
    }
}

eval::EvalReport load_report(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open report " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return report_from_json_text(ss.str());
}

void save_report(const eval::EvalReport& report, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write report " + path.string());
    out << report_to_json(report);
}

ModelReport merge_reports(const std::string& model,
                          const std::vector<eval::EvalReport>& reports) {
    ModelReport merged;
    merged.model = model;
    for (const auto& r : reports) {
        auto it = merged.test_sets.find(r.test_set);
        if (it != merged.test_sets.end()) {
            if (it->second.manifest_hash != r.manifest_hash)
                throw ValidationError("merge_reports: test set '" + r.test_set +
                                      "' appears with different manifest hashes");
            throw ValidationError("merge_reports: duplicate test set '" + r.test_set + "'");
        }
        merged.test_sets.emplace(r.test_set, r);
    }
    return merged;
}

std::string model_report_to_json(const ModelReport& report) {
    json sets = json::object();
    for (const auto& [name, r] : report.test_sets) sets[name] = report_to_json_obj(r);
    return json{{"model", report.model}, {"test_sets", sets}}.dump(2) + "\n";
}

ModelReport load_model_report(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open report " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        const json j = json::parse(ss.str());
        ModelReport r;
        r.model = j.at("model").get<std::string>();
        for (const auto& [name, obj] : j.at("test_sets").items())
            r.test_sets.emplace(name, report_from_json_obj(obj));
        return r;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("bad model report JSON: ") + e.what());
    }
}

void save_model_report(const ModelReport& report, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write report " + path.string());
    out << model_report_to_json(report);
}

stats::ModelGrid to_grid(const ModelReport& report) {
    stats::ModelGrid grid;
    grid.model = report.model;
    for (const auto& [name, r] : report.test_sets)
        for (const auto& [metric, s] : r.metrics) grid.cells[name][metric] = s.mean;
    return grid;
}

std::string comparison_to_json(const stats::ComparisonResult& result) {
    auto cell_to_json = [](const stats::ComparisonCell& c) {
        json j = {{"family", c.family},
                  {"comparator", c.comparator},
                  {"w", c.test.w_statistic},
                  {"n_effective", c.test.n_effective},
                  {"p_raw", c.test.p_raw},
                  {"method",
                   c.test.method == stats::TestResult::Method::Exact ? "exact" : "normal-approx"},
                  {"degenerate", c.test.degenerate},
                  {"significant", c.significant}};
        if (c.test.p_adjusted) j["p_adjusted"] = *c.test.p_adjusted;
        return j;
    };
    json by_metric = json::array();
    for (const auto& c : result.by_metric) by_metric.push_back(cell_to_json(c));
    json by_test_set = json::array();
    for (const auto& c : result.by_test_set) by_test_set.push_back(cell_to_json(c));
    return json{{"reference", result.reference},
                {"alpha", result.alpha},
                {"by_metric", by_metric},
                {"by_test_set", by_test_set}}
               .dump(2) +
           "\n";
}

namespace {

std::vector<std::string> shared_metric_grid(const std::vector<TableInput>& rows) {
    if (rows.empty()) throw ValidationError("render table: no rows");
    std::vector<std::string> metrics;
    for (const auto& [name, _] : rows[0].metrics) metrics.push_back(name);
    for (const auto& row : rows) {
        if (row.metrics.size() != metrics.size())
            throw ValidationError("render table: metric grid mismatch");
        for (const auto& m : metrics)
            if (!row.metrics.count(m))
                throw ValidationError("render table: metric grid mismatch");
    }
    return metrics;
}

}  // namespace

std::string format_cell(double mean, double std) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", mean);
    std::string cell = buf;
    std::snprintf(buf, sizeof(buf), "%.3f", std);
    std::string sd = buf;
    if (sd.size() > 1 && sd[0] == '0') sd.erase(0, 1);  // "0.004" -> ".004"
    return cell + "±" + sd;
}

std::string render_csv(const std::vector<TableInput>& rows) {
    const auto metrics = shared_metric_grid(rows);
    std::ostringstream out;
    out << "name";
    for (const auto& m : metrics) out << "," << m << "_mean," << m << "_std";
    out << "\n";
    out.setf(std::ios::fmtflags(0), std::ios::floatfield);
    out.precision(17);
    for (const auto& row : rows) {
        out << row.row_label;
        for (const auto& m : metrics) {
            const auto& s = row.metrics.at(m);
            out << "," << s.mean << "," << s.std;
        }
        out << "\n";
    }
    return out.str();
}

std::string render_text_table(const std::vector<TableInput>& rows) {
    const auto metrics = shared_metric_grid(rows);

    // Best mean per column; ties mark every holder.
    std::map<std::string, double> best;
    for (const auto& m : metrics) {
        double b = -1.0;
        for (const auto& row : rows) b = std::max(b, row.metrics.at(m).mean);
        best[m] = b;
    }

    std::vector<std::vector<std::string>> cells;
    std::vector<std::string> header{"name"};
    header.insert(header.end(), metrics.begin(), metrics.end());
    cells.push_back(header);
    for (const auto& row : rows) {
        std::vector<std::string> line{row.row_label};
        for (const auto& m : metrics) {
            const auto& s = row.metrics.at(m);
            std::string cell = format_cell(s.mean, s.std);
            if (rows.size() > 1 && s.mean == best[m]) cell = "*" + cell + "*";
            line.push_back(cell);
        }
        cells.push_back(std::move(line));
    }

    std::vector<std::size_t> widths(cells[0].size(), 0);
    for (const auto& line : cells)
        for (std::size_t i = 0; i < line.size(); ++i) widths[i] = std::max(widths[i], line[i].size());

    std::ostringstream out;
    for (const auto& line : cells) {
        for (std::size_t i = 0; i < line.size(); ++i) {
            out << line[i];
            if (i + 1 < line.size()) out << std::string(widths[i] - line[i].size() + 2, ' ');
        }
        out << "\n";
    }
    return out.str();
}

void PlotSpec::validate() const {
    if (bars.empty()) throw ValidationError("PlotSpec: no bars");
    std::set<std::string> labels;
    for (const auto& b : bars) {
        if (b.std < 0.0) throw ValidationError("PlotSpec: std must be >= 0");
        if (!labels.insert(b.label).second)
            throw ValidationError("PlotSpec: duplicate bar label '" + b.label + "'");
    }
    if (reference && reference->second < 0.0)
        throw ValidationError("PlotSpec: reference std must be >= 0");
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace

std::string render_barplot_svg(const PlotSpec& spec) {
    spec.validate();

    const double width = 120.0 + 90.0 * static_cast<double>(spec.bars.size());
    const double height = 360.0;
    const double left = 70.0, right = width - 30.0;
    const double top = 50.0, bottom = height - 50.0;

    double lo = 0.0, hi = 1.0;
    if (spec.y_range) {
        lo = spec.y_range->first;
        hi = spec.y_range->second;
    } else {
        hi = 0.0;
        for (const auto& b : spec.bars) hi = std::max(hi, b.mean + b.std);
        if (spec.reference) hi = std::max(hi, spec.reference->first + spec.reference->second);
        hi *= 1.1;
        if (hi <= 0.0) hi = 1.0;
    }
    const auto ty = [&](double v) {
        return bottom - (v - lo) / (hi - lo) * (bottom - top);
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width)
        << "\" height=\"" << fmt(height) << "\" viewBox=\"0 0 " << fmt(width) << " "
        << fmt(height) << "\">\n";
    svg << "<text x=\"" << fmt(width / 2) << "\" y=\"24\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"16\">"
        << spec.title << "</text>\n";
    svg << "<line class=\"axis\" x1=\"" << fmt(left) << "\" y1=\"" << fmt(bottom)
        << "\" x2=\"" << fmt(right) << "\" y2=\"" << fmt(bottom)
        << "\" stroke=\"black\"/>\n";
    svg << "<line class=\"axis\" x1=\"" << fmt(left) << "\" y1=\"" << fmt(top) << "\" x2=\""
        << fmt(left) << "\" y2=\"" << fmt(bottom) << "\" stroke=\"black\"/>\n";

    // y ticks
    for (int i = 0; i <= 5; ++i) {
        const double v = lo + (hi - lo) * i / 5.0;
        svg << "<text x=\"" << fmt(left - 8) << "\" y=\"" << fmt(ty(v) + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << fmt(v) << "</text>\n";
    }

    if (spec.reference) {
        const double m = spec.reference->first, s = spec.reference->second;
        if (s > 0.0)
            svg << "<rect class=\"ref-band\" x=\"" << fmt(left) << "\" y=\"" << fmt(ty(m + s))
                << "\" width=\"" << fmt(right - left) << "\" height=\""
                << fmt(std::max(0.0, ty(m - s) - ty(m + s)))
                << "\" fill=\"steelblue\" fill-opacity=\"0.15\"/>\n";
        svg << "<line class=\"ref-line\" x1=\"" << fmt(left) << "\" y1=\"" << fmt(ty(m))
            << "\" x2=\"" << fmt(right) << "\" y2=\"" << fmt(ty(m))
            << "\" stroke=\"steelblue\" stroke-dasharray=\"6 4\"/>\n";
    }

    const double slot = (right - left) / static_cast<double>(spec.bars.size());
    const double bar_w = slot * 0.6;
    for (std::size_t i = 0; i < spec.bars.size(); ++i) {
        const auto& b = spec.bars[i];
        const double cxb = left + slot * (static_cast<double>(i) + 0.5);
        const double x0 = cxb - bar_w / 2.0;
        svg << "<rect class=\"bar\" x=\"" << fmt(x0) << "\" y=\"" << fmt(ty(b.mean))
            << "\" width=\"" << fmt(bar_w) << "\" height=\""
            << fmt(std::max(0.0, bottom - ty(b.mean))) << "\" fill=\"seagreen\"/>\n";
        // error bar (rendered even at zero length)
        svg << "<line class=\"err\" x1=\"" << fmt(cxb) << "\" y1=\"" << fmt(ty(b.mean - b.std))
            << "\" x2=\"" << fmt(cxb) << "\" y2=\"" << fmt(ty(b.mean + b.std))
            << "\" stroke=\"black\"/>\n";
        svg << "<line class=\"err-cap\" x1=\"" << fmt(cxb - 6) << "\" y1=\""
            << fmt(ty(b.mean + b.std)) << "\" x2=\"" << fmt(cxb + 6) << "\" y2=\""
            << fmt(ty(b.mean + b.std)) << "\" stroke=\"black\"/>\n";
        svg << "<line class=\"err-cap\" x1=\"" << fmt(cxb - 6) << "\" y1=\""
            << fmt(ty(b.mean - b.std)) << "\" x2=\"" << fmt(cxb + 6) << "\" y2=\""
            << fmt(ty(b.mean - b.std)) << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << fmt(cxb) << "\" y=\"" << fmt(bottom + 18)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
            << b.label << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void render_barplot(const PlotSpec& spec, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write plot " + path.string());
    out << render_barplot_svg(spec);
}

}  // namespace cade::report
