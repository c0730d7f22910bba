#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cade/augment.hpp"
#include "cade/error.hpp"
#include "cade/eval.hpp"
#include "cade/hash.hpp"
#include "cade/manifest.hpp"
#include "cade/pipeline_runner.hpp"
#include "cade/report.hpp"
#include "cade/stats.hpp"
#include "cade/training.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;
constexpr int kExitUsage = 64;

struct CommonArgs {
    std::string work_dir;

    fs::path resolve(const std::string& p) const {
        fs::path path(p);
        if (work_dir.empty() || path.is_absolute()) return path;
        return fs::path(work_dir) / path;
    }
};

int cmd_augment(const CommonArgs& common, const std::string& manifest_file,
                const std::string& preset_name, std::uint64_t seed,
                const std::string& out_dir, int views, std::optional<int> val_cap,
                int resize_side) {
    cade::runner::AugmentOptions options;
    options.preset = cade::augment::preset_from_string(preset_name);
    options.seed = seed;
    options.n_local = views;
    options.val_cap = val_cap;
    options.resize_side = resize_side;
    const fs::path manifest_path = common.resolve(manifest_file);
    const auto manifest = cade::load_manifest(manifest_path);
    const int n = cade::runner::run_augment(manifest, manifest_path, options,
                                            common.resolve(out_dir));
    std::cout << "augment: wrote " << n << " images\n";
    return kExitOk;
}

int cmd_corrupt(const CommonArgs& common, const std::string& manifest_file,
                std::uint64_t seed, const std::string& out_dir, int replicates, int max_k) {
    cade::runner::CorruptOptions options;
    options.seed = seed;
    options.replicates = replicates;
    options.max_k = max_k;
    const fs::path manifest_path = common.resolve(manifest_file);
    const auto manifest = cade::load_manifest(manifest_path);
    const int n = cade::runner::run_corrupt(manifest, manifest_path, options,
                                            common.resolve(out_dir));
    std::cout << "corrupt: wrote " << n << " images\n";
    return kExitOk;
}

int cmd_consensus(const CommonArgs& common, const std::string& manifest_file,
                  const std::string& strategy, const std::string& out_dir) {
    cade::runner::ConsensusOptions options;
    if (strategy != "all") {
        const auto s = cade::consensus::gt_strategy_from_string(strategy);
        if (s == cade::consensus::GtStrategy::Random ||
            s == cade::consensus::GtStrategy::Multiple)
            throw cade::ValidationError(
                "consensus: 'random' and 'multiple' are training-time strategies; "
                "emit the spot masks instead");
        options.strategy = s;
    }
    const fs::path manifest_path = common.resolve(manifest_file);
    const auto manifest = cade::load_manifest(manifest_path);
    const int n = cade::runner::run_consensus(manifest, manifest_path, options,
                                              common.resolve(out_dir));
    std::cout << "consensus: processed " << n << " samples\n";
    return kExitOk;
}

int cmd_plan(const CommonArgs& common, const std::string& base_file,
             const std::string& frames_file, const std::string& tiers_csv,
             double fraction, std::uint64_t seed, const std::string& out_file,
             const std::string& config_out) {
    if (!config_out.empty()) {
        std::ofstream out(common.resolve(config_out));
        if (!out) throw cade::IoError("cannot write " + config_out);
        out << cade::training::training_config_preset();
    }

    std::set<cade::SampleTier> tiers;
    std::stringstream ss(tiers_csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok == "hq") tiers.insert(cade::SampleTier::HQFrame);
        else if (tok == "mq") tiers.insert(cade::SampleTier::MQFrame);
        else if (tok == "lq") tiers.insert(cade::SampleTier::LQFrame);
        else throw cade::ValidationError("plan: unknown tier '" + tok + "' (use hq,mq,lq)");
    }

    const auto base = cade::load_manifest(common.resolve(base_file));
    const auto frames = cade::load_manifest(common.resolve(frames_file));
    cade::Rng rng(seed);
    auto [augmented, plan] = cade::training::plan_frame_addition(base, frames, tiers,
                                                                 fraction, rng);
    cade::save_manifest(augmented, common.resolve(out_file));
    std::cout << "plan: manifest grew from " << base.records.size() << " to "
              << augmented.records.size() << " records\n";
    return kExitOk;
}

int cmd_evaluate(const CommonArgs& common, const std::string& manifest_file,
                 const std::vector<std::string>& pred_files, const std::string& fusion,
                 const std::string& gt, const std::string& out_file) {
    const fs::path manifest_path = common.resolve(manifest_file);
    const auto manifest = cade::load_manifest(manifest_path);

    cade::eval::EvalConfig cfg;
    cfg.fusion = cade::eval::fusion_from_string(fusion);
    cfg.gt = cade::consensus::gt_strategy_from_string(gt);

    std::vector<std::vector<cade::eval::PredictionRecord>> runs;
    std::vector<std::string> hashes;
    for (const auto& f : pred_files) {
        const fs::path path = common.resolve(f);
        runs.push_back(cade::eval::load_predictions_csv(path));
        hashes.push_back(cade::file_hash_hex(path));
    }

    const auto gt_masks = cade::eval::resolve_gt_masks(manifest, manifest_path, cfg.gt);
    cfg.compute_mean_dice = !gt_masks.empty();
    auto report = cade::eval::evaluate(manifest, runs, gt_masks, cfg);
    report.manifest_hash = cade::file_hash_hex(manifest_path);
    report.prediction_hashes = hashes;

    cade::report::save_report(report, common.resolve(out_file));
    std::cout << "evaluate: " << report.metrics.size() << " metrics over " << report.n_runs
              << " run(s)\n";
    return kExitOk;
}

int cmd_compare(const CommonArgs& common, const std::vector<std::string>& report_files,
                double alpha, const std::string& out_file) {
    if (report_files.size() < 2)
        throw cade::ValidationError("compare: need a reference and at least one comparator");
    std::vector<cade::report::ModelReport> models;
    for (const auto& f : report_files)
        models.push_back(cade::report::load_model_report(common.resolve(f)));

    std::vector<cade::stats::ModelGrid> comparators;
    for (std::size_t i = 1; i < models.size(); ++i)
        comparators.push_back(cade::report::to_grid(models[i]));
    const auto result =
        cade::stats::compare_models(cade::report::to_grid(models[0]), comparators, alpha);

    std::ofstream out(common.resolve(out_file));
    if (!out) throw cade::IoError("cannot write " + out_file);
    out << cade::report::comparison_to_json(result);

    int significant = 0;
    for (const auto& c : result.by_metric) significant += c.significant;
    for (const auto& c : result.by_test_set) significant += c.significant;
    std::cout << "compare: " << result.by_metric.size() + result.by_test_set.size()
              << " tests, " << significant << " significant at alpha=" << alpha << "\n";
    return kExitOk;
}

int cmd_report(const CommonArgs& common, const std::vector<std::string>& inputs,
               const std::string& model, const std::string& merge_out,
               const std::string& csv_out, const std::string& table_out,
               const std::string& plot_out, const std::string& plot_metric,
               const std::string& plot_reference) {
    if (inputs.empty()) throw cade::ValidationError("report: no input reports");

    const bool model_inputs = !merge_out.empty() || !model.empty();
    std::vector<cade::report::TableInput> rows;
    if (model_inputs) {
        std::vector<cade::eval::EvalReport> reports;
        for (const auto& f : inputs)
            reports.push_back(cade::report::load_report(common.resolve(f)));
        auto merged = cade::report::merge_reports(model.empty() ? "model" : model, reports);
        if (!merge_out.empty()) {
            cade::report::save_model_report(merged, common.resolve(merge_out));
            std::cout << "report: merged " << reports.size() << " test sets\n";
        }
        for (const auto& [name, r] : merged.test_sets)
            rows.push_back({name, r.metrics});
    } else {
        std::set<std::string> used;
        for (const auto& f : inputs) {
            auto r = cade::report::load_report(common.resolve(f));
            std::string label = r.test_set;
            if (!used.insert(label).second) {
                label += " (" + fs::path(f).stem().string() + ")";
                used.insert(label);
            }
            rows.push_back({label, r.metrics});
        }
    }

    if (!csv_out.empty()) {
        std::ofstream out(common.resolve(csv_out));
        if (!out) throw cade::IoError("cannot write " + csv_out);
        out << cade::report::render_csv(rows);
    }
    if (!table_out.empty()) {
        std::ofstream out(common.resolve(table_out));
        if (!out) throw cade::IoError("cannot write " + table_out);
        out << cade::report::render_text_table(rows);
    }
    if (!plot_out.empty()) {
        cade::report::PlotSpec spec;
        spec.title = plot_metric;
        for (const auto& row : rows) {
            auto it = row.metrics.find(plot_metric);
            if (it == row.metrics.end())
                throw cade::ValidationError("report: metric '" + plot_metric +
                                            "' missing from " + row.row_label);
            spec.bars.push_back({row.row_label, it->second.mean, it->second.std});
        }
        if (!plot_reference.empty()) {
            // "mean,std"
            const auto comma = plot_reference.find(',');
            if (comma == std::string::npos)
                throw cade::ValidationError("report: --plot-reference wants MEAN,STD");
            spec.reference = {{std::stod(plot_reference.substr(0, comma)),
                               std::stod(plot_reference.substr(comma + 1))}};
        }
        cade::report::render_barplot(spec, common.resolve(plot_out));
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Benchmark tooling for endoscopic CADe development pipelines"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    CommonArgs common;
    app.add_option("--work-dir", common.work_dir, "Base directory for relative paths");

    // augment
    auto* augment = app.add_subcommand("augment", "Apply an augmentation preset to a manifest");
    std::string aug_manifest, aug_preset, aug_out;
    std::uint64_t aug_seed = 0;
    int aug_views = 8, aug_resize = 256;
    int aug_val_cap = 0;
    augment->add_option("--manifest", aug_manifest)->required();
    augment->add_option("--preset", aug_preset)->required();
    augment->add_option("--seed", aug_seed)->required();
    augment->add_option("--out-dir", aug_out)->required();
    augment->add_option("--views", aug_views, "Local views per sample (pretraining presets)");
    augment->add_option("--val-cap", aug_val_cap, "Cap parameter draws to the first K buckets");
    augment->add_option("--resize", aug_resize, "Pre-resize side, 0 keeps native size");

    // corrupt
    auto* corrupt = app.add_subcommand("corrupt", "Generate a corrupted robustness test set");
    std::string cor_manifest, cor_out;
    std::uint64_t cor_seed = 0;
    int cor_replicates = 5, cor_max_k = 5;
    corrupt->add_option("--manifest", cor_manifest)->required();
    corrupt->add_option("--seed", cor_seed)->required();
    corrupt->add_option("--out-dir", cor_out)->required();
    corrupt->add_option("--replicates", cor_replicates);
    corrupt->add_option("--max-k", cor_max_k);

    // consensus
    auto* consensus = app.add_subcommand("consensus", "Build consensus GT masks from delineations");
    std::string con_manifest, con_strategy = "all", con_out;
    consensus->add_option("--manifest", con_manifest)->required();
    consensus->add_option("--strategy", con_strategy,
                          "plausible|soft|sweet|hard|average|all");
    consensus->add_option("--out-dir", con_out)->required();

    // plan
    auto* plan = app.add_subcommand("plan", "Plan video-frame addition to a training manifest");
    std::string plan_base, plan_frames, plan_tiers, plan_out, plan_config;
    double plan_fraction = 0.10;
    std::uint64_t plan_seed = 0;
    plan->add_option("--base", plan_base)->required();
    plan->add_option("--frames", plan_frames)->required();
    plan->add_option("--tiers", plan_tiers, "Comma list of hq,mq,lq")->required();
    plan->add_option("--fraction", plan_fraction, "0.10, 0.50 or 1.00")->required();
    plan->add_option("--seed", plan_seed)->required();
    plan->add_option("--out", plan_out)->required();
    plan->add_option("--config-out", plan_config, "Also export the trainer config preset");

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "Score prediction files against a manifest");
    std::string eval_manifest, eval_fusion = "average", eval_gt = "plausible", eval_out;
    std::vector<std::string> eval_preds;
    evaluate->add_option("--manifest", eval_manifest)->required();
    evaluate->add_option("--pred", eval_preds, "Prediction CSVs, one per run")->required();
    evaluate->add_option("--fusion", eval_fusion, "cls|seg|average|or|and");
    evaluate->add_option("--gt", eval_gt, "soft|plausible|sweet|hard");
    evaluate->add_option("--out", eval_out)->required();

    // compare
    auto* compare = app.add_subcommand("compare", "Wilcoxon + BH comparison of model reports");
    std::vector<std::string> cmp_reports;
    double cmp_alpha = 0.05;
    std::string cmp_out;
    compare->add_option("--reports", cmp_reports, "Reference first, then comparators")->required();
    compare->add_option("--alpha", cmp_alpha);
    compare->add_option("--out", cmp_out)->required();

    // report
    auto* report = app.add_subcommand("report", "Merge reports, render tables and plots");
    std::vector<std::string> rep_inputs;
    std::string rep_model, rep_merge, rep_csv, rep_table, rep_plot, rep_plot_metric = "auroc_cls",
                rep_plot_ref;
    report->add_option("inputs", rep_inputs, "Evaluation report JSONs")->required();
    report->add_option("--model", rep_model, "Model name for --merge");
    report->add_option("--merge", rep_merge, "Write a merged model report");
    report->add_option("--csv", rep_csv);
    report->add_option("--table", rep_table);
    report->add_option("--plot", rep_plot, "Write an SVG bar plot");
    report->add_option("--plot-metric", rep_plot_metric);
    report->add_option("--plot-reference", rep_plot_ref, "MEAN,STD dashed reference");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::RequiredError& e) {
        // a missing subcommand is a usage error; a missing option of a
        // recognized subcommand is a validation error
        if (app.get_subcommands().empty()) {
            std::cerr << e.what() << "\n\n" << app.help() << "\n";
            return kExitUsage;
        }
        std::cerr << e.what() << "\n";
        return kExitValidation;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help() << "\n";
        return kExitUsage;
    }

    try {
        if (augment->parsed())
            return cmd_augment(common, aug_manifest, aug_preset, aug_seed, aug_out, aug_views,
                               aug_val_cap > 0 ? std::optional<int>(aug_val_cap) : std::nullopt,
                               aug_resize);
        if (corrupt->parsed())
            return cmd_corrupt(common, cor_manifest, cor_seed, cor_out, cor_replicates,
                               cor_max_k);
        if (consensus->parsed())
            return cmd_consensus(common, con_manifest, con_strategy, con_out);
        if (plan->parsed())
            return cmd_plan(common, plan_base, plan_frames, plan_tiers, plan_fraction,
                            plan_seed, plan_out, plan_config);
        if (evaluate->parsed())
            return cmd_evaluate(common, eval_manifest, eval_preds, eval_fusion, eval_gt,
                                eval_out);
        if (compare->parsed())
            return cmd_compare(common, cmp_reports, cmp_alpha, cmp_out);
        if (report->parsed())
            return cmd_report(common, rep_inputs, rep_model, rep_merge, rep_csv, rep_table,
                              rep_plot, rep_plot_metric, rep_plot_ref);
    } catch (const cade::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const cade::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitUsage;
}
