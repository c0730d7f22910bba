#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cade/augment.hpp"
#include "cade/consensus.hpp"
#include "cade/image.hpp"
#include "cade/manifest.hpp"

namespace cade::eval {

// One model's output for one sample: classification-branch score plus the
// segmentation map (or just its maximum pixel value).
struct PredictionRecord {
    std::string id;
    double cls_score = 0.0;
    std::optional<SoftMask> seg_map;
    double seg_max = 0.0;
};

enum class FusionStrategy { ClsOnly, SegOnly, Average, Or, And };

FusionStrategy fusion_from_string(const std::string& s);
const char* to_string(FusionStrategy strategy);

double fuse(double cls_score, double seg_max, FusionStrategy strategy);

// Mann-Whitney AUROC with half credit for ties; equals the trapezoidal
// ROC area. Requires both classes.
double auroc(std::span<const double> scores, std::span<const int> labels);

// Average precision (step interpolation); tied scores form one group.
// Requires at least one positive.
double auprc(std::span<const double> scores, std::span<const int> labels);

// Mean Dice over GT-bearing samples between the thresholded prediction and
// the ground-truth mask (>= threshold counts as positive).
double mean_dice(const std::vector<PredictionRecord>& predictions,
                 const std::map<std::string, BinaryMask>& gt_masks,
                 double threshold = 0.5);

// Convenience form resolving the GT masks from the manifest's delineations.
double mean_dice(const std::vector<PredictionRecord>& predictions,
                 const DatasetManifest& manifest,
                 const std::filesystem::path& manifest_path,
                 double threshold = 0.5,
                 consensus::GtStrategy gt = consensus::GtStrategy::PlausibleSpot);

// Builds the per-sample GT masks for every record with >= 2 delineations,
// selecting the best pair when three are present.
std::map<std::string, BinaryMask> resolve_gt_masks(
    const DatasetManifest& manifest, const std::filesystem::path& manifest_path,
    consensus::GtStrategy strategy = consensus::GtStrategy::PlausibleSpot);

struct MetricSummary {
    double mean = 0.0;
    double std = 0.0;  // sample std (n-1); 0 with single_run flag when n = 1
    std::vector<double> per_run;
};

struct EvalReport {
    std::string test_set;
    std::string gt_strategy;
    std::string fusion;  // primary fusion strategy echoed in tables
    int n_runs = 0;
    bool single_run = false;
    std::map<std::string, MetricSummary> metrics;
    std::string manifest_hash;
    std::vector<std::string> prediction_hashes;
};

struct EvalConfig {
    double dice_threshold = 0.5;
    consensus::GtStrategy gt = consensus::GtStrategy::PlausibleSpot;
    FusionStrategy fusion = FusionStrategy::Average;
    bool compute_mean_dice = true;
};

using RunMetrics = std::map<std::string, double>;

// Metrics for one run: auroc/auprc for both branches, all five fusion
// variants, and mean Dice when GT masks are supplied.
RunMetrics run_metrics(const DatasetManifest& manifest,
                       const std::vector<PredictionRecord>& predictions,
                       const std::map<std::string, BinaryMask>& gt_masks,
                       const EvalConfig& cfg);

// Mean +/- sample std across runs; every manifest id must have a prediction
// in every run.
EvalReport evaluate(const DatasetManifest& manifest,
                    const std::vector<std::vector<PredictionRecord>>& runs,
                    const std::map<std::string, BinaryMask>& gt_masks,
                    const EvalConfig& cfg);

// CSV `id,cls_score,seg_max[,seg_path]`. When seg_path is present the map is
// loaded and its max pixel cross-checked against the stated value (> 1/255
// difference is an error).
std::vector<PredictionRecord> load_predictions_csv(const std::filesystem::path& path);

using ModelCallback =
    std::function<PredictionRecord(const SampleRecord&, const RgbImage&)>;

// Four-way augmented validation: evaluates the callback on `seeds.size()`
// differently augmented copies of the validation set and averages the
// per-metric results.
RunMetrics augmented_validation(const DatasetManifest& manifest,
                                const std::filesystem::path& manifest_path,
                                const ModelCallback& callback,
                                const augment::PipelinePreset& preset,
                                std::span<const std::uint64_t> seeds,
                                const EvalConfig& cfg);

}  // namespace cade::eval
