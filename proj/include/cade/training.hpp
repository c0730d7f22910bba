#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "cade/consensus.hpp"
#include "cade/manifest.hpp"
#include "cade/rng.hpp"

namespace cade::training {

struct LossConfig {
    double label_smoothing = 0.01;
    double dice_smooth = 1.0;
    double w_bce = 1.0;
    double w_dice = 1.0;

    void validate() const;
};

struct LossResult {
    double loss = 0.0;
    std::vector<double> grad;  // d loss / d pred, same shape as pred
};

// Mean binary cross-entropy with smoothed targets t' = t(1-eps) + eps/2.
// Predictions are clamped to [1e-7, 1-1e-7] before the logs.
LossResult bce_loss(std::span<const double> pred, std::span<const double> target,
                    const LossConfig& cfg = {});

// Soft-Dice loss 1 - (2*sum(p*t)+s)/(sum(p)+sum(t)+s); targets must be binary.
LossResult dice_loss(std::span<const double> pred, std::span<const double> target,
                     const LossConfig& cfg = {});

// Composite segmentation loss per GT strategy:
//   spot strategies and Random: w_bce*BCE + w_dice*Dice against one binary mask
//   Multiple: mean of the composite over the four masks
//   Average: BCE only (Dice needs binary targets)
LossResult composite_seg_loss(std::span<const double> pred,
                              const std::vector<std::vector<double>>& targets,
                              consensus::GtStrategy strategy,
                              const LossConfig& cfg, Rng& rng);

struct ControllerConfig {
    int plateau_window = 10;
    double lr_factor = 10.0;
    int max_reductions = 3;
    int patience = 25;
    double min_delta = 5e-4;  // "0.05%" on [0,1]-scaled metrics, read as absolute
};

enum class MetricMode { Minimize, Maximize };

// Plateau scheduler + early stopping. The state is seeded with a baseline
// metric so the first non-improving epoch already counts.
struct ControllerState {
    double best_metric = 0.0;
    int epochs_since_improvement = 0;
    int plateau_counter = 0;
    double initial_lr = 0.0;
    double lr = 0.0;
    int reductions_used = 0;
    bool stopped = false;

    static ControllerState initial(double lr0, double baseline_metric);
};

ControllerState controller_step(ControllerState state, double val_metric, MetricMode mode,
                                const ControllerConfig& cfg = {});

// Samples `batch_size` ids: each slot picks a class with p = 0.5, then an
// example uniformly within that class (with replacement).
std::vector<std::string> balanced_batch(const DatasetManifest& manifest, int batch_size,
                                        Rng& rng);

struct FrameAdditionPlan {
    std::set<SampleTier> tiers;
    double fraction = 0.0;
    std::map<SampleTier, std::vector<std::string>> selected;  // ids per tier
};

// Appends floor(fraction * available) frames per tier, sampled uniformly
// without replacement, to a copy of the base manifest.
std::pair<DatasetManifest, FrameAdditionPlan> plan_frame_addition(
    const DatasetManifest& base, const DatasetManifest& frames,
    const std::set<SampleTier>& tiers, double fraction, Rng& rng);

// Optimizer / scheduler constants exported for external trainers, as JSON text.
std::string training_config_preset();

}  // namespace cade::training
