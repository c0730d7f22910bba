#include "cade/training.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "cade/error.hpp"

namespace cade::training {

void LossConfig::validate() const {
    if (!(label_smoothing >= 0.0 && label_smoothing < 0.5))
        throw ValidationError("label_smoothing must be in [0, 0.5)");
    if (!(dice_smooth > 0.0)) throw ValidationError("dice_smooth must be > 0");
    if (w_bce < 0.0 || w_dice < 0.0) throw ValidationError("loss weights must be >= 0");
}

namespace {

constexpr double kProbClamp = 1e-7;

void require_same_size(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ValidationError("loss: shape mismatch");
}

}  // namespace

LossResult bce_loss(std::span<const double> pred, std::span<const double> target,
                    const LossConfig& cfg) {
    cfg.validate();
    require_same_size(pred, target);
    const double eps = cfg.label_smoothing;
    const double n = static_cast<double>(pred.size());
    LossResult out;
    out.grad.resize(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double p = std::clamp(pred[i], kProbClamp, 1.0 - kProbClamp);
        const double t = target[i] * (1.0 - eps) + eps / 2.0;
        out.loss += -(t * std::log(p) + (1.0 - t) * std::log(1.0 - p));
        out.grad[i] = (-t / p + (1.0 - t) / (1.0 - p)) / n;
    }
    out.loss /= n;
    return out;
}

LossResult dice_loss(std::span<const double> pred, std::span<const double> target,
                     const LossConfig& cfg) {
    cfg.validate();
    require_same_size(pred, target);
    for (double t : target)
        if (t != 0.0 && t != 1.0)
            throw ValidationError("dice_loss: target must be binary (use BCE for soft masks)");
    const double s = cfg.dice_smooth;
    double sum_pt = 0.0, sum_p = 0.0, sum_t = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        sum_pt += pred[i] * target[i];
        sum_p += pred[i];
        sum_t += target[i];
    }
    const double num = 2.0 * sum_pt + s;
    const double den = sum_p + sum_t + s;
    LossResult out;
    out.loss = 1.0 - num / den;
    out.grad.resize(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i)
        out.grad[i] = -(2.0 * target[i] * den - num) / (den * den);
    return out;
}

namespace {

LossResult composite_single(std::span<const double> pred, std::span<const double> target,
                            const LossConfig& cfg) {
    LossResult bce = bce_loss(pred, target, cfg);
    LossResult dsc = dice_loss(pred, target, cfg);
    LossResult out;
    out.loss = cfg.w_bce * bce.loss + cfg.w_dice * dsc.loss;
    out.grad.resize(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i)
        out.grad[i] = cfg.w_bce * bce.grad[i] + cfg.w_dice * dsc.grad[i];
    return out;
}

}  // namespace

LossResult composite_seg_loss(std::span<const double> pred,
                              const std::vector<std::vector<double>>& targets,
                              consensus::GtStrategy strategy,
                              const LossConfig& cfg, Rng& rng) {
    using consensus::GtStrategy;
    switch (strategy) {
        case GtStrategy::SoftSpot:
        case GtStrategy::PlausibleSpot:
        case GtStrategy::SweetSpot:
        case GtStrategy::HardSpot: {
            if (targets.size() != 1)
                throw ValidationError("composite_seg_loss: spot strategies take one mask");
            return composite_single(pred, targets[0], cfg);
        }
        case GtStrategy::Random: {
            if (targets.size() != 4)
                throw ValidationError("composite_seg_loss: Random takes the four consensus masks");
            return composite_single(pred, targets[rng.below(4)], cfg);
        }
        case GtStrategy::Multiple: {
            if (targets.size() != 4)
                throw ValidationError("composite_seg_loss: Multiple takes the four consensus masks");
            LossResult out;
            out.grad.assign(pred.size(), 0.0);
            for (const auto& t : targets) {
                LossResult one = composite_single(pred, t, cfg);
                out.loss += one.loss / 4.0;
                for (std::size_t i = 0; i < pred.size(); ++i) out.grad[i] += one.grad[i] / 4.0;
            }
            return out;
        }
        case GtStrategy::Average: {
            if (targets.size() != 1)
                throw ValidationError("composite_seg_loss: Average takes one soft mask");
            return bce_loss(pred, targets[0], cfg);
        }
    }
    throw ValidationError("composite_seg_loss: unknown strategy");
}

ControllerState ControllerState::initial(double lr0, double baseline_metric) {
    if (!(lr0 > 0.0)) throw ValidationError("controller: lr0 must be > 0");
    ControllerState s;
    s.best_metric = baseline_metric;
    s.initial_lr = lr0;
    s.lr = lr0;
    return s;
}

ControllerState controller_step(ControllerState state, double val_metric, MetricMode mode,
                                const ControllerConfig& cfg) {
    if (state.stopped) throw ValidationError("controller_step: controller already stopped");

    const bool improved = (mode == MetricMode::Maximize)
                              ? (val_metric > state.best_metric + cfg.min_delta)
                              : (val_metric < state.best_metric - cfg.min_delta);
    if (improved) {
        state.best_metric = val_metric;
        state.epochs_since_improvement = 0;
        state.plateau_counter = 0;
        return state;
    }

    ++state.epochs_since_improvement;
    ++state.plateau_counter;

    if (state.plateau_counter >= cfg.plateau_window && state.reductions_used < cfg.max_reductions) {
        state.lr /= cfg.lr_factor;
        ++state.reductions_used;
        state.plateau_counter = 0;
    }
    if (state.epochs_since_improvement >= cfg.patience) state.stopped = true;
    return state;
}

std::vector<std::string> balanced_batch(const DatasetManifest& manifest, int batch_size,
                                        Rng& rng) {
    std::vector<const SampleRecord*> neg, pos;
    for (const auto& r : manifest.records)
        (r.label == 1 ? pos : neg).push_back(&r);
    if (pos.empty() || neg.empty())
        throw ValidationError("balanced_batch: both classes must be present");

    std::vector<std::string> ids;
    ids.reserve(batch_size);
    for (int i = 0; i < batch_size; ++i) {
        const auto& pool = rng.bernoulli(0.5) ? pos : neg;
        ids.push_back(pool[rng.below(pool.size())]->id);
    }
    return ids;
}

std::pair<DatasetManifest, FrameAdditionPlan> plan_frame_addition(
    const DatasetManifest& base, const DatasetManifest& frames,
    const std::set<SampleTier>& tiers, double fraction, Rng& rng) {
    if (tiers.empty()) throw ValidationError("plan_frame_addition: no tiers given");
    if (fraction != 0.10 && fraction != 0.50 && fraction != 1.00)
        throw ValidationError("plan_frame_addition: fraction must be 0.10, 0.50 or 1.00");

    DatasetManifest out = base;
    FrameAdditionPlan plan;
    plan.tiers = tiers;
    plan.fraction = fraction;

    for (SampleTier tier : tiers) {
        std::vector<const SampleRecord*> pool;
        for (const auto& r : frames.records)
            if (r.tier == tier) pool.push_back(&r);
        if (pool.empty())
            throw ValidationError(std::string("plan_frame_addition: tier ") + to_string(tier) +
                                  " absent from frames manifest");
        const std::size_t take = static_cast<std::size_t>(
            std::floor(fraction * static_cast<double>(pool.size())));
        // Partial Fisher-Yates: the first `take` slots are a uniform
        // without-replacement sample.
        std::vector<std::size_t> order(pool.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        for (std::size_t i = 0; i < take; ++i) {
            const std::size_t j = i + rng.below(order.size() - i);
            std::swap(order[i], order[j]);
        }
        auto& selected = plan.selected[tier];
        for (std::size_t i = 0; i < take; ++i) {
            selected.push_back(pool[order[i]]->id);
            out.records.push_back(*pool[order[i]]);
        }
    }
    return {std::move(out), std::move(plan)};
}

std::string training_config_preset() {
    nlohmann::json j = {
        {"optimizer",
         {{"name", "adam"},
          {"amsgrad", true},
          {"weight_decay", 1e-4},
          {"betas", {0.9, 0.999}},
          {"lr_range", {1e-4, 1e-6}}}},
        {"loss",
         {{"classification", "bce"},
          {"segmentation", "bce+dice"},
          {"label_smoothing", 0.01}}},
        {"scheduler",
         {{"kind", "reduce_on_plateau"},
          {"monitor", "val_loss"},
          {"factor", 10.0},
          {"window_epochs", 10},
          {"max_reductions", 3}}},
        {"early_stopping",
         {{"monitor", "val_metric"},
          {"patience_epochs", 25},
          {"min_delta", 5e-4}}},
        {"sampling", {{"class_balance", 0.5}, {"with_replacement", true}}},
        {"seeds", {{"training_cycles", 5}}},
    };
    return j.dump(2) + "\n";
}

}  // namespace cade::training
