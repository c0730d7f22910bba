#include "cade/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "cade/error.hpp"
#include "cade/hash.hpp"
#include "cade/image_io.hpp"

namespace cade::eval {

FusionStrategy fusion_from_string(const std::string& s) {
    if (s == "cls") return FusionStrategy::ClsOnly;
    if (s == "seg") return FusionStrategy::SegOnly;
    if (s == "average") return FusionStrategy::Average;
    if (s == "or") return FusionStrategy::Or;
    if (s == "and") return FusionStrategy::And;
    throw ValidationError("unknown fusion strategy '" + s + "'");
}

const char* to_string(FusionStrategy strategy) {
    switch (strategy) {
        case FusionStrategy::ClsOnly: return "cls";
        case FusionStrategy::SegOnly: return "seg";
        case FusionStrategy::Average: return "average";
        case FusionStrategy::Or: return "or";
        case FusionStrategy::And: return "and";
    }
    return "?";
}

double fuse(double cls_score, double seg_max, FusionStrategy strategy) {
    switch (strategy) {
        case FusionStrategy::ClsOnly: return cls_score;
        case FusionStrategy::SegOnly: return seg_max;
        case FusionStrategy::Average: return (cls_score + seg_max) / 2.0;
        case FusionStrategy::Or: return std::max(cls_score, seg_max);
        case FusionStrategy::And: return std::min(cls_score, seg_max);
    }
    throw ValidationError("fuse: unknown strategy");
}

double auroc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw ValidationError("auroc: shape mismatch");
    const std::size_t n = scores.size();
    std::size_t pos = 0;
    for (int l : labels) pos += (l == 1);
    const std::size_t neg = n - pos;
    if (pos == 0 || neg == 0) throw ValidationError("auroc: both classes required");

    // Midranks of the scores; AUROC from the positive rank sum.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k)
            if (labels[order[k]] == 1) rank_sum_pos += midrank;
        i = j;
    }
    const double u = rank_sum_pos - static_cast<double>(pos) * (pos + 1) / 2.0;
    return u / (static_cast<double>(pos) * static_cast<double>(neg));
}

double auprc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw ValidationError("auprc: shape mismatch");
    const std::size_t n = scores.size();
    std::size_t pos = 0;
    for (int l : labels) pos += (l == 1);
    if (pos == 0) throw ValidationError("auprc: at least one positive required");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    double ap = 0.0;
    double tp = 0.0, fp = 0.0;
    double prev_recall = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        for (std::size_t k = i; k < j; ++k) {
            if (labels[order[k]] == 1)
                tp += 1.0;
            else
                fp += 1.0;
        }
        const double recall = tp / static_cast<double>(pos);
        const double precision = tp / (tp + fp);
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
        i = j;
    }
    return ap;
}

double mean_dice(const std::vector<PredictionRecord>& predictions,
                 const std::map<std::string, BinaryMask>& gt_masks,
                 double threshold) {
    if (gt_masks.empty()) throw ValidationError("mean_dice: no GT-bearing samples");
    std::map<std::string, const PredictionRecord*> by_id;
    for (const auto& p : predictions) by_id[p.id] = &p;

    double total = 0.0;
    for (const auto& [id, gt] : gt_masks) {
        auto it = by_id.find(id);
        if (it == by_id.end())
            throw ValidationError("mean_dice: missing prediction for GT-bearing sample '" + id + "'");
        const PredictionRecord& pred = *it->second;
        if (!pred.seg_map)
            throw ValidationError("mean_dice: prediction for '" + id + "' has no segmentation map");
        const SoftMask& sm = *pred.seg_map;
        if (sm.width != gt.width || sm.height != gt.height)
            throw ValidationError("mean_dice: prediction/GT dimension mismatch for '" + id + "'");
        BinaryMask bin = BinaryMask::filled(sm.width, sm.height, false);
        for (std::size_t i = 0; i < sm.values.size(); ++i)
            bin.bits[i] = sm.values[i] >= threshold;
        total += consensus::dice(bin, gt);
    }
    return total / static_cast<double>(gt_masks.size());
}

double mean_dice(const std::vector<PredictionRecord>& predictions,
                 const DatasetManifest& manifest,
                 const std::filesystem::path& manifest_path,
                 double threshold, consensus::GtStrategy gt) {
    return mean_dice(predictions, resolve_gt_masks(manifest, manifest_path, gt), threshold);
}

std::map<std::string, BinaryMask> resolve_gt_masks(
    const DatasetManifest& manifest, const std::filesystem::path& manifest_path,
    consensus::GtStrategy strategy) {
    using consensus::ExpertDelineation;
    std::map<std::string, BinaryMask> out;
    for (const auto& r : manifest.records) {
        if (!r.has_gt()) continue;
        std::vector<ExpertDelineation> ds;
        for (const auto& ref : r.delineations) {
            ds.push_back(ExpertDelineation::make(
                ref.expert_id,
                read_binary_mask_png(resolve_manifest_path(manifest_path, ref.ll_path)),
                read_binary_mask_png(resolve_manifest_path(manifest_path, ref.hl_path))));
        }
        const ExpertDelineation* a = &ds[0];
        const ExpertDelineation* b = &ds[1];
        if (ds.size() >= 3) {
            auto [i, j] = consensus::select_best_pair(ds[0], ds[1], ds[2]);
            a = &ds[i];
            b = &ds[j];
        }
        auto set = consensus::build_consensus(*a, *b);
        out.emplace(r.id, consensus::consensus_mask(set, strategy));
    }
    return out;
}

RunMetrics run_metrics(const DatasetManifest& manifest,
                       const std::vector<PredictionRecord>& predictions,
                       const std::map<std::string, BinaryMask>& gt_masks,
                       const EvalConfig& cfg) {
    std::map<std::string, const PredictionRecord*> by_id;
    for (const auto& p : predictions) by_id[p.id] = &p;

    std::vector<double> cls, seg;
    std::vector<int> labels;
    for (const auto& r : manifest.records) {
        auto it = by_id.find(r.id);
        if (it == by_id.end())
            throw ValidationError("evaluate: missing prediction for '" + r.id + "'");
        cls.push_back(it->second->cls_score);
        seg.push_back(it->second->seg_max);
        labels.push_back(r.label);
    }

    RunMetrics m;
    m["auroc_cls"] = auroc(cls, labels);
    m["auprc_cls"] = auprc(cls, labels);
    m["auroc_seg"] = auroc(seg, labels);
    m["auprc_seg"] = auprc(seg, labels);
    for (FusionStrategy f : {FusionStrategy::Average, FusionStrategy::Or, FusionStrategy::And}) {
        std::vector<double> fused(cls.size());
        for (std::size_t i = 0; i < cls.size(); ++i) fused[i] = fuse(cls[i], seg[i], f);
        m[std::string("auroc_fused_") + to_string(f)] = auroc(fused, labels);
        m[std::string("auprc_fused_") + to_string(f)] = auprc(fused, labels);
    }
    if (cfg.compute_mean_dice && !gt_masks.empty())
        m["mean_dice"] = mean_dice(predictions, gt_masks, cfg.dice_threshold);
    return m;
}

EvalReport evaluate(const DatasetManifest& manifest,
                    const std::vector<std::vector<PredictionRecord>>& runs,
                    const std::map<std::string, BinaryMask>& gt_masks,
                    const EvalConfig& cfg) {
    if (runs.empty()) throw ValidationError("evaluate: at least one run required");

    std::vector<RunMetrics> per_run;
    for (const auto& run : runs) per_run.push_back(run_metrics(manifest, run, gt_masks, cfg));

    EvalReport report;
    report.test_set = manifest.name;
    report.gt_strategy = consensus::to_string(cfg.gt);
    report.fusion = to_string(cfg.fusion);
    report.n_runs = static_cast<int>(runs.size());
    report.single_run = runs.size() == 1;

    for (const auto& [name, _] : per_run[0]) {
        MetricSummary s;
        for (const auto& rm : per_run) {
            auto it = rm.find(name);
            if (it == rm.end()) throw ValidationError("evaluate: metric grid mismatch across runs");
            s.per_run.push_back(it->second);
        }
        const double n = static_cast<double>(s.per_run.size());
        s.mean = std::accumulate(s.per_run.begin(), s.per_run.end(), 0.0) / n;
        if (s.per_run.size() > 1) {
            double ss = 0.0;
            for (double v : s.per_run) ss += (v - s.mean) * (v - s.mean);
            s.std = std::sqrt(ss / (n - 1.0));
        }
        report.metrics.emplace(name, std::move(s));
    }
    return report;
}

std::vector<PredictionRecord> load_predictions_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open predictions " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw ValidationError(path.string() + ": empty file");

    auto split_csv = [](std::string s) {
        if (!s.empty() && s.back() == '\r') s.pop_back();  // CRLF input
        std::vector<std::string> fields;
        std::stringstream ss(s);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        return fields;
    };

    auto header = split_csv(line);
    if (header.size() < 3 || header[0] != "id" || header[1] != "cls_score" ||
        header[2] != "seg_max")
        throw ValidationError(path.string() + ": header must be id,cls_score,seg_max[,seg_path]");
    const bool has_path = header.size() >= 4 && header[3] == "seg_path";

    std::vector<PredictionRecord> out;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = split_csv(line);
        if (fields.size() < 3)
            throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": short row");
        PredictionRecord r;
        r.id = fields[0];
        try {
            r.cls_score = std::stod(fields[1]);
            r.seg_max = std::stod(fields[2]);
        } catch (const std::exception&) {
            throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": bad number");
        }
        if (r.cls_score < 0.0 || r.cls_score > 1.0 || r.seg_max < 0.0 || r.seg_max > 1.0)
            throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                                  ": scores must be in [0,1]");
        if (has_path && fields.size() >= 4 && !fields[3].empty()) {
            const auto seg_path = resolve_manifest_path(path, fields[3]);
            r.seg_map = read_soft_mask_png(seg_path);
            const double recomputed = r.seg_map->max_value();
            if (std::fabs(recomputed - r.seg_max) > 1.0 / 255.0)
                throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                                      ": seg_max disagrees with map maximum by > 1/255");
            r.seg_max = recomputed;
        }
        out.push_back(std::move(r));
    }
    return out;
}

RunMetrics augmented_validation(const DatasetManifest& manifest,
                                const std::filesystem::path& manifest_path,
                                const ModelCallback& callback,
                                const augment::PipelinePreset& preset,
                                std::span<const std::uint64_t> seeds,
                                const EvalConfig& cfg) {
    if (seeds.empty()) throw ValidationError("augmented_validation: no seeds");

    EvalConfig run_cfg = cfg;
    run_cfg.compute_mean_dice = false;  // augmented copies do not carry GT masks

    RunMetrics mean;
    for (std::uint64_t seed : seeds) {
        std::vector<PredictionRecord> preds;
        for (const auto& record : manifest.records) {
            RgbImage image = load_sample_image(record, manifest_path);
            auto augmented = augment::apply(preset, image, nullptr, record.id, seed);
            try {
                PredictionRecord p = callback(record, augmented.image);
                p.id = record.id;
                preds.push_back(std::move(p));
            } catch (const std::exception& e) {
                throw ValidationError("augmented_validation: callback failed for '" +
                                      record.id + "': " + e.what());
            }
        }
        RunMetrics m = run_metrics(manifest, preds, {}, run_cfg);
        for (const auto& [k, v] : m) mean[k] += v / static_cast<double>(seeds.size());
    }
    return mean;
}

}  // namespace cade::eval
