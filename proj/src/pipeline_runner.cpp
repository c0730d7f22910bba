#include "cade/pipeline_runner.hpp"

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "cade/corrupt.hpp"
#include "cade/error.hpp"
#include "cade/image_io.hpp"
#include "cade/resize.hpp"

using nlohmann::json;

namespace cade::runner {

int worker_count() {
    if (const char* env = std::getenv("CADE_BENCH_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace {

// Static index partition; exceptions are rethrown on the calling thread.
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
    const int workers = std::min<std::size_t>(worker_count(), std::max<std::size_t>(count, 1));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(workers);
    for (int w = 0; w < workers; ++w) {
        threads.emplace_back([&, w] {
            try {
                for (std::size_t i = static_cast<std::size_t>(w); i < count;
                     i += static_cast<std::size_t>(workers))
                    fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

json draw_to_json(const augment::ActiveDraw& draw) {
    return {{"transform", augment::to_string(draw.kind)}, {"params", draw.params}};
}

std::optional<consensus::ConsensusSet> build_record_consensus(
    const SampleRecord& record, const std::filesystem::path& manifest_path,
    std::pair<std::string, std::string>* chosen_pair) {
    if (!record.has_gt()) return std::nullopt;
    std::vector<consensus::ExpertDelineation> ds;
    for (const auto& ref : record.delineations)
        ds.push_back(consensus::ExpertDelineation::make(
            ref.expert_id,
            read_binary_mask_png(resolve_manifest_path(manifest_path, ref.ll_path)),
            read_binary_mask_png(resolve_manifest_path(manifest_path, ref.hl_path))));
    const consensus::ExpertDelineation* a = &ds[0];
    const consensus::ExpertDelineation* b = &ds[1];
    if (ds.size() >= 3) {
        auto [i, j] = consensus::select_best_pair(ds[0], ds[1], ds[2]);
        a = &ds[i];
        b = &ds[j];
    }
    if (chosen_pair) *chosen_pair = {a->expert_id, b->expert_id};
    return consensus::build_consensus(*a, *b);
}

}  // namespace

int run_augment(const DatasetManifest& manifest, const std::filesystem::path& manifest_path,
                const AugmentOptions& options, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    const std::size_t n = manifest.records.size();

    struct Result {
        json sidecar;
        int files = 0;
    };
    std::vector<Result> results(n);

    parallel_for(n, [&](std::size_t i) {
        const SampleRecord& record = manifest.records[i];
        RgbImage image = load_sample_image(record, manifest_path);
        if (options.resize_side > 0)
            image = resize_to_model_input(image, options.resize_side);

        Result& res = results[i];
        if (augment::is_pretrain(options.preset)) {
            const auto views = augment::pretrain_views_rgb(image, options.preset,
                                                           options.n_local, record.id,
                                                           options.seed);
            write_rgb_png(views.global1, out_dir / (record.id + "_g1.png"));
            write_rgb_png(views.global2, out_dir / (record.id + "_g2.png"));
            res.files = 2;
            for (std::size_t k = 0; k < views.locals.size(); ++k) {
                write_rgb_png(views.locals[k],
                              out_dir / (record.id + "_l" + std::to_string(k) + ".png"));
                ++res.files;
            }
            res.sidecar = {{"id", record.id},
                           {"views", 2 + static_cast<int>(views.locals.size())}};
            return;
        }

        std::optional<BinaryMask> mask;
        if (auto set = build_record_consensus(record, manifest_path, nullptr))
            mask = set->plausible;
        if (mask && (mask->width != image.width || mask->height != image.height))
            mask = resize_nearest(*mask, image.width, image.height);

        const augment::PipelinePreset preset(options.preset);
        auto applied = augment::apply(preset, image, mask ? &*mask : nullptr, record.id,
                                      options.seed, options.val_cap);
        write_rgb_png(applied.image, out_dir / (record.id + ".png"));
        res.files = 1;
        if (applied.mask) {
            write_binary_mask_png(*applied.mask, out_dir / (record.id + "_mask.png"));
        }
        json draws = json::array();
        for (const auto& d : applied.draws) draws.push_back(draw_to_json(d));
        res.sidecar = {{"id", record.id}, {"transforms", draws}};
    });

    std::ofstream sidecar(out_dir / "augment_log.jsonl");
    if (!sidecar) throw IoError("cannot write augment log");
    int total = 0;
    for (const auto& r : results) {
        sidecar << r.sidecar.dump() << "\n";
        total += r.files;
    }
    return total;
}

int run_corrupt(const DatasetManifest& manifest, const std::filesystem::path& manifest_path,
                const CorruptOptions& options, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    const auto plan =
        corrupt::plan_corruption(manifest, options.seed, options.replicates, options.max_k);

    // The plan is record-major, so each worker decodes its source image once
    // and serves all of its replicates.
    const std::size_t reps = static_cast<std::size_t>(options.replicates);
    std::vector<json> plan_lines(plan.size());
    parallel_for(manifest.records.size(), [&](std::size_t rec) {
        const SampleRecord& record = manifest.records[rec];
        const RgbImage image = load_sample_image(record, manifest_path);
        for (std::size_t k = 0; k < reps; ++k) {
            const std::size_t i = rec * reps + k;
            const auto& entry = plan[i];
            std::vector<corrupt::ExecutedCorruption> log;
            const RgbImage corrupted = corrupt::execute(entry, image, &log);
            write_rgb_png(corrupted, out_dir / (entry.output_id() + ".png"));

            json specs = json::array();
            for (const auto& e : log) {
                json s = {{"kind", corrupt::to_string(e.spec.kind)},
                          {"severity", e.spec.severity},
                          {"params", e.params}};
                if (e.direction)
                    s["direction"] =
                        *e.direction == corrupt::Direction::Increase ? "increase" : "decrease";
                specs.push_back(s);
            }
            plan_lines[i] = {{"id", entry.output_id()},
                             {"source_id", entry.source_id},
                             {"replicate", entry.replicate},
                             {"corruptions", specs}};
        }
    });

    std::ofstream plan_out(out_dir / "corrupt_plan.jsonl");
    if (!plan_out) throw IoError("cannot write corruption plan");
    for (const auto& line : plan_lines) plan_out << line.dump() << "\n";

    // Derived manifest: outputs inherit label, patient and GT references.
    DatasetManifest derived;
    derived.name = manifest.name + "-C";
    derived.split = manifest.split;
    for (const auto& entry : plan) {
        const SampleRecord* src = manifest.find(entry.source_id);
        SampleRecord r = *src;
        r.id = entry.output_id();
        r.image_path = entry.output_id() + ".png";
        r.crop.reset();  // the corrupted file is already cropped
        // Delineation paths must stay resolvable from the new manifest.
        for (auto& d : r.delineations) {
            d.ll_path = resolve_manifest_path(manifest_path, d.ll_path).string();
            d.hl_path = resolve_manifest_path(manifest_path, d.hl_path).string();
        }
        derived.records.push_back(std::move(r));
    }
    save_manifest(derived, out_dir / "manifest.jsonl");
    return static_cast<int>(plan.size());
}

int run_consensus(const DatasetManifest& manifest, const std::filesystem::path& manifest_path,
                  const ConsensusOptions& options, const std::filesystem::path& out_dir) {
    using consensus::GtStrategy;
    std::filesystem::create_directories(out_dir);
    const std::size_t n = manifest.records.size();

    std::vector<json> lines(n);
    std::atomic<int> processed{0};
    parallel_for(n, [&](std::size_t i) {
        const SampleRecord& record = manifest.records[i];
        std::pair<std::string, std::string> pair;
        auto set = build_record_consensus(record, manifest_path, &pair);
        if (!set) return;
        ++processed;

        auto write_strategy = [&](GtStrategy s) {
            const std::string name = record.id + "_" + consensus::to_string(s) + ".png";
            if (s == GtStrategy::Average)
                write_soft_mask_png(set->average, out_dir / name);
            else
                write_binary_mask_png(consensus::consensus_mask(*set, s), out_dir / name);
        };
        if (options.strategy) {
            write_strategy(*options.strategy);
        } else {
            for (GtStrategy s : {GtStrategy::SoftSpot, GtStrategy::PlausibleSpot,
                                 GtStrategy::SweetSpot, GtStrategy::HardSpot,
                                 GtStrategy::Average})
                write_strategy(s);
        }
        lines[i] = {{"id", record.id},
                    {"experts", {pair.first, pair.second}},
                    {"n_delineations", record.delineations.size()}};
    });

    std::ofstream sidecar(out_dir / "consensus_log.jsonl");
    if (!sidecar) throw IoError("cannot write consensus log");
    for (const auto& line : lines)
        if (!line.is_null()) sidecar << line.dump() << "\n";
    return processed.load();
}

}  // namespace cade::runner
