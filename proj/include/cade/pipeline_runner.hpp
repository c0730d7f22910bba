#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "cade/augment.hpp"
#include "cade/consensus.hpp"
#include "cade/manifest.hpp"

// Manifest-driven batch runners behind the CLI subcommands. Work is
// partitioned statically across workers and all sidecar lines are written in
// manifest order, so outputs are byte-identical at any parallelism level.
namespace cade::runner {

// CADE_BENCH_THREADS caps the worker count; defaults to hardware concurrency.
int worker_count();

struct AugmentOptions {
    augment::PresetKind preset = augment::PresetKind::DownstreamTrainNDSA;
    std::uint64_t seed = 0;
    int n_local = 8;                  // local views for pretraining presets
    std::optional<int> val_cap;       // bucket cap override
    int resize_side = 256;            // pre-resize of the source image; 0 keeps native
};

// Writes one PNG per sample (or per view), a transformed plausible-consensus
// mask when delineations are present, and an audit JSONL of every draw.
// Returns the number of image files written.
int run_augment(const DatasetManifest& manifest, const std::filesystem::path& manifest_path,
                const AugmentOptions& options, const std::filesystem::path& out_dir);

struct CorruptOptions {
    std::uint64_t seed = 0;
    int replicates = 5;
    int max_k = 5;
};

// Writes the corrupted PNGs, the plan JSONL with drawn parameters, and a
// derived manifest whose records inherit label, patient and GT references.
// Returns the number of corrupted images written.
int run_corrupt(const DatasetManifest& manifest, const std::filesystem::path& manifest_path,
                const CorruptOptions& options, const std::filesystem::path& out_dir);

struct ConsensusOptions {
    std::optional<consensus::GtStrategy> strategy;  // nullopt = all strategies
};

// Writes consensus mask PNGs per GT-bearing sample plus a JSONL recording
// the expert pair used. Returns the number of samples processed.
int run_consensus(const DatasetManifest& manifest, const std::filesystem::path& manifest_path,
                  const ConsensusOptions& options, const std::filesystem::path& out_dir);

}  // namespace cade::runner
