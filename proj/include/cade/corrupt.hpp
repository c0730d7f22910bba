#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cade/augment.hpp"
#include "cade/image.hpp"
#include "cade/manifest.hpp"
#include "cade/rng.hpp"

namespace cade::corrupt {

enum class CorruptionKind {
    // user-dependent
    MotionBlur,
    LocalFocusBlur,
    Overexposure,
    // acquisition / processing
    Contrast,
    Saturation,
    Hue,
    Brightness,
    Sharpness,
    // compression
    Jpeg,
    Jpeg2000,
    ResolutionReduction,
};

inline constexpr int kCorruptionKindCount = 11;

enum class CorruptionCategory { UserDependent, AcquisitionProcessing, Compression };

CorruptionCategory category(CorruptionKind kind);
const char* to_string(CorruptionKind kind);
CorruptionKind corruption_from_string(const std::string& s);

// Direction of the acquisition/processing corruptions; Hue reads Increase as
// the red shift and Decrease as the green shift.
enum class Direction { Increase, Decrease };
bool is_directional(CorruptionKind kind);

// Five monotonically-more-severe parameter buckets; severity s (1-based)
// draws uniformly from bucket s-1. Directional kinds require a direction.
std::vector<augment::RangeBucket> severity_buckets(
    CorruptionKind kind, std::optional<Direction> direction = std::nullopt);

struct CorruptionSpec {
    CorruptionKind kind;
    int severity = 1;  // 1..5
};

struct PlanEntry {
    std::string source_id;
    int replicate = 1;  // 1..replicates
    std::vector<CorruptionSpec> specs;
    std::uint64_t seed = 0;  // execution stream for this output

    std::string output_id() const;
};

// One entry per (record, replicate): k ~ U{1..max_k} distinct kinds in drawn
// order, each with uniform severity. Fully determined by the seed and
// independent of iteration order.
std::vector<PlanEntry> plan_corruption(const DatasetManifest& manifest, std::uint64_t seed,
                                       int replicates = 5, int max_k = 5);

// Parameters actually drawn during execution, for the audit trail.
struct ExecutedCorruption {
    CorruptionSpec spec;
    std::optional<Direction> direction;
    std::vector<double> params;
};

// Applies the planned corruptions in order; output dimensions equal input.
RgbImage execute(const PlanEntry& entry, const RgbImage& image,
                 std::vector<ExecutedCorruption>* log = nullptr);

// In-memory JPEG encode/decode at the given quality (1..100).
RgbImage jpeg_roundtrip(const RgbImage& image, int quality);

// Wavelet-domain compression artifact: multi-level CDF 5/3 transform with
// only the largest coefficients retained, keep fraction ~ 2/ratio.
RgbImage jpeg2000_approx(const RgbImage& image, double compression_ratio);

}  // namespace cade::corrupt
