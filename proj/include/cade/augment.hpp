#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cade/image.hpp"
#include "cade/rng.hpp"

namespace cade::augment {

enum class TransformKind {
    Flip,
    Rotate90,
    Affine,
    SharpnessIncrease,
    SharpnessDecrease,
    Grayscale,
    GaussianBlur,
    ColorJitter,
    RandomCrop,
    GaussianNoise,
    MotionBlur,
    ZoomBlur,
    LensBlur,
    MedianBlur,
    DefocusBlur,
    ContrastIncrease,
    ContrastDecrease,
    BrightnessIncrease,
    BrightnessDecrease,
    SaturationIncrease,
    SaturationDecrease,
    HueRed,
    HueGreen,
    Solarize,
};

const char* to_string(TransformKind kind);
bool is_geometric(TransformKind kind);

struct RangeBucket {
    double lo = 0.0;
    double hi = 0.0;
};

// One named parameter with its severity-aligned candidate ranges. All
// parameters of a transform carry the same number of buckets; one option
// index is drawn per application and indexes every parameter's list.
struct ParamSpec {
    std::string name;
    std::vector<RangeBucket> buckets;
};

struct TransformSpec {
    TransformKind kind;
    double probability = 1.0;
    std::vector<ParamSpec> params;
    std::optional<int> exclusion_group;
    bool horizontal_only = false;  // Flip flavour used by pretraining
    int crop_target = 0;           // RandomCrop output side; 0 keeps the input size

    bool parametric() const { return !params.empty(); }
    int bucket_count() const { return params.empty() ? 0 : static_cast<int>(params[0].buckets.size()); }
};

enum class PresetKind {
    DownstreamTrainNDSA,
    DownstreamValNDSA,
    DownstreamTrainDSA,
    DownstreamValDSA,
    PretrainNDSA,
    PretrainDSA,
};

enum class ViewRole { Global1, Global2, Local };

PresetKind preset_from_string(const std::string& s);
const char* to_string(PresetKind kind);
bool is_pretrain(PresetKind kind);

// A pipeline identifier; pretraining presets additionally name the view.
struct PipelinePreset {
    PresetKind kind;
    std::optional<ViewRole> role;

    PipelinePreset(PresetKind k, std::optional<ViewRole> r = std::nullopt);
};

// The published transform table for a preset, in listed order.
std::vector<TransformSpec> preset_specs(const PipelinePreset& preset);

// Bucket cap implied by the preset (3 for the DSA validation set).
std::optional<int> preset_max_option(const PipelinePreset& preset);

// Chooses one option uniformly among the first `max_option` buckets, then
// draws each parameter uniformly within its bucket at that option.
// Degenerate buckets [a,a] return a exactly.
std::vector<double> sample_bucket(const TransformSpec& spec, Rng& rng,
                                  std::optional<int> max_option = std::nullopt);

// Within each exclusion group one member is chosen uniformly as the sole
// candidate and fires with its own probability; ungrouped specs fire
// independently. Returns indices of active specs in listed order.
std::vector<std::size_t> resolve_exclusions(std::span<const TransformSpec> specs, Rng& rng);

// One planned transform application: bucket parameters followed by the
// transform's internal draws (flip direction, angles, offsets, ...), plus a
// seed for pixel-level randomness (noise fields).
struct ActiveDraw {
    std::size_t spec_index = 0;
    TransformKind kind = TransformKind::Flip;
    std::vector<double> params;
    std::uint64_t aux_seed = 0;
};

std::vector<ActiveDraw> plan_draws(std::span<const TransformSpec> specs, Rng& rng,
                                   std::optional<int> max_option = std::nullopt);

// Applies planned draws in listed order. Geometric transforms are applied
// with identical parameters to the mask; photometric ones leave it untouched.
void execute_draws(std::span<const ActiveDraw> draws, std::span<const TransformSpec> specs,
                   RgbImage& image, BinaryMask* mask);

struct ApplyResult {
    RgbImage image;
    std::optional<BinaryMask> mask;
    std::vector<ActiveDraw> draws;  // audit trail
};

// Full pipeline application with the per-sample stream hash(epoch_seed, id).
ApplyResult apply(const PipelinePreset& preset, const RgbImage& image,
                  const BinaryMask* mask, std::string_view sample_id,
                  std::uint64_t epoch_seed,
                  std::optional<int> max_option_override = std::nullopt);

// Multi-crop views for DINO-style pretraining, already normalized
// (ImageNet statistics for the N-DSA flavour, WLE statistics for DSA).
struct ViewSet {
    NormalizedImage global1;
    NormalizedImage global2;
    std::vector<NormalizedImage> locals;
};

// Same views before normalization; used where PNG output is needed.
struct ViewSetRgb {
    RgbImage global1;
    RgbImage global2;
    std::vector<RgbImage> locals;
};

ViewSetRgb pretrain_views_rgb(const RgbImage& image, PresetKind flavor, int n_local,
                              std::string_view sample_id, std::uint64_t seed);

ViewSet pretrain_views(const RgbImage& image, PresetKind flavor, int n_local,
                       std::string_view sample_id, std::uint64_t seed);

}  // namespace cade::augment
