#include "cade/augment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "cade/error.hpp"
#include "cade/kernels.hpp"

namespace cade::augment {

const char* to_string(TransformKind kind) {
    switch (kind) {
        case TransformKind::Flip: return "flip";
        case TransformKind::Rotate90: return "rotate90";
        case TransformKind::Affine: return "affine";
        case TransformKind::SharpnessIncrease: return "sharpness_increase";
        case TransformKind::SharpnessDecrease: return "sharpness_decrease";
        case TransformKind::Grayscale: return "grayscale";
        case TransformKind::GaussianBlur: return "gaussian_blur";
        case TransformKind::ColorJitter: return "color_jitter";
        case TransformKind::RandomCrop: return "random_crop";
        case TransformKind::GaussianNoise: return "gaussian_noise";
        case TransformKind::MotionBlur: return "motion_blur";
        case TransformKind::ZoomBlur: return "zoom_blur";
        case TransformKind::LensBlur: return "lens_blur";
        case TransformKind::MedianBlur: return "median_blur";
        case TransformKind::DefocusBlur: return "defocus_blur";
        case TransformKind::ContrastIncrease: return "contrast_increase";
        case TransformKind::ContrastDecrease: return "contrast_decrease";
        case TransformKind::BrightnessIncrease: return "brightness_increase";
        case TransformKind::BrightnessDecrease: return "brightness_decrease";
        case TransformKind::SaturationIncrease: return "saturation_increase";
        case TransformKind::SaturationDecrease: return "saturation_decrease";
        case TransformKind::HueRed: return "hue_red";
        case TransformKind::HueGreen: return "hue_green";
        case TransformKind::Solarize: return "solarize";
    }
    return "?";
}

bool is_geometric(TransformKind kind) {
    return kind == TransformKind::Flip || kind == TransformKind::Rotate90 ||
           kind == TransformKind::Affine || kind == TransformKind::RandomCrop;
}

PresetKind preset_from_string(const std::string& s) {
    if (s == "downstream-train-ndsa") return PresetKind::DownstreamTrainNDSA;
    if (s == "downstream-val-ndsa") return PresetKind::DownstreamValNDSA;
    if (s == "downstream-train-dsa") return PresetKind::DownstreamTrainDSA;
    if (s == "downstream-val-dsa") return PresetKind::DownstreamValDSA;
    if (s == "pretrain-ndsa") return PresetKind::PretrainNDSA;
    if (s == "pretrain-dsa") return PresetKind::PretrainDSA;
    throw ValidationError("unknown preset '" + s + "'");
}

const char* to_string(PresetKind kind) {
    switch (kind) {
        case PresetKind::DownstreamTrainNDSA: return "downstream-train-ndsa";
        case PresetKind::DownstreamValNDSA: return "downstream-val-ndsa";
        case PresetKind::DownstreamTrainDSA: return "downstream-train-dsa";
        case PresetKind::DownstreamValDSA: return "downstream-val-dsa";
        case PresetKind::PretrainNDSA: return "pretrain-ndsa";
        case PresetKind::PretrainDSA: return "pretrain-dsa";
    }
    return "?";
}

bool is_pretrain(PresetKind kind) {
    return kind == PresetKind::PretrainNDSA || kind == PresetKind::PretrainDSA;
}

PipelinePreset::PipelinePreset(PresetKind k, std::optional<ViewRole> r) : kind(k), role(r) {
    if (is_pretrain(kind) != role.has_value())
        throw ValidationError("PipelinePreset: view role must be present exactly for "
                              "pretraining presets");
}

namespace {

using K = TransformKind;

ParamSpec param(std::string name, std::vector<RangeBucket> buckets) {
    return ParamSpec{std::move(name), std::move(buckets)};
}

ParamSpec single(std::string name, double lo, double hi) {
    return param(std::move(name), {RangeBucket{lo, hi}});
}

std::vector<RangeBucket> degenerate(std::initializer_list<double> values) {
    std::vector<RangeBucket> out;
    for (double v : values) out.push_back({v, v});
    return out;
}

TransformSpec spec(K kind, double p, std::vector<ParamSpec> params = {},
                   std::optional<int> group = std::nullopt) {
    TransformSpec s;
    s.kind = kind;
    s.probability = p;
    s.params = std::move(params);
    s.exclusion_group = group;
    return s;
}

// Exclusion groups: N-DSA pairs {blur, sharpness, affine} and
// {grayscale, color jitter}; DSA families by effect.
enum Group : int {
    kNdsaBlurSharpAffine = 0,
    kNdsaColor = 1,
    kDsaBlur = 0,
    kDsaSharpness = 1,
    kDsaContrast = 2,
    kDsaBrightness = 3,
    kDsaSaturation = 4,
    kDsaHue = 5,
};

std::vector<TransformSpec> downstream_train_ndsa() {
    std::vector<TransformSpec> specs;
    specs.push_back(spec(K::Flip, 0.5));
    specs.push_back(spec(K::Rotate90, 0.6));
    specs.push_back(spec(K::Affine, 0.2,
                         {single("rotation_deg", -25.0, 25.0),
                          single("translate_x", -0.05, 0.05),
                          single("translate_y", -0.05, 0.05),
                          single("shear_deg", -15.0, 15.0)},
                         kNdsaBlurSharpAffine));
    specs.push_back(spec(K::SharpnessIncrease, 0.2, {single("amount", 2.0, 2.0)},
                         kNdsaBlurSharpAffine));
    specs.push_back(spec(K::Grayscale, 0.2, {}, kNdsaColor));
    specs.push_back(spec(K::GaussianBlur, 0.2, {single("radius", 0.1, 2.0)},
                         kNdsaBlurSharpAffine));
    const std::vector<RangeBucket> jitter{{0.5, 1.5}, {0.7, 1.3}, {0.9, 1.1}};
    specs.push_back(spec(K::ColorJitter, 0.6,
                         {param("brightness", jitter), param("contrast", jitter),
                          param("saturation", jitter)},
                         kNdsaColor));
    specs.push_back(spec(K::RandomCrop, 0.33, {single("scale", 0.7, 1.1)}));
    specs.push_back(spec(K::GaussianNoise, 0.5,
                         {param("variance", degenerate({0.01, 0.02, 0.03, 0.05}))}));
    return specs;
}

std::vector<TransformSpec> downstream_val_ndsa() {
    std::vector<TransformSpec> specs;
    specs.push_back(spec(K::Rotate90, 0.6));
    specs.push_back(spec(K::Flip, 0.5));
    const std::vector<RangeBucket> jitter{{0.7, 1.3}, {0.9, 1.1}};
    specs.push_back(spec(K::ColorJitter, 0.6,
                         {param("brightness", jitter), param("contrast", jitter),
                          param("saturation", jitter)}));
    return specs;
}

std::vector<RangeBucket> odd_kernel_small() { return degenerate({1, 3, 5, 7, 9}); }
std::vector<RangeBucket> motion_limits() { return degenerate({9, 11, 17, 21, 25}); }

std::vector<RangeBucket> zoom_factors() {
    return {{1.01, 1.02}, {1.03, 1.04}, {1.05, 1.06}, {1.07, 1.08}, {1.09, 1.1}};
}

std::vector<RangeBucket> sharp_visibility() {
    return {{0.1, 0.2}, {0.2, 0.3}, {0.3, 0.4}, {0.4, 0.5}, {0.5, 0.6}};
}

std::vector<RangeBucket> contrast_inc() {
    return {{1.01, 1.1}, {1.11, 1.2}, {1.21, 1.25}, {1.26, 1.3}, {1.31, 1.4}};
}
std::vector<RangeBucket> contrast_dec() {
    return {{0.95, 0.99}, {0.9, 0.94}, {0.85, 0.89}, {0.75, 0.84}, {0.65, 0.74}};
}
std::vector<RangeBucket> brightness_inc() {
    return {{1.01, 1.2}, {1.21, 1.4}, {1.41, 1.6}, {1.61, 1.8}, {1.81, 2.0}};
}
std::vector<RangeBucket> brightness_dec() {
    return {{0.9, 0.99}, {0.85, 0.89}, {0.8, 0.84}, {0.75, 0.79}, {0.7, 0.74}};
}
std::vector<RangeBucket> saturation_inc() {
    return {{1.01, 1.05}, {1.06, 1.1}, {1.11, 1.15}, {1.16, 1.2}, {1.21, 1.25}};
}
std::vector<RangeBucket> saturation_dec() {
    return {{0.9, 0.99}, {0.8, 0.89}, {0.7, 0.79}, {0.6, 0.69}, {0.5, 0.59}};
}
std::vector<RangeBucket> hue_red_factors() {
    return {{0.0, 0.01}, {0.011, 0.013}, {0.014, 0.016}, {0.017, 0.018}, {0.019, 0.02}};
}
std::vector<RangeBucket> hue_green_factors() {
    return {{-0.01, 0.0}, {-0.013, -0.011}, {-0.016, -0.014}, {-0.02, -0.017}, {-0.025, -0.021}};
}

TransformSpec sharpness_increase_spec(double p, int group) {
    return spec(K::SharpnessIncrease, p,
                {param("visibility", sharp_visibility()), param("lightness", sharp_visibility())},
                group);
}

TransformSpec sharpness_decrease_spec(double p, int group) {
    return spec(K::SharpnessDecrease, p,
                {param("visibility", sharp_visibility()),
                 param("kernel", degenerate({3, 5, 7, 9, 11}))},
                group);
}

std::vector<TransformSpec> downstream_train_dsa() {
    std::vector<TransformSpec> specs;
    specs.push_back(spec(K::Flip, 0.5));
    specs.push_back(spec(K::Rotate90, 0.6));
    specs.push_back(spec(K::RandomCrop, 0.33, {single("scale", 0.7, 1.1)}));
    specs.push_back(spec(K::MotionBlur, 0.1, {param("limit", motion_limits())}, kDsaBlur));
    specs.push_back(spec(K::ZoomBlur, 0.1, {param("max_factor", zoom_factors())}, kDsaBlur));
    specs.push_back(spec(K::LensBlur, 0.1, {param("limit", odd_kernel_small())}, kDsaBlur));
    specs.push_back(spec(K::MedianBlur, 0.1, {param("aperture", odd_kernel_small())}, kDsaBlur));
    specs.push_back(spec(K::DefocusBlur, 0.1, {param("radius", motion_limits())}, kDsaBlur));
    specs.push_back(sharpness_increase_spec(0.25, kDsaSharpness));
    specs.push_back(sharpness_decrease_spec(0.25, kDsaSharpness));
    specs.push_back(spec(K::ContrastIncrease, 0.25, {param("factor", contrast_inc())}, kDsaContrast));
    specs.push_back(spec(K::ContrastDecrease, 0.25, {param("factor", contrast_dec())}, kDsaContrast));
    specs.push_back(spec(K::BrightnessIncrease, 0.25, {param("factor", brightness_inc())}, kDsaBrightness));
    specs.push_back(spec(K::BrightnessDecrease, 0.25, {param("factor", brightness_dec())}, kDsaBrightness));
    specs.push_back(spec(K::SaturationIncrease, 0.25, {param("factor", saturation_inc())}, kDsaSaturation));
    specs.push_back(spec(K::SaturationDecrease, 0.25, {param("factor", saturation_dec())}, kDsaSaturation));
    specs.push_back(spec(K::HueRed, 0.25, {param("factor", hue_red_factors())}, kDsaHue));
    specs.push_back(spec(K::HueGreen, 0.25, {param("factor", hue_green_factors())}, kDsaHue));
    specs.push_back(spec(K::GaussianNoise, 0.5,
                         {param("variance", degenerate({0.01, 0.02, 0.03, 0.05}))}));
    return specs;
}

TransformSpec crop_global() {
    TransformSpec s = spec(K::RandomCrop, 1.0, {single("scale", 0.4, 1.0)});
    s.crop_target = 256;
    return s;
}

TransformSpec crop_local() {
    TransformSpec s = spec(K::RandomCrop, 1.0, {single("scale", 0.05, 0.4)});
    s.crop_target = 96;
    return s;
}

TransformSpec flip_horizontal(double p) {
    TransformSpec s = spec(K::Flip, p);
    s.horizontal_only = true;
    return s;
}

TransformSpec pretrain_color_jitter() {
    return spec(K::ColorJitter, 0.4,
                {single("brightness", 0.6, 1.4), single("contrast", 0.6, 1.4),
                 single("saturation", 0.8, 1.2), single("hue", -0.1, 0.1)},
                kNdsaColor);
}

std::vector<TransformSpec> pretrain_ndsa(ViewRole role) {
    std::vector<TransformSpec> specs;
    specs.push_back(role == ViewRole::Local ? crop_local() : crop_global());
    specs.push_back(flip_horizontal(0.5));
    specs.push_back(pretrain_color_jitter());
    specs.push_back(spec(K::Grayscale, 0.1, {}, kNdsaColor));
    const double blur_p = role == ViewRole::Global1 ? 1.0
                          : role == ViewRole::Global2 ? 0.1
                                                      : 0.5;
    specs.push_back(spec(K::GaussianBlur, blur_p, {single("radius", 0.1, 2.0)}));
    if (role == ViewRole::Global2) specs.push_back(spec(K::Solarize, 0.2));
    return specs;
}

std::vector<TransformSpec> pretrain_dsa(ViewRole role) {
    std::vector<TransformSpec> specs;
    specs.push_back(role == ViewRole::Local ? crop_local() : crop_global());
    if (role != ViewRole::Local) specs.push_back(spec(K::Flip, 0.5));
    const double blur_p = role == ViewRole::Global1 ? 0.25
                          : role == ViewRole::Global2 ? 0.025
                                                      : 0.125;
    specs.push_back(spec(K::MotionBlur, blur_p, {param("limit", motion_limits())}, kDsaBlur));
    specs.push_back(spec(K::ZoomBlur, blur_p, {param("max_factor", zoom_factors())}, kDsaBlur));
    specs.push_back(spec(K::LensBlur, blur_p, {param("limit", odd_kernel_small())}, kDsaBlur));
    specs.push_back(spec(K::MedianBlur, blur_p, {param("aperture", odd_kernel_small())}, kDsaBlur));
    if (role == ViewRole::Global2) {
        specs.push_back(sharpness_increase_spec(0.1, kDsaSharpness));
        specs.push_back(sharpness_decrease_spec(0.1, kDsaSharpness));
    }
    specs.push_back(spec(K::ContrastIncrease, 0.4, {param("factor", contrast_inc())}, kDsaContrast));
    specs.push_back(spec(K::ContrastDecrease, 0.4, {param("factor", contrast_dec())}, kDsaContrast));
    specs.push_back(spec(K::BrightnessIncrease, 0.4, {param("factor", brightness_inc())}, kDsaBrightness));
    specs.push_back(spec(K::BrightnessDecrease, 0.4, {param("factor", brightness_dec())}, kDsaBrightness));
    specs.push_back(spec(K::SaturationIncrease, 0.4, {param("factor", saturation_inc())}, kDsaSaturation));
    specs.push_back(spec(K::SaturationDecrease, 0.4, {param("factor", saturation_dec())}, kDsaSaturation));
    specs.push_back(spec(K::HueRed, 0.4, {param("factor", hue_red_factors())}, kDsaHue));
    specs.push_back(spec(K::HueGreen, 0.4, {param("factor", hue_green_factors())}, kDsaHue));
    return specs;
}

}  // namespace

std::vector<TransformSpec> preset_specs(const PipelinePreset& preset) {
    switch (preset.kind) {
        case PresetKind::DownstreamTrainNDSA: return downstream_train_ndsa();
        case PresetKind::DownstreamValNDSA: return downstream_val_ndsa();
        case PresetKind::DownstreamTrainDSA: return downstream_train_dsa();
        case PresetKind::DownstreamValDSA: return downstream_train_dsa();
        case PresetKind::PretrainNDSA: return pretrain_ndsa(*preset.role);
        case PresetKind::PretrainDSA: return pretrain_dsa(*preset.role);
    }
    throw ValidationError("preset_specs: unknown preset");
}

std::optional<int> preset_max_option(const PipelinePreset& preset) {
    if (preset.kind == PresetKind::DownstreamValDSA) return 3;
    return std::nullopt;
}

std::vector<double> sample_bucket(const TransformSpec& spec, Rng& rng,
                                  std::optional<int> max_option) {
    if (!spec.parametric())
        throw ValidationError("sample_bucket: transform has no parameters");
    const int n = spec.bucket_count();
    int cap = max_option.value_or(n);
    if (cap < 1 || cap > n)
        throw ValidationError("sample_bucket: max_option out of range");
    const std::size_t option = rng.below(static_cast<std::uint64_t>(cap));
    std::vector<double> values;
    values.reserve(spec.params.size());
    for (const auto& p : spec.params) {
        const RangeBucket& b = p.buckets[option];
        values.push_back(rng.uniform(b.lo, b.hi));
    }
    return values;
}

std::vector<std::size_t> resolve_exclusions(std::span<const TransformSpec> specs, Rng& rng) {
    // Group decisions are made at the first member encountered, in listed
    // order, so the stream layout is reproducible.
    std::map<int, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < specs.size(); ++i)
        if (specs[i].exclusion_group) groups[*specs[i].exclusion_group].push_back(i);

    std::map<int, std::optional<std::size_t>> group_active;
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const auto& s = specs[i];
        if (!s.exclusion_group) {
            if (rng.bernoulli(s.probability)) active.push_back(i);
            continue;
        }
        const int g = *s.exclusion_group;
        auto decided = group_active.find(g);
        if (decided == group_active.end()) {
            const auto& members = groups[g];
            const std::size_t candidate = members[rng.below(members.size())];
            const bool fires = rng.bernoulli(specs[candidate].probability);
            decided = group_active.emplace(g, fires ? std::optional(candidate) : std::nullopt).first;
        }
        if (decided->second == i) active.push_back(i);
    }
    return active;
}

std::vector<ActiveDraw> plan_draws(std::span<const TransformSpec> specs, Rng& rng,
                                   std::optional<int> max_option) {
    const std::vector<std::size_t> active = resolve_exclusions(specs, rng);
    std::vector<ActiveDraw> draws;
    draws.reserve(active.size());
    for (std::size_t idx : active) {
        const TransformSpec& s = specs[idx];
        ActiveDraw d;
        d.spec_index = idx;
        d.kind = s.kind;
        if (s.parametric()) {
            // "up to the K-th option" clamps to the options a transform has
            std::optional<int> cap = max_option;
            if (cap) cap = std::min(*cap, s.bucket_count());
            d.params = sample_bucket(s, rng, cap);
        }
        switch (s.kind) {
            case K::Flip:
                d.params.push_back(s.horizontal_only ? 0.0
                                                     : static_cast<double>(rng.below(3)));
                break;
            case K::Rotate90:
                d.params.push_back(static_cast<double>(1 + rng.below(3)));
                break;
            case K::RandomCrop:
                d.params.push_back(rng.uniform01());  // offset u
                d.params.push_back(rng.uniform01());  // offset v
                break;
            case K::MotionBlur:
                d.params.push_back(rng.uniform(0.0, std::numbers::pi));  // angle
                break;
            case K::GaussianNoise:
                d.aux_seed = rng.next_u64();
                break;
            default:
                break;
        }
        draws.push_back(std::move(d));
    }
    return draws;
}

void execute_draws(std::span<const ActiveDraw> draws, std::span<const TransformSpec> specs,
                   RgbImage& image, BinaryMask* mask) {
    namespace k = cade::kernels;
    for (const ActiveDraw& d : draws) {
        const TransformSpec& s = specs[d.spec_index];
        const auto& p = d.params;
        switch (d.kind) {
            case K::Flip: {
                const int mode = static_cast<int>(p.at(0));
                image = k::flip(image, mode);
                if (mask) *mask = k::flip(*mask, mode);
                break;
            }
            case K::Rotate90: {
                const int turns = static_cast<int>(p.at(0));
                image = k::rotate90(image, turns);
                if (mask) *mask = k::rotate90(*mask, turns);
                break;
            }
            case K::Affine: {
                image = k::affine(image, p.at(0), p.at(1), p.at(2), p.at(3));
                if (mask) *mask = k::affine(*mask, p.at(0), p.at(1), p.at(2), p.at(3));
                break;
            }
            case K::RandomCrop: {
                const double scale = p.at(0);
                const double u = p.at(1), v = p.at(2);
                image = k::crop_resize(image, scale, u, v, s.crop_target, s.crop_target);
                if (mask) *mask = k::crop_resize(*mask, scale, u, v, s.crop_target, s.crop_target);
                break;
            }
            case K::SharpnessIncrease:
                // one parameter: plain unsharp amount; two: visibility/lightness blend
                image = (p.size() >= 2) ? k::sharpness_increase(image, p.at(0), p.at(1))
                                        : k::sharpen(image, p.at(0));
                break;
            case K::SharpnessDecrease:
                image = k::sharpness_decrease(image, p.at(0), static_cast<int>(p.at(1)));
                break;
            case K::Grayscale:
                image = k::grayscale(image);
                break;
            case K::GaussianBlur:
                image = k::gaussian_blur(image, p.at(0));
                break;
            case K::ColorJitter: {
                image = k::brightness(image, p.at(0));
                image = k::contrast(image, p.at(1));
                image = k::saturation(image, p.at(2));
                if (p.size() >= 4) image = k::hue_shift(image, p.at(3));
                break;
            }
            case K::GaussianNoise: {
                Rng noise_rng(d.aux_seed);
                image = k::add_gaussian_noise(image, p.at(0), noise_rng);
                break;
            }
            case K::MotionBlur:
                image = k::motion_blur(image, static_cast<int>(p.at(0)), p.at(1));
                break;
            case K::ZoomBlur:
                image = k::zoom_blur(image, p.at(0));
                break;
            case K::LensBlur:
                image = k::disk_blur(image, static_cast<int>(p.at(0)));
                break;
            case K::MedianBlur:
                image = k::median_blur(image, static_cast<int>(p.at(0)));
                break;
            case K::DefocusBlur:
                image = k::disk_blur(image, static_cast<int>(p.at(0)));
                break;
            case K::ContrastIncrease:
            case K::ContrastDecrease:
                image = k::contrast(image, p.at(0));
                break;
            case K::BrightnessIncrease:
            case K::BrightnessDecrease:
                image = k::brightness(image, p.at(0));
                break;
            case K::SaturationIncrease:
            case K::SaturationDecrease:
                image = k::saturation(image, p.at(0));
                break;
            case K::HueRed:
            case K::HueGreen:
                image = k::hue_shift(image, p.at(0));
                break;
            case K::Solarize:
                image = k::solarize(image);
                break;
        }
    }
}

ApplyResult apply(const PipelinePreset& preset, const RgbImage& image,
                  const BinaryMask* mask, std::string_view sample_id,
                  std::uint64_t epoch_seed,
                  std::optional<int> max_option_override) {
    if (is_pretrain(preset.kind))
        throw ValidationError("apply: pretraining presets produce views; use pretrain_views");
    if (mask && (mask->width != image.width || mask->height != image.height))
        throw ValidationError("apply: image and mask dimensions differ");

    const std::vector<TransformSpec> specs = preset_specs(preset);
    const std::optional<int> cap =
        max_option_override ? max_option_override : preset_max_option(preset);

    Rng rng = derive_rng(epoch_seed, sample_id);
    ApplyResult result;
    result.draws = plan_draws(specs, rng, cap);
    result.image = image;
    if (mask) result.mask = *mask;
    execute_draws(result.draws, specs, result.image,
                  result.mask ? &*result.mask : nullptr);
    return result;
}

namespace {

RgbImage apply_view(const RgbImage& image, const PipelinePreset& preset, Rng& rng) {
    const std::vector<TransformSpec> specs = preset_specs(preset);
    const std::vector<ActiveDraw> draws = plan_draws(specs, rng);
    RgbImage out = image;
    execute_draws(draws, specs, out, nullptr);
    return out;
}

}  // namespace

ViewSetRgb pretrain_views_rgb(const RgbImage& image, PresetKind flavor, int n_local,
                              std::string_view sample_id, std::uint64_t seed) {
    if (!is_pretrain(flavor))
        throw ValidationError("pretrain_views: flavor must be a pretraining preset");
    if (image.width < 96 || image.height < 96)
        throw ValidationError("pretrain_views: image must be at least 96x96");
    if (n_local < 0) throw ValidationError("pretrain_views: n_local must be >= 0");

    ViewSetRgb views;
    {
        Rng rng = derive_rng(seed, sample_id, 0);
        views.global1 = apply_view(image, {flavor, ViewRole::Global1}, rng);
    }
    {
        Rng rng = derive_rng(seed, sample_id, 1);
        views.global2 = apply_view(image, {flavor, ViewRole::Global2}, rng);
    }
    for (int i = 0; i < n_local; ++i) {
        Rng rng = derive_rng(seed, sample_id, 2 + static_cast<std::uint64_t>(i));
        views.locals.push_back(apply_view(image, {flavor, ViewRole::Local}, rng));
    }
    return views;
}

ViewSet pretrain_views(const RgbImage& image, PresetKind flavor, int n_local,
                       std::string_view sample_id, std::uint64_t seed) {
    const ViewSetRgb rgb = pretrain_views_rgb(image, flavor, n_local, sample_id, seed);
    const NormalizationStats stats = flavor == PresetKind::PretrainNDSA
                                         ? NormalizationStats::imagenet()
                                         : NormalizationStats::barrett_wle();
    ViewSet out;
    out.global1 = normalize(rgb.global1, stats);
    out.global2 = normalize(rgb.global2, stats);
    for (const auto& l : rgb.locals) out.locals.push_back(normalize(l, stats));
    return out;
}

}  // namespace cade::augment
