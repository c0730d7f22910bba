#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "cade/augment.hpp"
#include "cade/error.hpp"
#include "cade/kernels.hpp"
#include "helpers.hpp"

using namespace cade;
using namespace cade::augment;

namespace {

const TransformSpec* find_spec(const std::vector<TransformSpec>& specs, TransformKind kind) {
    for (const auto& s : specs)
        if (s.kind == kind) return &s;
    return nullptr;
}

}  // namespace

TEST_CASE("downstream N-DSA train table") {
    const auto specs = preset_specs({PresetKind::DownstreamTrainNDSA});
    REQUIRE(specs.size() == 9);
    CHECK(specs[0].kind == TransformKind::Flip);
    CHECK(specs[0].probability == 0.5);

    const double expected_p[9] = {0.5, 0.6, 0.2, 0.2, 0.2, 0.2, 0.6, 0.33, 0.5};
    for (int i = 0; i < 9; ++i) CHECK(specs[i].probability == doctest::Approx(expected_p[i]));

    // exclusion groups: {affine, sharpness, blur} and {grayscale, jitter}
    CHECK(specs[2].exclusion_group == specs[3].exclusion_group);
    CHECK(specs[3].exclusion_group == specs[5].exclusion_group);
    CHECK(specs[4].exclusion_group == specs[6].exclusion_group);
    CHECK(specs[2].exclusion_group != specs[4].exclusion_group);
    CHECK_FALSE(specs[0].exclusion_group.has_value());
    CHECK_FALSE(specs[8].exclusion_group.has_value());
}

TEST_CASE("downstream DSA train table") {
    const auto specs = preset_specs({PresetKind::DownstreamTrainDSA});
    REQUIRE(specs.size() == 19);

    const auto* motion = find_spec(specs, TransformKind::MotionBlur);
    REQUIRE(motion != nullptr);
    CHECK(motion->probability == doctest::Approx(0.1));
    REQUIRE(motion->params.size() == 1);
    const double limits[5] = {9, 11, 17, 21, 25};
    REQUIRE(motion->params[0].buckets.size() == 5);
    for (int i = 0; i < 5; ++i) {
        CHECK(motion->params[0].buckets[i].lo == limits[i]);
        CHECK(motion->params[0].buckets[i].hi == limits[i]);
    }

    // five-member blur family shares one exclusion group
    std::set<TransformKind> blur{TransformKind::MotionBlur, TransformKind::ZoomBlur,
                                 TransformKind::LensBlur, TransformKind::MedianBlur,
                                 TransformKind::DefocusBlur};
    std::set<int> blur_groups;
    for (const auto& s : specs)
        if (blur.count(s.kind)) blur_groups.insert(s.exclusion_group.value());
    CHECK(blur_groups.size() == 1);

    const auto* bright = find_spec(specs, TransformKind::BrightnessIncrease);
    REQUIRE(bright != nullptr);
    CHECK(bright->params[0].buckets[4].lo == doctest::Approx(1.81));
    CHECK(bright->params[0].buckets[4].hi == doctest::Approx(2.0));
}

TEST_CASE("validation presets") {
    const auto val_ndsa = preset_specs({PresetKind::DownstreamValNDSA});
    REQUIRE(val_ndsa.size() == 3);
    CHECK(val_ndsa[0].kind == TransformKind::Rotate90);
    CHECK(val_ndsa[1].kind == TransformKind::Flip);
    CHECK(val_ndsa[2].kind == TransformKind::ColorJitter);
    REQUIRE(val_ndsa[2].params.size() == 3);
    REQUIRE(val_ndsa[2].params[0].buckets.size() == 2);
    CHECK(val_ndsa[2].params[0].buckets[0].lo == doctest::Approx(0.7));
    CHECK(val_ndsa[2].params[0].buckets[1].hi == doctest::Approx(1.1));

    // DSA validation keeps the full table but caps draws to the third option
    const auto val_dsa = preset_specs({PresetKind::DownstreamValDSA});
    CHECK(val_dsa.size() == 19);
    CHECK(preset_max_option({PresetKind::DownstreamValDSA}) == 3);
    CHECK_FALSE(preset_max_option({PresetKind::DownstreamTrainDSA}).has_value());
}

TEST_CASE("pretraining view tables") {
    const auto g1 = preset_specs({PresetKind::PretrainNDSA, ViewRole::Global1});
    const auto g2 = preset_specs({PresetKind::PretrainNDSA, ViewRole::Global2});
    const auto loc = preset_specs({PresetKind::PretrainNDSA, ViewRole::Local});

    CHECK(find_spec(g1, TransformKind::GaussianBlur)->probability == doctest::Approx(1.0));
    CHECK(find_spec(g2, TransformKind::GaussianBlur)->probability == doctest::Approx(0.1));
    CHECK(find_spec(loc, TransformKind::GaussianBlur)->probability == doctest::Approx(0.5));
    CHECK(find_spec(g2, TransformKind::Solarize) != nullptr);
    CHECK(find_spec(g1, TransformKind::Solarize) == nullptr);
    CHECK(find_spec(g1, TransformKind::RandomCrop)->crop_target == 256);
    CHECK(find_spec(loc, TransformKind::RandomCrop)->crop_target == 96);
    CHECK(find_spec(g1, TransformKind::Flip)->horizontal_only);

    const auto d1 = preset_specs({PresetKind::PretrainDSA, ViewRole::Global1});
    const auto d2 = preset_specs({PresetKind::PretrainDSA, ViewRole::Global2});
    const auto dl = preset_specs({PresetKind::PretrainDSA, ViewRole::Local});
    CHECK(find_spec(d1, TransformKind::MotionBlur)->probability == doctest::Approx(0.25));
    CHECK(find_spec(d2, TransformKind::MotionBlur)->probability == doctest::Approx(0.025));
    CHECK(find_spec(dl, TransformKind::MotionBlur)->probability == doctest::Approx(0.125));
    CHECK(find_spec(d2, TransformKind::SharpnessIncrease) != nullptr);
    CHECK(find_spec(d1, TransformKind::SharpnessIncrease) == nullptr);
    CHECK(find_spec(dl, TransformKind::Flip) == nullptr);
    CHECK(find_spec(d1, TransformKind::Flip) != nullptr);

    CHECK_THROWS_AS(PipelinePreset(PresetKind::PretrainNDSA), ValidationError);
    CHECK_THROWS_AS(PipelinePreset(PresetKind::DownstreamTrainNDSA, ViewRole::Local),
                    ValidationError);
}

TEST_CASE("sample_bucket draws stay inside the chosen ranges") {
    const auto specs = preset_specs({PresetKind::DownstreamTrainDSA});
    const auto* motion = find_spec(specs, TransformKind::MotionBlur);
    Rng rng(3);
    std::set<double> seen;
    for (int i = 0; i < 200; ++i) {
        const auto v = sample_bucket(*motion, rng);
        REQUIRE(v.size() == 1);
        CHECK((v[0] == 9 || v[0] == 11 || v[0] == 17 || v[0] == 21 || v[0] == 25));
        seen.insert(v[0]);
    }
    CHECK(seen.size() == 5);  // all options reachable

    const auto* contrast = find_spec(specs, TransformKind::ContrastIncrease);
    for (int i = 0; i < 500; ++i) {
        const auto v = sample_bucket(*contrast, rng, 3);
        CHECK(v[0] >= 1.01);
        CHECK(v[0] <= 1.25);
    }

    TransformSpec degenerate_spec;
    degenerate_spec.kind = TransformKind::GaussianBlur;
    degenerate_spec.params = {{"radius", {{0.5, 0.5}}}};
    CHECK(sample_bucket(degenerate_spec, rng)[0] == 0.5);

    CHECK_THROWS_AS(sample_bucket(*motion, rng, 6), ValidationError);
    CHECK_THROWS_AS(sample_bucket(*motion, rng, 0), ValidationError);
}

TEST_CASE("exclusion groups never fire twice and ungrouped frequencies match p") {
    const auto specs = preset_specs({PresetKind::DownstreamTrainNDSA});
    const int draws = 100000;
    std::vector<int> fired(specs.size(), 0);
    std::map<int, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < specs.size(); ++i)
        if (specs[i].exclusion_group) groups[*specs[i].exclusion_group].push_back(i);

    for (int it = 0; it < draws; ++it) {
        Rng rng = derive_rng(99, "sample_" + std::to_string(it));
        const auto active = resolve_exclusions(specs, rng);
        for (auto idx : active) ++fired[idx];
        for (const auto& [g, members] : groups) {
            int in_group = 0;
            for (auto idx : active)
                if (specs[idx].exclusion_group == g) ++in_group;
            CHECK(in_group <= 1);
        }
    }

    for (std::size_t i = 0; i < specs.size(); ++i) {
        const double group_size =
            specs[i].exclusion_group ? static_cast<double>(groups[*specs[i].exclusion_group].size())
                                     : 1.0;
        const double expected = specs[i].probability / group_size;
        const double se = std::sqrt(expected * (1.0 - expected) / draws);
        const double freq = fired[i] / static_cast<double>(draws);
        CAPTURE(i);
        CHECK(std::fabs(freq - expected) <= 3.0 * se + 1e-9);
    }
}

TEST_CASE("zero probabilities yield an empty active set") {
    auto specs = preset_specs({PresetKind::DownstreamTrainNDSA});
    for (auto& s : specs) s.probability = 0.0;
    Rng rng(5);
    for (int i = 0; i < 100; ++i) CHECK(resolve_exclusions(specs, rng).empty());
}

TEST_CASE("apply is deterministic for fixed (seed, id, input)") {
    const RgbImage img = testutil::gradient_image(64, 64);
    const BinaryMask mask = testutil::disk_mask(64, 64, 30, 30, 12);
    const PipelinePreset preset(PresetKind::DownstreamTrainNDSA);

    const auto a = apply(preset, img, &mask, "sample_1", 1234);
    const auto b = apply(preset, img, &mask, "sample_1", 1234);
    CHECK(a.image == b.image);
    CHECK(*a.mask == *b.mask);
    REQUIRE(a.draws.size() == b.draws.size());

    const auto c = apply(preset, img, &mask, "sample_1", 1235);
    const auto d = apply(preset, img, &mask, "sample_2", 1234);
    CHECK((!(c.image == a.image) || !(d.image == a.image)));  // seeds and ids matter
}

TEST_CASE("masks follow geometric draws and ignore photometric ones") {
    const RgbImage img = testutil::gradient_image(48, 48);
    const BinaryMask mask = testutil::disk_mask(48, 48, 20, 25, 9);
    const PipelinePreset preset(PresetKind::DownstreamTrainNDSA);
    const auto specs = preset_specs(preset);

    for (int it = 0; it < 200; ++it) {
        const auto result = apply(preset, img, &mask, "s" + std::to_string(it), 777);

        std::vector<ActiveDraw> geometric;
        for (const auto& d : result.draws)
            if (is_geometric(d.kind)) geometric.push_back(d);
        RgbImage img_copy = img;
        BinaryMask mask_copy = mask;
        execute_draws(geometric, specs, img_copy, &mask_copy);
        CHECK(*result.mask == mask_copy);
        CHECK(result.mask->width == result.image.width);
        CHECK(result.mask->height == result.image.height);
    }
}

TEST_CASE("flip and rotate preserve mask pixel counts exactly") {
    const BinaryMask mask = testutil::disk_mask(33, 21, 12, 9, 6);
    const std::size_t n = mask.count();
    for (int mode = 0; mode < 3; ++mode) CHECK(kernels::flip(mask, mode).count() == n);
    for (int turns = 1; turns <= 3; ++turns) CHECK(kernels::rotate90(mask, turns).count() == n);
    // flips and rotations are involutions / 4-cycles
    CHECK(kernels::flip(kernels::flip(mask, 0), 0) == mask);
    CHECK(kernels::rotate90(kernels::rotate90(mask, 2), 2) == mask);
}

TEST_CASE("sampled parameters always lie inside the declared buckets") {
    for (PresetKind kind : {PresetKind::DownstreamTrainNDSA, PresetKind::DownstreamTrainDSA}) {
        const PipelinePreset preset(kind);
        const auto specs = preset_specs(preset);
        for (int it = 0; it < 3000; ++it) {
            Rng rng = derive_rng(2024, "p" + std::to_string(it));
            const auto draws = plan_draws(specs, rng);
            for (const auto& d : draws) {
                const auto& spec = specs[d.spec_index];
                for (std::size_t p = 0; p < spec.params.size(); ++p) {
                    bool inside = false;
                    for (const auto& b : spec.params[p].buckets)
                        inside = inside || (d.params[p] >= b.lo && d.params[p] <= b.hi);
                    CAPTURE(to_string(spec.kind));
                    CHECK(inside);
                }
            }
        }
    }
}

TEST_CASE("validation cap keeps draws inside the first three buckets") {
    const PipelinePreset preset(PresetKind::DownstreamValDSA);
    const auto specs = preset_specs(preset);
    const auto cap = preset_max_option(preset);
    for (int it = 0; it < 3000; ++it) {
        Rng rng = derive_rng(31337, "v" + std::to_string(it));
        const auto draws = plan_draws(specs, rng, cap);
        for (const auto& d : draws) {
            const auto& spec = specs[d.spec_index];
            for (std::size_t p = 0; p < spec.params.size(); ++p) {
                const int limit = std::min<int>(3, spec.params[p].buckets.size());
                bool inside = false;
                for (int b = 0; b < limit; ++b)
                    inside = inside || (d.params[p] >= spec.params[p].buckets[b].lo &&
                                        d.params[p] <= spec.params[p].buckets[b].hi);
                CAPTURE(to_string(spec.kind));
                CHECK(inside);
            }
        }
    }
}

TEST_CASE("gaussian noise variance comes from the published set") {
    const auto specs = preset_specs({PresetKind::DownstreamTrainNDSA});
    for (int it = 0; it < 2000; ++it) {
        Rng rng = derive_rng(555, "n" + std::to_string(it));
        for (const auto& d : plan_draws(specs, rng)) {
            if (d.kind != TransformKind::GaussianNoise) continue;
            CHECK((d.params[0] == 0.01 || d.params[0] == 0.02 || d.params[0] == 0.03 ||
                   d.params[0] == 0.05));
        }
    }
}

TEST_CASE("apply rejects mismatched masks and pretrain presets") {
    const RgbImage img = testutil::gradient_image(32, 32);
    const BinaryMask wrong = testutil::disk_mask(16, 16, 8, 8, 4);
    CHECK_THROWS_AS(apply({PresetKind::DownstreamTrainNDSA}, img, &wrong, "x", 1),
                    ValidationError);
    CHECK_THROWS_AS(apply({PresetKind::PretrainNDSA, ViewRole::Global1}, img, nullptr, "x", 1),
                    ValidationError);
}

TEST_CASE("pretrain views have the published shapes") {
    const RgbImage img = testutil::gradient_image(128, 128);
    for (PresetKind flavor : {PresetKind::PretrainNDSA, PresetKind::PretrainDSA}) {
        const ViewSet views = pretrain_views(img, flavor, 4, "s1", 42);
        CHECK(views.global1.width == 256);
        CHECK(views.global1.height == 256);
        CHECK(views.global2.width == 256);
        REQUIRE(views.locals.size() == 4);
        for (const auto& l : views.locals) {
            CHECK(l.width == 96);
            CHECK(l.height == 96);
        }
    }

    const ViewSet none = pretrain_views(img, PresetKind::PretrainNDSA, 0, "s1", 42);
    CHECK(none.locals.empty());

    const RgbImage tiny = testutil::gradient_image(64, 64);
    CHECK_THROWS_AS(pretrain_views(tiny, PresetKind::PretrainNDSA, 2, "s1", 42),
                    ValidationError);
}

TEST_CASE("pretrain views are deterministic and normalized with the right stats") {
    const RgbImage img = testutil::gradient_image(128, 128);
    const ViewSetRgb rgb = pretrain_views_rgb(img, PresetKind::PretrainNDSA, 2, "s9", 7);
    const ViewSetRgb rgb2 = pretrain_views_rgb(img, PresetKind::PretrainNDSA, 2, "s9", 7);
    CHECK(rgb.global1 == rgb2.global1);
    CHECK(rgb.locals[1] == rgb2.locals[1]);

    const ViewSet ndsa = pretrain_views(img, PresetKind::PretrainNDSA, 0, "s9", 7);
    CHECK(ndsa.global1 == normalize(rgb.global1, NormalizationStats::imagenet()));

    const ViewSetRgb rgb_dsa = pretrain_views_rgb(img, PresetKind::PretrainDSA, 0, "s9", 7);
    const ViewSet dsa = pretrain_views(img, PresetKind::PretrainDSA, 0, "s9", 7);
    CHECK(dsa.global1 == normalize(rgb_dsa.global1, NormalizationStats::barrett_wle()));
}

TEST_CASE("DSA global2 blur fires at 0.025 over many draws") {
    const auto specs = preset_specs({PresetKind::PretrainDSA, ViewRole::Global2});
    std::set<TransformKind> blur{TransformKind::MotionBlur, TransformKind::ZoomBlur,
                                 TransformKind::LensBlur, TransformKind::MedianBlur};
    const int draws = 100000;
    int fired = 0;
    for (int it = 0; it < draws; ++it) {
        Rng rng = derive_rng(4242, "g2_" + std::to_string(it));
        for (const auto& d : plan_draws(specs, rng))
            if (blur.count(d.kind)) ++fired;
    }
    const double freq = fired / static_cast<double>(draws);
    CHECK(std::fabs(freq - 0.025) < 0.005);
}
