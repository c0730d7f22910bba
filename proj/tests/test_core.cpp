#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cade/error.hpp"
#include "cade/image.hpp"
#include "cade/image_io.hpp"
#include "cade/manifest.hpp"
#include "cade/resize.hpp"
#include "helpers.hpp"

using namespace cade;

TEST_CASE("rgb image invariants") {
    CHECK_THROWS_AS(RgbImage::from_pixels(2, 2, std::vector<double>(11, 0.5)), ValidationError);
    CHECK_THROWS_AS(RgbImage::from_pixels(2, 2, std::vector<double>(12, 1.5)), ValidationError);
    CHECK_NOTHROW(RgbImage::from_pixels(2, 2, std::vector<double>(12, 0.5)));
}

TEST_CASE("normalization stats reject non-positive std") {
    CHECK_THROWS_AS(NormalizationStats({0, 0, 0}, {1, 0, 1}), ValidationError);
    CHECK_THROWS_AS(NormalizationStats({0, 0, 0}, {1, -1, 1}), ValidationError);
}

TEST_CASE("normalize maps the channel means to zero") {
    const auto stats = NormalizationStats::barrett_wle();
    const RgbImage img = RgbImage::filled(1, 1, 0.64, 0.361, 0.313);
    const NormalizedImage out = normalize(img, stats);
    CHECK(out.values[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(out.values[1] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(out.values[2] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("normalize matches hand arithmetic") {
    const auto stats = NormalizationStats::barrett_wle();
    const RgbImage img = RgbImage::filled(1, 1, 0.829, 0.361, 0.313);
    const NormalizedImage out = normalize(img, stats);
    CHECK(out.values[0] == doctest::Approx(1.0).epsilon(1e-9));  // (0.829-0.64)/0.189
    CHECK(out.values[1] == doctest::Approx(0.0));
    CHECK(out.values[2] == doctest::Approx(0.0));
}

TEST_CASE("normalize with identity stats is the identity") {
    const NormalizationStats stats({0, 0, 0}, {1, 1, 1});
    const RgbImage img = testutil::gradient_image(8, 8);
    const NormalizedImage out = normalize(img, stats);
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        CHECK(out.values[i] == img.pixels[i]);
}

TEST_CASE("normalize then denormalize round-trips within 1e-12") {
    const auto stats = NormalizationStats::barrett_wle();
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        RgbImage img = RgbImage::filled(4, 4, 0.0);
        for (double& v : img.pixels) v = rng.uniform01();
        const RgbImage back = denormalize(normalize(img, stats), stats);
        for (std::size_t i = 0; i < img.pixels.size(); ++i)
            CHECK(std::fabs(back.pixels[i] - img.pixels[i]) < 1e-12);
    }
}

TEST_CASE("normalize is affine in the input") {
    const auto stats = NormalizationStats::barrett_wle();
    Rng rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        const double x = rng.uniform01();
        const double y = rng.uniform01();
        const double alpha = rng.uniform01();
        const RgbImage ix = RgbImage::filled(1, 1, x);
        const RgbImage iy = RgbImage::filled(1, 1, y);
        const RgbImage mix = RgbImage::filled(1, 1, alpha * x + (1 - alpha) * y);
        for (int c = 0; c < 3; ++c) {
            const double lhs = normalize(mix, stats).values[c];
            const double rhs = alpha * normalize(ix, stats).values[c] +
                               (1 - alpha) * normalize(iy, stats).values[c];
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        }
    }
}

TEST_CASE("resize: same size is byte-identical") {
    const RgbImage img = testutil::gradient_image(64, 64);
    const RgbImage out = resize_to_model_input(img, 64);
    CHECK(out == img);
}

TEST_CASE("resize: constant image stays constant") {
    const RgbImage img = RgbImage::filled(512, 512, 0.42);
    const RgbImage out = resize_to_model_input(img, 256);
    CHECK(out.width == 256);
    CHECK(out.height == 256);
    for (double v : out.pixels) CHECK(std::fabs(v - 0.42) < 1e-9);
}

TEST_CASE("resize: local-crop target size") {
    const RgbImage img = testutil::gradient_image(256, 256);
    const RgbImage out = resize_to_model_input(img, 96);
    CHECK(out.width == 96);
    CHECK(out.height == 96);
}

namespace {

std::string two_record_manifest() {
    return R"({"name":"dev","split":"Train","version":1}
{"id":"p01_f1","patient_id":"P1","label":0,"tier":"Image","image_path":"img/a.png"}
{"id":"p01_f2","patient_id":"P1","label":1,"tier":"HQFrame","image_path":"img/b.png"}
)";
}

}  // namespace

TEST_CASE("manifest: schema round trip") {
    testutil::TempDir dir("manifest");
    testutil::write_text(dir.file("m.jsonl"), two_record_manifest());
    const DatasetManifest m = load_manifest(dir.file("m.jsonl"));
    CHECK(m.name == "dev");
    CHECK(m.split == Split::Train);
    REQUIRE(m.records.size() == 2);
    CHECK(m.records[0].id == "p01_f1");
    CHECK(m.records[1].tier == SampleTier::HQFrame);

    save_manifest(m, dir.file("copy.jsonl"));
    const DatasetManifest copy = load_manifest(dir.file("copy.jsonl"));
    CHECK(copy == m);
}

TEST_CASE("manifest: full field round trip") {
    DatasetManifest m;
    m.name = "full";
    m.split = Split::Test;
    SampleRecord r;
    r.id = "s1";
    r.patient_id = "P9";
    r.label = 1;
    r.tier = SampleTier::LQFrame;
    r.image_path = "imgs/s1.png";
    r.crop = CropRect{4, 8, 100, 90};
    r.delineations = {{"e1", "masks/s1_e1_ll.png", "masks/s1_e1_hl.png"},
                      {"e2", "masks/s1_e2_ll.png", "masks/s1_e2_hl.png"}};
    m.records.push_back(r);

    testutil::TempDir dir("manifest_full");
    save_manifest(m, dir.file("m.jsonl"));
    CHECK(load_manifest(dir.file("m.jsonl")) == m);
}

TEST_CASE("manifest: duplicate id rejected") {
    testutil::TempDir dir("manifest_dup");
    testutil::write_text(dir.file("m.jsonl"),
                         R"({"name":"dev","split":"Train","version":1}
{"id":"p01_f3","patient_id":"P1","label":0,"tier":"Image","image_path":"a.png"}
{"id":"p01_f3","patient_id":"P1","label":1,"tier":"Image","image_path":"b.png"}
)");
    CHECK_THROWS_WITH_AS(load_manifest(dir.file("m.jsonl")),
                         doctest::Contains("duplicate id 'p01_f3'"), ValidationError);
}

TEST_CASE("manifest: unknown tier rejected with location") {
    testutil::TempDir dir("manifest_tier");
    testutil::write_text(dir.file("m.jsonl"),
                         R"({"name":"dev","split":"Train","version":1}
{"id":"x","patient_id":"P1","label":0,"tier":"XQFrame","image_path":"a.png"}
)");
    CHECK_THROWS_WITH_AS(load_manifest(dir.file("m.jsonl")),
                         doctest::Contains("unknown tier 'XQFrame'"), ValidationError);
}

namespace {

DatasetManifest with_patients(const std::string& name, Split split,
                              const std::vector<std::string>& patients) {
    DatasetManifest m;
    m.name = name;
    m.split = split;
    int i = 0;
    for (const auto& p : patients) {
        SampleRecord r;
        r.id = name + "_" + std::to_string(i++);
        r.patient_id = p;
        r.image_path = "x.png";
        m.records.push_back(r);
    }
    return m;
}

}  // namespace

TEST_CASE("patient split: disjoint sets pass") {
    const auto train = with_patients("train", Split::Train, {"P1", "P2"});
    const auto val = with_patients("val", Split::Validation, {"P3"});
    const std::vector<DatasetManifest> tests{with_patients("bm", Split::Test, {"P4"})};
    CHECK(validate_patient_split(train, val, tests).empty());
}

TEST_CASE("patient split: train/test overlap is reported") {
    const auto train = with_patients("train", Split::Train, {"P1", "P7"});
    const auto val = with_patients("val", Split::Validation, {"P3"});
    const std::vector<DatasetManifest> tests{with_patients("bm", Split::Test, {"P7"})};
    const auto violations = validate_patient_split(train, val, tests);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].patient_id == "P7");
    REQUIRE(violations[0].manifests.size() == 2);
    CHECK((violations[0].manifests[0] == "bm" || violations[0].manifests[1] == "bm"));
    CHECK((violations[0].manifests[0] == "train" || violations[0].manifests[1] == "train"));
}

TEST_CASE("patient split: overlap between two test sets is allowed") {
    const auto train = with_patients("train", Split::Train, {"P1"});
    const auto val = with_patients("val", Split::Validation, {"P2"});
    const std::vector<DatasetManifest> tests{with_patients("bm", Split::Test, {"P9"}),
                                             with_patients("ac", Split::Test, {"P9"})};
    CHECK(validate_patient_split(train, val, tests).empty());
}

TEST_CASE("png round trip for images and masks") {
    testutil::TempDir dir("png");
    const RgbImage img = testutil::gradient_image(31, 17);
    write_rgb_png(img, dir.file("img.png"));
    const RgbImage back = read_rgb_png(dir.file("img.png"));
    CHECK(back.width == 31);
    CHECK(back.height == 17);
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        CHECK(std::fabs(back.pixels[i] - img.pixels[i]) <= 0.5 / 255.0 + 1e-12);

    const BinaryMask mask = testutil::disk_mask(31, 17, 15, 8, 5);
    write_binary_mask_png(mask, dir.file("mask.png"));
    CHECK(read_binary_mask_png(dir.file("mask.png")) == mask);
}

TEST_CASE("binary mask load rejects intermediate values") {
    testutil::TempDir dir("png_bad");
    SoftMask soft = SoftMask::filled(4, 4, 0.5);  // encodes to 128
    write_soft_mask_png(soft, dir.file("gray.png"));
    CHECK_THROWS_AS(read_binary_mask_png(dir.file("gray.png")), ValidationError);
    CHECK_NOTHROW(read_soft_mask_png(dir.file("gray.png")));
}

TEST_CASE("crop rectangle is honoured when loading samples") {
    testutil::TempDir dir("crop");
    RgbImage img = RgbImage::filled(10, 10, 0.0);
    for (int y = 2; y < 6; ++y)
        for (int x = 3; x < 8; ++x)
            for (int c = 0; c < 3; ++c) img.at(x, y, c) = 1.0;
    write_rgb_png(img, dir.file("img.png"));

    SampleRecord r;
    r.id = "s";
    r.image_path = "img.png";
    r.crop = CropRect{3, 2, 5, 4};
    const RgbImage cropped = load_sample_image(r, dir.file("m.jsonl"));
    CHECK(cropped.width == 5);
    CHECK(cropped.height == 4);
    for (double v : cropped.pixels) CHECK(v == 1.0);
}
