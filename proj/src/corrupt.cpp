#include "cade/corrupt.hpp"

#include <jpeglib.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstring>
#include <numbers>

#include "cade/error.hpp"
#include "cade/kernels.hpp"
#include "cade/resize.hpp"

namespace cade::corrupt {

using augment::RangeBucket;

CorruptionCategory category(CorruptionKind kind) {
    switch (kind) {
        case CorruptionKind::MotionBlur:
        case CorruptionKind::LocalFocusBlur:
        case CorruptionKind::Overexposure:
            return CorruptionCategory::UserDependent;
        case CorruptionKind::Contrast:
        case CorruptionKind::Saturation:
        case CorruptionKind::Hue:
        case CorruptionKind::Brightness:
        case CorruptionKind::Sharpness:
            return CorruptionCategory::AcquisitionProcessing;
        case CorruptionKind::Jpeg:
        case CorruptionKind::Jpeg2000:
        case CorruptionKind::ResolutionReduction:
            return CorruptionCategory::Compression;
    }
    throw ValidationError("category: unknown corruption kind");
}

const char* to_string(CorruptionKind kind) {
    switch (kind) {
        case CorruptionKind::MotionBlur: return "motion_blur";
        case CorruptionKind::LocalFocusBlur: return "local_focus_blur";
        case CorruptionKind::Overexposure: return "overexposure";
        case CorruptionKind::Contrast: return "contrast";
        case CorruptionKind::Saturation: return "saturation";
        case CorruptionKind::Hue: return "hue";
        case CorruptionKind::Brightness: return "brightness";
        case CorruptionKind::Sharpness: return "sharpness";
        case CorruptionKind::Jpeg: return "jpeg";
        case CorruptionKind::Jpeg2000: return "jpeg2000";
        case CorruptionKind::ResolutionReduction: return "resolution_reduction";
    }
    return "?";
}

CorruptionKind corruption_from_string(const std::string& s) {
    for (int i = 0; i < kCorruptionKindCount; ++i) {
        const auto kind = static_cast<CorruptionKind>(i);
        if (s == to_string(kind)) return kind;
    }
    throw ValidationError("unknown corruption kind '" + s + "'");
}

bool is_directional(CorruptionKind kind) {
    return category(kind) == CorruptionCategory::AcquisitionProcessing;
}

namespace {

std::vector<RangeBucket> degenerate(std::initializer_list<double> values) {
    std::vector<RangeBucket> out;
    for (double v : values) out.push_back({v, v});
    return out;
}

}  // namespace

std::vector<RangeBucket> severity_buckets(CorruptionKind kind,
                                          std::optional<Direction> direction) {
    if (is_directional(kind) && !direction)
        throw ValidationError(std::string("severity_buckets: '") + to_string(kind) +
                              "' needs a direction");
    const bool inc = direction.value_or(Direction::Increase) == Direction::Increase;
    switch (kind) {
        case CorruptionKind::MotionBlur:
            return degenerate({9, 11, 17, 21, 25});
        case CorruptionKind::LocalFocusBlur:
            // blur diameter; the affected-region fraction grows with it
            return degenerate({9, 11, 17, 21, 25});
        case CorruptionKind::Overexposure:
            // gain; a severity-scaled lift is added during execution
            return {{1.05, 1.1}, {1.15, 1.2}, {1.25, 1.3}, {1.35, 1.4}, {1.45, 1.5}};
        case CorruptionKind::Contrast:
            return inc ? std::vector<RangeBucket>{{1.01, 1.1}, {1.11, 1.2}, {1.21, 1.25}, {1.26, 1.3}, {1.31, 1.4}}
                       : std::vector<RangeBucket>{{0.95, 0.99}, {0.9, 0.94}, {0.85, 0.89}, {0.75, 0.84}, {0.65, 0.74}};
        case CorruptionKind::Saturation:
            return inc ? std::vector<RangeBucket>{{1.01, 1.05}, {1.06, 1.1}, {1.11, 1.15}, {1.16, 1.2}, {1.21, 1.25}}
                       : std::vector<RangeBucket>{{0.9, 0.99}, {0.8, 0.89}, {0.7, 0.79}, {0.6, 0.69}, {0.5, 0.59}};
        case CorruptionKind::Hue:
            return inc ? std::vector<RangeBucket>{{0.0, 0.01}, {0.011, 0.013}, {0.014, 0.016}, {0.017, 0.018}, {0.019, 0.02}}
                       : std::vector<RangeBucket>{{-0.01, 0.0}, {-0.013, -0.011}, {-0.016, -0.014}, {-0.02, -0.017}, {-0.025, -0.021}};
        case CorruptionKind::Brightness:
            return inc ? std::vector<RangeBucket>{{1.01, 1.2}, {1.21, 1.4}, {1.41, 1.6}, {1.61, 1.8}, {1.81, 2.0}}
                       : std::vector<RangeBucket>{{0.9, 0.99}, {0.85, 0.89}, {0.8, 0.84}, {0.75, 0.79}, {0.7, 0.74}};
        case CorruptionKind::Sharpness:
            // visibility; increase pairs it with a lightness draw, decrease
            // with a blur kernel from {3,5,7,9,11}
            return {{0.1, 0.2}, {0.2, 0.3}, {0.3, 0.4}, {0.4, 0.5}, {0.5, 0.6}};
        case CorruptionKind::Jpeg:
            return degenerate({60, 45, 30, 20, 10});
        case CorruptionKind::Jpeg2000:
            return degenerate({10, 20, 40, 80, 160});
        case CorruptionKind::ResolutionReduction:
            return degenerate({0.9, 0.75, 0.6, 0.45, 0.3});
    }
    throw ValidationError("severity_buckets: unknown corruption kind");
}

std::string PlanEntry::output_id() const {
    return source_id + "_c" + std::to_string(replicate);
}

std::vector<PlanEntry> plan_corruption(const DatasetManifest& manifest, std::uint64_t seed,
                                       int replicates, int max_k) {
    if (manifest.records.empty()) throw ValidationError("plan_corruption: empty manifest");
    if (replicates < 1 || max_k < 1)
        throw ValidationError("plan_corruption: replicates and max_k must be >= 1");
    if (max_k > kCorruptionKindCount)
        throw ValidationError("plan_corruption: max_k exceeds the corruption taxonomy");

    std::vector<PlanEntry> plans;
    plans.reserve(manifest.records.size() * static_cast<std::size_t>(replicates));
    for (const auto& record : manifest.records) {
        for (int rep = 1; rep <= replicates; ++rep) {
            Rng rng = derive_rng(seed, record.id, static_cast<std::uint64_t>(rep));
            PlanEntry entry;
            entry.source_id = record.id;
            entry.replicate = rep;
            entry.seed = hash_seed(seed, record.id + "#exec", static_cast<std::uint64_t>(rep));

            const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_k)));
            std::vector<int> pool(kCorruptionKindCount);
            for (int i = 0; i < kCorruptionKindCount; ++i) pool[i] = i;
            for (int j = 0; j < k; ++j) {
                const std::size_t pick = j + rng.below(pool.size() - j);
                std::swap(pool[j], pool[pick]);
                CorruptionSpec spec;
                spec.kind = static_cast<CorruptionKind>(pool[j]);
                spec.severity = 1 + static_cast<int>(rng.below(5));
                entry.specs.push_back(spec);
            }
            plans.push_back(std::move(entry));
        }
    }
    return plans;
}

namespace {

struct JpegErrorMgr {
    jpeg_error_mgr pub;
    std::jmp_buf jump;
};

void jpeg_error_exit(j_common_ptr cinfo) {
    auto* mgr = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
    std::longjmp(mgr->jump, 1);
}

std::vector<std::uint8_t> to_bytes(const RgbImage& image) {
    std::vector<std::uint8_t> bytes(image.pixels.size());
    for (std::size_t i = 0; i < image.pixels.size(); ++i)
        bytes[i] = static_cast<std::uint8_t>(std::lround(image.pixels[i] * 255.0));
    return bytes;
}

}  // namespace

RgbImage jpeg_roundtrip(const RgbImage& image, int quality) {
    std::vector<std::uint8_t> rgb = to_bytes(image);

    // encode
    unsigned char* buffer = nullptr;
    unsigned long buffer_size = 0;
    {
        jpeg_compress_struct cinfo;
        JpegErrorMgr err;
        cinfo.err = jpeg_std_error(&err.pub);
        err.pub.error_exit = jpeg_error_exit;
        if (setjmp(err.jump)) {
            jpeg_destroy_compress(&cinfo);
            if (buffer) free(buffer);
            throw IoError("jpeg encode failed");
        }
        jpeg_create_compress(&cinfo);
        jpeg_mem_dest(&cinfo, &buffer, &buffer_size);
        cinfo.image_width = static_cast<JDIMENSION>(image.width);
        cinfo.image_height = static_cast<JDIMENSION>(image.height);
        cinfo.input_components = 3;
        cinfo.in_color_space = JCS_RGB;
        jpeg_set_defaults(&cinfo);
        jpeg_set_quality(&cinfo, std::clamp(quality, 1, 100), TRUE);
        jpeg_start_compress(&cinfo, TRUE);
        const std::size_t stride = static_cast<std::size_t>(image.width) * 3;
        while (cinfo.next_scanline < cinfo.image_height) {
            JSAMPROW row = rgb.data() + cinfo.next_scanline * stride;
            jpeg_write_scanlines(&cinfo, &row, 1);
        }
        jpeg_finish_compress(&cinfo);
        jpeg_destroy_compress(&cinfo);
    }

    // decode
    RgbImage out;
    {
        jpeg_decompress_struct dinfo;
        JpegErrorMgr err;
        dinfo.err = jpeg_std_error(&err.pub);
        err.pub.error_exit = jpeg_error_exit;
        if (setjmp(err.jump)) {
            jpeg_destroy_decompress(&dinfo);
            free(buffer);
            throw IoError("jpeg decode failed");
        }
        jpeg_create_decompress(&dinfo);
        jpeg_mem_src(&dinfo, buffer, buffer_size);
        jpeg_read_header(&dinfo, TRUE);
        dinfo.out_color_space = JCS_RGB;
        jpeg_start_decompress(&dinfo);
        out.width = static_cast<int>(dinfo.output_width);
        out.height = static_cast<int>(dinfo.output_height);
        out.pixels.resize(static_cast<std::size_t>(out.width) * out.height * 3);
        std::vector<std::uint8_t> row(static_cast<std::size_t>(out.width) * 3);
        while (dinfo.output_scanline < dinfo.output_height) {
            JSAMPROW rows[1] = {row.data()};
            const std::size_t y = dinfo.output_scanline;
            jpeg_read_scanlines(&dinfo, rows, 1);
            for (std::size_t i = 0; i < row.size(); ++i)
                out.pixels[y * row.size() + i] = row[i] / 255.0;
        }
        jpeg_finish_decompress(&dinfo);
        jpeg_destroy_decompress(&dinfo);
        free(buffer);
    }
    return out;
}

namespace {

// One CDF 5/3 lifting step along a contiguous vector.
void dwt53_forward(std::vector<double>& v) {
    const std::size_t n = v.size();
    if (n < 2) return;
    std::vector<double> even((n + 1) / 2), odd(n / 2);
    for (std::size_t i = 0; i < n; ++i) (i % 2 == 0 ? even[i / 2] : odd[i / 2]) = v[i];
    // predict
    for (std::size_t i = 0; i < odd.size(); ++i) {
        const double left = even[i];
        const double right = (i + 1 < even.size()) ? even[i + 1] : even[i];
        odd[i] -= 0.5 * (left + right);
    }
    // update
    for (std::size_t i = 0; i < even.size(); ++i) {
        const double left = (i > 0) ? odd[i - 1] : odd[0];
        const double right = (i < odd.size()) ? odd[i] : odd[odd.size() - 1];
        even[i] += 0.25 * (left + right);
    }
    for (std::size_t i = 0; i < even.size(); ++i) v[i] = even[i];
    for (std::size_t i = 0; i < odd.size(); ++i) v[even.size() + i] = odd[i];
}

void dwt53_inverse(std::vector<double>& v) {
    const std::size_t n = v.size();
    if (n < 2) return;
    std::vector<double> even(v.begin(), v.begin() + (n + 1) / 2);
    std::vector<double> odd(v.begin() + (n + 1) / 2, v.end());
    for (std::size_t i = 0; i < even.size(); ++i) {
        const double left = (i > 0) ? odd[i - 1] : odd[0];
        const double right = (i < odd.size()) ? odd[i] : odd[odd.size() - 1];
        even[i] -= 0.25 * (left + right);
    }
    for (std::size_t i = 0; i < odd.size(); ++i) {
        const double left = even[i];
        const double right = (i + 1 < even.size()) ? even[i + 1] : even[i];
        odd[i] += 0.5 * (left + right);
    }
    for (std::size_t i = 0; i < n; ++i) v[i] = (i % 2 == 0) ? even[i / 2] : odd[i / 2];
}

void dwt2d(std::vector<double>& plane, int w, int h, int levels, bool forward) {
    for (int level = 0; level < levels; ++level) {
        const int lw = std::max(2, w >> (forward ? level : levels - 1 - level));
        const int lh = std::max(2, h >> (forward ? level : levels - 1 - level));
        if (forward) {
            std::vector<double> line;
            for (int y = 0; y < lh; ++y) {
                line.assign(lw, 0.0);
                for (int x = 0; x < lw; ++x) line[x] = plane[static_cast<std::size_t>(y) * w + x];
                dwt53_forward(line);
                for (int x = 0; x < lw; ++x) plane[static_cast<std::size_t>(y) * w + x] = line[x];
            }
            for (int x = 0; x < lw; ++x) {
                line.assign(lh, 0.0);
                for (int y = 0; y < lh; ++y) line[y] = plane[static_cast<std::size_t>(y) * w + x];
                dwt53_forward(line);
                for (int y = 0; y < lh; ++y) plane[static_cast<std::size_t>(y) * w + x] = line[y];
            }
        } else {
            std::vector<double> line;
            for (int x = 0; x < lw; ++x) {
                line.assign(lh, 0.0);
                for (int y = 0; y < lh; ++y) line[y] = plane[static_cast<std::size_t>(y) * w + x];
                dwt53_inverse(line);
                for (int y = 0; y < lh; ++y) plane[static_cast<std::size_t>(y) * w + x] = line[y];
            }
            for (int y = 0; y < lh; ++y) {
                line.assign(lw, 0.0);
                for (int x = 0; x < lw; ++x) line[x] = plane[static_cast<std::size_t>(y) * w + x];
                dwt53_inverse(line);
                for (int x = 0; x < lw; ++x) plane[static_cast<std::size_t>(y) * w + x] = line[x];
            }
        }
    }
}

}  // namespace

RgbImage jpeg2000_approx(const RgbImage& image, double compression_ratio) {
    const int levels = 4;
    const double keep_fraction = std::min(1.0, 2.0 / compression_ratio);
    RgbImage out = image;
    const std::size_t n = static_cast<std::size_t>(image.width) * image.height;
    std::vector<double> plane(n);
    for (int c = 0; c < 3; ++c) {
        for (std::size_t i = 0; i < n; ++i) plane[i] = image.pixels[i * 3 + c];
        dwt2d(plane, image.width, image.height, levels, true);

        // Zero all but the largest coefficients (the coarsest approximation
        // band is always kept).
        const int cw = std::max(2, image.width >> levels);
        const int ch = std::max(2, image.height >> levels);
        std::vector<double> mags;
        mags.reserve(n);
        for (int y = 0; y < image.height; ++y)
            for (int x = 0; x < image.width; ++x)
                if (x >= cw || y >= ch)
                    mags.push_back(std::fabs(plane[static_cast<std::size_t>(y) * image.width + x]));
        const std::size_t keep = static_cast<std::size_t>(keep_fraction * mags.size());
        double threshold = 0.0;
        if (keep < mags.size()) {
            std::nth_element(mags.begin(), mags.begin() + (mags.size() - 1 - keep), mags.end());
            threshold = mags[mags.size() - 1 - keep];
        }
        for (int y = 0; y < image.height; ++y)
            for (int x = 0; x < image.width; ++x) {
                if (x < cw && y < ch) continue;
                double& v = plane[static_cast<std::size_t>(y) * image.width + x];
                if (std::fabs(v) <= threshold) v = 0.0;
            }

        dwt2d(plane, image.width, image.height, levels, false);
        for (std::size_t i = 0; i < n; ++i)
            out.pixels[i * 3 + c] = std::clamp(plane[i], 0.0, 1.0);
    }
    return out;
}

namespace {

RgbImage overexposure(const RgbImage& image, double gain, int severity) {
    const double lift = 0.02 * severity;
    RgbImage out = image;
    for (double& v : out.pixels) v = std::clamp(v * gain + lift, 0.0, 1.0);
    return out;
}

RgbImage local_focus_blur(const RgbImage& image, int diameter, double region_fraction,
                          Rng& rng) {
    const RgbImage blurred = kernels::disk_blur(image, diameter);
    // Random ellipse covering ~region_fraction of the frame, with a smooth
    // falloff band around its rim.
    const double cx = rng.uniform(0.25, 0.75) * image.width;
    const double cy = rng.uniform(0.25, 0.75) * image.height;
    const double aspect = rng.uniform(0.6, 1.6);
    const double area = region_fraction * image.width * image.height;
    const double ry = std::sqrt(area / (std::numbers::pi * aspect));
    const double rx = aspect * ry;
    const double theta = rng.uniform(0.0, std::numbers::pi);
    const double cos_t = std::cos(theta), sin_t = std::sin(theta);

    RgbImage out = image;
    for (int y = 0; y < image.height; ++y)
        for (int x = 0; x < image.width; ++x) {
            const double dx = x - cx, dy = y - cy;
            const double u = (dx * cos_t + dy * sin_t) / rx;
            const double v = (-dx * sin_t + dy * cos_t) / ry;
            const double d = u * u + v * v;
            // alpha 1 inside, smooth to 0 at 1.3x the radius
            double alpha = 0.0;
            if (d <= 1.0)
                alpha = 1.0;
            else if (d < 1.69)
                alpha = 1.0 - (std::sqrt(d) - 1.0) / 0.3;
            if (alpha <= 0.0) continue;
            for (int c = 0; c < 3; ++c)
                out.at(x, y, c) =
                    (1.0 - alpha) * image.at(x, y, c) + alpha * blurred.at(x, y, c);
        }
    return out;
}

RgbImage resolution_reduction(const RgbImage& image, double scale) {
    const int w = std::max(2, static_cast<int>(std::lround(scale * image.width)));
    const int h = std::max(2, static_cast<int>(std::lround(scale * image.height)));
    return resize_bicubic(resize_bicubic(image, w, h), image.width, image.height);
}

}  // namespace

RgbImage execute(const PlanEntry& entry, const RgbImage& image,
                 std::vector<ExecutedCorruption>* log) {
    Rng rng(entry.seed);
    RgbImage out = image;
    for (const CorruptionSpec& spec : entry.specs) {
        if (spec.severity < 1 || spec.severity > 5)
            throw ValidationError("execute: severity out of range");
        ExecutedCorruption record;
        record.spec = spec;

        std::optional<Direction> dir;
        if (is_directional(spec.kind))
            dir = rng.bernoulli(0.5) ? Direction::Increase : Direction::Decrease;
        record.direction = dir;

        const auto buckets = severity_buckets(spec.kind, dir);
        const RangeBucket& b = buckets[spec.severity - 1];
        const double value = rng.uniform(b.lo, b.hi);
        record.params.push_back(value);

        switch (spec.kind) {
            case CorruptionKind::MotionBlur: {
                const double angle = rng.uniform(0.0, std::numbers::pi);
                record.params.push_back(angle);
                out = kernels::motion_blur(out, static_cast<int>(value), angle);
                break;
            }
            case CorruptionKind::LocalFocusBlur: {
                // region fraction 20-60% scaled with severity
                const double frac = rng.uniform(0.2 + 0.08 * (spec.severity - 1),
                                                0.28 + 0.08 * (spec.severity - 1));
                record.params.push_back(frac);
                out = local_focus_blur(out, static_cast<int>(value), frac, rng);
                break;
            }
            case CorruptionKind::Overexposure:
                out = overexposure(out, value, spec.severity);
                break;
            case CorruptionKind::Contrast:
                out = kernels::contrast(out, value);
                break;
            case CorruptionKind::Saturation:
                out = kernels::saturation(out, value);
                break;
            case CorruptionKind::Hue:
                out = kernels::hue_shift(out, value);
                break;
            case CorruptionKind::Brightness:
                out = kernels::brightness(out, value);
                break;
            case CorruptionKind::Sharpness: {
                if (dir == Direction::Increase) {
                    const auto light = severity_buckets(CorruptionKind::Sharpness, dir);
                    const double lightness = rng.uniform(light[spec.severity - 1].lo,
                                                         light[spec.severity - 1].hi);
                    record.params.push_back(lightness);
                    out = kernels::sharpness_increase(out, value, lightness);
                } else {
                    const int kernel = 3 + 2 * (spec.severity - 1);  // {3,5,7,9,11}
                    record.params.push_back(kernel);
                    out = kernels::sharpness_decrease(out, value, kernel);
                }
                break;
            }
            case CorruptionKind::Jpeg:
                out = jpeg_roundtrip(out, static_cast<int>(value));
                break;
            case CorruptionKind::Jpeg2000:
                out = jpeg2000_approx(out, value);
                break;
            case CorruptionKind::ResolutionReduction:
                out = resolution_reduction(out, value);
                break;
        }
        if (log) log->push_back(std::move(record));
    }
    return out;
}

}  // namespace cade::corrupt
