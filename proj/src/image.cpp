#include "cade/image.hpp"

#include <algorithm>
#include <string>

namespace cade {

RgbImage RgbImage::filled(int width, int height, double value) {
    return filled(width, height, value, value, value);
}

RgbImage RgbImage::filled(int width, int height, double r, double g, double b) {
    RgbImage img;
    img.width = width;
    img.height = height;
    img.pixels.resize(static_cast<std::size_t>(width) * height * 3);
    for (std::size_t i = 0; i < img.pixels.size(); i += 3) {
        img.pixels[i] = r;
        img.pixels[i + 1] = g;
        img.pixels[i + 2] = b;
    }
    img.validate();
    return img;
}

RgbImage RgbImage::from_pixels(int width, int height, std::vector<double> pixels) {
    RgbImage img;
    img.width = width;
    img.height = height;
    img.pixels = std::move(pixels);
    img.validate();
    return img;
}

void RgbImage::validate() const {
    if (width <= 0 || height <= 0)
        throw ValidationError("RgbImage: non-positive dimensions");
    if (pixels.size() != static_cast<std::size_t>(width) * height * 3)
        throw ValidationError("RgbImage: pixel buffer length != width*height*3");
    for (double v : pixels)
        if (!(v >= 0.0 && v <= 1.0))
            throw ValidationError("RgbImage: intensity outside [0,1]: " + std::to_string(v));
}

BinaryMask BinaryMask::filled(int width, int height, bool value) {
    BinaryMask m;
    m.width = width;
    m.height = height;
    m.bits.assign(static_cast<std::size_t>(width) * height, value ? 1 : 0);
    return m;
}

std::size_t BinaryMask::count() const {
    std::size_t n = 0;
    for (auto b : bits) n += (b != 0);
    return n;
}

SoftMask SoftMask::filled(int width, int height, double value) {
    SoftMask m;
    m.width = width;
    m.height = height;
    m.values.assign(static_cast<std::size_t>(width) * height, value);
    return m;
}

double SoftMask::max_value() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, v);
    return m;
}

void SoftMask::validate() const {
    if (values.size() != static_cast<std::size_t>(width) * height)
        throw ValidationError("SoftMask: buffer length != width*height");
    for (double v : values)
        if (!(v >= 0.0 && v <= 1.0))
            throw ValidationError("SoftMask: value outside [0,1]");
}

NormalizationStats::NormalizationStats(std::array<double, 3> mean, std::array<double, 3> std)
    : mean_(mean), std_(std) {
    for (double s : std_)
        if (!(s > 0.0))
            throw ValidationError("NormalizationStats: std components must be > 0");
}

NormalizationStats NormalizationStats::barrett_wle() {
    return NormalizationStats({0.64, 0.361, 0.313}, {0.189, 0.156, 0.141});
}

NormalizationStats NormalizationStats::imagenet() {
    return NormalizationStats({0.485, 0.456, 0.406}, {0.229, 0.224, 0.225});
}

NormalizedImage normalize(const RgbImage& image, const NormalizationStats& stats) {
    NormalizedImage out;
    out.width = image.width;
    out.height = image.height;
    out.values.resize(image.pixels.size());
    const auto& mean = stats.mean();
    const auto& std = stats.std();
    for (std::size_t i = 0; i < image.pixels.size(); ++i) {
        const int c = static_cast<int>(i % 3);
        out.values[i] = (image.pixels[i] - mean[c]) / std[c];
    }
    return out;
}

RgbImage denormalize(const NormalizedImage& image, const NormalizationStats& stats) {
    RgbImage out;
    out.width = image.width;
    out.height = image.height;
    out.pixels.resize(image.values.size());
    const auto& mean = stats.mean();
    const auto& std = stats.std();
    for (std::size_t i = 0; i < image.values.size(); ++i) {
        const int c = static_cast<int>(i % 3);
        out.pixels[i] = std::clamp(image.values[i] * std[c] + mean[c], 0.0, 1.0);
    }
    return out;
}

}  // namespace cade
