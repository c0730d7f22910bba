#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "cade/error.hpp"

namespace cade {

// 3-channel image, row-major interleaved, intensities in [0,1].
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;  // width * height * 3

    static RgbImage filled(int width, int height, double value = 0.0);
    static RgbImage filled(int width, int height, double r, double g, double b);

    // Validating constructor path for externally produced buffers.
    static RgbImage from_pixels(int width, int height, std::vector<double> pixels);

    double& at(int x, int y, int c) { return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
    double at(int x, int y, int c) const { return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }

    bool empty() const { return pixels.empty(); }
    std::size_t size() const { return pixels.size(); }

    void validate() const;

    bool operator==(const RgbImage&) const = default;
};

// Output of channel-wise normalization; values are unbounded.
struct NormalizedImage {
    int width = 0;
    int height = 0;
    std::vector<double> values;  // width * height * 3

    double& at(int x, int y, int c) { return values[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
    double at(int x, int y, int c) const { return values[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }

    bool operator==(const NormalizedImage&) const = default;
};

struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;  // 0 or 1, row-major

    static BinaryMask filled(int width, int height, bool value = false);

    bool at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v) { bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }

    std::size_t count() const;
    bool empty_mask() const { return count() == 0; }

    bool operator==(const BinaryMask&) const = default;
};

struct SoftMask {
    int width = 0;
    int height = 0;
    std::vector<double> values;  // in [0,1]

    static SoftMask filled(int width, int height, double value = 0.0);

    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }

    double max_value() const;
    void validate() const;

    bool operator==(const SoftMask&) const = default;
};

class NormalizationStats {
public:
    // Throws ValidationError unless every std component is strictly positive.
    NormalizationStats(std::array<double, 3> mean, std::array<double, 3> std);

    const std::array<double, 3>& mean() const { return mean_; }
    const std::array<double, 3>& std() const { return std_; }

    // Channel statistics of the WLE training data.
    static NormalizationStats barrett_wle();
    // Conventional ImageNet statistics.
    static NormalizationStats imagenet();

private:
    std::array<double, 3> mean_;
    std::array<double, 3> std_;
};

// out[c] = (in[c] - mean[c]) / std[c]
NormalizedImage normalize(const RgbImage& image, const NormalizationStats& stats);

// Inverse affine map; the result is clamped to [0,1].
RgbImage denormalize(const NormalizedImage& image, const NormalizationStats& stats);

}  // namespace cade
