#pragma once

#include <filesystem>

#include "cade/image.hpp"

namespace cade {

// 8-bit PNG in, intensities mapped to [0,1] by /255. Grayscale inputs are
// expanded to 3 channels; alpha is stripped.
RgbImage read_rgb_png(const std::filesystem::path& path);

// 8-bit RGB PNG out, round(v*255).
void write_rgb_png(const RgbImage& image, const std::filesystem::path& path);

// 8-bit grayscale PNG with 255 = positive, 0 = negative. Any other value
// in the file is rejected.
BinaryMask read_binary_mask_png(const std::filesystem::path& path);
void write_binary_mask_png(const BinaryMask& mask, const std::filesystem::path& path);

// 8-bit grayscale PNG, value/255; any value is valid.
SoftMask read_soft_mask_png(const std::filesystem::path& path);
void write_soft_mask_png(const SoftMask& mask, const std::filesystem::path& path);

}  // namespace cade
