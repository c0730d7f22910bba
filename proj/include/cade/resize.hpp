#pragma once

#include "cade/image.hpp"

namespace cade {

// Bicubic (Catmull-Rom, a = -0.5) resize with clamped borders.
// Equal dimensions return the input unchanged.
RgbImage resize_bicubic(const RgbImage& image, int out_width, int out_height);

inline RgbImage resize_to_model_input(const RgbImage& image, int side = 256) {
    return resize_bicubic(image, side, side);
}

// Nearest-neighbour resize, used for masks paired with resized images.
BinaryMask resize_nearest(const BinaryMask& mask, int out_width, int out_height);

// Single-channel bicubic on a raw plane; shared by image kernels.
std::vector<double> resize_plane_bicubic(const std::vector<double>& plane,
                                         int width, int height,
                                         int out_width, int out_height,
                                         int channels = 1);

}  // namespace cade
