#pragma once

#include "cade/image.hpp"
#include "cade/rng.hpp"

// Pixel-level transform kernels shared by the augmentation pipelines and the
// corruption generator. All kernels keep intensities in [0,1].
namespace cade::kernels {

// mode: 0 = horizontal, 1 = vertical, 2 = both
RgbImage flip(const RgbImage& image, int mode);
BinaryMask flip(const BinaryMask& mask, int mode);

// quarter_turns in {1,2,3}, counter-clockwise
RgbImage rotate90(const RgbImage& image, int quarter_turns);
BinaryMask rotate90(const BinaryMask& mask, int quarter_turns);

// Rotation and shear about the image centre plus translation as a fraction
// of each dimension. Bilinear sampling, zero fill outside; masks use
// nearest-neighbour with the identical matrix.
RgbImage affine(const RgbImage& image, double rot_deg, double tx_frac, double ty_frac,
                double shear_deg);
BinaryMask affine(const BinaryMask& mask, double rot_deg, double tx_frac, double ty_frac,
                  double shear_deg);

// Crop of side scale*dim anchored by offsets (u,v) in [0,1], rescaled to
// (target_w, target_h); targets of 0 keep the input size. Scales above 1
// read replicated border pixels.
RgbImage crop_resize(const RgbImage& image, double scale, double u, double v,
                     int target_w, int target_h);
BinaryMask crop_resize(const BinaryMask& mask, double scale, double u, double v,
                       int target_w, int target_h);

RgbImage gaussian_blur(const RgbImage& image, double sigma);

// x + amount * (x - gauss(x, sigma=1))
RgbImage sharpen(const RgbImage& image, double amount);

// (1-v) * x + v * sharpen(x, lightness)
RgbImage sharpness_increase(const RgbImage& image, double visibility, double lightness);

// (1-v) * x + v * gaussian_blur(x, kernel)
RgbImage sharpness_decrease(const RgbImage& image, double visibility, int kernel_size);

RgbImage grayscale(const RgbImage& image);
RgbImage brightness(const RgbImage& image, double factor);
RgbImage contrast(const RgbImage& image, double factor);
RgbImage saturation(const RgbImage& image, double factor);

// shift is a fraction of the full hue circle
RgbImage hue_shift(const RgbImage& image, double shift);

RgbImage solarize(const RgbImage& image, double threshold = 0.5);

RgbImage add_gaussian_noise(const RgbImage& image, double variance, Rng& rng);

// Mean over `length` bilinear taps along a line at `angle_rad`.
RgbImage motion_blur(const RgbImage& image, int length, double angle_rad);

// Mean of `steps` centre zooms with factors spread over [1, max_factor].
RgbImage zoom_blur(const RgbImage& image, double max_factor, int steps = 10);

// Disk kernel of the given diameter; in-bounds taps are renormalized at the
// borders. Diameter 1 is the identity.
RgbImage disk_blur(const RgbImage& image, int diameter);

RgbImage median_blur(const RgbImage& image, int aperture);

double mse(const RgbImage& a, const RgbImage& b);

}  // namespace cade::kernels
