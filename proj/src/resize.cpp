#include "cade/resize.hpp"

#include <algorithm>
#include <cmath>

namespace cade {

namespace {

// Catmull-Rom cubic kernel (a = -0.5).
inline double catmull_rom(double x) {
    x = std::fabs(x);
    if (x <= 1.0) return ((1.5 * x - 2.5) * x) * x + 1.0;
    if (x < 2.0) return (((-0.5 * x) + 2.5) * x - 4.0) * x + 2.0;
    return 0.0;
}

}  // namespace

std::vector<double> resize_plane_bicubic(const std::vector<double>& plane,
                                         int width, int height,
                                         int out_width, int out_height,
                                         int channels) {
    std::vector<double> out(static_cast<std::size_t>(out_width) * out_height * channels);
    const double sx = static_cast<double>(width) / out_width;
    const double sy = static_cast<double>(height) / out_height;
    for (int oy = 0; oy < out_height; ++oy) {
        const double fy = (oy + 0.5) * sy - 0.5;
        const int y0 = static_cast<int>(std::floor(fy));
        double wy[4];
        for (int k = 0; k < 4; ++k) wy[k] = catmull_rom(fy - (y0 - 1 + k));
        for (int ox = 0; ox < out_width; ++ox) {
            const double fx = (ox + 0.5) * sx - 0.5;
            const int x0 = static_cast<int>(std::floor(fx));
            double wx[4];
            for (int k = 0; k < 4; ++k) wx[k] = catmull_rom(fx - (x0 - 1 + k));
            for (int c = 0; c < channels; ++c) {
                double acc = 0.0;
                double wsum = 0.0;
                for (int j = 0; j < 4; ++j) {
                    const int y = std::clamp(y0 - 1 + j, 0, height - 1);
                    for (int i = 0; i < 4; ++i) {
                        const int x = std::clamp(x0 - 1 + i, 0, width - 1);
                        const double w = wy[j] * wx[i];
                        acc += w * plane[(static_cast<std::size_t>(y) * width + x) * channels + c];
                        wsum += w;
                    }
                }
                out[(static_cast<std::size_t>(oy) * out_width + ox) * channels + c] = acc / wsum;
            }
        }
    }
    return out;
}

RgbImage resize_bicubic(const RgbImage& image, int out_width, int out_height) {
    image.validate();
    if (image.width == out_width && image.height == out_height) return image;
    RgbImage out;
    out.width = out_width;
    out.height = out_height;
    out.pixels = resize_plane_bicubic(image.pixels, image.width, image.height,
                                      out_width, out_height, 3);
    for (double& v : out.pixels) v = std::clamp(v, 0.0, 1.0);
    return out;
}

BinaryMask resize_nearest(const BinaryMask& mask, int out_width, int out_height) {
    if (mask.width == out_width && mask.height == out_height) return mask;
    BinaryMask out = BinaryMask::filled(out_width, out_height, false);
    const double sx = static_cast<double>(mask.width) / out_width;
    const double sy = static_cast<double>(mask.height) / out_height;
    for (int oy = 0; oy < out_height; ++oy) {
        const int y = std::clamp(static_cast<int>((oy + 0.5) * sy), 0, mask.height - 1);
        for (int ox = 0; ox < out_width; ++ox) {
            const int x = std::clamp(static_cast<int>((ox + 0.5) * sx), 0, mask.width - 1);
            out.set(ox, oy, mask.at(x, y));
        }
    }
    return out;
}

}  // namespace cade
