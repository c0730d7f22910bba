#include "cade/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "cade/error.hpp"
#include "cade/resize.hpp"

namespace cade::kernels {

namespace {

inline double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

double bilinear(const RgbImage& img, double x, double y, int c) {
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const double fx = x - x0;
    const double fy = y - y0;
    const int x0c = clampi(x0, 0, img.width - 1);
    const int x1c = clampi(x0 + 1, 0, img.width - 1);
    const int y0c = clampi(y0, 0, img.height - 1);
    const int y1c = clampi(y0 + 1, 0, img.height - 1);
    const double top = img.at(x0c, y0c, c) * (1.0 - fx) + img.at(x1c, y0c, c) * fx;
    const double bot = img.at(x0c, y1c, c) * (1.0 - fx) + img.at(x1c, y1c, c) * fx;
    return top * (1.0 - fy) + bot * fy;
}

// Bilinear with zero outside the canvas, for affine warps.
double bilinear_zero(const RgbImage& img, double x, double y, int c) {
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const double fx = x - x0;
    const double fy = y - y0;
    auto sample = [&](int xi, int yi) -> double {
        if (xi < 0 || yi < 0 || xi >= img.width || yi >= img.height) return 0.0;
        return img.at(xi, yi, c);
    };
    const double top = sample(x0, y0) * (1.0 - fx) + sample(x0 + 1, y0) * fx;
    const double bot = sample(x0, y0 + 1) * (1.0 - fx) + sample(x0 + 1, y0 + 1) * fx;
    return top * (1.0 - fy) + bot * fy;
}

double luma(double r, double g, double b) { return 0.299 * r + 0.587 * g + 0.114 * b; }

void rgb_to_hsv(double r, double g, double b, double& h, double& s, double& v) {
    const double mx = std::max({r, g, b});
    const double mn = std::min({r, g, b});
    const double d = mx - mn;
    v = mx;
    s = mx == 0.0 ? 0.0 : d / mx;
    if (d == 0.0) {
        h = 0.0;
    } else if (mx == r) {
        h = std::fmod((g - b) / d, 6.0) / 6.0;
    } else if (mx == g) {
        h = ((b - r) / d + 2.0) / 6.0;
    } else {
        h = ((r - g) / d + 4.0) / 6.0;
    }
    if (h < 0.0) h += 1.0;
}

void hsv_to_rgb(double h, double s, double v, double& r, double& g, double& b) {
    const double hh = std::fmod(h, 1.0) * 6.0;
    const int i = static_cast<int>(std::floor(hh)) % 6;
    const double f = hh - std::floor(hh);
    const double p = v * (1.0 - s);
    const double q = v * (1.0 - s * f);
    const double t = v * (1.0 - s * (1.0 - f));
    switch (i) {
        case 0: r = v; g = t; b = p; break;
        case 1: r = q; g = v; b = p; break;
        case 2: r = p; g = v; b = t; break;
        case 3: r = p; g = q; b = v; break;
        case 4: r = t; g = p; b = v; break;
        default: r = v; g = p; b = q; break;
    }
}

// Affine inverse map shared by image and mask paths.
struct AffineMap {
    double m00, m01, m10, m11;  // inverse linear part
    double cx, cy, tx, ty;

    AffineMap(int width, int height, double rot_deg, double tx_frac, double ty_frac,
              double shear_deg) {
        const double th = rot_deg * std::numbers::pi / 180.0;
        const double sh = std::tan(shear_deg * std::numbers::pi / 180.0);
        // forward = R(th) * Shear(sh) about the centre, then translate
        const double f00 = std::cos(th);
        const double f01 = std::cos(th) * sh - std::sin(th);
        const double f10 = std::sin(th);
        const double f11 = std::sin(th) * sh + std::cos(th);
        const double det = f00 * f11 - f01 * f10;
        m00 = f11 / det;
        m01 = -f01 / det;
        m10 = -f10 / det;
        m11 = f00 / det;
        cx = (width - 1) / 2.0;
        cy = (height - 1) / 2.0;
        tx = tx_frac * width;
        ty = ty_frac * height;
    }

    void source(double dx, double dy, double& sx, double& sy) const {
        const double px = dx - cx - tx;
        const double py = dy - cy - ty;
        sx = m00 * px + m01 * py + cx;
        sy = m10 * px + m11 * py + cy;
    }
};

struct CropRectF {
    double x0, y0;
    int w, h;
};

CropRectF crop_rect(int width, int height, double scale, double u, double v) {
    const int cw = std::max(1, static_cast<int>(std::lround(scale * width)));
    const int ch = std::max(1, static_cast<int>(std::lround(scale * height)));
    // Offsets cover the valid range for scale <= 1 and the negative overhang
    // for scale > 1 (read through the replicated border).
    const double x0 = u * (width - cw);
    const double y0 = v * (height - ch);
    return {x0, y0, cw, ch};
}

std::vector<double> gaussian_taps(double sigma, int& half) {
    half = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> w(2 * half + 1);
    double sum = 0.0;
    for (int i = -half; i <= half; ++i) {
        w[i + half] = std::exp(-0.5 * (i * i) / (sigma * sigma));
        sum += w[i + half];
    }
    for (double& x : w) x /= sum;
    return w;
}

}  // namespace

RgbImage flip(const RgbImage& image, int mode) {
    RgbImage out = image;
    const bool h = mode == 0 || mode == 2;
    const bool v = mode == 1 || mode == 2;
    for (int y = 0; y < image.height; ++y)
        for (int x = 0; x < image.width; ++x)
            for (int c = 0; c < 3; ++c)
                out.at(h ? image.width - 1 - x : x, v ? image.height - 1 - y : y, c) =
                    image.at(x, y, c);
    return out;
}

BinaryMask flip(const BinaryMask& mask, int mode) {
    BinaryMask out = mask;
    const bool h = mode == 0 || mode == 2;
    const bool v = mode == 1 || mode == 2;
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x)
            out.set(h ? mask.width - 1 - x : x, v ? mask.height - 1 - y : y, mask.at(x, y));
    return out;
}

RgbImage rotate90(const RgbImage& image, int quarter_turns) {
    const int t = ((quarter_turns % 4) + 4) % 4;
    if (t == 0) return image;
    RgbImage out;
    out.width = (t == 2) ? image.width : image.height;
    out.height = (t == 2) ? image.height : image.width;
    out.pixels.resize(image.pixels.size());
    for (int y = 0; y < image.height; ++y)
        for (int x = 0; x < image.width; ++x) {
            int nx, ny;
            if (t == 1) {  // 90 CCW
                nx = y;
                ny = image.width - 1 - x;
            } else if (t == 2) {
                nx = image.width - 1 - x;
                ny = image.height - 1 - y;
            } else {  // 270 CCW
                nx = image.height - 1 - y;
                ny = x;
            }
            for (int c = 0; c < 3; ++c) out.at(nx, ny, c) = image.at(x, y, c);
        }
    return out;
}

BinaryMask rotate90(const BinaryMask& mask, int quarter_turns) {
    const int t = ((quarter_turns % 4) + 4) % 4;
    if (t == 0) return mask;
    BinaryMask out;
    out.width = (t == 2) ? mask.width : mask.height;
    out.height = (t == 2) ? mask.height : mask.width;
    out.bits.resize(mask.bits.size());
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x) {
            int nx, ny;
            if (t == 1) {
                nx = y;
                ny = mask.width - 1 - x;
            } else if (t == 2) {
                nx = mask.width - 1 - x;
                ny = mask.height - 1 - y;
            } else {
                nx = mask.height - 1 - y;
                ny = x;
            }
            out.set(nx, ny, mask.at(x, y));
        }
    return out;
}

RgbImage affine(const RgbImage& image, double rot_deg, double tx_frac, double ty_frac,
                double shear_deg) {
    const AffineMap map(image.width, image.height, rot_deg, tx_frac, ty_frac, shear_deg);
    RgbImage out = RgbImage::filled(image.width, image.height, 0.0);
    for (int y = 0; y < image.height; ++y)
        for (int x = 0; x < image.width; ++x) {
            double sx, sy;
            map.source(x, y, sx, sy);
            if (sx < -1.0 || sy < -1.0 || sx > image.width || sy > image.height) continue;
            for (int c = 0; c < 3; ++c)
                out.at(x, y, c) = clamp01(bilinear_zero(image, sx, sy, c));
        }
    return out;
}

BinaryMask affine(const BinaryMask& mask, double rot_deg, double tx_frac, double ty_frac,
                  double shear_deg) {
    const AffineMap map(mask.width, mask.height, rot_deg, tx_frac, ty_frac, shear_deg);
    BinaryMask out = BinaryMask::filled(mask.width, mask.height, false);
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x) {
            double sx, sy;
            map.source(x, y, sx, sy);
            const int xi = static_cast<int>(std::lround(sx));
            const int yi = static_cast<int>(std::lround(sy));
            if (xi < 0 || yi < 0 || xi >= mask.width || yi >= mask.height) continue;
            out.set(x, y, mask.at(xi, yi));
        }
    return out;
}

RgbImage crop_resize(const RgbImage& image, double scale, double u, double v,
                     int target_w, int target_h) {
    const CropRectF rect = crop_rect(image.width, image.height, scale, u, v);
    RgbImage patch;
    patch.width = rect.w;
    patch.height = rect.h;
    patch.pixels.resize(static_cast<std::size_t>(rect.w) * rect.h * 3);
    for (int y = 0; y < rect.h; ++y)
        for (int x = 0; x < rect.w; ++x) {
            const int sx = clampi(static_cast<int>(std::lround(rect.x0)) + x, 0, image.width - 1);
            const int sy = clampi(static_cast<int>(std::lround(rect.y0)) + y, 0, image.height - 1);
            for (int c = 0; c < 3; ++c) patch.at(x, y, c) = image.at(sx, sy, c);
        }
    const int tw = target_w > 0 ? target_w : image.width;
    const int th = target_h > 0 ? target_h : image.height;
    return resize_bicubic(patch, tw, th);
}

BinaryMask crop_resize(const BinaryMask& mask, double scale, double u, double v,
                       int target_w, int target_h) {
    const CropRectF rect = crop_rect(mask.width, mask.height, scale, u, v);
    BinaryMask patch = BinaryMask::filled(rect.w, rect.h, false);
    for (int y = 0; y < rect.h; ++y)
        for (int x = 0; x < rect.w; ++x) {
            const int sx = clampi(static_cast<int>(std::lround(rect.x0)) + x, 0, mask.width - 1);
            const int sy = clampi(static_cast<int>(std::lround(rect.y0)) + y, 0, mask.height - 1);
            patch.set(x, y, mask.at(sx, sy));
        }
    const int tw = target_w > 0 ? target_w : mask.width;
    const int th = target_h > 0 ? target_h : mask.height;
    return resize_nearest(patch, tw, th);
}

RgbImage gaussian_blur(const RgbImage& image, double sigma) {
    if (sigma <= 0.0) return image;
    int half = 0;
    const std::vector<double> w = gaussian_taps(sigma, half);
    RgbImage tmp = image;
    // horizontal
    for (int y = 0; y < image.height; ++y)
        for (int x = 0; x < image.width; ++x)
            for (int c = 0; c < 3; ++c) {
                double acc = 0.0;
                for (int k = -half; k <= half; ++k)
                    acc += w[k + half] * image.at(clampi(x + k, 0, image.width - 1), y, c);
                tmp.at(x, y, c) = acc;
            }
    RgbImage out = tmp;
    // vertical
    for (int y = 0; y < image.height; ++y)
        for (int x = 0; x < image.width; ++x)
            for (int c = 0; c < 3; ++c) {
                double acc = 0.0;
                for (int k = -half; k <= half; ++k)
                    acc += w[k + half] * tmp.at(x, clampi(y + k, 0, image.height - 1), c);
                out.at(x, y, c) = clamp01(acc);
            }
    return out;
}

RgbImage sharpen(const RgbImage& image, double amount) {
    const RgbImage blurred = gaussian_blur(image, 1.0);
    RgbImage out = image;
    for (std::size_t i = 0; i < out.pixels.size(); ++i)
        out.pixels[i] = clamp01(image.pixels[i] + amount * (image.pixels[i] - blurred.pixels[i]));
    return out;
}

RgbImage sharpness_increase(const RgbImage& image, double visibility, double lightness) {
    const RgbImage sharp = sharpen(image, lightness);
    RgbImage out = image;
    for (std::size_t i = 0; i < out.pixels.size(); ++i)
        out.pixels[i] = clamp01((1.0 - visibility) * image.pixels[i] + visibility * sharp.pixels[i]);
    return out;
}

RgbImage sharpness_decrease(const RgbImage& image, double visibility, int kernel_size) {
    // OpenCV's kernel-size-to-sigma rule.
    const double sigma = kernel_size <= 1 ? 0.0 : 0.3 * ((kernel_size - 1) * 0.5 - 1.0) + 0.8;
    const RgbImage blurred = gaussian_blur(image, sigma);
    RgbImage out = image;
    for (std::size_t i = 0; i < out.pixels.size(); ++i)
        out.pixels[i] =
            clamp01((1.0 - visibility) * image.pixels[i] + visibility * blurred.pixels[i]);
    return out;
}

RgbImage grayscale(const RgbImage& image) {
    RgbImage out = image;
    for (std::size_t i = 0; i < image.pixels.size(); i += 3) {
        const double l = luma(image.pixels[i], image.pixels[i + 1], image.pixels[i + 2]);
        out.pixels[i] = out.pixels[i + 1] = out.pixels[i + 2] = l;
    }
    return out;
}

RgbImage brightness(const RgbImage& image, double factor) {
    RgbImage out = image;
    for (double& v : out.pixels) v = clamp01(v * factor);
    return out;
}

RgbImage contrast(const RgbImage& image, double factor) {
    double mean_gray = 0.0;
    for (std::size_t i = 0; i < image.pixels.size(); i += 3)
        mean_gray += luma(image.pixels[i], image.pixels[i + 1], image.pixels[i + 2]);
    mean_gray /= static_cast<double>(image.pixels.size() / 3);
    RgbImage out = image;
    for (double& v : out.pixels) v = clamp01(mean_gray + (v - mean_gray) * factor);
    return out;
}

RgbImage saturation(const RgbImage& image, double factor) {
    RgbImage out = image;
    for (std::size_t i = 0; i < image.pixels.size(); i += 3) {
        const double l = luma(image.pixels[i], image.pixels[i + 1], image.pixels[i + 2]);
        for (int c = 0; c < 3; ++c)
            out.pixels[i + c] = clamp01(l + (image.pixels[i + c] - l) * factor);
    }
    return out;
}

RgbImage hue_shift(const RgbImage& image, double shift) {
    RgbImage out = image;
    for (std::size_t i = 0; i < image.pixels.size(); i += 3) {
        double h, s, v;
        rgb_to_hsv(image.pixels[i], image.pixels[i + 1], image.pixels[i + 2], h, s, v);
        h = std::fmod(h + shift + 1.0, 1.0);
        double r, g, b;
        hsv_to_rgb(h, s, v, r, g, b);
        out.pixels[i] = clamp01(r);
        out.pixels[i + 1] = clamp01(g);
        out.pixels[i + 2] = clamp01(b);
    }
    return out;
}

RgbImage solarize(const RgbImage& image, double threshold) {
    RgbImage out = image;
    for (double& v : out.pixels)
        if (v > threshold) v = 1.0 - v;
    return out;
}

RgbImage add_gaussian_noise(const RgbImage& image, double variance, Rng& rng) {
    const double sigma = std::sqrt(variance);
    RgbImage out = image;
    for (double& v : out.pixels) v = clamp01(v + rng.normal(0.0, sigma));
    return out;
}

RgbImage motion_blur(const RgbImage& image, int length, double angle_rad) {
    if (length <= 1) return image;
    RgbImage out = image;
    const double dx = std::cos(angle_rad);
    const double dy = std::sin(angle_rad);
    const double mid = (length - 1) / 2.0;
    for (int y = 0; y < image.height; ++y)
        for (int x = 0; x < image.width; ++x)
            for (int c = 0; c < 3; ++c) {
                double acc = 0.0;
                for (int t = 0; t < length; ++t) {
                    const double off = t - mid;
                    acc += bilinear(image, x + off * dx, y + off * dy, c);
                }
                out.at(x, y, c) = clamp01(acc / length);
            }
    return out;
}

RgbImage zoom_blur(const RgbImage& image, double max_factor, int steps) {
    RgbImage out = RgbImage::filled(image.width, image.height, 0.0);
    const double cx = (image.width - 1) / 2.0;
    const double cy = (image.height - 1) / 2.0;
    for (int s = 0; s < steps; ++s) {
        const double z = 1.0 + (max_factor - 1.0) * s / (steps - 1.0);
        for (int y = 0; y < image.height; ++y)
            for (int x = 0; x < image.width; ++x) {
                const double sx = cx + (x - cx) / z;
                const double sy = cy + (y - cy) / z;
                for (int c = 0; c < 3; ++c) out.at(x, y, c) += bilinear(image, sx, sy, c);
            }
    }
    for (double& v : out.pixels) v = clamp01(v / steps);
    return out;
}

RgbImage disk_blur(const RgbImage& image, int diameter) {
    if (diameter <= 1) return image;
    const double radius = diameter / 2.0;
    const int r = (diameter - 1) / 2;
    // Row half-widths of the disk.
    std::vector<int> span(2 * r + 1);
    for (int dy = -r; dy <= r; ++dy) {
        const double rem = radius * radius - static_cast<double>(dy) * dy;
        span[dy + r] = rem <= 0.0 ? 0 : std::min(r, static_cast<int>(std::floor(std::sqrt(rem))));
    }
    // Per-row prefix sums per channel.
    const int w = image.width, h = image.height;
    std::vector<double> prefix(static_cast<std::size_t>(h) * (w + 1) * 3, 0.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < 3; ++c) {
                const std::size_t base = (static_cast<std::size_t>(y) * (w + 1)) * 3;
                prefix[base + (x + 1) * 3 + c] = prefix[base + x * 3 + c] + image.at(x, y, c);
            }
    auto row_sum = [&](int y, int x0, int x1, int c) -> double {
        const std::size_t base = (static_cast<std::size_t>(y) * (w + 1)) * 3;
        return prefix[base + (x1 + 1) * 3 + c] - prefix[base + x0 * 3 + c];
    };

    RgbImage out = image;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc[3] = {0.0, 0.0, 0.0};
            int taps = 0;
            for (int dy = -r; dy <= r; ++dy) {
                const int yy = y + dy;
                if (yy < 0 || yy >= h) continue;
                const int half = span[dy + r];
                const int x0 = std::max(0, x - half);
                const int x1 = std::min(w - 1, x + half);
                if (x0 > x1) continue;
                taps += x1 - x0 + 1;
                for (int c = 0; c < 3; ++c) acc[c] += row_sum(yy, x0, x1, c);
            }
            for (int c = 0; c < 3; ++c) out.at(x, y, c) = clamp01(acc[c] / taps);
        }
    return out;
}

RgbImage median_blur(const RgbImage& image, int aperture) {
    if (aperture <= 1) return image;
    const int r = aperture / 2;
    RgbImage out = image;
    std::vector<double> window;
    window.reserve(static_cast<std::size_t>(aperture) * aperture);
    for (int y = 0; y < image.height; ++y)
        for (int x = 0; x < image.width; ++x)
            for (int c = 0; c < 3; ++c) {
                window.clear();
                for (int dy = -r; dy <= r; ++dy)
                    for (int dx = -r; dx <= r; ++dx)
                        window.push_back(image.at(clampi(x + dx, 0, image.width - 1),
                                                  clampi(y + dy, 0, image.height - 1), c));
                auto mid = window.begin() + window.size() / 2;
                std::nth_element(window.begin(), mid, window.end());
                out.at(x, y, c) = *mid;
            }
    return out;
}

double mse(const RgbImage& a, const RgbImage& b) {
    if (a.pixels.size() != b.pixels.size()) throw ValidationError("mse: shape mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.pixels.size(); ++i) {
        const double d = a.pixels[i] - b.pixels[i];
        acc += d * d;
    }
    return acc / static_cast<double>(a.pixels.size());
}

}  // namespace cade::kernels
