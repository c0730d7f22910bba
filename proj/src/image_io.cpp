#include "cade/image_io.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <memory>
#include <vector>

#include "cade/error.hpp"

namespace cade {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

struct Png8 {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<std::uint8_t> data;
};

Png8 read_png8(const std::filesystem::path& path, bool want_rgb) {
    FilePtr file(std::fopen(path.string().c_str(), "rb"));
    if (!file) throw IoError("cannot open " + path.string());

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("failed to decode PNG " + path.string());
    }
    png_init_io(png, file.get());
    png_read_info(png, info);

    png_set_strip_16(png);
    png_set_strip_alpha(png);
    if (png_get_color_type(png, info) == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (png_get_bit_depth(png, info) < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (want_rgb) {
        png_set_gray_to_rgb(png);
    } else {
        png_set_rgb_to_gray_fixed(png, 1, -1, -1);
    }
    png_read_update_info(png, info);

    Png8 out;
    out.width = static_cast<int>(png_get_image_width(png, info));
    out.height = static_cast<int>(png_get_image_height(png, info));
    out.channels = want_rgb ? 3 : 1;
    const std::size_t rowbytes = png_get_rowbytes(png, info);
    out.data.resize(rowbytes * out.height);
    std::vector<png_bytep> rows(out.height);
    for (int y = 0; y < out.height; ++y) rows[y] = out.data.data() + rowbytes * y;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return out;
}

void write_png8(const std::filesystem::path& path, int width, int height,
                int channels, const std::vector<std::uint8_t>& data) {
    FilePtr file(std::fopen(path.string().c_str(), "wb"));
    if (!file) throw IoError("cannot write " + path.string());

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("failed to encode PNG " + path.string());
    }
    png_init_io(png, file.get());
    png_set_compression_level(png, 1);  // large synthetic sets; speed over ratio
    png_set_IHDR(png, info, width, height, 8,
                 channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<png_bytep> rows(height);
    const std::size_t rowbytes = static_cast<std::size_t>(width) * channels;
    for (int y = 0; y < height; ++y)
        rows[y] = const_cast<png_bytep>(data.data() + rowbytes * y);
    png_write_image(png, rows.data());
    png_write_end(png, info);
    png_destroy_write_struct(&png, &info);
}

inline std::uint8_t to_byte(double v) {
    return static_cast<std::uint8_t>(std::lround(v * 255.0));
}

}  // namespace

RgbImage read_rgb_png(const std::filesystem::path& path) {
    Png8 raw = read_png8(path, true);
    RgbImage img;
    img.width = raw.width;
    img.height = raw.height;
    img.pixels.resize(raw.data.size());
    for (std::size_t i = 0; i < raw.data.size(); ++i) img.pixels[i] = raw.data[i] / 255.0;
    img.validate();
    return img;
}

void write_rgb_png(const RgbImage& image, const std::filesystem::path& path) {
    image.validate();
    std::vector<std::uint8_t> data(image.pixels.size());
    for (std::size_t i = 0; i < image.pixels.size(); ++i) data[i] = to_byte(image.pixels[i]);
    write_png8(path, image.width, image.height, 3, data);
}

BinaryMask read_binary_mask_png(const std::filesystem::path& path) {
    Png8 raw = read_png8(path, false);
    BinaryMask mask;
    mask.width = raw.width;
    mask.height = raw.height;
    mask.bits.resize(raw.data.size());
    for (std::size_t i = 0; i < raw.data.size(); ++i) {
        if (raw.data[i] == 0) {
            mask.bits[i] = 0;
        } else if (raw.data[i] == 255) {
            mask.bits[i] = 1;
        } else {
            throw ValidationError("binary mask " + path.string() + " holds value " +
                                  std::to_string(raw.data[i]) + "; only 0 and 255 are allowed");
        }
    }
    return mask;
}

void write_binary_mask_png(const BinaryMask& mask, const std::filesystem::path& path) {
    std::vector<std::uint8_t> data(mask.bits.size());
    for (std::size_t i = 0; i < mask.bits.size(); ++i) data[i] = mask.bits[i] ? 255 : 0;
    write_png8(path, mask.width, mask.height, 1, data);
}

SoftMask read_soft_mask_png(const std::filesystem::path& path) {
    Png8 raw = read_png8(path, false);
    SoftMask mask;
    mask.width = raw.width;
    mask.height = raw.height;
    mask.values.resize(raw.data.size());
    for (std::size_t i = 0; i < raw.data.size(); ++i) mask.values[i] = raw.data[i] / 255.0;
    return mask;
}

void write_soft_mask_png(const SoftMask& mask, const std::filesystem::path& path) {
    mask.validate();
    std::vector<std::uint8_t> data(mask.values.size());
    for (std::size_t i = 0; i < mask.values.size(); ++i) data[i] = to_byte(mask.values[i]);
    write_png8(path, mask.width, mask.height, 1, data);
}

}  // namespace cade
