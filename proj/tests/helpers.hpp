#pragma once

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "cade/image.hpp"
#include "cade/rng.hpp"

namespace testutil {

// Fresh scratch directory per test binary run, removed on destruction.
struct TempDir {
    std::filesystem::path path;

    explicit TempDir(const std::string& tag) {
        path = std::filesystem::temp_directory_path() /
               ("cade_test_" + tag + "_" + std::to_string(::getpid()));
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }

    std::filesystem::path file(const std::string& name) const { return path / name; }
};

inline void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

// Deterministic non-constant test image with smooth structure.
inline cade::RgbImage gradient_image(int w, int h, std::uint64_t seed = 7) {
    cade::RgbImage img = cade::RgbImage::filled(w, h, 0.0);
    cade::Rng rng(seed);
    const double px = rng.uniform(0.1, 0.9);
    const double py = rng.uniform(0.1, 0.9);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double fx = static_cast<double>(x) / (w - 1);
            const double fy = static_cast<double>(y) / (h - 1);
            img.at(x, y, 0) = 0.25 + 0.5 * fx;
            img.at(x, y, 1) = 0.25 + 0.5 * fy;
            img.at(x, y, 2) = 0.5 + 0.4 * std::sin(8.0 * (fx - px) * (fy - py));
        }
    return img;
}

inline cade::BinaryMask disk_mask(int w, int h, double cx, double cy, double r) {
    cade::BinaryMask m = cade::BinaryMask::filled(w, h, false);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double dx = x - cx, dy = y - cy;
            if (dx * dx + dy * dy <= r * r) m.set(x, y, true);
        }
    return m;
}

}  // namespace testutil
