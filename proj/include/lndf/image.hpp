#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace lndf {

struct Image {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> rgb; // row-major, 3 bytes per pixel, top row first

    Image() = default;
    Image(int w, int h) : width(w), height(h), rgb(static_cast<size_t>(w) * h * 3, 0) {}

    void set(int x, int y, uint8_t r, uint8_t g, uint8_t b) {
        size_t i = (static_cast<size_t>(y) * width + x) * 3;
        rgb[i] = r;
        rgb[i + 1] = g;
        rgb[i + 2] = b;
    }
};

/// Writes a binary PPM (P6).
void write_ppm(const std::string& path, const Image& img);

/// Viridis-like colormap lookup, t clamped to [0,1].
std::array<uint8_t, 3> colormap_viridis(double t);

} // namespace lndf
