#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "houghtrack/errors.hpp"

namespace houghtrack {

/// Row-major grayscale image, intensities in [0, 1]. Row 0 is the image top;
/// pixel (x, row) maps to engine coordinates as y = height - row.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    GrayImage() = default;
    GrayImage(int w, int h, double fill = 0.0)
        : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {}

    double& at(int x, int row) { return data[static_cast<size_t>(row) * width + x]; }
    double at(int x, int row) const { return data[static_cast<size_t>(row) * width + x]; }

    bool empty() const { return width <= 0 || height <= 0; }

    /// Engine-frame y of a pixel row.
    double engine_y(int row) const { return static_cast<double>(height - row); }
};

inline void write_pgm(const GrayImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open for writing: " + path);
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    std::vector<unsigned char> row(img.width);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double v = img.at(x, y);
            if (v < 0.0) v = 0.0;
            if (v > 1.0) v = 1.0;
            row[x] = static_cast<unsigned char>(v * 255.0 + 0.5);
        }
        out.write(reinterpret_cast<const char*>(row.data()), img.width);
    }
    if (!out) throw io_error("short write: " + path);
}

inline GrayImage read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open: " + path);
    std::string magic;
    in >> magic;
    if (magic != "P5") throw io_error("not a binary PGM (P5): " + path);
    auto next_int = [&]() {
        // Skips whitespace and '#' comments between header tokens.
        int c = in.peek();
        while (c == ' ' || c == '\n' || c == '\r' || c == '\t' || c == '#') {
            if (c == '#') {
                std::string line;
                std::getline(in, line);
            } else {
                in.get();
            }
            c = in.peek();
        }
        int v = 0;
        in >> v;
        return v;
    };
    int w = next_int();
    int h = next_int();
    int maxval = next_int();
    if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255)
        throw io_error("bad PGM header: " + path);
    in.get();  // single whitespace before raster
    GrayImage img(w, h);
    std::vector<unsigned char> row(w);
    for (int y = 0; y < h; ++y) {
        in.read(reinterpret_cast<char*>(row.data()), w);
        if (!in) throw io_error("truncated PGM raster: " + path);
        for (int x = 0; x < w; ++x) img.at(x, y) = row[x] / static_cast<double>(maxval);
    }
    return img;
}

}  // namespace houghtrack
