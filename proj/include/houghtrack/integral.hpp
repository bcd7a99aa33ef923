#pragma once

#include <vector>

#include "houghtrack/errors.hpp"
#include "houghtrack/image.hpp"

namespace houghtrack {

/// Multi-channel cumulative-sum table. Plane c holds (width+1) x (height+1)
/// sums with S(x, row) = sum of channel pixels in [0, x) x [0, row), so any
/// rectangle sum costs four lookups.
struct IntegralImage {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<double> sums;

    double at(int c, int x, int row) const {
        return sums[(static_cast<size_t>(c) * (height + 1) + row) * (width + 1) + x];
    }

    /// Sum over [x0, x1) x [row0, row1) of channel c.
    double rect_sum(int c, int x0, int row0, int x1, int row1) const {
        return at(c, x1, row1) - at(c, x0, row1) - at(c, x1, row0) + at(c, x0, row0);
    }
};

inline IntegralImage build_integral(const std::vector<GrayImage>& channels) {
    if (channels.empty()) throw config_error("build_integral: no channels");
    IntegralImage out;
    out.width = channels[0].width;
    out.height = channels[0].height;
    out.channels = static_cast<int>(channels.size());
    for (const auto& ch : channels)
        if (ch.width != out.width || ch.height != out.height)
            throw config_error("build_integral: channel dimensions differ");
    out.sums.assign(static_cast<size_t>(out.channels) * (out.width + 1) * (out.height + 1), 0.0);
    for (int c = 0; c < out.channels; ++c) {
        const GrayImage& ch = channels[c];
        double* plane = &out.sums[static_cast<size_t>(c) * (out.height + 1) * (out.width + 1)];
        const int stride = out.width + 1;
        for (int row = 0; row < out.height; ++row) {
            double run = 0.0;
            for (int x = 0; x < out.width; ++x) {
                run += ch.at(x, row);
                plane[(row + 1) * stride + (x + 1)] = plane[row * stride + (x + 1)] + run;
            }
        }
    }
    return out;
}

}  // namespace houghtrack
