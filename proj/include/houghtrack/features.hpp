#pragma once

#include <cmath>
#include <vector>

#include "houghtrack/errors.hpp"
#include "houghtrack/image.hpp"
#include "houghtrack/integral.hpp"
#include "houghtrack/line.hpp"

namespace houghtrack {

constexpr int kHogBins = 9;  // unsigned orientations over [0, pi)

/// Square convolution kernel, side 2*radius+1, row-major taps.
struct FilterKernel {
    int radius = 0;
    std::vector<double> taps;

    double tap(int dx, int dy) const {
        return taps[static_cast<size_t>(dy + radius) * (2 * radius + 1) + (dx + radius)];
    }
};

namespace detail {

inline FilterKernel gaussian_kernel(double sigma) {
    FilterKernel k;
    k.radius = static_cast<int>(std::ceil(3.0 * sigma));
    const int side = 2 * k.radius + 1;
    k.taps.resize(static_cast<size_t>(side) * side);
    double sum = 0.0;
    for (int dy = -k.radius; dy <= k.radius; ++dy)
        for (int dx = -k.radius; dx <= k.radius; ++dx) {
            const double v = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
            k.taps[static_cast<size_t>(dy + k.radius) * side + (dx + k.radius)] = v;
            sum += v;
        }
    for (double& t : k.taps) t /= sum;
    return k;
}

// First derivative of a Gaussian along direction angle (radians).
inline FilterKernel gaussian_derivative_kernel(double sigma, double angle) {
    FilterKernel k;
    k.radius = static_cast<int>(std::ceil(3.0 * sigma));
    const int side = 2 * k.radius + 1;
    k.taps.resize(static_cast<size_t>(side) * side);
    const double ca = std::cos(angle), sa = std::sin(angle);
    double norm = 0.0;
    for (int dy = -k.radius; dy <= k.radius; ++dy)
        for (int dx = -k.radius; dx <= k.radius; ++dx) {
            const double u = ca * dx + sa * dy;
            const double g = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
            const double v = -u / (sigma * sigma) * g;
            k.taps[static_cast<size_t>(dy + k.radius) * side + (dx + k.radius)] = v;
            norm += std::abs(v);
        }
    for (double& t : k.taps) t /= norm;  // zero-mean by symmetry; L1-normalized
    return k;
}

inline FilterKernel log_kernel(double sigma) {
    FilterKernel k;
    k.radius = static_cast<int>(std::ceil(3.0 * sigma));
    const int side = 2 * k.radius + 1;
    k.taps.resize(static_cast<size_t>(side) * side);
    const double s2 = sigma * sigma;
    double mean = 0.0;
    for (int dy = -k.radius; dy <= k.radius; ++dy)
        for (int dx = -k.radius; dx <= k.radius; ++dx) {
            const double r2 = dx * dx + dy * dy;
            const double v = (r2 - 2.0 * s2) / (s2 * s2) * std::exp(-r2 / (2.0 * s2));
            k.taps[static_cast<size_t>(dy + k.radius) * side + (dx + k.radius)] = v;
            mean += v;
        }
    mean /= k.taps.size();
    double norm = 0.0;
    for (double& t : k.taps) {
        t -= mean;
        norm += std::abs(t);
    }
    for (double& t : k.taps) t /= norm;
    return k;
}

}  // namespace detail

/// Texton-style default bank, 17 filters: Gaussians (3 scales), oriented
/// first derivatives (4 orientations x 3 scales), Laplacians (2 scales).
inline std::vector<FilterKernel> make_default_filter_bank() {
    std::vector<FilterKernel> bank;
    for (double s : {1.0, 2.0, 4.0}) bank.push_back(detail::gaussian_kernel(s));
    for (double s : {1.0, 2.0, 3.0})
        for (int o = 0; o < 4; ++o)
            bank.push_back(detail::gaussian_derivative_kernel(s, o * kPi / 4.0));
    for (double s : {1.0, 2.0}) bank.push_back(detail::log_kernel(s));
    return bank;
}

/// Convolution with replicated borders.
inline GrayImage convolve(const GrayImage& img, const FilterKernel& k) {
    GrayImage out(img.width, img.height);
    for (int row = 0; row < img.height; ++row)
        for (int x = 0; x < img.width; ++x) {
            double acc = 0.0;
            for (int dy = -k.radius; dy <= k.radius; ++dy) {
                int sy = row + dy;
                sy = sy < 0 ? 0 : (sy >= img.height ? img.height - 1 : sy);
                for (int dx = -k.radius; dx <= k.radius; ++dx) {
                    int sx = x + dx;
                    sx = sx < 0 ? 0 : (sx >= img.width ? img.width - 1 : sx);
                    acc += k.tap(dx, dy) * img.at(sx, sy);
                }
            }
            out.at(x, row) = acc;
        }
    return out;
}

/// Per-pixel channel maps feeding the integral image: the filter-bank
/// responses followed by kHogBins hard-assigned gradient-magnitude maps
/// (central differences, replicated borders, unsigned orientation).
inline std::vector<GrayImage> compute_channels(const GrayImage& img,
                                               const std::vector<FilterKernel>& bank) {
    std::vector<GrayImage> channels;
    channels.reserve(bank.size() + kHogBins);
    for (const auto& k : bank) channels.push_back(convolve(img, k));
    for (int b = 0; b < kHogBins; ++b) channels.emplace_back(img.width, img.height, 0.0);
    const int base = static_cast<int>(bank.size());
    for (int row = 0; row < img.height; ++row) {
        const int rm = row > 0 ? row - 1 : 0;
        const int rp = row < img.height - 1 ? row + 1 : img.height - 1;
        for (int x = 0; x < img.width; ++x) {
            const int xm = x > 0 ? x - 1 : 0;
            const int xp = x < img.width - 1 ? x + 1 : img.width - 1;
            const double gx = 0.5 * (img.at(xp, row) - img.at(xm, row));
            const double gy = 0.5 * (img.at(x, rp) - img.at(x, rm));
            const double mag = std::sqrt(gx * gx + gy * gy);
            if (mag <= 0.0) continue;
            double ang = std::atan2(gy, gx);
            if (ang < 0.0) ang += kPi;
            if (ang >= kPi) ang -= kPi;
            int bin = static_cast<int>(ang / (kPi / kHogBins));
            if (bin >= kHogBins) bin = kHogBins - 1;
            channels[base + bin].at(x, row) = mag;
        }
    }
    return channels;
}

struct WindowRect {
    int x0 = 0;
    int row0 = 0;
    int w = 0;
    int h = 0;
};

/// Feature vector of one window: mean bank response of the upper and lower
/// half-cells (2 * bank size values), then a 2x4 cell grid of L2-normalized
/// orientation histograms (8 * kHogBins values).
inline std::vector<double> extract_features(const IntegralImage& integral, int bank_size,
                                            const WindowRect& win, double eps = 1e-5) {
    if (win.x0 < 0 || win.row0 < 0 || win.x0 + win.w > integral.width ||
        win.row0 + win.h > integral.height || win.w < 4 || win.h < 2)
        throw config_error("extract_features: window out of bounds");
    std::vector<double> f;
    f.reserve(2 * bank_size + 8 * kHogBins);

    const int mid = win.row0 + win.h / 2;
    for (int c = 0; c < bank_size; ++c) {
        const double upper = integral.rect_sum(c, win.x0, win.row0, win.x0 + win.w, mid);
        f.push_back(upper / (static_cast<double>(win.w) * (mid - win.row0)));
    }
    for (int c = 0; c < bank_size; ++c) {
        const double lower = integral.rect_sum(c, win.x0, mid, win.x0 + win.w, win.row0 + win.h);
        f.push_back(lower / (static_cast<double>(win.w) * (win.row0 + win.h - mid)));
    }

    for (int cy = 0; cy < 2; ++cy)
        for (int cx = 0; cx < 4; ++cx) {
            const int x0 = win.x0 + (cx * win.w) / 4;
            const int x1 = win.x0 + ((cx + 1) * win.w) / 4;
            const int r0 = win.row0 + (cy * win.h) / 2;
            const int r1 = win.row0 + ((cy + 1) * win.h) / 2;
            double cell[kHogBins];
            double norm_sq = 0.0;
            for (int b = 0; b < kHogBins; ++b) {
                cell[b] = integral.rect_sum(bank_size + b, x0, r0, x1, r1);
                norm_sq += cell[b] * cell[b];
            }
            const double inv = 1.0 / std::sqrt(norm_sq + eps * eps);
            for (int b = 0; b < kHogBins; ++b) f.push_back(cell[b] * inv);
        }
    return f;
}

}  // namespace houghtrack
