#pragma once

#include <cmath>

namespace houghtrack {

constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// A straight line sin(theta)*y + cos(theta)*x - r = 0.
///
/// Coordinate convention used throughout the engine: x grows rightward and y
/// grows upward from the image bottom edge, so the road border (far from the
/// vehicle) carries a larger r than the lane marking. Image-space pixel rows
/// are converted at the I/O boundary (y = height - row).
struct LineHypothesis {
    double theta = 0.0;  // radians, normalized to [0, pi)
    double r = 0.0;      // signed distance in pixels

    LineHypothesis() = default;
    LineHypothesis(double theta_, double r_) : theta(theta_), r(r_) {}
};

/// Canonical form with theta in [0, pi), i.e. sin(theta) >= 0. (theta + pi, -r)
/// names the same line.
inline LineHypothesis normalized(LineHypothesis h) {
    while (h.theta < 0.0) {
        h.theta += kPi;
        h.r = -h.r;
    }
    while (h.theta >= kPi) {
        h.theta -= kPi;
        h.r = -h.r;
    }
    return h;
}

/// Signed residual of point (x, y) against line h.
inline double line_residual(const LineHypothesis& h, double x, double y) {
    return std::sin(h.theta) * y + std::cos(h.theta) * x - h.r;
}

/// y of the line at column x. Caller must reject near-vertical lines first.
inline double line_y_at(const LineHypothesis& h, double x) {
    return (h.r - std::cos(h.theta) * x) / std::sin(h.theta);
}

inline bool line_is_vertical(const LineHypothesis& h, double sin_eps = 1e-6) {
    return std::abs(std::sin(h.theta)) < sin_eps;
}

/// Cell identity comparison for hypotheses coming from one grid. Both values
/// are produced by identical index arithmetic, so exact equality is the right
/// comparison; never compare vote weights for identity.
inline bool same_cell(const LineHypothesis& a, const LineHypothesis& b) {
    return a.theta == b.theta && a.r == b.r;
}

/// Angle distance between two lines, wrap-safe on [0, pi).
inline double line_angle_distance(double theta_a, double theta_b) {
    double d = std::abs(theta_a - theta_b);
    return d > kPi / 2.0 ? kPi - d : d;
}

}  // namespace houghtrack
