#pragma once

#include <cmath>
#include <vector>

#include "houghtrack/baselines.hpp"
#include "houghtrack/errors.hpp"
#include "houghtrack/learning.hpp"
#include "houghtrack/line.hpp"

namespace houghtrack {

struct AcceptThresholds {
    double bd_pen = 10.0;
    double ln_pen = 20.0;
};

struct FrameMetrics {
    double bd_pxl = 0.0, ln_pxl = 0.0;
    double bd_ang = 0.0, ln_ang = 0.0;  // degrees
    double bd_pen = 0.0, ln_pen = 0.0;
    bool good = false;
    double overlap = 0.0;
};

/// Sequence-level report. Field names follow the benchmark labels; ld_pxl is
/// the lane-marking pixel distortion.
struct MetricReport {
    double bd_pxl = 0.0;
    double ld_pxl = 0.0;
    double bd_ang = 0.0;
    double ln_ang = 0.0;
    double bd_pen = 0.0;
    double ln_pen = 0.0;
    double accept_ratio = 0.0;
    double overlap_score = 0.0;
    int frames = 0;
};

namespace detail {

// Mean vertical distance over in-image columns; image height (max penalty)
// when the prediction is vertical or no column keeps both lines in frame.
inline double pixel_distortion(const LineHypothesis& pred, const LineHypothesis& truth, int width,
                               int height, bool& penalized) {
    penalized = false;
    if (line_is_vertical(pred) || line_is_vertical(truth)) {
        penalized = true;
        return static_cast<double>(height);
    }
    double sum = 0.0;
    int n = 0;
    for (int x = 0; x < width; ++x) {
        const double yp = line_y_at(pred, x);
        const double yt = line_y_at(truth, x);
        if (yp < 0.0 || yp > height || yt < 0.0 || yt > height) continue;
        sum += std::abs(yp - yt);
        ++n;
    }
    if (n == 0) {
        penalized = true;
        return static_cast<double>(height);
    }
    return sum / n;
}

// Shoulder membership at a pixel center: between the lane and border lines.
inline bool in_shoulder(const LineHypothesis& bd, const LineHypothesis& ln, double x, double y) {
    if (line_is_vertical(bd) || line_is_vertical(ln)) return false;
    const double yb = line_y_at(bd, x);
    const double yl = line_y_at(ln, x);
    return y >= yl && y <= yb;
}

inline bool in_polygon(const std::vector<std::pair<double, double>>& poly, double x, double y) {
    bool inside = false;
    const size_t n = poly.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        const auto [xi, yi] = poly[i];
        const auto [xj, yj] = poly[j];
        if ((yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi) inside = !inside;
    }
    return inside;
}

}  // namespace detail

/// Per-frame metrics for one prediction/truth pair. Overlap rasterizes both
/// shoulder regions at 1 px resolution over pixel centers; the truth region
/// comes from the annotated polygon when one is present.
inline FrameMetrics evaluate_frame(const TrackedFrameLines& pred, const GroundTruthFrame& truth,
                                   int width, int height, const AcceptThresholds& thr) {
    FrameMetrics fm;
    bool pen_bd = false, pen_ln = false;
    fm.bd_pxl = detail::pixel_distortion(pred.bd, truth.bd_line, width, height, pen_bd);
    fm.ln_pxl = detail::pixel_distortion(pred.ln, truth.ln_line, width, height, pen_ln);
    fm.bd_ang = rad_to_deg(line_angle_distance(pred.bd.theta, truth.bd_line.theta));
    fm.ln_ang = rad_to_deg(line_angle_distance(pred.ln.theta, truth.ln_line.theta));
    fm.bd_pen = std::max(1.0, fm.bd_ang) * fm.bd_pxl;
    fm.ln_pen = std::max(1.0, fm.ln_ang) * fm.ln_pxl;
    fm.good = !pen_bd && !pen_ln && fm.bd_pen <= thr.bd_pen && fm.ln_pen <= thr.ln_pen;

    long long inter = 0, uni = 0;
    for (int row = 0; row < height; ++row) {
        const double y = height - (row + 0.5);
        for (int x = 0; x < width; ++x) {
            const double xc = x + 0.5;
            const bool p = detail::in_shoulder(pred.bd, pred.ln, xc, y);
            const bool t = truth.shoulder_polygon.empty()
                               ? detail::in_shoulder(truth.bd_line, truth.ln_line, xc, y)
                               : detail::in_polygon(truth.shoulder_polygon, xc, y);
            inter += (p && t);
            uni += (p || t);
        }
    }
    fm.overlap = uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
    return fm;
}

inline std::vector<FrameMetrics> evaluate_frames(const std::vector<TrackedFrameLines>& pred,
                                                 const std::vector<GroundTruthFrame>& truth,
                                                 int width, int height,
                                                 const AcceptThresholds& thr) {
    if (pred.size() != truth.size())
        throw config_error("evaluate: prediction and truth lengths differ");
    if (pred.empty()) throw config_error("evaluate: empty sequence");
    std::vector<FrameMetrics> out;
    out.reserve(pred.size());
    for (size_t i = 0; i < pred.size(); ++i)
        out.push_back(evaluate_frame(pred[i], truth[i], width, height, thr));
    return out;
}

/// Full benchmark row: distortions averaged per frame then across frames,
/// penalties applied per frame before averaging.
inline MetricReport evaluate(const std::vector<TrackedFrameLines>& pred,
                             const std::vector<GroundTruthFrame>& truth, int width, int height,
                             const AcceptThresholds& thr = {}) {
    const auto frames = evaluate_frames(pred, truth, width, height, thr);
    MetricReport rep;
    rep.frames = static_cast<int>(frames.size());
    int good = 0;
    for (const auto& f : frames) {
        rep.bd_pxl += f.bd_pxl;
        rep.ld_pxl += f.ln_pxl;
        rep.bd_ang += f.bd_ang;
        rep.ln_ang += f.ln_ang;
        rep.bd_pen += f.bd_pen;
        rep.ln_pen += f.ln_pen;
        rep.overlap_score += f.overlap;
        good += f.good;
    }
    const double n = static_cast<double>(frames.size());
    rep.bd_pxl /= n;
    rep.ld_pxl /= n;
    rep.bd_ang /= n;
    rep.ln_ang /= n;
    rep.bd_pen /= n;
    rep.ln_pen /= n;
    rep.overlap_score /= n;
    rep.accept_ratio = good / n;
    return rep;
}

}  // namespace houghtrack
