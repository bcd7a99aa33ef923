#pragma once

#include <cmath>
#include <map>
#include <vector>

#include "houghtrack/errors.hpp"
#include "houghtrack/inference.hpp"
#include "houghtrack/potentials.hpp"

namespace houghtrack {

/// Per-frame annotated truth. The shoulder polygon (engine-frame vertices) is
/// optional; when absent the region between the two lines stands in.
struct GroundTruthFrame {
    int frame = 0;
    LineHypothesis bd_line;
    LineHypothesis ln_line;
    std::vector<std::pair<double, double>> shoulder_polygon;
};

struct InterframeLambdas {
    double lambda_theta = 0.0;
    double lambda_r = 0.0;
};

struct LearnedInterframe {
    InterframeLambdas bd;
    InterframeLambdas ln;
};

namespace detail {

// Standard deviation about zero: deltas of consecutive truth lines are
// physically zero-mean, and this avoids short-sequence bias.
inline double rms(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    double s = 0.0;
    for (double x : xs) s += x * x;
    return std::sqrt(s / static_cast<double>(xs.size()));
}

}  // namespace detail

/// Twice the zero-mean standard deviation of consecutive-frame deltas, per
/// track and per coordinate. Needs at least two frames.
inline LearnedInterframe learn_interframe_lambdas(const std::vector<GroundTruthFrame>& gt) {
    if (gt.size() < 2) throw config_error("interframe learning needs at least 2 frames");
    std::vector<double> dt_bd, dr_bd, dt_ln, dr_ln;
    for (size_t i = 1; i < gt.size(); ++i) {
        dt_bd.push_back(gt[i].bd_line.theta - gt[i - 1].bd_line.theta);
        dr_bd.push_back(gt[i].bd_line.r - gt[i - 1].bd_line.r);
        dt_ln.push_back(gt[i].ln_line.theta - gt[i - 1].ln_line.theta);
        dr_ln.push_back(gt[i].ln_line.r - gt[i - 1].ln_line.r);
    }
    LearnedInterframe out;
    out.bd.lambda_theta = 2.0 * detail::rms(dt_bd);
    out.bd.lambda_r = 2.0 * detail::rms(dr_bd);
    out.ln.lambda_theta = 2.0 * detail::rms(dt_ln);
    out.ln.lambda_r = 2.0 * detail::rms(dr_ln);
    return out;
}

struct StructureLambdas {
    double str1 = 0.0;
    double str2 = 0.0;
    bool str1_learned = false;  // false: band empty, default retained
    bool str2_learned = false;
};

/// 2x the zero-mean deviation of |theta_bd - theta_ln| within each separation
/// band. Bands with no frames keep the defaults already in `params`.
inline StructureLambdas learn_structure_lambdas(const std::vector<GroundTruthFrame>& gt,
                                                const ModelParams& params) {
    std::vector<double> band1, band2;
    for (const auto& f : gt) {
        const double dr = f.bd_line.r - f.ln_line.r;
        const double dth = std::abs(f.bd_line.theta - f.ln_line.theta);
        if (params.d1 <= dr && dr < params.d2) band1.push_back(dth);
        else if (params.d2 <= dr && dr < params.d3) band2.push_back(dth);
    }
    StructureLambdas out;
    out.str1 = params.lambda_str1;
    out.str2 = params.lambda_str2;
    if (!band1.empty()) {
        out.str1 = 2.0 * detail::rms(band1);
        out.str1_learned = true;
    }
    if (!band2.empty()) {
        out.str2 = 2.0 * detail::rms(band2);
        out.str2_learned = true;
    }
    return out;
}

struct DminFit {
    double a = 0.0;
    double b = 0.0;
};

/// Least-squares fit of the lower envelope of border/lane separation against
/// lane position: bucket r_ln (5 px wide), take each bucket's minimum
/// separation and mean r_ln, fit a line through those points. D_min is an
/// envelope, so the bucket minimum is the regression target.
inline DminFit learn_dmin_regression(const std::vector<GroundTruthFrame>& gt,
                                     double bucket_width = 5.0) {
    struct Bucket {
        double min_dr = 0.0;
        double sum_r = 0.0;
        int n = 0;
    };
    std::map<long long, Bucket> buckets;
    for (const auto& f : gt) {
        const double r = f.ln_line.r;
        const double dr = f.bd_line.r - f.ln_line.r;
        const long long key = static_cast<long long>(std::floor(r / bucket_width));
        auto [it, fresh] = buckets.try_emplace(key);
        if (fresh || dr < it->second.min_dr) it->second.min_dr = dr;
        it->second.sum_r += r;
        it->second.n += 1;
    }
    std::vector<double> xs, ys;
    for (const auto& [key, b] : buckets) {
        xs.push_back(b.sum_r / b.n);
        ys.push_back(b.min_dr);
    }
    const size_t n = xs.size();
    if (n < 2) throw config_error("D_min regression needs at least 2 distinct r_ln buckets");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-12 * n * sxx + 1e-300)
        throw config_error("D_min regression design is rank-deficient");
    DminFit fit;
    fit.a = (n * sxy - sx * sy) / denom;
    fit.b = (sy - fit.a * sx) / n;
    return fit;
}

/// Largest vote-weight loss observed across back-perturbation events, plus a
/// 10% margin; the configured default when no event occurred.
inline double learn_lambda_mode(const std::vector<FrameResult>& results, double default_value) {
    bool any = false;
    double max_loss = 0.0;
    for (const auto& r : results) {
        if (!r.perturbed) continue;
        any = true;
        max_loss = std::max(max_loss, r.pre_perturb_weight - r.post_perturb_weight);
    }
    if (!any) return default_value;
    return std::max(max_loss * 1.1, 1e-6);
}

/// Learned tolerances never undercut one grid step, so constrained search
/// windows stay nonempty.
inline void apply_lambda_floors(ModelParams& params, const HypothesisGrid& grid) {
    params.lambda_bd_theta = std::max(params.lambda_bd_theta, grid.theta_step);
    params.lambda_bd_r = std::max(params.lambda_bd_r, grid.r_step);
    params.lambda_ln_theta = std::max(params.lambda_ln_theta, grid.theta_step);
    params.lambda_ln_r = std::max(params.lambda_ln_r, grid.r_step);
    params.lambda_str1 = std::max(params.lambda_str1, grid.theta_step);
    params.lambda_str2 = std::max(params.lambda_str2, grid.theta_step);
}

/// Warn-only check that annotated truth respects the structure constraint.
inline int count_structure_violations(const std::vector<GroundTruthFrame>& gt,
                                      const ModelParams& params) {
    int n = 0;
    for (const auto& f : gt)
        if (!structure_feasible(f.bd_line, f.ln_line, params)) ++n;
    return n;
}

}  // namespace houghtrack
