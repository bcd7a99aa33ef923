#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "houghtrack/inference.hpp"
#include "houghtrack/voting.hpp"

namespace houghtrack {

/// One frame of plain per-track output, shared by all reference trackers.
struct TrackedFrameLines {
    LineHypothesis bd;
    LineHypothesis ln;
    double w_bd = 0.0;
    double w_ln = 0.0;
};

/// Independent per-frame Hough voting on Type-1 points; no memory, no
/// structure.
inline std::vector<TrackedFrameLines> baseline1(const std::vector<FrameObservation>& obs,
                                                const HypothesisGrid& grid,
                                                const VoteConfig& cfg) {
    std::vector<TrackedFrameLines> out;
    out.reserve(obs.size());
    for (const auto& o : obs) {
        const VoteResult bd = argmax_vote(o.bd_voters, grid, cfg);
        const VoteResult ln = argmax_vote(o.ln_voters, grid, cfg);
        out.push_back({bd.line, ln.line, bd.weight, ln.weight});
    }
    return out;
}

struct InterframeWindows {
    double bd_theta, bd_r, ln_theta, ln_r;
};

/// Per-frame voting constrained to the window around the previous output;
/// frame 1 unconstrained. Tolerances are floored at one grid step.
inline std::vector<TrackedFrameLines> baseline2(const std::vector<FrameObservation>& obs,
                                                const HypothesisGrid& grid, const VoteConfig& cfg,
                                                const InterframeWindows& lam) {
    std::vector<TrackedFrameLines> out;
    out.reserve(obs.size());
    const double lbt = std::max(lam.bd_theta, grid.theta_step);
    const double lbr = std::max(lam.bd_r, grid.r_step);
    const double llt = std::max(lam.ln_theta, grid.theta_step);
    const double llr = std::max(lam.ln_r, grid.r_step);
    for (size_t k = 0; k < obs.size(); ++k) {
        const auto& o = obs[k];
        VoteResult bd, ln;
        if (k == 0) {
            bd = argmax_vote(o.bd_voters, grid, cfg);
            ln = argmax_vote(o.ln_voters, grid, cfg);
        } else {
            bd = argmax_vote_constrained(o.bd_voters, grid, cfg, out.back().bd, lbt, lbr);
            ln = argmax_vote_constrained(o.ln_voters, grid, cfg, out.back().ln, llt, llr);
        }
        out.push_back({bd.line, ln.line, bd.weight, ln.weight});
    }
    return out;
}

/// Baseline 2 plus gradient fallback: a track whose constrained Type-1 vote
/// is zero takes the constrained Type-2 result instead.
inline std::vector<TrackedFrameLines> baseline3(const std::vector<FrameObservation>& obs,
                                                const HypothesisGrid& grid, const VoteConfig& cfg,
                                                const InterframeWindows& lam) {
    std::vector<TrackedFrameLines> out;
    out.reserve(obs.size());
    const double lbt = std::max(lam.bd_theta, grid.theta_step);
    const double lbr = std::max(lam.bd_r, grid.r_step);
    const double llt = std::max(lam.ln_theta, grid.theta_step);
    const double llr = std::max(lam.ln_r, grid.r_step);
    for (size_t k = 0; k < obs.size(); ++k) {
        const auto& o = obs[k];
        VoteResult bd, ln;
        if (k == 0) {
            bd = argmax_vote(o.bd_voters, grid, cfg);
            ln = argmax_vote(o.ln_voters, grid, cfg);
        } else {
            bd = argmax_vote_constrained(o.bd_voters, grid, cfg, out.back().bd, lbt, lbr);
            if (bd.weight == 0.0)
                bd = argmax_vote_constrained(o.grad_voters, grid, cfg, out.back().bd, lbt, lbr);
            ln = argmax_vote_constrained(o.ln_voters, grid, cfg, out.back().ln, llt, llr);
            if (ln.weight == 0.0)
                ln = argmax_vote_constrained(o.grad_voters, grid, cfg, out.back().ln, llt, llr);
        }
        out.push_back({bd.line, ln.line, bd.weight, ln.weight});
    }
    return out;
}

/// Constant-velocity Kalman filter on (theta, r). The theta dimension is
/// scaled by `unit` (grid theta step / r step) so one pair of noise scalars
/// covers both coordinates.
class KalmanFilterCV {
public:
    using Mat4 = std::array<std::array<double, 4>, 4>;
    using Vec4 = std::array<double, 4>;

    KalmanFilterCV(double q, double m, double unit) : q_(q), m_(m), unit_(unit) {}

    void init(double theta, double r) {
        x_ = {theta, r, 0.0, 0.0};
        p_ = {};
        const double s2 = unit_ * unit_;
        p_[0][0] = 10.0 * std::max(m_, 1e-6) * s2;
        p_[1][1] = 10.0 * std::max(m_, 1e-6);
        p_[2][2] = p_[0][0];
        p_[3][3] = p_[1][1];
        initialized_ = true;
    }

    bool initialized() const { return initialized_; }

    void predict() {
        // F = [I, dt*I; 0, I] with dt = 1.
        Vec4 nx = {x_[0] + x_[2], x_[1] + x_[3], x_[2], x_[3]};
        x_ = nx;
        Mat4 f = identity();
        f[0][2] = 1.0;
        f[1][3] = 1.0;
        p_ = add(mul(mul(f, p_), transpose(f)), process_noise());
        symmetrize();
    }

    void update(double theta, double r) {
        // H picks (theta, r); S = H P H^T + R is 2x2.
        const double r_theta = std::max(m_, 1e-12) * unit_ * unit_;
        const double r_r = std::max(m_, 1e-12);
        const double s00 = p_[0][0] + r_theta;
        const double s01 = p_[0][1];
        const double s10 = p_[1][0];
        const double s11 = p_[1][1] + r_r;
        const double det = s00 * s11 - s01 * s10;
        const double i00 = s11 / det, i01 = -s01 / det, i10 = -s10 / det, i11 = s00 / det;
        double k[4][2];
        for (int i = 0; i < 4; ++i) {
            k[i][0] = p_[i][0] * i00 + p_[i][1] * i10;
            k[i][1] = p_[i][0] * i01 + p_[i][1] * i11;
        }
        const double y0 = theta - x_[0];
        const double y1 = r - x_[1];
        for (int i = 0; i < 4; ++i) x_[i] += k[i][0] * y0 + k[i][1] * y1;
        // Joseph form keeps P symmetric PSD under roundoff.
        Mat4 ikh = identity();
        for (int i = 0; i < 4; ++i) {
            ikh[i][0] -= k[i][0];
            ikh[i][1] -= k[i][1];
        }
        Mat4 left = mul(mul(ikh, p_), transpose(ikh));
        Mat4 krkt = {};
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                krkt[i][j] = k[i][0] * r_theta * k[j][0] + k[i][1] * r_r * k[j][1];
        p_ = add(left, krkt);
        symmetrize();
    }

    double theta() const { return x_[0]; }
    double r() const { return x_[1]; }
    const Vec4& state() const { return x_; }
    const Mat4& covariance() const { return p_; }

private:
    static Mat4 identity() {
        Mat4 m = {};
        for (int i = 0; i < 4; ++i) m[i][i] = 1.0;
        return m;
    }
    static Mat4 mul(const Mat4& a, const Mat4& b) {
        Mat4 c = {};
        for (int i = 0; i < 4; ++i)
            for (int k = 0; k < 4; ++k) {
                const double v = a[i][k];
                if (v == 0.0) continue;
                for (int j = 0; j < 4; ++j) c[i][j] += v * b[k][j];
            }
        return c;
    }
    static Mat4 add(const Mat4& a, const Mat4& b) {
        Mat4 c;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) c[i][j] = a[i][j] + b[i][j];
        return c;
    }
    static Mat4 transpose(const Mat4& a) {
        Mat4 c;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) c[i][j] = a[j][i];
        return c;
    }
    Mat4 process_noise() const {
        // Discrete white-noise acceleration, dt = 1.
        const double s2 = unit_ * unit_;
        Mat4 qm = {};
        qm[0][0] = q_ * s2 / 3.0;
        qm[0][2] = q_ * s2 / 2.0;
        qm[2][0] = q_ * s2 / 2.0;
        qm[2][2] = q_ * s2;
        qm[1][1] = q_ / 3.0;
        qm[1][3] = q_ / 2.0;
        qm[3][1] = q_ / 2.0;
        qm[3][3] = q_;
        return qm;
    }
    void symmetrize() {
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) {
                const double v = 0.5 * (p_[i][j] + p_[j][i]);
                p_[i][j] = v;
                p_[j][i] = v;
            }
    }

    double q_, m_, unit_;
    Vec4 x_ = {};
    Mat4 p_ = {};
    bool initialized_ = false;
};

/// Constant-velocity tracking per track; the measurement is the per-frame
/// unconstrained argmax, skipped (pure prediction) on zero-vote frames.
/// Optional sink receives both covariance matrices each frame.
inline std::vector<TrackedFrameLines> kalman_track(
    const std::vector<FrameObservation>& obs, const HypothesisGrid& grid, const VoteConfig& cfg,
    double q, double m,
    const std::function<void(const KalmanFilterCV&, const KalmanFilterCV&)>& sink = nullptr) {
    const double unit = grid.theta_step / grid.r_step;
    KalmanFilterCV bd(q, m, unit), ln(q, m, unit);
    std::vector<TrackedFrameLines> out;
    out.reserve(obs.size());
    for (const auto& o : obs) {
        const VoteResult zb = argmax_vote(o.bd_voters, grid, cfg);
        const VoteResult zl = argmax_vote(o.ln_voters, grid, cfg);
        if (!bd.initialized()) {
            bd.init(zb.line.theta, zb.line.r);
            ln.init(zl.line.theta, zl.line.r);
        } else {
            bd.predict();
            ln.predict();
            if (zb.weight > 0.0) bd.update(zb.line.theta, zb.line.r);
            if (zl.weight > 0.0) ln.update(zl.line.theta, zl.line.r);
        }
        if (sink) sink(bd, ln);
        out.push_back({LineHypothesis(bd.theta(), bd.r()), LineHypothesis(ln.theta(), ln.r()),
                       zb.weight, zl.weight});
    }
    return out;
}

}  // namespace houghtrack
