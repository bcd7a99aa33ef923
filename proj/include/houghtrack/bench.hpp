#pragma once

#include <algorithm>
#include <chrono>
#include <vector>

#include "houghtrack/detector.hpp"
#include "houghtrack/inference.hpp"
#include "houghtrack/simulation.hpp"

namespace houghtrack {

struct BenchReport {
    int frames = 0;
    double infer_p50_ms = 0.0, infer_p90_ms = 0.0, infer_p99_ms = 0.0;
    bool has_detect = false;
    double detect_p50_ms = 0.0, detect_p90_ms = 0.0, detect_p99_ms = 0.0;
};

namespace detail {

inline double percentile(std::vector<double> xs, double p) {
    if (xs.empty()) return 0.0;
    std::sort(xs.begin(), xs.end());
    const double idx = p / 100.0 * (xs.size() - 1);
    const size_t lo = static_cast<size_t>(idx);
    const size_t hi = std::min(lo + 1, xs.size() - 1);
    const double frac = idx - lo;
    return xs[lo] * (1.0 - frac) + xs[hi] * frac;
}

// Quick detector fit from the first rendered frame: positives centered on
// the truth line, negatives sampled away from both lines.
inline DetectorModel fit_frame_detector(const GrayImage& img, const GroundTruthFrame& truth,
                                        bool border, const std::vector<FilterKernel>& bank,
                                        const WindowSpec& spec, SplitMix64& rng) {
    const auto channels = compute_channels(img, bank);
    const IntegralImage integral = build_integral(channels);
    const int bank_size = static_cast<int>(bank.size());
    const LineHypothesis& line = border ? truth.bd_line : truth.ln_line;
    const LineHypothesis& other = border ? truth.ln_line : truth.bd_line;
    std::vector<std::vector<double>> pos, neg;
    for (int k = 0; k < 40; ++k) {
        const double x = rng.uniform(0.0, img.width - spec.win_w);
        const int x0 = static_cast<int>(x);
        const double y_line = line_y_at(line, x0 + spec.win_w / 2.0);
        const int row = static_cast<int>(img.height - y_line - spec.win_h / 2.0);
        if (row < 0 || row + spec.win_h > img.height) continue;
        pos.push_back(extract_features(integral, bank_size, {x0, row, spec.win_w, spec.win_h}));
    }
    for (int k = 0; k < 120 && neg.size() < 80; ++k) {
        const int x0 = static_cast<int>(rng.uniform(0.0, img.width - spec.win_w));
        const int row = static_cast<int>(rng.uniform(0.0, img.height - spec.win_h));
        const double yc = img.height - (row + spec.win_h / 2.0);
        if (std::abs(yc - line_y_at(line, x0 + spec.win_w / 2.0)) < spec.win_h ||
            std::abs(yc - line_y_at(other, x0 + spec.win_w / 2.0)) < spec.win_h)
            continue;
        neg.push_back(extract_features(integral, bank_size, {x0, row, spec.win_w, spec.win_h}));
    }
    return train_detector(pos, neg);
}

}  // namespace detail

/// Times the tracker on a generated scene: once with voters precomputed
/// (inference only), and, for rendered scripts, once including feature
/// extraction and scanning-window detection.
inline BenchReport run_bench(const SceneScript& script, uint64_t seed) {
    const SyntheticSequence seq = generate(script, seed, script.render);
    const HypothesisGrid grid = default_grid(script.height);
    const ModelParams params;
    BenchReport rep;
    rep.frames = script.frames;

    using clock = std::chrono::steady_clock;
    std::vector<double> infer_ms;
    infer_ms.reserve(seq.observations.size());
    {
        TrackState state;
        for (size_t k = 0; k < seq.observations.size(); ++k) {
            const auto t0 = clock::now();
            if (k == 0) {
                state = init_frame(seq.observations[0], grid, params);
            } else {
                state = step_frame(state, seq.observations[k], grid, params).state;
            }
            const auto t1 = clock::now();
            infer_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
        }
    }
    rep.infer_p50_ms = detail::percentile(infer_ms, 50.0);
    rep.infer_p90_ms = detail::percentile(infer_ms, 90.0);
    rep.infer_p99_ms = detail::percentile(infer_ms, 99.0);

    if (script.render && !seq.images.empty()) {
        rep.has_detect = true;
        const auto bank = make_default_filter_bank();
        WindowSpec spec;
        SplitMix64 rng(seed ^ 0x5bd1e995u);
        const DetectorModel bd_model =
            detail::fit_frame_detector(seq.images[0], seq.truth[0], true, bank, spec, rng);
        const DetectorModel ln_model =
            detail::fit_frame_detector(seq.images[0], seq.truth[0], false, bank, spec, rng);
        std::vector<double> det_ms;
        det_ms.reserve(seq.images.size());
        TrackState state;
        for (size_t k = 0; k < seq.images.size(); ++k) {
            const auto t0 = clock::now();
            FrameObservation obs;
            obs.index = static_cast<int>(k) + 1;
            obs.bd_voters = scan_windows(seq.images[k], spec, bd_model, bank);
            obs.ln_voters = scan_windows(seq.images[k], spec, ln_model, bank);
            obs.grad_voters =
                gradient_voters(seq.images[k], default_gradient_threshold(seq.images[k]));
            if (k == 0) {
                state = init_frame(obs, grid, params);
            } else {
                state = step_frame(state, obs, grid, params).state;
            }
            const auto t1 = clock::now();
            det_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
        }
        rep.detect_p50_ms = detail::percentile(det_ms, 50.0);
        rep.detect_p90_ms = detail::percentile(det_ms, 90.0);
        rep.detect_p99_ms = detail::percentile(det_ms, 99.0);
    }
    return rep;
}

}  // namespace houghtrack
