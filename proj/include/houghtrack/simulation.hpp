#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "houghtrack/errors.hpp"
#include "houghtrack/image.hpp"
#include "houghtrack/inference.hpp"
#include "houghtrack/learning.hpp"
#include "houghtrack/rng.hpp"
#include "houghtrack/voting.hpp"

namespace houghtrack {

enum class Track { Bd, Ln };

inline const char* track_name(Track t) { return t == Track::Bd ? "bd" : "ln"; }

/// Scripted synthetic scene: two drifting lines plus adversarial events.
/// All positions are engine-frame (y up from the image bottom), angles in
/// degrees in the script and this struct.
struct SceneScript {
    int frames = 100;
    int width = 160;
    int height = 120;

    double bd_theta_deg = 90.0;
    double bd_r = 60.0;
    double ln_theta_deg = 90.0;
    double ln_r = 20.0;

    // Common-mode per-frame Gaussian drift (camera bounce): both lines move
    // together, so the truth keeps its separation.
    double drift_theta_deg = 0.2;
    double drift_r = 0.5;

    int density_bd = 40;   // Type-1 voters per frame per track
    int density_ln = 40;
    int grad_density = 120;  // Type-2 voters per frame when not rendering
    double jitter = 1.0;     // voter offset stddev, px

    bool render = false;   // rasterize frames and take Type-2 voters from them
    double noise = 0.02;   // rendering noise stddev

    struct Jump {
        int frame = 0;
        Track track = Track::Bd;
        double dr = 0.0;
    };
    struct Dropout {
        Track track = Track::Bd;
        int from = 0;
        int to = 0;  // inclusive
    };
    struct Outliers {
        int from = 0;
        int to = 0;
        double rate = 0.0;  // outlier count = round(rate * track density)
        double x0 = 0.0, y0 = 0.0, x1 = -1.0, y1 = -1.0;  // region; x1<0 = whole image
    };
    std::vector<Jump> jumps;
    std::vector<Dropout> dropouts;
    std::vector<Outliers> outliers;

    void validate() const {
        if (frames < 1) throw config_error("script: frames must be >= 1");
        if (width < 4 || height < 8) throw config_error("script: image too small");
        if (density_bd < 0 || density_ln < 0 || grad_density < 0)
            throw config_error("script: densities must be >= 0");
        if (jitter < 0.0 || noise < 0.0) throw config_error("script: negative stddev");
        for (const auto& j : jumps)
            if (j.frame < 1 || j.frame > frames) throw config_error("script: jump frame out of range");
        for (const auto& d : dropouts)
            if (d.from < 1 || d.to > frames || d.from > d.to)
                throw config_error("script: dropout range invalid");
        for (const auto& o : outliers) {
            if (o.from < 1 || o.to > frames || o.from > o.to)
                throw config_error("script: outlier range invalid");
            if (o.rate < 0.0 || o.rate > 1.0)
                throw config_error("script: outlier rate outside [0,1]");
        }
    }
};

struct SyntheticSequence {
    std::vector<FrameObservation> observations;
    std::vector<GroundTruthFrame> truth;
    std::vector<GrayImage> images;  // populated only for rendered scripts
};

/// Rasterizes one frame: dark band above the border line, bright 3 px stripe
/// at the lane line, light background, additive Gaussian noise.
inline GrayImage render_frame(const GroundTruthFrame& truth, int width, int height,
                              double noise_sigma, SplitMix64& rng) {
    GrayImage img(width, height);
    for (int row = 0; row < height; ++row) {
        const double y = img.engine_y(row);
        for (int x = 0; x < width; ++x) {
            const double y_bd = line_y_at(truth.bd_line, x);
            const double y_ln = line_y_at(truth.ln_line, x);
            double v = 0.55;
            if (y >= y_bd) v = 0.2;
            if (std::abs(y - y_ln) <= 1.5) v = 0.95;
            if (noise_sigma > 0.0) v += rng.gaussian(0.0, noise_sigma);
            img.at(x, row) = std::clamp(v, 0.0, 1.0);
        }
    }
    return img;
}

namespace detail {

inline bool in_dropout(const SceneScript& s, Track t, int frame) {
    for (const auto& d : s.dropouts)
        if (d.track == t && frame >= d.from && frame <= d.to) return true;
    return false;
}

// Jitter is truncated at 3 sigma so a zero outlier rate keeps every voter
// within 3 sigma of its truth line.
inline void emit_line_voters(std::vector<VotingPoint>& out, const LineHypothesis& line, int count,
                             double jitter, double weight, double width, SplitMix64& rng) {
    for (int k = 0; k < count; ++k) {
        const double x = rng.uniform(0.0, width);
        double y = line_y_at(line, x);
        if (jitter > 0.0)
            y += std::clamp(rng.gaussian(0.0, jitter), -3.0 * jitter, 3.0 * jitter);
        out.emplace_back(x, y, weight);
    }
}

inline void emit_outliers(std::vector<VotingPoint>& out, const SceneScript& s,
                          const SceneScript::Outliers& o, int count, SplitMix64& rng) {
    const double x0 = o.x1 < 0.0 ? 0.0 : o.x0;
    const double y0 = o.x1 < 0.0 ? 0.0 : o.y0;
    const double x1 = o.x1 < 0.0 ? static_cast<double>(s.width) : o.x1;
    const double y1 = o.x1 < 0.0 ? static_cast<double>(s.height) : o.y1;
    for (int k = 0; k < count; ++k)
        out.emplace_back(rng.uniform(x0, x1), rng.uniform(y0, y1), 1.0);
}

}  // namespace detail

/// Deterministic scene generation: all randomness flows from (script, seed)
/// through per-frame derived streams. Type-1 voters are truth-line samples
/// with jitter, thinned by dropouts, plus uniform outliers; Type-2 voters
/// come from rendered frames when the render flag is set, otherwise from the
/// truth lines with broader jitter and gradient-scale weights.
///
/// Emitted truth lines are quantized to the default hypothesis grid lattice
/// (0.5 deg / 1 px), so noiseless voters vote for cells the grid contains;
/// the drift state itself stays continuous.
inline SyntheticSequence generate(const SceneScript& script, uint64_t seed,
                                  bool keep_images = true) {
    script.validate();
    SyntheticSequence seq;
    seq.observations.reserve(script.frames);
    seq.truth.reserve(script.frames);

    double bd_theta = deg_to_rad(script.bd_theta_deg);
    double ln_theta = deg_to_rad(script.ln_theta_deg);
    double bd_r = script.bd_r;
    double ln_r = script.ln_r;
    const double r_margin = 5.0;
    const double theta_lo = deg_to_rad(70.0), theta_hi = deg_to_rad(110.0);

    for (int frame = 1; frame <= script.frames; ++frame) {
        SplitMix64 rng = SplitMix64::derive(seed, static_cast<uint64_t>(frame));

        if (frame > 1) {
            // Common-mode drift, clamped so both lines stay inside the image
            // and the truth separation is preserved.
            double dth = script.drift_theta_deg > 0.0
                             ? rng.gaussian(0.0, deg_to_rad(script.drift_theta_deg))
                             : 0.0;
            double dr = script.drift_r > 0.0 ? rng.gaussian(0.0, script.drift_r) : 0.0;
            dth = std::clamp(dth, theta_lo - std::min(bd_theta, ln_theta),
                             theta_hi - std::max(bd_theta, ln_theta));
            dr = std::clamp(dr, r_margin - std::min(bd_r, ln_r),
                            (script.height - r_margin) - std::max(bd_r, ln_r));
            bd_theta += dth;
            ln_theta += dth;
            bd_r += dr;
            ln_r += dr;
        }
        for (const auto& j : script.jumps) {
            if (j.frame != frame) continue;
            double& r = j.track == Track::Bd ? bd_r : ln_r;
            r = std::clamp(r + j.dr, 2.0, script.height - 2.0);
        }

        // Same index arithmetic as HypothesisGrid::theta_at / r_at, so the
        // snapped values compare equal to grid cells bit for bit.
        const double theta_origin = deg_to_rad(60.0);
        const double theta_step = deg_to_rad(0.5);
        auto snap = [&](double theta, double r) {
            return LineHypothesis(
                theta_origin + std::round((theta - theta_origin) / theta_step) * theta_step,
                std::round(r));
        };
        GroundTruthFrame gt;
        gt.frame = frame;
        gt.bd_line = snap(bd_theta, bd_r);
        gt.ln_line = snap(ln_theta, ln_r);

        FrameObservation obs;
        obs.index = frame;
        if (!detail::in_dropout(script, Track::Bd, frame))
            detail::emit_line_voters(obs.bd_voters, gt.bd_line, script.density_bd, script.jitter,
                                     1.0, script.width, rng);
        if (!detail::in_dropout(script, Track::Ln, frame))
            detail::emit_line_voters(obs.ln_voters, gt.ln_line, script.density_ln, script.jitter,
                                     1.0, script.width, rng);
        for (const auto& o : script.outliers) {
            if (frame < o.from || frame > o.to) continue;
            detail::emit_outliers(obs.bd_voters, script, o,
                                  static_cast<int>(std::lround(o.rate * script.density_bd)), rng);
            detail::emit_outliers(obs.ln_voters, script, o,
                                  static_cast<int>(std::lround(o.rate * script.density_ln)), rng);
        }

        if (script.render) {
            GrayImage img = render_frame(gt, script.width, script.height, script.noise, rng);
            obs.grad_voters = gradient_voters(img, default_gradient_threshold(img));
            if (keep_images) seq.images.push_back(std::move(img));
        } else {
            const double broad = 2.0 * script.jitter + 1.0;
            detail::emit_line_voters(obs.grad_voters, gt.bd_line, script.grad_density / 2, broad,
                                     0.25, script.width, rng);
            detail::emit_line_voters(obs.grad_voters, gt.ln_line, script.grad_density / 2, broad,
                                     0.25, script.width, rng);
        }

        seq.observations.push_back(std::move(obs));
        seq.truth.push_back(std::move(gt));
    }
    return seq;
}

/// Key-value scene script with one `[section]` per event. '#' starts a
/// comment. Angles are degrees; positions engine-frame pixels.
inline SceneScript parse_scene_script(const std::string& text) {
    SceneScript s;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    std::string section;
    auto fail = [&](const std::string& msg) {
        throw config_error("script line " + std::to_string(lineno) + ": " + msg);
    };

    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;

        if (tok.front() == '[') {
            if (tok.back() != ']') fail("malformed section header");
            section = tok.substr(1, tok.size() - 2);
            if (section == "jump") s.jumps.emplace_back();
            else if (section == "dropout") s.dropouts.emplace_back();
            else if (section == "outliers") s.outliers.emplace_back();
            else fail("unknown section `" + section + "`");
            continue;
        }

        std::string eq, value;
        if (!(ls >> eq >> value) || eq != "=") fail("expected `key = value`");
        auto num = [&]() {
            char* end = nullptr;
            const double v = std::strtod(value.c_str(), &end);
            if (end == value.c_str() || *end != '\0') fail("bad number `" + value + "`");
            return v;
        };
        auto track = [&]() {
            if (value == "bd") return Track::Bd;
            if (value == "ln") return Track::Ln;
            fail("track must be `bd` or `ln`");
            return Track::Bd;
        };

        if (section.empty()) {
            if (tok == "frames") s.frames = static_cast<int>(num());
            else if (tok == "width") s.width = static_cast<int>(num());
            else if (tok == "height") s.height = static_cast<int>(num());
            else if (tok == "bd_theta") s.bd_theta_deg = num();
            else if (tok == "bd_r") s.bd_r = num();
            else if (tok == "ln_theta") s.ln_theta_deg = num();
            else if (tok == "ln_r") s.ln_r = num();
            else if (tok == "drift_theta") s.drift_theta_deg = num();
            else if (tok == "drift_r") s.drift_r = num();
            else if (tok == "density_bd") s.density_bd = static_cast<int>(num());
            else if (tok == "density_ln") s.density_ln = static_cast<int>(num());
            else if (tok == "grad_density") s.grad_density = static_cast<int>(num());
            else if (tok == "jitter") s.jitter = num();
            else if (tok == "render") s.render = num() != 0.0;
            else if (tok == "noise") s.noise = num();
            else fail("unknown key `" + tok + "`");
        } else if (section == "jump") {
            auto& j = s.jumps.back();
            if (tok == "frame") j.frame = static_cast<int>(num());
            else if (tok == "track") j.track = track();
            else if (tok == "dr") j.dr = num();
            else fail("unknown jump key `" + tok + "`");
        } else if (section == "dropout") {
            auto& d = s.dropouts.back();
            if (tok == "track") d.track = track();
            else if (tok == "from") d.from = static_cast<int>(num());
            else if (tok == "to") d.to = static_cast<int>(num());
            else fail("unknown dropout key `" + tok + "`");
        } else {
            auto& o = s.outliers.back();
            if (tok == "from") o.from = static_cast<int>(num());
            else if (tok == "to") o.to = static_cast<int>(num());
            else if (tok == "rate") o.rate = num();
            else if (tok == "x0") o.x0 = num();
            else if (tok == "y0") o.y0 = num();
            else if (tok == "x1") o.x1 = num();
            else if (tok == "y1") o.y1 = num();
            else fail("unknown outliers key `" + tok + "`");
        }
    }
    s.validate();
    return s;
}

inline SceneScript load_scene_script(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scene_script(ss.str());
}

}  // namespace houghtrack
