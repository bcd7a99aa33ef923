#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "houghtrack/errors.hpp"
#include "houghtrack/inference.hpp"
#include "houghtrack/learning.hpp"
#include "houghtrack/metrics.hpp"

namespace houghtrack {

namespace detail {

inline std::string g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open: " + path);
    return in;
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open for writing: " + path);
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Voter files: one `frame type x y w` row per voting point, type in
// {bd, ln, grad}. A `# width W height H` comment records the image size.
// ---------------------------------------------------------------------------

inline void write_voters(const std::vector<FrameObservation>& obs, const std::string& path,
                         int width = 0, int height = 0) {
    auto out = detail::open_out(path);
    if (width > 0 && height > 0) out << "# width " << width << " height " << height << "\n";
    for (const auto& o : obs) {
        auto dump = [&](const std::vector<VotingPoint>& vs, const char* type) {
            for (const auto& v : vs)
                out << o.index << " " << type << " " << detail::g17(v.x) << " "
                    << detail::g17(v.y) << " " << detail::g17(v.weight) << "\n";
        };
        dump(o.bd_voters, "bd");
        dump(o.ln_voters, "ln");
        dump(o.grad_voters, "grad");
    }
    if (!out) throw io_error("short write: " + path);
}

/// Reads a voter file back into per-frame observations (indices made
/// contiguous from 1; empty frames between populated ones are preserved).
/// Returns the recorded image size through the out-parameters when present.
inline std::vector<FrameObservation> read_voters(const std::string& path, int* width = nullptr,
                                                 int* height = nullptr) {
    auto in = detail::open_in(path);
    std::map<int, FrameObservation> frames;
    std::string line;
    int lineno = 0;
    int max_frame = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.rfind("# width", 0) == 0) {
            std::istringstream hs(line);
            std::string hash, kw, kh;
            int w = 0, h = 0;
            hs >> hash >> kw >> w >> kh >> h;
            if (width) *width = w;
            if (height) *height = h;
            continue;
        }
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        int frame = 0;
        std::string type;
        double x, y, w;
        if (!(ls >> frame)) continue;
        if (!(ls >> type >> x >> y >> w))
            throw io_error(path + ":" + std::to_string(lineno) + ": expected `frame type x y w`");
        if (frame < 1) throw io_error(path + ":" + std::to_string(lineno) + ": frame must be >= 1");
        auto& f = frames[frame];
        f.index = frame;
        if (type == "bd") f.bd_voters.emplace_back(x, y, w);
        else if (type == "ln") f.ln_voters.emplace_back(x, y, w);
        else if (type == "grad") f.grad_voters.emplace_back(x, y, w);
        else throw io_error(path + ":" + std::to_string(lineno) + ": unknown type `" + type + "`");
        max_frame = std::max(max_frame, frame);
    }
    std::vector<FrameObservation> out(max_frame);
    for (int i = 0; i < max_frame; ++i) out[i].index = i + 1;
    for (auto& [idx, f] : frames) out[idx - 1] = std::move(f);
    return out;
}

// ---------------------------------------------------------------------------
// Ground truth: `frame theta_bd r_bd theta_ln r_ln`, angles in degrees.
// Optional polygon file: `frame n x1 y1 ... xn yn` per line.
// ---------------------------------------------------------------------------

inline void write_ground_truth(const std::vector<GroundTruthFrame>& gt, const std::string& path) {
    auto out = detail::open_out(path);
    out << "# frame theta_bd r_bd theta_ln r_ln (degrees, engine-frame r)\n";
    for (const auto& f : gt)
        out << f.frame << " " << detail::g17(rad_to_deg(f.bd_line.theta)) << " "
            << detail::g17(f.bd_line.r) << " " << detail::g17(rad_to_deg(f.ln_line.theta)) << " "
            << detail::g17(f.ln_line.r) << "\n";
    if (!out) throw io_error("short write: " + path);
}

inline std::vector<GroundTruthFrame> read_ground_truth(const std::string& path) {
    auto in = detail::open_in(path);
    std::vector<GroundTruthFrame> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        GroundTruthFrame f;
        double tb, tl;
        if (!(ls >> f.frame)) continue;
        if (!(ls >> tb >> f.bd_line.r >> tl >> f.ln_line.r))
            throw io_error(path + ":" + std::to_string(lineno) +
                           ": expected `frame theta_bd r_bd theta_ln r_ln`");
        f.bd_line.theta = deg_to_rad(tb);
        f.ln_line.theta = deg_to_rad(tl);
        out.push_back(f);
    }
    return out;
}

inline void read_polygons(const std::string& path, std::vector<GroundTruthFrame>& gt) {
    auto in = detail::open_in(path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        int frame = 0, n = 0;
        if (!(ls >> frame)) continue;
        if (!(ls >> n) || n < 3)
            throw io_error(path + ":" + std::to_string(lineno) + ": expected `frame n x y ...`");
        std::vector<std::pair<double, double>> poly(n);
        for (auto& [x, y] : poly)
            if (!(ls >> x >> y))
                throw io_error(path + ":" + std::to_string(lineno) + ": truncated polygon");
        for (auto& f : gt)
            if (f.frame == frame) f.shoulder_polygon = poly;
    }
}

// ---------------------------------------------------------------------------
// Results: one JSON object per line,
// {"frame", "bd": {"theta","r","mode","phi":[..]}, "ln": {...}, "perturbed"}.
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json frame_result_to_json(const FrameResult& r) {
    nlohmann::ordered_json j;
    j["frame"] = r.state.frame;
    j["bd"] = {{"theta", r.state.h_bd.theta},
               {"r", r.state.h_bd.r},
               {"mode", r.mode_bd},
               {"phi", r.state.cands_bd.phi}};
    j["ln"] = {{"theta", r.state.h_ln.theta},
               {"r", r.state.h_ln.r},
               {"mode", r.mode_ln},
               {"phi", r.state.cands_ln.phi}};
    j["perturbed"] = r.perturbed;
    return j;
}

inline void write_results_jsonl(const std::vector<FrameResult>& results, const std::string& path) {
    auto out = detail::open_out(path);
    for (const auto& r : results) out << frame_result_to_json(r).dump() << "\n";
    if (!out) throw io_error("short write: " + path);
}

inline void write_lines_jsonl(const std::vector<TrackedFrameLines>& lines,
                              const std::string& path) {
    auto out = detail::open_out(path);
    int frame = 1;
    for (const auto& l : lines) {
        nlohmann::ordered_json j;
        j["frame"] = frame++;
        j["bd"] = {{"theta", l.bd.theta},
                   {"r", l.bd.r},
                   {"mode", 1},
                   {"phi", std::vector<double>{l.w_bd, 0.0, 0.0}}};
        j["ln"] = {{"theta", l.ln.theta},
                   {"r", l.ln.r},
                   {"mode", 1},
                   {"phi", std::vector<double>{l.w_ln, 0.0, 0.0}}};
        j["perturbed"] = false;
        out << j.dump() << "\n";
    }
    if (!out) throw io_error("short write: " + path);
}

/// Reads predicted lines back from a results file (any tracker's output).
inline std::vector<TrackedFrameLines> read_results_jsonl(const std::string& path) {
    auto in = detail::open_in(path);
    std::vector<TrackedFrameLines> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw io_error(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
        TrackedFrameLines l;
        l.bd = {j.at("bd").at("theta").get<double>(), j.at("bd").at("r").get<double>()};
        l.ln = {j.at("ln").at("theta").get<double>(), j.at("ln").at("r").get<double>()};
        out.push_back(l);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Metric reports. CSV columns follow the benchmark row order.
// ---------------------------------------------------------------------------

inline std::string metric_report_csv_header() {
    return "bd_pxl,ld_pxl,bd_ang,ln_ang,bd_pen,ln_pen,accept_ratio,overlap_score";
}

inline std::string metric_report_csv_row(const MetricReport& r) {
    std::ostringstream s;
    s << detail::g17(r.bd_pxl) << "," << detail::g17(r.ld_pxl) << "," << detail::g17(r.bd_ang)
      << "," << detail::g17(r.ln_ang) << "," << detail::g17(r.bd_pen) << ","
      << detail::g17(r.ln_pen) << "," << detail::g17(r.accept_ratio) << ","
      << detail::g17(r.overlap_score);
    return s.str();
}

inline nlohmann::ordered_json metric_report_to_json(const MetricReport& r) {
    nlohmann::ordered_json j;
    j["bd_pxl"] = r.bd_pxl;
    j["ld_pxl"] = r.ld_pxl;
    j["bd_ang"] = r.bd_ang;
    j["ln_ang"] = r.ln_ang;
    j["bd_pen"] = r.bd_pen;
    j["ln_pen"] = r.ln_pen;
    j["accept_ratio"] = r.accept_ratio;
    j["overlap_score"] = r.overlap_score;
    j["frames"] = r.frames;
    return j;
}

// ---------------------------------------------------------------------------
// SVG overlays: prediction and truth strokes plus the predicted shoulder
// fill; diffable next to the golden files.
// ---------------------------------------------------------------------------

inline void write_overlay_svg(const std::string& path, int width, int height,
                              const TrackedFrameLines& pred,
                              const GroundTruthFrame* truth = nullptr) {
    auto out = detail::open_out(path);
    const auto endpoints = [&](const LineHypothesis& h, double& y0, double& y1) {
        // image-space y of the line at x = 0 and x = width
        y0 = height - line_y_at(h, 0.0);
        y1 = height - line_y_at(h, static_cast<double>(width));
    };
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    if (!line_is_vertical(pred.bd) && !line_is_vertical(pred.ln)) {
        double by0, by1, ly0, ly1;
        endpoints(pred.bd, by0, by1);
        endpoints(pred.ln, ly0, ly1);
        out << "  <polygon points=\"0," << by0 << " " << width << "," << by1 << " " << width << ","
            << ly1 << " 0," << ly0 << "\" fill=\"#3c9a5f\" fill-opacity=\"0.35\"/>\n";
        out << "  <line x1=\"0\" y1=\"" << by0 << "\" x2=\"" << width << "\" y2=\"" << by1
            << "\" stroke=\"#d62728\" stroke-width=\"1.5\"/>\n";
        out << "  <line x1=\"0\" y1=\"" << ly0 << "\" x2=\"" << width << "\" y2=\"" << ly1
            << "\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>\n";
    }
    if (truth) {
        double by0, by1, ly0, ly1;
        endpoints(truth->bd_line, by0, by1);
        endpoints(truth->ln_line, ly0, ly1);
        out << "  <line x1=\"0\" y1=\"" << by0 << "\" x2=\"" << width << "\" y2=\"" << by1
            << "\" stroke=\"#d62728\" stroke-width=\"0.8\" stroke-dasharray=\"3,2\"/>\n";
        out << "  <line x1=\"0\" y1=\"" << ly0 << "\" x2=\"" << width << "\" y2=\"" << ly1
            << "\" stroke=\"#1f77b4\" stroke-width=\"0.8\" stroke-dasharray=\"3,2\"/>\n";
    }
    out << "</svg>\n";
    if (!out) throw io_error("short write: " + path);
}

}  // namespace houghtrack
