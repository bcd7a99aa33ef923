#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "houghtrack/errors.hpp"
#include "houghtrack/line.hpp"

namespace houghtrack {

/// Vote-weight thresholds of one candidate-selection decision tree.
/// Root: phi1 - phi2 > root_gap; children: phi1 > left_abs / phi2 > right_abs.
struct TreeThresholds {
    double root_gap = 50.0;
    double left_abs = 16.0;
    double right_abs = 10.0;
};

/// Every learned or fixed scalar of the model. Angles are radians, distances
/// pixels. d1 < d2 < d3 must hold.
struct ModelParams {
    double sigma = 5.0;

    // Inter-frame tolerances (strict windows), per track.
    double lambda_bd_theta = deg_to_rad(2.0);
    double lambda_bd_r = 8.0;
    double lambda_ln_theta = deg_to_rad(2.0);
    double lambda_ln_r = 8.0;

    // Penalty for overriding the decision tree; kept above any vote-weight
    // spread so the tree choice is never outbid.
    double lambda_mode = 100.0;

    // Parallelism tolerances for the near and far separation bands.
    double lambda_str1 = deg_to_rad(3.0);
    double lambda_str2 = deg_to_rad(6.0);

    // Separation band edges.
    double d1 = 10.0;
    double d2 = 17.0;
    double d3 = 35.0;

    // Minimum-distance ramp D_min(r_ln) = clamp(a * r_ln + b, 10, 27).
    double dmin_a = 0.1;
    double dmin_b = 5.0;

    TreeThresholds tree_bd;  // only the lane thresholds are published; border
    TreeThresholds tree_ln;  // defaults to the same values

    // Rescale gradient-candidate vote weights to detector-vote scale before
    // the decision tree sees them. 0 disables.
    int phi3_calibration = 1;

    bool valid() const {
        return sigma > 0.0 && d1 < d2 && d2 < d3 && lambda_bd_theta >= 0.0 &&
               lambda_bd_r >= 0.0 && lambda_ln_theta >= 0.0 && lambda_ln_r >= 0.0 &&
               lambda_mode >= 0.0 && lambda_str1 >= 0.0 && lambda_str2 >= 0.0;
    }
};

namespace detail {

inline std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

template <class Fn>
inline void for_each_param(ModelParams& p, Fn&& fn) {
    fn("sigma", p.sigma);
    fn("lambda_bd_theta", p.lambda_bd_theta);
    fn("lambda_bd_r", p.lambda_bd_r);
    fn("lambda_ln_theta", p.lambda_ln_theta);
    fn("lambda_ln_r", p.lambda_ln_r);
    fn("lambda_mode", p.lambda_mode);
    fn("lambda_str1", p.lambda_str1);
    fn("lambda_str2", p.lambda_str2);
    fn("d1", p.d1);
    fn("d2", p.d2);
    fn("d3", p.d3);
    fn("dmin_a", p.dmin_a);
    fn("dmin_b", p.dmin_b);
    fn("tree_bd_root_gap", p.tree_bd.root_gap);
    fn("tree_bd_left_abs", p.tree_bd.left_abs);
    fn("tree_bd_right_abs", p.tree_bd.right_abs);
    fn("tree_ln_root_gap", p.tree_ln.root_gap);
    fn("tree_ln_left_abs", p.tree_ln.left_abs);
    fn("tree_ln_right_abs", p.tree_ln.right_abs);
}

}  // namespace detail

/// One `name = value` line per scalar, decimal with 17 significant digits so
/// values round-trip bit-exactly. '#' starts a comment.
inline std::string params_to_string(const ModelParams& params) {
    ModelParams p = params;
    std::ostringstream out;
    out << "# houghtrack model parameters (angles in radians)\n";
    detail::for_each_param(p, [&](const char* name, double& v) {
        out << name << " = " << detail::format_g17(v) << "\n";
    });
    out << "phi3_calibration = " << p.phi3_calibration << "\n";
    return out.str();
}

inline ModelParams params_from_string(const std::string& text) {
    std::map<std::string, double> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string name, eq, value;
        if (!(ls >> name)) continue;  // blank
        if (!(ls >> eq >> value) || eq != "=")
            throw config_error("params line " + std::to_string(lineno) +
                               ": expected `name = value`");
        char* end = nullptr;
        const double v = std::strtod(value.c_str(), &end);
        if (end == value.c_str() || *end != '\0')
            throw config_error("params line " + std::to_string(lineno) + ": bad number `" +
                               value + "`");
        kv[name] = v;
    }
    ModelParams p;
    detail::for_each_param(p, [&](const char* name, double& v) {
        auto it = kv.find(name);
        if (it != kv.end()) {
            v = it->second;
            kv.erase(it);
        }
    });
    if (auto it = kv.find("phi3_calibration"); it != kv.end()) {
        p.phi3_calibration = it->second != 0.0 ? 1 : 0;
        kv.erase(it);
    }
    if (!kv.empty()) throw config_error("unknown parameter `" + kv.begin()->first + "`");
    if (!p.valid()) throw config_error("parameter file violates model invariants");
    return p;
}

inline void save_params(const ModelParams& p, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open for writing: " + path);
    out << params_to_string(p);
    if (!out) throw io_error("short write: " + path);
}

inline ModelParams load_params(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return params_from_string(ss.str());
}

}  // namespace houghtrack
