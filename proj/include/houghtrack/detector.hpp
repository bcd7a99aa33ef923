#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "houghtrack/errors.hpp"
#include "houghtrack/features.hpp"
#include "houghtrack/voting.hpp"

namespace houghtrack {

/// Scanning-window grid. Band rows are image rows [band_row0, band_row1);
/// band_row1 < 0 means the full image height.
struct WindowSpec {
    int win_w = 32;
    int win_h = 16;
    int stride_x = 4;
    int stride_y = 4;
    int band_row0 = 0;
    int band_row1 = -1;

    void validate(const GrayImage& img) const {
        const int b1 = band_row1 < 0 ? img.height : band_row1;
        if (win_w < 4 || win_h < 2 || stride_x < 1 || stride_y < 1)
            throw config_error("window spec: bad window or stride");
        if (band_row0 < 0 || b1 > img.height || b1 - band_row0 < win_h || win_w > img.width)
            throw config_error("window spec: window does not fit inside the detection band");
    }
};

/// Projection + RBF scorer loaded from file: score(f) =
/// sum_k weight_k * exp(-|P f - c_k|^2 / (2 gamma^2)) + bias, fired when
/// score > threshold.
struct DetectorModel {
    int feature_dim = 0;
    int reduced_dim = 0;
    std::vector<double> projection;  // reduced_dim x feature_dim, row-major
    std::vector<std::vector<double>> centers;
    std::vector<double> weights;
    double bias = 0.0;
    double gamma = 1.0;
    double threshold = 0.0;

    bool valid() const {
        if (feature_dim <= 0 || reduced_dim <= 0 || gamma <= 0.0) return false;
        if (projection.size() != static_cast<size_t>(feature_dim) * reduced_dim) return false;
        if (centers.size() != weights.size()) return false;
        for (const auto& c : centers)
            if (c.size() != static_cast<size_t>(reduced_dim)) return false;
        return true;
    }
};

inline std::vector<double> fda_project(const std::vector<double>& f, const DetectorModel& m) {
    if (f.size() != static_cast<size_t>(m.feature_dim))
        throw config_error("fda_project: feature dimension mismatch");
    std::vector<double> out(m.reduced_dim, 0.0);
    for (int k = 0; k < m.reduced_dim; ++k) {
        const double* row = &m.projection[static_cast<size_t>(k) * m.feature_dim];
        double acc = 0.0;
        for (int d = 0; d < m.feature_dim; ++d) acc += row[d] * f[d];
        out[k] = acc;
    }
    return out;
}

inline double rbf_score(const std::vector<double>& v, const DetectorModel& m) {
    if (v.size() != static_cast<size_t>(m.reduced_dim))
        throw config_error("rbf_score: reduced dimension mismatch");
    const double two_gamma_sq = 2.0 * m.gamma * m.gamma;
    double acc = m.bias;
    for (size_t k = 0; k < m.centers.size(); ++k) {
        double d2 = 0.0;
        for (int i = 0; i < m.reduced_dim; ++i) {
            const double d = v[i] - m.centers[k][i];
            d2 += d * d;
        }
        acc += m.weights[k] * std::exp(-d2 / two_gamma_sq);
    }
    return acc;
}

/// Scans the window grid and emits one weight-1 voting point at the center of
/// every window whose score exceeds the threshold. The scorer sees the window
/// rectangle; emitted y is engine-frame.
template <class WindowScore>
inline std::vector<VotingPoint> scan_windows_scored(const GrayImage& img, const WindowSpec& spec,
                                                    WindowScore&& score, double threshold) {
    spec.validate(img);
    const int b1 = spec.band_row1 < 0 ? img.height : spec.band_row1;
    std::vector<VotingPoint> out;
    for (int row = spec.band_row0; row + spec.win_h <= b1; row += spec.stride_y)
        for (int x = 0; x + spec.win_w <= img.width; x += spec.stride_x) {
            const WindowRect win{x, row, spec.win_w, spec.win_h};
            if (score(win) > threshold) {
                const double cx = x + spec.win_w / 2.0;
                const double cy_img = row + spec.win_h / 2.0;
                out.emplace_back(cx, img.height - cy_img, 1.0);
            }
        }
    return out;
}

/// Full detection path: channels -> integral image -> per-window features ->
/// FDA projection -> RBF score.
inline std::vector<VotingPoint> scan_windows(const GrayImage& img, const WindowSpec& spec,
                                             const DetectorModel& model,
                                             const std::vector<FilterKernel>& bank) {
    if (!model.valid()) throw config_error("scan_windows: inconsistent detector model");
    const auto channels = compute_channels(img, bank);
    const IntegralImage integral = build_integral(channels);
    const int bank_size = static_cast<int>(bank.size());
    return scan_windows_scored(
        img, spec,
        [&](const WindowRect& win) {
            return rbf_score(fda_project(extract_features(integral, bank_size, win), model),
                             model);
        },
        model.threshold);
}

namespace detail {

// Gaussian elimination with partial pivoting; A is n x n row-major.
inline std::vector<double> solve_linear(std::vector<double> A, std::vector<double> b) {
    const int n = static_cast<int>(b.size());
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(A[static_cast<size_t>(r) * n + col]) >
                std::abs(A[static_cast<size_t>(piv) * n + col]))
                piv = r;
        if (std::abs(A[static_cast<size_t>(piv) * n + col]) < 1e-300)
            throw config_error("solve_linear: singular system");
        if (piv != col) {
            for (int c = 0; c < n; ++c)
                std::swap(A[static_cast<size_t>(piv) * n + c], A[static_cast<size_t>(col) * n + c]);
            std::swap(b[piv], b[col]);
        }
        const double d = A[static_cast<size_t>(col) * n + col];
        for (int r = col + 1; r < n; ++r) {
            const double f = A[static_cast<size_t>(r) * n + col] / d;
            if (f == 0.0) continue;
            for (int c = col; c < n; ++c)
                A[static_cast<size_t>(r) * n + c] -= f * A[static_cast<size_t>(col) * n + c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double acc = b[r];
        for (int c = r + 1; c < n; ++c) acc -= A[static_cast<size_t>(r) * n + c] * x[c];
        x[r] = acc / A[static_cast<size_t>(r) * n + r];
    }
    return x;
}

}  // namespace detail

/// Closed-form two-class Fisher discriminant: w = (Sw + reg I)^-1 (mu+ - mu-),
/// normalized, oriented so positives project higher. Returns a 1 x d
/// projection row.
inline std::vector<double> fda_train(const std::vector<std::vector<double>>& pos,
                                     const std::vector<std::vector<double>>& neg,
                                     double reg = 1e-4) {
    if (pos.empty() || neg.empty()) throw config_error("fda_train: empty class");
    const int d = static_cast<int>(pos[0].size());
    std::vector<double> mu_p(d, 0.0), mu_n(d, 0.0);
    for (const auto& f : pos)
        for (int i = 0; i < d; ++i) mu_p[i] += f[i];
    for (const auto& f : neg)
        for (int i = 0; i < d; ++i) mu_n[i] += f[i];
    for (int i = 0; i < d; ++i) {
        mu_p[i] /= pos.size();
        mu_n[i] /= neg.size();
    }
    std::vector<double> sw(static_cast<size_t>(d) * d, 0.0);
    auto accumulate = [&](const std::vector<std::vector<double>>& cls,
                          const std::vector<double>& mu) {
        std::vector<double> c(d);
        for (const auto& f : cls) {
            for (int i = 0; i < d; ++i) c[i] = f[i] - mu[i];
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) sw[static_cast<size_t>(i) * d + j] += c[i] * c[j];
        }
    };
    accumulate(pos, mu_p);
    accumulate(neg, mu_n);
    const double n_total = static_cast<double>(pos.size() + neg.size());
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            sw[static_cast<size_t>(i) * d + j] /= n_total;
            if (i == j) sw[static_cast<size_t>(i) * d + j] += reg;
        }
    std::vector<double> diff(d);
    for (int i = 0; i < d; ++i) diff[i] = mu_p[i] - mu_n[i];
    std::vector<double> w = detail::solve_linear(sw, diff);
    double norm = 0.0, sign_check = 0.0;
    for (int i = 0; i < d; ++i) {
        norm += w[i] * w[i];
        sign_check += w[i] * diff[i];
    }
    norm = std::sqrt(norm);
    if (norm < 1e-300) throw config_error("fda_train: degenerate direction");
    const double flip = sign_check < 0.0 ? -1.0 : 1.0;
    for (double& v : w) v = v * flip / norm;
    return w;
}

/// Builds a two-center RBF scorer on top of a trained FDA direction: +1 at
/// the projected positive mean, -1 at the negative mean.
inline DetectorModel train_detector(const std::vector<std::vector<double>>& pos,
                                    const std::vector<std::vector<double>>& neg,
                                    double threshold = 0.2, double reg = 1e-4) {
    DetectorModel m;
    m.feature_dim = static_cast<int>(pos.at(0).size());
    m.reduced_dim = 1;
    m.projection = fda_train(pos, neg, reg);
    auto project1 = [&](const std::vector<double>& f) {
        double acc = 0.0;
        for (int i = 0; i < m.feature_dim; ++i) acc += m.projection[i] * f[i];
        return acc;
    };
    double mp = 0.0, mn = 0.0;
    for (const auto& f : pos) mp += project1(f);
    for (const auto& f : neg) mn += project1(f);
    mp /= pos.size();
    mn /= neg.size();
    double var = 0.0;
    for (const auto& f : pos) var += (project1(f) - mp) * (project1(f) - mp);
    for (const auto& f : neg) var += (project1(f) - mn) * (project1(f) - mn);
    var /= static_cast<double>(pos.size() + neg.size());
    m.centers = {{mp}, {mn}};
    m.weights = {1.0, -1.0};
    m.bias = 0.0;
    m.gamma = std::max(std::sqrt(var), 1e-3);
    m.threshold = threshold;
    return m;
}

/// Versioned text model file: header with dimensions, then decimal rows.
inline void save_detector_model(const DetectorModel& m, const std::string& path) {
    if (!m.valid()) throw config_error("save_detector_model: inconsistent model");
    std::ofstream out(path);
    if (!out) throw io_error("cannot open for writing: " + path);
    char buf[64];
    auto g17 = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    out << "houghtrack-detector 1\n";
    out << m.feature_dim << " " << m.reduced_dim << " " << m.centers.size() << "\n";
    for (int k = 0; k < m.reduced_dim; ++k) {
        for (int d = 0; d < m.feature_dim; ++d)
            out << (d ? " " : "") << g17(m.projection[static_cast<size_t>(k) * m.feature_dim + d]);
        out << "\n";
    }
    for (const auto& c : m.centers) {
        for (int i = 0; i < m.reduced_dim; ++i) out << (i ? " " : "") << g17(c[i]);
        out << "\n";
    }
    for (size_t k = 0; k < m.weights.size(); ++k) out << (k ? " " : "") << g17(m.weights[k]);
    out << "\n" << g17(m.bias) << " " << g17(m.gamma) << " " << g17(m.threshold) << "\n";
    if (!out) throw io_error("short write: " + path);
}

inline DetectorModel load_detector_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open: " + path);
    std::string tag;
    int version = 0;
    in >> tag >> version;
    if (tag != "houghtrack-detector" || version != 1)
        throw io_error("unrecognized detector model header: " + path);
    DetectorModel m;
    size_t n_centers = 0;
    in >> m.feature_dim >> m.reduced_dim >> n_centers;
    if (!in || m.feature_dim <= 0 || m.reduced_dim <= 0)
        throw io_error("bad detector model dimensions: " + path);
    m.projection.resize(static_cast<size_t>(m.feature_dim) * m.reduced_dim);
    for (double& v : m.projection) in >> v;
    m.centers.assign(n_centers, std::vector<double>(m.reduced_dim));
    for (auto& c : m.centers)
        for (double& v : c) in >> v;
    m.weights.resize(n_centers);
    for (double& v : m.weights) in >> v;
    in >> m.bias >> m.gamma >> m.threshold;
    if (!in) throw io_error("truncated detector model: " + path);
    if (!m.valid()) throw io_error("detector model fails validation: " + path);
    return m;
}

}  // namespace houghtrack
