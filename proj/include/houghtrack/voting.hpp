#pragma once

#include <cmath>
#include <vector>

#include "houghtrack/errors.hpp"
#include "houghtrack/image.hpp"
#include "houghtrack/line.hpp"

namespace houghtrack {

/// Weighted 2-D evidence point. Type 1 points come from triggered detector
/// windows (weight 1 each), Type 2 from per-pixel image gradients (weight =
/// gradient magnitude).
struct VotingPoint {
    double x = 0.0;
    double y = 0.0;
    double weight = 0.0;

    VotingPoint() = default;
    VotingPoint(double x_, double y_, double w_) : x(x_), y(y_), weight(w_) {}
};

struct VoteConfig {
    double sigma = 5.0;  // Gaussian bandwidth in pixels
    // Voters farther than prune_sigmas * sigma from a cell contribute less
    // than one ulp of their weight and may be skipped by the accumulator.
    // <= 0 disables pruning; grid searches then match the naive sum
    // bit-for-bit.
    double prune_sigmas = 9.0;
};

/// Discretized (theta, r) search space. Cell (i, j) has
/// theta = theta_min + i * theta_step, r = r_min + j * r_step; both bounds
/// are inclusive.
struct HypothesisGrid {
    double theta_min = 0.0, theta_max = 0.0, theta_step = 1.0;
    double r_min = 0.0, r_max = 0.0, r_step = 1.0;

    int n_theta() const {
        return static_cast<int>(std::floor((theta_max - theta_min) / theta_step + 1e-9)) + 1;
    }
    int n_r() const {
        return static_cast<int>(std::floor((r_max - r_min) / r_step + 1e-9)) + 1;
    }
    long long cell_count() const { return static_cast<long long>(n_theta()) * n_r(); }

    double theta_at(int i) const { return theta_min + i * theta_step; }
    double r_at(int j) const { return r_min + j * r_step; }
    LineHypothesis cell(int i, int j) const { return {theta_at(i), r_at(j)}; }

    bool valid() const {
        return theta_step > 0.0 && r_step > 0.0 && theta_max >= theta_min && r_max >= r_min;
    }
};

/// Near-horizontal band used for side-view borders: theta in [60, 120] deg
/// step 0.5 deg, r in [0, image height] step 1 px.
inline HypothesisGrid default_grid(double image_height) {
    return {deg_to_rad(60.0), deg_to_rad(120.0), deg_to_rad(0.5), 0.0, image_height, 1.0};
}

struct VoteResult {
    LineHypothesis line;
    double weight = 0.0;
    int theta_index = 0;
    int r_index = 0;
};

/// Weighted Hough vote for one hypothesis: sum_i w_i * exp(-res_i^2 / (2 sigma^2)).
/// Summation runs in voter-sequence order; empty voter set gives 0.
inline double vote(const LineHypothesis& h, const std::vector<VotingPoint>& voters,
                   const VoteConfig& cfg) {
    const double two_sigma_sq = 2.0 * cfg.sigma * cfg.sigma;
    double acc = 0.0;
    for (const auto& v : voters) {
        const double res = line_residual(h, v.x, v.y);
        acc += v.weight * std::exp(-(res * res) / two_sigma_sq);
    }
    return acc;
}

namespace detail {

// Accumulates one theta row of the grid. Per-cell sums receive voters in
// sequence order, matching a per-cell naive loop except for skipped
// sub-epsilon terms when pruning is on.
struct RowVoter {
    std::vector<double> acc;   // per r-index vote
    std::vector<double> proj;  // per voter: sin(theta)*y + cos(theta)*x

    void project(double theta, const std::vector<VotingPoint>& voters) {
        const double s = std::sin(theta);
        const double c = std::cos(theta);
        proj.resize(voters.size());
        for (size_t i = 0; i < voters.size(); ++i)
            proj[i] = s * voters[i].y + c * voters[i].x;
    }

    // Full row, scatter form: per voter, only r cells within the prune cut.
    void accumulate_all(const HypothesisGrid& grid, const std::vector<VotingPoint>& voters,
                        const VoteConfig& cfg) {
        const int nr = grid.n_r();
        acc.assign(nr, 0.0);
        const double two_sigma_sq = 2.0 * cfg.sigma * cfg.sigma;
        const double cut = cfg.prune_sigmas > 0.0 ? cfg.prune_sigmas * cfg.sigma : -1.0;
        for (size_t i = 0; i < voters.size(); ++i) {
            const double p = proj[i];
            const double w = voters[i].weight;
            int jlo = 0, jhi = nr - 1;
            if (cut > 0.0) {
                jlo = static_cast<int>(std::ceil((p - cut - grid.r_min) / grid.r_step));
                jhi = static_cast<int>(std::floor((p + cut - grid.r_min) / grid.r_step));
                if (jlo < 0) jlo = 0;
                if (jhi > nr - 1) jhi = nr - 1;
            }
            for (int j = jlo; j <= jhi; ++j) {
                const double t = p - grid.r_at(j);
                acc[j] += w * std::exp(-(t * t) / two_sigma_sq);
            }
        }
    }

    // Selected cells only, gather form; voter order per cell is preserved.
    void accumulate_cells(const HypothesisGrid& grid, const std::vector<VotingPoint>& voters,
                          const VoteConfig& cfg, const std::vector<int>& cells) {
        acc.assign(grid.n_r(), 0.0);
        const double two_sigma_sq = 2.0 * cfg.sigma * cfg.sigma;
        const double cut = cfg.prune_sigmas > 0.0 ? cfg.prune_sigmas * cfg.sigma : -1.0;
        for (int j : cells) {
            const double rj = grid.r_at(j);
            double s = 0.0;
            for (size_t i = 0; i < voters.size(); ++i) {
                const double t = proj[i] - rj;
                if (cut > 0.0 && std::abs(t) > cut) continue;
                s += voters[i].weight * std::exp(-(t * t) / two_sigma_sq);
            }
            acc[j] = s;
        }
    }
};

}  // namespace detail

/// Exhaustive maximum-vote search over the grid. Ties break to the smallest
/// theta index, then the smallest r index. An empty voter set returns weight
/// 0 at the tie-break cell; significance is the caller's concern.
inline VoteResult argmax_vote(const std::vector<VotingPoint>& voters, const HypothesisGrid& grid,
                              const VoteConfig& cfg) {
    if (!grid.valid()) throw config_error("invalid hypothesis grid");
    const int nt = grid.n_theta();
    const int nr = grid.n_r();
    VoteResult best;
    best.theta_index = 0;
    best.r_index = 0;
    best.weight = -1.0;
    detail::RowVoter row;
    for (int i = 0; i < nt; ++i) {
        row.project(grid.theta_at(i), voters);
        row.accumulate_all(grid, voters, cfg);
        for (int j = 0; j < nr; ++j) {
            if (row.acc[j] > best.weight) {
                best.weight = row.acc[j];
                best.theta_index = i;
                best.r_index = j;
            }
        }
    }
    if (best.weight < 0.0) best.weight = 0.0;
    best.line = grid.cell(best.theta_index, best.r_index);
    return best;
}

/// argmax_vote restricted to |theta - center.theta| < lambda_theta and
/// |r - center.r| < lambda_r (both strict). Throws empty_window_error when the
/// window admits no grid cell.
inline VoteResult argmax_vote_constrained(const std::vector<VotingPoint>& voters,
                                          const HypothesisGrid& grid, const VoteConfig& cfg,
                                          const LineHypothesis& center, double lambda_theta,
                                          double lambda_r) {
    if (!grid.valid()) throw config_error("invalid hypothesis grid");
    const int nt = grid.n_theta();
    const int nr = grid.n_r();
    std::vector<int> r_cells;
    for (int j = 0; j < nr; ++j)
        if (std::abs(grid.r_at(j) - center.r) < lambda_r) r_cells.push_back(j);

    VoteResult best;
    best.weight = -1.0;
    detail::RowVoter row;
    bool any_row = false;
    for (int i = 0; i < nt; ++i) {
        if (!(std::abs(grid.theta_at(i) - center.theta) < lambda_theta)) continue;
        any_row = true;
        if (r_cells.empty()) break;
        row.project(grid.theta_at(i), voters);
        row.accumulate_cells(grid, voters, cfg, r_cells);
        for (int j : r_cells) {
            if (row.acc[j] > best.weight) {
                best.weight = row.acc[j];
                best.theta_index = i;
                best.r_index = j;
            }
        }
    }
    if (!any_row || r_cells.empty())
        throw empty_window_error("constrained search window contains no grid cell");
    if (best.weight < 0.0) best.weight = 0.0;
    best.line = grid.cell(best.theta_index, best.r_index);
    return best;
}

/// argmax_vote over the cells where pred(cell) holds. Throws
/// empty_window_error when no cell passes.
template <class CellPred>
inline VoteResult argmax_vote_where(const std::vector<VotingPoint>& voters,
                                    const HypothesisGrid& grid, const VoteConfig& cfg,
                                    CellPred&& pred) {
    if (!grid.valid()) throw config_error("invalid hypothesis grid");
    const int nt = grid.n_theta();
    const int nr = grid.n_r();
    VoteResult best;
    best.weight = -1.0;
    bool any = false;
    detail::RowVoter row;
    std::vector<int> cells;
    for (int i = 0; i < nt; ++i) {
        cells.clear();
        for (int j = 0; j < nr; ++j)
            if (pred(grid.cell(i, j))) cells.push_back(j);
        if (cells.empty()) continue;
        any = true;
        row.project(grid.theta_at(i), voters);
        row.accumulate_cells(grid, voters, cfg, cells);
        for (int j : cells) {
            if (row.acc[j] > best.weight) {
                best.weight = row.acc[j];
                best.theta_index = i;
                best.r_index = j;
            }
        }
    }
    if (!any) throw empty_window_error("no grid cell satisfies the constraint predicate");
    if (best.weight < 0.0) best.weight = 0.0;
    best.line = grid.cell(best.theta_index, best.r_index);
    return best;
}

/// Type 2 voting points: one voter per interior pixel whose vertical
/// central-difference gradient magnitude exceeds the threshold (strict).
/// Emitted y is engine-frame (measured up from the image bottom).
inline std::vector<VotingPoint> gradient_voters(const GrayImage& img, double threshold) {
    std::vector<VotingPoint> out;
    if (img.height < 3) return out;
    for (int row = 1; row < img.height - 1; ++row) {
        const double y = img.engine_y(row);
        for (int x = 0; x < img.width; ++x) {
            const double g = 0.5 * (img.at(x, row + 1) - img.at(x, row - 1));
            const double mag = std::abs(g);
            if (mag > threshold) out.emplace_back(static_cast<double>(x), y, mag);
        }
    }
    return out;
}

/// Default Type 2 threshold: 10% of the maximum gradient magnitude.
inline double default_gradient_threshold(const GrayImage& img) {
    double maxg = 0.0;
    for (int row = 1; row < img.height - 1; ++row)
        for (int x = 0; x < img.width; ++x) {
            const double g = std::abs(0.5 * (img.at(x, row + 1) - img.at(x, row - 1)));
            if (g > maxg) maxg = g;
        }
    return 0.1 * maxg;
}

}  // namespace houghtrack
