// Independent naive implementations the production paths are checked
// against. Everything here evaluates every cell with the plain per-cell sum;
// no pruning, no shared code with the accumulator under test.
#pragma once

#include <cmath>
#include <vector>

#include "houghtrack/inference.hpp"
#include "houghtrack/potentials.hpp"
#include "houghtrack/voting.hpp"

namespace oracle {

using houghtrack::HypothesisGrid;
using houghtrack::LineHypothesis;
using houghtrack::ModelParams;
using houghtrack::VoteConfig;
using houghtrack::VoteResult;
using houghtrack::VotingPoint;

inline double naive_vote(const LineHypothesis& h, const std::vector<VotingPoint>& voters,
                         const VoteConfig& cfg) {
    double acc = 0.0;
    for (const auto& v : voters) {
        const double res = std::sin(h.theta) * v.y + std::cos(h.theta) * v.x - h.r;
        acc += v.weight * std::exp(-(res * res) / (2.0 * cfg.sigma * cfg.sigma));
    }
    return acc;
}

inline VoteResult naive_argmax(const std::vector<VotingPoint>& voters, const HypothesisGrid& grid,
                               const VoteConfig& cfg) {
    VoteResult best;
    best.weight = -1.0;
    for (int i = 0; i < grid.n_theta(); ++i)
        for (int j = 0; j < grid.n_r(); ++j) {
            const double w = naive_vote(grid.cell(i, j), voters, cfg);
            if (w > best.weight) {
                best.weight = w;
                best.theta_index = i;
                best.r_index = j;
            }
        }
    best.line = grid.cell(best.theta_index, best.r_index);
    return best;
}

inline VoteResult naive_argmax_window(const std::vector<VotingPoint>& voters,
                                      const HypothesisGrid& grid, const VoteConfig& cfg,
                                      const LineHypothesis& center, double lt, double lr) {
    VoteResult best;
    best.weight = -1.0;
    for (int i = 0; i < grid.n_theta(); ++i) {
        if (!(std::abs(grid.theta_at(i) - center.theta) < lt)) continue;
        for (int j = 0; j < grid.n_r(); ++j) {
            if (!(std::abs(grid.r_at(j) - center.r) < lr)) continue;
            const double w = naive_vote(grid.cell(i, j), voters, cfg);
            if (w > best.weight) {
                best.weight = w;
                best.theta_index = i;
                best.r_index = j;
            }
        }
    }
    best.line = grid.cell(best.theta_index, best.r_index);
    return best;
}

struct JointInit {
    LineHypothesis bd, ln;
    double total = -1.0;
};

// Exhaustive frame-1 optimum of vote_bd + vote_ln subject to the coupled
// structure constraint.
inline JointInit naive_joint_init(const std::vector<VotingPoint>& bd_voters,
                                  const std::vector<VotingPoint>& ln_voters,
                                  const HypothesisGrid& grid, const VoteConfig& cfg,
                                  const ModelParams& params) {
    JointInit best;
    for (int li = 0; li < grid.n_theta(); ++li)
        for (int lj = 0; lj < grid.n_r(); ++lj) {
            const LineHypothesis lcell = grid.cell(li, lj);
            const double lv = naive_vote(lcell, ln_voters, cfg);
            for (int bi = 0; bi < grid.n_theta(); ++bi)
                for (int bj = 0; bj < grid.n_r(); ++bj) {
                    const LineHypothesis bcell = grid.cell(bi, bj);
                    if (!houghtrack::structure_feasible(bcell, lcell, params)) continue;
                    const double total = naive_vote(bcell, bd_voters, cfg) + lv;
                    if (total > best.total) {
                        best.total = total;
                        best.bd = bcell;
                        best.ln = lcell;
                    }
                }
        }
    return best;
}

}  // namespace oracle
