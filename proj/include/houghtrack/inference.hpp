#pragma once

#include <algorithm>
#include <cassert>
#include <string>
#include <vector>

#include "houghtrack/errors.hpp"
#include "houghtrack/potentials.hpp"
#include "houghtrack/voting.hpp"

namespace houghtrack {

/// All voter sets observed in one frame. Gradient voters are shared between
/// the border and lane tracks.
struct FrameObservation {
    int index = 0;  // 1-based, contiguous across a sequence
    std::vector<VotingPoint> bd_voters;
    std::vector<VotingPoint> ln_voters;
    std::vector<VotingPoint> grad_voters;
};

/// Selected hypotheses and candidate sets carried frame to frame. The
/// coupled structure constraint holds on (h_bd, h_ln) after every update.
/// t1_mean_* track the recent mean Type-1 voter weight per track and feed the
/// gradient-vote calibration.
struct TrackState {
    LineHypothesis h_bd;
    LineHypothesis h_ln;
    CandidateSet cands_bd;
    CandidateSet cands_ln;
    int frame = 0;
    double t1_mean_bd = 1.0;
    double t1_mean_ln = 1.0;
};

struct FrameResult {
    TrackState state;
    int mode_bd = 1;  // candidate index chosen for the border, 1..3
    int mode_ln = 1;
    bool perturbed = false;       // structure violation forced bd regeneration
    bool degenerate_bd = false;   // zero evidence; held previous hypothesis
    bool degenerate_ln = false;
    bool window_relaxed = false;  // perturbed window had no feasible cell
    // Vote weight of the border selection before and after back perturbation;
    // meaningful only when perturbed is set.
    double pre_perturb_weight = 0.0;
    double post_perturb_weight = 0.0;
};

namespace detail {

inline double mean_weight(const std::vector<VotingPoint>& voters) {
    if (voters.empty()) return 0.0;
    double s = 0.0;
    for (const auto& v : voters) s += v.weight;
    return s / static_cast<double>(voters.size());
}

// Recent-frames running mean, seeded at the nominal detector weight.
inline void update_t1_mean(double& mean, const std::vector<VotingPoint>& voters) {
    if (voters.empty()) return;
    mean = 0.8 * mean + 0.2 * mean_weight(voters);
}

inline double phi3_scale(const ModelParams& params, double t1_mean,
                         const std::vector<VotingPoint>& grad) {
    if (!params.phi3_calibration) return 1.0;
    const double grad_mean = mean_weight(grad);
    return t1_mean / std::max(grad_mean, 1e-6);
}

inline VoteConfig vote_config(const ModelParams& params) {
    VoteConfig cfg;
    cfg.sigma = params.sigma;
    return cfg;
}

}  // namespace detail

/// Candidate generation for one track: unconstrained Type-1 voting, Type-1
/// voting constrained to the inter-frame window around prev, and gradient
/// voting in the same window. Window tolerances are floored at one grid step
/// so the window is never empty. phi3_scale rescales the gradient vote weight
/// to detector-vote scale.
inline CandidateSet generate_candidates(const LineHypothesis& prev,
                                        const std::vector<VotingPoint>& type1,
                                        const std::vector<VotingPoint>& grad,
                                        const HypothesisGrid& grid, const ModelParams& params,
                                        double lambda_theta, double lambda_r,
                                        double phi3_scale = 1.0) {
    const VoteConfig cfg = detail::vote_config(params);
    const double lt = std::max(lambda_theta, grid.theta_step);
    const double lr = std::max(lambda_r, grid.r_step);
    CandidateSet out;
    const VoteResult c1 = argmax_vote(type1, grid, cfg);
    const VoteResult c2 = argmax_vote_constrained(type1, grid, cfg, prev, lt, lr);
    const VoteResult c3 = argmax_vote_constrained(grad, grid, cfg, prev, lt, lr);
    out.hyp = {c1.line, c2.line, c3.line};
    out.phi = {c1.weight, c2.weight, c3.weight * phi3_scale};
    return out;
}

/// Frame-1 joint initialization: lane by unconstrained voting, border by the
/// best vote over structure-feasible cells given that lane; falls back to an
/// exact search over the grid product when the greedy border set is empty.
inline TrackState init_frame(const FrameObservation& obs, const HypothesisGrid& grid,
                             const ModelParams& params) {
    if (obs.index != 1) throw config_error("init_frame expects frame index 1");
    const VoteConfig cfg = detail::vote_config(params);

    const VoteResult ln = argmax_vote(obs.ln_voters, grid, cfg);
    LineHypothesis h_ln = ln.line;
    double w_ln = ln.weight;
    LineHypothesis h_bd;
    double w_bd = 0.0;
    bool done = false;
    try {
        const VoteResult bd = argmax_vote_where(
            obs.bd_voters, grid, cfg,
            [&](const LineHypothesis& cell) { return structure_feasible(cell, ln.line, params); });
        h_bd = bd.line;
        w_bd = bd.weight;
        done = true;
    } catch (const empty_window_error&) {
        // fall through to the joint search
    }
    if (!done) {
        // Exact joint optimum of vote_bd + vote_ln subject to the structure
        // constraint. Quadratic in grid size; only reached when the greedy
        // lane choice admits no border cell at all.
        const int nt = grid.n_theta();
        const int nr = grid.n_r();
        std::vector<double> vbd(static_cast<size_t>(nt) * nr), vln(vbd.size());
        detail::RowVoter row;
        for (int i = 0; i < nt; ++i) {
            row.project(grid.theta_at(i), obs.bd_voters);
            row.accumulate_all(grid, obs.bd_voters, cfg);
            std::copy(row.acc.begin(), row.acc.end(), vbd.begin() + static_cast<size_t>(i) * nr);
            row.project(grid.theta_at(i), obs.ln_voters);
            row.accumulate_all(grid, obs.ln_voters, cfg);
            std::copy(row.acc.begin(), row.acc.end(), vln.begin() + static_cast<size_t>(i) * nr);
        }
        double best = -1.0;
        for (int li = 0; li < nt; ++li)
            for (int lj = 0; lj < nr; ++lj) {
                const LineHypothesis lcell = grid.cell(li, lj);
                const double lv = vln[static_cast<size_t>(li) * nr + lj];
                for (int bi = 0; bi < nt; ++bi)
                    for (int bj = 0; bj < nr; ++bj) {
                        if (!structure_feasible(grid.cell(bi, bj), lcell, params)) continue;
                        const double s = vbd[static_cast<size_t>(bi) * nr + bj] + lv;
                        if (s > best) {
                            best = s;
                            h_ln = lcell;
                            h_bd = grid.cell(bi, bj);
                            w_ln = lv;
                            w_bd = s - lv;
                        }
                    }
            }
        if (best < 0.0)
            throw infeasible_error("no grid pair satisfies the structure constraint", 1);
    }

    TrackState st;
    st.h_bd = h_bd;
    st.h_ln = h_ln;
    st.cands_bd.hyp = {h_bd, h_bd, h_bd};
    st.cands_bd.phi = {w_bd, w_bd, w_bd};
    st.cands_ln.hyp = {h_ln, h_ln, h_ln};
    st.cands_ln.phi = {w_ln, w_ln, w_ln};
    st.frame = 1;
    detail::update_t1_mean(st.t1_mean_bd, obs.bd_voters);
    detail::update_t1_mean(st.t1_mean_ln, obs.ln_voters);
    return st;
}

/// One incremental update:
///   Step-1 generate both candidate sets,
///   Step-2 pick both modes with the decision trees,
///   Step-3 if the selected pair violates the structure constraint,
///          regenerate all three border candidates inside the feasible set,
///   Step-4 re-run border mode selection on the regenerated set.
/// A track whose three candidates all carry zero vote holds its previous
/// hypothesis and reports mode 2.
inline FrameResult step_frame(const TrackState& state, const FrameObservation& obs,
                              const HypothesisGrid& grid, const ModelParams& params) {
    if (obs.index != state.frame + 1)
        throw config_error("step_frame expects frame " + std::to_string(state.frame + 1) +
                           ", got " + std::to_string(obs.index));
    const VoteConfig cfg = detail::vote_config(params);
    FrameResult res;

    const double scale_bd = detail::phi3_scale(params, state.t1_mean_bd, obs.grad_voters);
    const double scale_ln = detail::phi3_scale(params, state.t1_mean_ln, obs.grad_voters);

    // Step-1
    CandidateSet cands_bd =
        generate_candidates(state.h_bd, obs.bd_voters, obs.grad_voters, grid, params,
                            params.lambda_bd_theta, params.lambda_bd_r, scale_bd);
    CandidateSet cands_ln =
        generate_candidates(state.h_ln, obs.ln_voters, obs.grad_voters, grid, params,
                            params.lambda_ln_theta, params.lambda_ln_r, scale_ln);

    // Step-2, lane first: Step-3 may only move border candidates.
    int mode_ln;
    if (cands_ln.phi[0] == 0.0 && cands_ln.phi[1] == 0.0 && cands_ln.phi[2] == 0.0) {
        cands_ln.hyp = {state.h_ln, state.h_ln, state.h_ln};
        mode_ln = 2;
        res.degenerate_ln = true;
    } else {
        mode_ln = tree_select(cands_ln, params.tree_ln);
    }
    const LineHypothesis h_ln = cands_ln.hypothesis(mode_ln);

    int mode_bd;
    if (cands_bd.phi[0] == 0.0 && cands_bd.phi[1] == 0.0 && cands_bd.phi[2] == 0.0) {
        cands_bd.hyp = {state.h_bd, state.h_bd, state.h_bd};
        mode_bd = 2;
        res.degenerate_bd = true;
    } else {
        mode_bd = tree_select(cands_bd, params.tree_bd);
    }
    LineHypothesis h_bd = cands_bd.hypothesis(mode_bd);

    // Step-3 back perturbation
    if (!structure_feasible(h_bd, h_ln, params)) {
        res.perturbed = true;
        res.pre_perturb_weight = cands_bd.phi_of(mode_bd);
        const auto feasible = [&](const LineHypothesis& cell) {
            return structure_feasible(cell, h_ln, params);
        };
        const double lt = std::max(params.lambda_bd_theta, grid.theta_step);
        const double lr = std::max(params.lambda_bd_r, grid.r_step);
        const auto feasible_in_window = [&](const LineHypothesis& cell) {
            return std::abs(cell.theta - state.h_bd.theta) < lt &&
                   std::abs(cell.r - state.h_bd.r) < lr && feasible(cell);
        };

        VoteResult c1;
        try {
            c1 = argmax_vote_where(obs.bd_voters, grid, cfg, feasible);
        } catch (const empty_window_error&) {
            throw infeasible_error("no structure-feasible border cell for the selected lane",
                                   obs.index);
        }
        VoteResult c2, c3;
        try {
            c2 = argmax_vote_where(obs.bd_voters, grid, cfg, feasible_in_window);
        } catch (const empty_window_error&) {
            c2 = c1;
            res.window_relaxed = true;
        }
        try {
            c3 = argmax_vote_where(obs.grad_voters, grid, cfg, feasible_in_window);
        } catch (const empty_window_error&) {
            c3 = argmax_vote_where(obs.grad_voters, grid, cfg, feasible);
            res.window_relaxed = true;
        }
        cands_bd.hyp = {c1.line, c2.line, c3.line};
        cands_bd.phi = {c1.weight, c2.weight, c3.weight * scale_bd};

        // Step-4
        if (cands_bd.phi[0] == 0.0 && cands_bd.phi[1] == 0.0 && cands_bd.phi[2] == 0.0) {
            mode_bd = 2;  // feasible and closest to smooth
            res.degenerate_bd = true;
        } else {
            mode_bd = tree_select(cands_bd, params.tree_bd);
        }
        h_bd = cands_bd.hypothesis(mode_bd);
        res.post_perturb_weight = cands_bd.phi_of(mode_bd);
    }
    assert(structure_feasible(h_bd, h_ln, params));

    res.state.h_bd = h_bd;
    res.state.h_ln = h_ln;
    res.state.cands_bd = cands_bd;
    res.state.cands_ln = cands_ln;
    res.state.frame = obs.index;
    res.state.t1_mean_bd = state.t1_mean_bd;
    res.state.t1_mean_ln = state.t1_mean_ln;
    detail::update_t1_mean(res.state.t1_mean_bd, obs.bd_voters);
    detail::update_t1_mean(res.state.t1_mean_ln, obs.ln_voters);
    res.mode_bd = mode_bd;
    res.mode_ln = mode_ln;
    return res;
}

/// init_frame then step_frame over a contiguous sequence. Pure fold;
/// identical inputs give identical outputs.
inline std::vector<FrameResult> run_sequence(const std::vector<FrameObservation>& observations,
                                             const HypothesisGrid& grid,
                                             const ModelParams& params) {
    std::vector<FrameResult> results;
    results.reserve(observations.size());
    for (size_t k = 0; k < observations.size(); ++k)
        if (observations[k].index != static_cast<int>(k) + 1)
            throw config_error("frame indices must be contiguous from 1");
    if (observations.empty()) return results;

    FrameResult first;
    first.state = init_frame(observations[0], grid, params);
    first.mode_bd = 1;
    first.mode_ln = 1;
    first.degenerate_bd = first.state.cands_bd.phi[0] == 0.0;
    first.degenerate_ln = first.state.cands_ln.phi[0] == 0.0;
    results.push_back(first);
    for (size_t k = 1; k < observations.size(); ++k)
        results.push_back(step_frame(results.back().state, observations[k], grid, params));
    return results;
}

}  // namespace houghtrack
