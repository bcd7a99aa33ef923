#include <gtest/gtest.h>

#include <cmath>

#include "houghtrack/inference.hpp"
#include "houghtrack/simulation.hpp"
#include "oracle.hpp"

using namespace houghtrack;

namespace {

// theta 80..100 deg step 1, r 0..80 step 1: small enough for the quadratic
// joint oracle.
HypothesisGrid small_grid() {
    HypothesisGrid g;
    g.theta_min = deg_to_rad(80.0);
    g.theta_max = deg_to_rad(100.0);
    g.theta_step = deg_to_rad(1.0);
    g.r_min = 0.0;
    g.r_max = 80.0;
    g.r_step = 1.0;
    return g;
}

std::vector<VotingPoint> line_voters(double y, int n, double width = 160.0, double w = 1.0) {
    std::vector<VotingPoint> out;
    for (int i = 0; i < n; ++i)
        out.emplace_back(width * (i + 0.5) / n, y, w);
    return out;
}

FrameObservation make_obs(int index, std::vector<VotingPoint> bd, std::vector<VotingPoint> ln,
                          std::vector<VotingPoint> grad = {}) {
    FrameObservation o;
    o.index = index;
    o.bd_voters = std::move(bd);
    o.ln_voters = std::move(ln);
    o.grad_voters = std::move(grad);
    return o;
}

}  // namespace

TEST(InitFrame, RecoversWellSeparatedLines) {
    const HypothesisGrid grid = small_grid();
    const ModelParams params;
    const auto obs = make_obs(1, line_voters(60.0, 8), line_voters(20.0, 8));
    const TrackState st = init_frame(obs, grid, params);
    EXPECT_NEAR(st.h_ln.theta, kPi / 2, 1e-9);
    EXPECT_DOUBLE_EQ(st.h_ln.r, 20.0);
    EXPECT_NEAR(st.h_bd.theta, kPi / 2, 1e-9);
    EXPECT_DOUBLE_EQ(st.h_bd.r, 60.0);
    EXPECT_TRUE(structure_feasible(st.h_bd, st.h_ln, params));

    const auto joint = oracle::naive_joint_init(obs.bd_voters, obs.ln_voters, grid,
                                                VoteConfig{params.sigma, 9.0}, params);
    EXPECT_TRUE(same_cell(st.h_bd, joint.bd));
    EXPECT_TRUE(same_cell(st.h_ln, joint.ln));
}

TEST(InitFrame, BorderSnapsToFeasibleCellAgreeingWithJointOracle) {
    const HypothesisGrid grid = small_grid();
    const ModelParams params;  // D_min(20) = 10
    // border evidence only 5 px above the lane: infeasible as observed
    const auto obs = make_obs(1, line_voters(25.0, 5), line_voters(20.0, 40));
    const TrackState st = init_frame(obs, grid, params);
    EXPECT_DOUBLE_EQ(st.h_ln.r, 20.0);
    EXPECT_TRUE(structure_feasible(st.h_bd, st.h_ln, params));
    EXPECT_GE(st.h_bd.r - st.h_ln.r, 10.0);  // pushed out to D_min
    const auto joint = oracle::naive_joint_init(obs.bd_voters, obs.ln_voters, grid,
                                                VoteConfig{params.sigma, 9.0}, params);
    EXPECT_TRUE(same_cell(st.h_bd, joint.bd));
    EXPECT_TRUE(same_cell(st.h_ln, joint.ln));
}

TEST(InitFrame, EmptyVotersGiveDegenerateTieBreakPair) {
    const HypothesisGrid grid = small_grid();
    const ModelParams params;
    const auto results = run_sequence({make_obs(1, {}, {})}, grid, params);
    ASSERT_EQ(results.size(), 1u);
    EXPECT_TRUE(results[0].degenerate_bd);
    EXPECT_TRUE(results[0].degenerate_ln);
    const TrackState& st = results[0].state;
    EXPECT_DOUBLE_EQ(st.h_ln.theta, grid.theta_min);
    EXPECT_DOUBLE_EQ(st.h_ln.r, 0.0);
    EXPECT_TRUE(structure_feasible(st.h_bd, st.h_ln, params));
    EXPECT_DOUBLE_EQ(st.h_bd.r, 10.0);  // first feasible r for the tie-break lane
}

TEST(InitFrame, JointlyInfeasibleGridRaises) {
    HypothesisGrid g = small_grid();
    g.r_max = 5.0;  // max separation below d1
    const ModelParams params;
    EXPECT_THROW(init_frame(make_obs(1, line_voters(4.0, 5), line_voters(1.0, 5)), g, params),
                 infeasible_error);
}

TEST(GenerateCandidates, ContinuationMakesC1EqualC2) {
    const HypothesisGrid grid = small_grid();
    const ModelParams params;
    const LineHypothesis prev{kPi / 2, 40.0};
    const auto cands = generate_candidates(prev, line_voters(40.0, 20), {}, grid, params,
                                           params.lambda_bd_theta, params.lambda_bd_r);
    EXPECT_TRUE(same_cell(cands.hypothesis(1), cands.hypothesis(2)));
    EXPECT_TRUE(same_cell(cands.hypothesis(1), prev));
    EXPECT_NEAR(cands.phi_of(1), cands.phi_of(2), 1e-9);
}

TEST(GenerateCandidates, JumpSplitsC1FromC2) {
    const HypothesisGrid grid = small_grid();
    const ModelParams params;  // lambda_r = 8
    const LineHypothesis prev{kPi / 2, 40.0};
    const auto cands = generate_candidates(prev, line_voters(70.0, 20), {}, grid, params,
                                           params.lambda_bd_theta, params.lambda_bd_r);
    EXPECT_DOUBLE_EQ(cands.hypothesis(1).r, 70.0);  // discovered the jump
    EXPECT_GT(cands.hypothesis(2).r, 32.0);         // pinned inside the window
    EXPECT_LT(cands.hypothesis(2).r, 48.0);
    EXPECT_GT(cands.phi_of(1), cands.phi_of(2));
}

TEST(GenerateCandidates, GradientCandidateCoversDetectorSilence) {
    const HypothesisGrid grid = small_grid();
    const ModelParams params;
    const LineHypothesis prev{kPi / 2, 40.0};
    const auto cands = generate_candidates(prev, {}, line_voters(40.0, 30, 160.0, 0.5), grid,
                                           params, params.lambda_bd_theta, params.lambda_bd_r);
    EXPECT_DOUBLE_EQ(cands.phi_of(1), 0.0);
    EXPECT_DOUBLE_EQ(cands.phi_of(2), 0.0);
    EXPECT_TRUE(same_cell(cands.hypothesis(3), prev));
    EXPECT_GT(cands.phi_of(3), 0.0);
}

TEST(StepFrame, SteadySceneHoldsInitLines) {
    const HypothesisGrid grid = small_grid();
    const ModelParams params;
    std::vector<FrameObservation> obs;
    for (int f = 1; f <= 10; ++f)
        obs.push_back(make_obs(f, line_voters(60.0, 40), line_voters(20.0, 40)));
    const auto results = run_sequence(obs, grid, params);
    for (const auto& r : results) {
        EXPECT_DOUBLE_EQ(r.state.h_bd.r, 60.0);
        EXPECT_DOUBLE_EQ(r.state.h_ln.r, 20.0);
        EXPECT_FALSE(r.perturbed);
    }
    for (size_t k = 1; k < results.size(); ++k) {
        EXPECT_EQ(results[k].mode_bd, 2);
        EXPECT_EQ(results[k].mode_ln, 2);
    }
}

TEST(StepFrame, DropoutFallsBackToGradientMode) {
    const HypothesisGrid grid = small_grid();
    const ModelParams params;
    std::vector<FrameObservation> obs;
    for (int f = 1; f <= 3; ++f)
        obs.push_back(make_obs(f, line_voters(60.0, 40), line_voters(20.0, 40),
                               line_voters(60.0, 40, 160.0, 0.25)));
    for (int f = 4; f <= 13; ++f)  // border detector dropout, edge persists
        obs.push_back(make_obs(f, {}, line_voters(20.0, 40),
                               line_voters(60.0, 40, 160.0, 0.25)));
    const auto results = run_sequence(obs, grid, params);
    for (size_t k = 3; k < results.size(); ++k) {
        EXPECT_EQ(results[k].mode_bd, 3) << "frame " << k + 1;
        EXPECT_DOUBLE_EQ(results[k].state.h_bd.r, 60.0);
        EXPECT_FALSE(results[k].degenerate_bd);
    }
}

TEST(StepFrame, SilentFrameHoldsPreviousHypothesis) {
    const HypothesisGrid grid = small_grid();
    const ModelParams params;
    std::vector<FrameObservation> obs;
    obs.push_back(make_obs(1, line_voters(60.0, 40), line_voters(20.0, 40)));
    obs.push_back(make_obs(2, {}, line_voters(20.0, 40)));  // no bd evidence at all
    const auto results = run_sequence(obs, grid, params);
    EXPECT_TRUE(results[1].degenerate_bd);
    EXPECT_EQ(results[1].mode_bd, 2);
    EXPECT_TRUE(same_cell(results[1].state.h_bd, results[0].state.h_bd));
}

TEST(StepFrame, StructureViolationTriggersBackPerturbation) {
    // Single-theta grid so the r profile alone decides every search.
    HypothesisGrid grid = small_grid();
    grid.theta_min = grid.theta_max = kPi / 2;
    const ModelParams params;
    std::vector<FrameObservation> obs;
    for (int f = 1; f <= 4; ++f)
        obs.push_back(make_obs(f, line_voters(60.0, 100), line_voters(20.0, 100)));
    // border collapses onto the lane: dr = 5 < d1
    obs.push_back(make_obs(5, line_voters(25.0, 100), line_voters(20.0, 100)));
    const auto results = run_sequence(obs, grid, params);
    const FrameResult& r = results[4];
    EXPECT_TRUE(r.perturbed);
    EXPECT_TRUE(structure_feasible(r.state.h_bd, r.state.h_ln, params));
    EXPECT_EQ(r.mode_bd, 1);                 // confident feasible argmax
    EXPECT_DOUBLE_EQ(r.state.h_bd.r, 30.0);  // dr = 10 = D_min(20)
    EXPECT_NEAR(r.pre_perturb_weight, 100.0, 1.0);
    EXPECT_NEAR(r.post_perturb_weight, 100.0 * std::exp(-0.5), 1.0);
    EXPECT_GT(r.pre_perturb_weight, r.post_perturb_weight);
}

TEST(StepFrame, PerturbationLeavesFeasibleFramesUntouched) {
    const HypothesisGrid grid = small_grid();
    const ModelParams params;
    const auto obs1 = make_obs(1, line_voters(60.0, 30), line_voters(20.0, 30));
    const auto obs2 = make_obs(2, line_voters(61.0, 30), line_voters(21.0, 30));
    const TrackState st = init_frame(obs1, grid, params);
    const FrameResult r = step_frame(st, obs2, grid, params);
    ASSERT_FALSE(r.perturbed);
    // engine candidates equal a fresh Step-1 generation: no hidden adjustment
    const double scale = 1.0;  // no gradient voters
    const auto fresh_bd = generate_candidates(st.h_bd, obs2.bd_voters, obs2.grad_voters, grid,
                                              params, params.lambda_bd_theta, params.lambda_bd_r,
                                              scale);
    for (int m = 1; m <= 3; ++m) {
        EXPECT_TRUE(same_cell(r.state.cands_bd.hypothesis(m), fresh_bd.hypothesis(m)));
        EXPECT_DOUBLE_EQ(r.state.cands_bd.phi_of(m), fresh_bd.phi_of(m));
    }
}

TEST(StepFrame, InfeasibleLaneJumpRaisesWithFrameIndex) {
    HypothesisGrid grid = small_grid();
    grid.r_max = 40.0;
    const ModelParams params;
    std::vector<FrameObservation> obs;
    obs.push_back(make_obs(1, line_voters(38.0, 40), line_voters(20.0, 40)));
    obs.push_back(make_obs(2, line_voters(38.0, 40), line_voters(35.0, 100)));
    try {
        run_sequence(obs, grid, params);
        FAIL() << "expected infeasible_error";
    } catch (const infeasible_error& e) {
        EXPECT_EQ(e.frame(), 2);
    }
}

TEST(StepFrame, GradientWeightCalibrationMatchesDetectorScale) {
    const HypothesisGrid grid = small_grid();
    ModelParams params;
    const auto obs1 = make_obs(1, line_voters(60.0, 40), line_voters(20.0, 40));
    // gradient voters carry weight 0.25; calibration rescales phi3 to the
    // equivalent detector-vote count
    const auto obs2 = make_obs(2, line_voters(60.0, 40), line_voters(20.0, 40),
                               line_voters(60.0, 40, 160.0, 0.25));
    const TrackState st = init_frame(obs1, grid, params);
    const FrameResult r = step_frame(st, obs2, grid, params);
    EXPECT_NEAR(r.state.cands_bd.phi_of(3), 40.0, 1e-6);

    params.phi3_calibration = 0;
    const TrackState st2 = init_frame(obs1, grid, params);
    const FrameResult r2 = step_frame(st2, obs2, grid, params);
    EXPECT_NEAR(r2.state.cands_bd.phi_of(3), 10.0, 1e-6);
}

TEST(RunSequence, SingleFrameEqualsInit) {
    const HypothesisGrid grid = small_grid();
    const ModelParams params;
    const auto obs = make_obs(1, line_voters(60.0, 10), line_voters(20.0, 10));
    const auto results = run_sequence({obs}, grid, params);
    const TrackState st = init_frame(obs, grid, params);
    ASSERT_EQ(results.size(), 1u);
    EXPECT_TRUE(same_cell(results[0].state.h_bd, st.h_bd));
    EXPECT_TRUE(same_cell(results[0].state.h_ln, st.h_ln));
}

TEST(RunSequence, DeterministicAndPrefixConsistent) {
    SceneScript script;
    script.frames = 30;
    script.density_bd = 30;
    script.density_ln = 30;
    script.jumps.push_back({15, Track::Bd, 28.0});
    const SyntheticSequence seq = generate(script, 77);
    const HypothesisGrid grid = default_grid(script.height);
    const ModelParams params;

    const auto a = run_sequence(seq.observations, grid, params);
    const auto b = run_sequence(seq.observations, grid, params);
    ASSERT_EQ(a.size(), b.size());
    for (size_t k = 0; k < a.size(); ++k) {
        EXPECT_EQ(a[k].state.h_bd.theta, b[k].state.h_bd.theta);
        EXPECT_EQ(a[k].state.h_bd.r, b[k].state.h_bd.r);
        EXPECT_EQ(a[k].state.h_ln.r, b[k].state.h_ln.r);
        EXPECT_EQ(a[k].mode_bd, b[k].mode_bd);
        EXPECT_EQ(a[k].mode_ln, b[k].mode_ln);
    }

    std::vector<FrameObservation> prefix(seq.observations.begin(),
                                         seq.observations.begin() + 20);
    const auto p = run_sequence(prefix, grid, params);
    for (size_t k = 0; k < p.size(); ++k) {
        EXPECT_EQ(a[k].state.h_bd.r, p[k].state.h_bd.r);
        EXPECT_EQ(a[k].state.h_ln.r, p[k].state.h_ln.r);
    }
}

TEST(RunSequence, EngineInvariantsOnAdversarialScene) {
    SceneScript script;
    script.frames = 80;
    script.density_bd = 40;
    script.density_ln = 40;
    script.dropouts.push_back({Track::Bd, 20, 35});
    script.jumps.push_back({50, Track::Bd, -31.0});
    SceneScript::Outliers out;
    out.from = 1;
    out.to = 80;
    out.rate = 0.15;
    script.outliers.push_back(out);
    const SyntheticSequence seq = generate(script, 5);
    const HypothesisGrid grid = default_grid(script.height);
    const ModelParams params;
    const auto results = run_sequence(seq.observations, grid, params);

    const double lt_bd = std::max(params.lambda_bd_theta, grid.theta_step);
    const double lr_bd = std::max(params.lambda_bd_r, grid.r_step);
    const double lt_ln = std::max(params.lambda_ln_theta, grid.theta_step);
    const double lr_ln = std::max(params.lambda_ln_r, grid.r_step);
    for (size_t k = 0; k < results.size(); ++k) {
        const auto& r = results[k];
        ASSERT_TRUE(structure_feasible(r.state.h_bd, r.state.h_ln, params)) << "frame " << k + 1;
        // selected hypothesis is one of the (possibly perturbed) candidates
        bool bd_in = false, ln_in = false;
        for (int m = 1; m <= 3; ++m) {
            bd_in = bd_in || same_cell(r.state.h_bd, r.state.cands_bd.hypothesis(m));
            ln_in = ln_in || same_cell(r.state.h_ln, r.state.cands_ln.hypothesis(m));
        }
        ASSERT_TRUE(bd_in);
        ASSERT_TRUE(ln_in);
        if (k == 0) continue;
        const auto& prev = results[k - 1].state;
        if (r.mode_bd != 1 && !r.window_relaxed) {
            ASSERT_LT(std::abs(r.state.h_bd.theta - prev.h_bd.theta), lt_bd) << "frame " << k + 1;
            ASSERT_LT(std::abs(r.state.h_bd.r - prev.h_bd.r), lr_bd) << "frame " << k + 1;
        }
        if (r.mode_ln != 1) {
            ASSERT_LT(std::abs(r.state.h_ln.theta - prev.h_ln.theta), lt_ln);
            ASSERT_LT(std::abs(r.state.h_ln.r - prev.h_ln.r), lr_ln);
        }
        // tree dominance: the reported mode is the tree choice on the final
        // candidate set whenever the frame carried evidence
        if (!r.degenerate_bd) {
            ASSERT_EQ(r.mode_bd, tree_select(r.state.cands_bd, params.tree_bd));
        }
        if (!r.degenerate_ln) {
            ASSERT_EQ(r.mode_ln, tree_select(r.state.cands_ln, params.tree_ln));
        }
    }
}

TEST(RunSequence, RejectsNonContiguousIndices) {
    const HypothesisGrid grid = small_grid();
    const ModelParams params;
    std::vector<FrameObservation> obs;
    obs.push_back(make_obs(1, {}, {}));
    obs.push_back(make_obs(3, {}, {}));
    EXPECT_THROW(run_sequence(obs, grid, params), config_error);
}
