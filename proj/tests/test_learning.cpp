#include <gtest/gtest.h>

#include <cmath>

#include "houghtrack/learning.hpp"
#include "houghtrack/rng.hpp"

using namespace houghtrack;

namespace {

GroundTruthFrame gt_frame(int frame, double bd_theta, double bd_r, double ln_theta, double ln_r) {
    GroundTruthFrame f;
    f.frame = frame;
    f.bd_line = {bd_theta, bd_r};
    f.ln_line = {ln_theta, ln_r};
    return f;
}

}  // namespace

TEST(LearnInterframe, ConstantTruthGivesZeroTolerances) {
    std::vector<GroundTruthFrame> gt;
    for (int f = 1; f <= 20; ++f) gt.push_back(gt_frame(f, kPi / 2, 60.0, kPi / 2, 20.0));
    const LearnedInterframe l = learn_interframe_lambdas(gt);
    EXPECT_DOUBLE_EQ(l.bd.lambda_theta, 0.0);
    EXPECT_DOUBLE_EQ(l.bd.lambda_r, 0.0);
    EXPECT_DOUBLE_EQ(l.ln.lambda_r, 0.0);
}

TEST(LearnInterframe, AlternatingDeltasGiveExactDouble) {
    // dr alternates +3 / -3 exactly: rms 3, lambda 6
    std::vector<GroundTruthFrame> gt;
    double r = 60.0;
    for (int f = 1; f <= 21; ++f) {
        gt.push_back(gt_frame(f, kPi / 2, r, kPi / 2, 20.0));
        r += (f % 2 == 1) ? 3.0 : -3.0;
    }
    const LearnedInterframe l = learn_interframe_lambdas(gt);
    EXPECT_DOUBLE_EQ(l.bd.lambda_r, 6.0);
}

TEST(LearnInterframe, RecoversTwoSigmaFromGaussianDeltas) {
    SplitMix64 rng(404);
    const double sigma_r = 4.0, sigma_t = deg_to_rad(0.5);
    std::vector<GroundTruthFrame> gt;
    double r_bd = 500.0, r_ln = 100.0, t_bd = kPi / 2, t_ln = kPi / 2;
    for (int f = 1; f <= 10001; ++f) {
        gt.push_back(gt_frame(f, t_bd, r_bd, t_ln, r_ln));
        r_bd += rng.gaussian(0.0, sigma_r);
        t_bd += rng.gaussian(0.0, sigma_t);
        r_ln += rng.gaussian(0.0, sigma_r);
        t_ln += rng.gaussian(0.0, sigma_t);
    }
    const LearnedInterframe l = learn_interframe_lambdas(gt);
    EXPECT_NEAR(l.bd.lambda_r, 8.0, 0.8);
    EXPECT_NEAR(l.bd.lambda_theta, 2.0 * sigma_t, 0.2 * sigma_t);
    EXPECT_NEAR(l.ln.lambda_r, 8.0, 0.8);
}

TEST(LearnInterframe, NeedsTwoFrames) {
    EXPECT_THROW(learn_interframe_lambdas({gt_frame(1, kPi / 2, 60, kPi / 2, 20)}), config_error);
}

TEST(LearnStructure, ExactBandGapsDoubleToLambdas) {
    ModelParams p;
    std::vector<GroundTruthFrame> gt;
    int f = 1;
    // band 1: dr = 12, |dtheta| = 1 deg; band 2: dr = 20, |dtheta| = 2 deg
    for (int k = 0; k < 10; ++k) {
        const double s = k % 2 ? 1.0 : -1.0;
        gt.push_back(gt_frame(f++, kPi / 2 + s * deg_to_rad(1.0), 32.0, kPi / 2, 20.0));
        gt.push_back(gt_frame(f++, kPi / 2 + s * deg_to_rad(2.0), 40.0, kPi / 2, 20.0));
    }
    const StructureLambdas l = learn_structure_lambdas(gt, p);
    EXPECT_TRUE(l.str1_learned);
    EXPECT_TRUE(l.str2_learned);
    EXPECT_NEAR(l.str1, deg_to_rad(2.0), 1e-12);
    EXPECT_NEAR(l.str2, deg_to_rad(4.0), 1e-12);
}

TEST(LearnStructure, ParallelTruthGivesZero) {
    ModelParams p;
    std::vector<GroundTruthFrame> gt;
    for (int f = 1; f <= 8; ++f) gt.push_back(gt_frame(f, kPi / 2, 32.0, kPi / 2, 20.0));
    const StructureLambdas l = learn_structure_lambdas(gt, p);
    EXPECT_TRUE(l.str1_learned);
    EXPECT_DOUBLE_EQ(l.str1, 0.0);
}

TEST(LearnStructure, EmptyBandsKeepDefaults) {
    ModelParams p;
    std::vector<GroundTruthFrame> gt;
    for (int f = 1; f <= 8; ++f) gt.push_back(gt_frame(f, kPi / 2, 70.0, kPi / 2, 20.0));
    const StructureLambdas l = learn_structure_lambdas(gt, p);
    EXPECT_FALSE(l.str1_learned);
    EXPECT_FALSE(l.str2_learned);
    EXPECT_DOUBLE_EQ(l.str1, p.lambda_str1);
    EXPECT_DOUBLE_EQ(l.str2, p.lambda_str2);
}

TEST(LearnDmin, TwoExactPointsDefineTheLine) {
    std::vector<GroundTruthFrame> gt;
    gt.push_back(gt_frame(1, kPi / 2, 22.0, kPi / 2, 10.0));  // (r=10, dr=12)
    gt.push_back(gt_frame(2, kPi / 2, 34.0, kPi / 2, 20.0));  // (r=20, dr=14)
    const DminFit fit = learn_dmin_regression(gt);
    EXPECT_NEAR(fit.a, 0.2, 1e-12);
    EXPECT_NEAR(fit.b, 10.0, 1e-12);
}

TEST(LearnDmin, RecoversNoisyEnvelope) {
    SplitMix64 rng(7);
    const double a0 = 0.1, b0 = 5.0;
    std::vector<GroundTruthFrame> gt;
    int f = 1;
    for (double r = 10.0; r <= 110.0; r += 5.0)
        for (int k = 0; k < 30; ++k) {
            const double dr = a0 * r + b0 + rng.uniform(0.0, 1.5);
            gt.push_back(gt_frame(f++, kPi / 2, r + dr, kPi / 2, r));
        }
    const DminFit fit = learn_dmin_regression(gt);
    EXPECT_NEAR(fit.a, a0, 0.15 * a0);
    EXPECT_NEAR(fit.b, b0, 0.15 * b0 + 0.2);
}

TEST(LearnDmin, IdenticalLanePositionsAreRankDeficient) {
    std::vector<GroundTruthFrame> gt;
    for (int f = 1; f <= 10; ++f) gt.push_back(gt_frame(f, kPi / 2, 32.0 + f, kPi / 2, 20.0));
    EXPECT_THROW(learn_dmin_regression(gt), config_error);
}

TEST(LearnDmin, ScaleEquivariance) {
    // single-point buckets stay distinct under scaling: b scales by c, a is
    // unchanged
    std::vector<GroundTruthFrame> gt, scaled;
    SplitMix64 rng(12);
    const double c = 2.5;
    int f = 1;
    for (double r = 10.0; r <= 60.0; r += 10.0) {
        const double dr = 0.12 * r + 4.0 + rng.uniform(0.0, 0.5);
        gt.push_back(gt_frame(f, kPi / 2, r + dr, kPi / 2, r));
        scaled.push_back(gt_frame(f, kPi / 2, c * (r + dr), kPi / 2, c * r));
        ++f;
    }
    const DminFit base = learn_dmin_regression(gt);
    const DminFit big = learn_dmin_regression(scaled);
    EXPECT_NEAR(big.a, base.a, 1e-9);
    EXPECT_NEAR(big.b, c * base.b, 1e-9);
}

TEST(LearnLambdaMode, MaxLossPlusMargin) {
    std::vector<FrameResult> results(4);
    results[0].perturbed = false;
    results[1].perturbed = true;
    results[1].pre_perturb_weight = 10.0;
    results[1].post_perturb_weight = 8.0;  // loss 2
    results[2].perturbed = true;
    results[2].pre_perturb_weight = 9.0;
    results[2].post_perturb_weight = 4.0;  // loss 5
    results[3].perturbed = true;
    results[3].pre_perturb_weight = 6.0;
    results[3].post_perturb_weight = 3.0;  // loss 3
    EXPECT_NEAR(learn_lambda_mode(results, 100.0), 5.5, 1e-12);
}

TEST(LearnLambdaMode, NoEventsReturnsDefaultAndZeroLossIsFloored) {
    std::vector<FrameResult> none(3);
    EXPECT_DOUBLE_EQ(learn_lambda_mode(none, 123.0), 123.0);
    std::vector<FrameResult> zero(1);
    zero[0].perturbed = true;
    zero[0].pre_perturb_weight = 5.0;
    zero[0].post_perturb_weight = 5.0;
    EXPECT_DOUBLE_EQ(learn_lambda_mode(zero, 123.0), 1e-6);
}

TEST(LearnedLambdas, CoverGroundTruthMotionAtNinetyFivePercent) {
    SplitMix64 rng(31);
    const double sigma_r = 2.0;
    std::vector<GroundTruthFrame> gt;
    double r_bd = 300.0;
    for (int f = 1; f <= 4000; ++f) {
        gt.push_back(gt_frame(f, kPi / 2, r_bd, kPi / 2, 100.0));
        r_bd += rng.gaussian(0.0, sigma_r);
    }
    const LearnedInterframe l = learn_interframe_lambdas(gt);
    int inside = 0;
    for (size_t i = 1; i < gt.size(); ++i)
        if (std::abs(gt[i].bd_line.r - gt[i - 1].bd_line.r) < l.bd.lambda_r) ++inside;
    const double frac = static_cast<double>(inside) / (gt.size() - 1);
    EXPECT_GE(frac, 0.93);  // 2-sigma two-sided covers ~95.4%
}

TEST(LambdaFloors, NeverBelowOneGridStep) {
    ModelParams p;
    p.lambda_bd_theta = 0.0;
    p.lambda_bd_r = 0.0;
    p.lambda_ln_theta = 1.0;  // above the floor, kept
    HypothesisGrid g = default_grid(120.0);
    apply_lambda_floors(p, g);
    EXPECT_DOUBLE_EQ(p.lambda_bd_theta, g.theta_step);
    EXPECT_DOUBLE_EQ(p.lambda_bd_r, g.r_step);
    EXPECT_DOUBLE_EQ(p.lambda_ln_theta, 1.0);
}

TEST(GroundTruthSanity, ViolationsAreCounted) {
    ModelParams p;
    std::vector<GroundTruthFrame> gt;
    gt.push_back(gt_frame(1, kPi / 2, 60.0, kPi / 2, 20.0));  // fine
    gt.push_back(gt_frame(2, kPi / 2, 24.0, kPi / 2, 20.0));  // dr = 4: violation
    EXPECT_EQ(count_structure_violations(gt, p), 1);
}
