#pragma once

#include <array>
#include <cassert>
#include <cmath>

#include "houghtrack/line.hpp"
#include "houghtrack/params.hpp"

namespace houghtrack {

/// Extended-real potential value: finite, or an absorbing hard-violation
/// sentinel. The sentinel is a distinct state rather than a large negative
/// float so absorption under summation is exact.
class Potential {
public:
    static Potential finite(double v) { return Potential(v, false); }
    static Potential hard_violation() { return Potential(0.0, true); }
    static Potential zero() { return finite(0.0); }

    bool is_hard() const { return hard_; }
    double value() const {
        assert(!hard_);
        return value_;
    }

    Potential operator+(const Potential& o) const {
        if (hard_ || o.hard_) return hard_violation();
        return finite(value_ + o.value_);
    }

private:
    Potential(double v, bool hard) : value_(v), hard_(hard) {}
    double value_;
    bool hard_;
};

// D_min clamp bounds (pixels).
constexpr double kDMinLow = 10.0;
constexpr double kDMinHigh = 27.0;

/// Minimum border-to-lane separation as a ramp of the lane position:
/// max(min(a * r_ln + b, 27), 10).
inline double d_min(double r_ln, double a, double b) {
    return std::max(std::min(a * r_ln + b, kDMinHigh), kDMinLow);
}

inline double d_min(double r_ln, const ModelParams& p) {
    return d_min(r_ln, p.dmin_a, p.dmin_b);
}

/// Inter-frame pairwise constraint: 0 iff |dtheta| < lambda_theta and
/// |dr| < lambda_r, both strict; hard violation otherwise.
inline Potential interframe_potential(const LineHypothesis& prev, const LineHypothesis& cur,
                                      double lambda_theta, double lambda_r) {
    const double dt = std::abs(prev.theta - cur.theta);
    const double dr = std::abs(prev.r - cur.r);
    if (dt < lambda_theta && dr < lambda_r) return Potential::zero();
    return Potential::hard_violation();
}

/// Coupled border/lane structure constraint. dr = r_bd - r_ln is signed (the
/// border sits farther from the vehicle, so feasible dr is positive);
/// dtheta = |theta_bd - theta_ln|. Feasible iff one of:
///   dr >= D_min(r_ln) and d1 <= dr < d2 and dtheta <= lambda_str1
///   dr >= D_min(r_ln) and d2 <= dr < d3 and dtheta <= lambda_str2
///   dr >= d3
inline Potential coupled_structure(const LineHypothesis& h_bd, const LineHypothesis& h_ln,
                                   const ModelParams& p) {
    const double dr = h_bd.r - h_ln.r;
    const double dtheta = std::abs(h_bd.theta - h_ln.theta);
    if (dr >= p.d3) return Potential::zero();
    const double dmin = d_min(h_ln.r, p);
    if (dr >= dmin && p.d1 <= dr && dr < p.d2 && dtheta <= p.lambda_str1)
        return Potential::zero();
    if (dr >= dmin && p.d2 <= dr && dr < p.d3 && dtheta <= p.lambda_str2)
        return Potential::zero();
    return Potential::hard_violation();
}

inline bool structure_feasible(const LineHypothesis& h_bd, const LineHypothesis& h_ln,
                               const ModelParams& p) {
    return !coupled_structure(h_bd, h_ln, p).is_hard();
}

/// The three candidate hypotheses of one track in one frame with their vote
/// weights: [0] unconstrained Type-1, [1] frame-constrained Type-1,
/// [2] frame-constrained Type-2 (gradient). Indexed 1-based through the
/// accessors to match the mode numbering used everywhere else.
struct CandidateSet {
    std::array<LineHypothesis, 3> hyp;
    std::array<double, 3> phi = {0.0, 0.0, 0.0};

    const LineHypothesis& hypothesis(int mode) const { return hyp[mode - 1]; }
    double phi_of(int mode) const { return phi[mode - 1]; }
};

/// Fixed decision tree over candidate vote weights; total over all inputs.
/// Root tests whether the unconstrained candidate discovered something the
/// smoothed one missed (a jump); the fallback leaf is the gradient candidate.
inline int tree_select(const CandidateSet& cands, const TreeThresholds& t) {
    if (cands.phi[0] - cands.phi[1] > t.root_gap) return cands.phi[0] > t.left_abs ? 1 : 3;
    return cands.phi[1] > t.right_abs ? 2 : 3;
}

/// Mode-selection potential: 0 when the selected hypothesis is the
/// tree-chosen candidate, -lambda_mode for one of the other two candidates,
/// hard violation for anything outside the candidate set. Candidate equality
/// is grid-cell identity.
inline Potential mode_selection_potential(const LineHypothesis& selected,
                                          const CandidateSet& cands, int tree_choice,
                                          double lambda_mode) {
    assert(tree_choice >= 1 && tree_choice <= 3);
    if (same_cell(selected, cands.hypothesis(tree_choice))) return Potential::zero();
    for (int m = 1; m <= 3; ++m)
        if (m != tree_choice && same_cell(selected, cands.hypothesis(m)))
            return Potential::finite(-lambda_mode);
    return Potential::hard_violation();
}

}  // namespace houghtrack
