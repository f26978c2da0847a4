#ifndef MEANKING_SDP_HPP
#define MEANKING_SDP_HPP

#include "meanking/model.hpp"
#include "meanking/strategy.hpp"

namespace meanking {

struct SdpResult {
    double value = 0.0;       // optimum of sum_x p(x), in [0,1]
    JointDistribution weights;
    double gap = 0.0;         // exact duality gap at the returned feasible pair
    int iterations = 0;       // interior point iterations
    bool ok = true;           // false when the gap target was not certified
};

/// Unambiguous-retrodiction value: maximize sum_x p(x) over p >= 0 with
/// sum_x p(x) |eta_x><eta_x| <= 1/d on the doubled space. Solved by a
/// feasible primal-dual interior point method (predictor-corrector); both
/// the primal slack and the dual multiplier stay inside their cones, so the
/// reported gap is an exact duality-gap certificate for the value, driven
/// below the 1e-6 target. rank_tol is the relative cutoff handed to rank_of_span;
/// ensemble callers pass a tighter value because Haar draws are almost
/// surely non-degenerate and occasionally sit just inside the default cut.
SdpResult unambiguous_value(const BasisSet& bs, long variable_cap = kDefaultVariableCap,
                            double rank_tol = 1e-9);

/// Cross-solver oracle: on tomographically complete sets, the LP finds a
/// classical model exactly when the SDP value reaches 1.
bool check_sdp_lp_consistency(const BasisSet& bs);

}  // namespace meanking

#endif
