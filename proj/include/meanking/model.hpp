#ifndef MEANKING_MODEL_HPP
#define MEANKING_MODEL_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "meanking/bases.hpp"
#include "meanking/common.hpp"

namespace meanking {

/// Guessing functions x : {bases} -> {outcomes}, encoded as
/// index = sum_b x_b d^b (0-based outcomes, basis 0 least significant).
long encode_guess(const std::vector<int>& x, int d);
std::vector<int> decode_guess(long index, int d, int k);
long pow_long(int base, int exp);

/// Sparse probability assignment on the d^k guessing functions.
struct JointDistribution {
    int d = 0;
    int k = 0;
    std::vector<std::pair<long, double>> weights;  // sorted by index, p >= 0

    double total() const;
    static JointDistribution uniform(int d, int k);
};

/// Marginal of jd on the basis pair (b,c): entry (i,j) = sum_x p(x)
/// [x(b)=i][x(c)=j].
RealMatrix marginal(const JointDistribution& jd, int b, int c);

/// The three numbers (p_12(1,1), p_23(1,1), p_31(1,1)) of a qubit triple.
struct BellTriple {
    double q_ab = 0, q_bc = 0, q_ca = 0;
};

struct LpModelResult {
    bool feasible = false;
    JointDistribution jd;
    double value = 0.0;     // optimum of sum_x p(x), 1 iff a model exists
    long iterations = 0;
};

inline constexpr long kDefaultVariableCap = 1000000;

/// Classical-model decision: maximize sum_x p(x) subject to p >= 0 and the
/// pair-marginal inequalities sum_x p(x)[x(b)=i][x(c)=j] <= p_bc(i,j).
/// Feasible iff the optimum reaches 1 - 1e-7; the inequalities then saturate
/// because both sides sum to 1.
LpModelResult solve_model_lp(const TransitionTensor& t, long variable_cap = kDefaultVariableCap);

/// Max-norm distance between the pair marginals of jd and t.
double marginal_residual(const JointDistribution& jd, const TransitionTensor& t);

/// Closed-form Bell test for three dichotomic variables with uniform
/// marginals: with correlators C = 4q - 1, a joint model exists iff all of
/// 1 +- C_ab +- C_bc +- C_ca >= 0 with an even number of minus signs.
bool bell_membership(const BellTriple& tr);

BellTriple bell_triple_of(const BasisSet& bs);

/// d=2, k=3 tensor with uniform marginals and given q values; used to probe
/// the LP with points that need not come from actual bases.
TransitionTensor tensor_from_triple(const BellTriple& tr);

struct IterativeFitResult {
    JointDistribution jd;
    double residual = 0.0;
    int sweeps = 0;
    int damping_events = 0;
};

/// Iterative proportional fitting of a joint distribution to the pair
/// marginals, starting from uniform. Damped by mixing with the previous
/// iterate whenever a sweep fails to decrease the residual.
IterativeFitResult iterative_fit(const TransitionTensor& t, int max_sweeps, double tol,
                                 long variable_cap = kDefaultVariableCap);

struct DebiasResult {
    BasisSet bs;
    double objective = 0.0;     // sum_{a<b} sum_{ij} p_ab(i,j)^2
    int steps = 0;
    bool converged = false;
    std::vector<double> trace;  // objective after each accepted step
};

double debias_objective(const BasisSet& bs);

/// Gradient descent on the unbiasedness objective over per-basis unitary
/// rotations U_b <- exp(-eta G_b) U_b, with Armijo backtracking.
DebiasResult debias(const BasisSet& bs, int max_steps, double tol);

}  // namespace meanking

#endif
