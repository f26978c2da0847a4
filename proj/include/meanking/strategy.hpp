#ifndef MEANKING_STRATEGY_HPP
#define MEANKING_STRATEGY_HPP

#include <optional>
#include <vector>

#include "meanking/bases.hpp"
#include "meanking/model.hpp"

namespace meanking {

/// Doubled-space images of the basis projectors: hat(Phi_b^i) = Phi_b^i (x)
/// conj(Phi_b^i), together with the maximally entangled Omega = sum_a |aa>.
/// Component ordering: |ab> has index a*d + b.
struct HattedVectors {
    int d = 0;
    int k = 0;
    std::vector<Vector> vectors;  // k*d entries, (b,i) at b*d + i, each length d^2
    Vector omega;

    const Vector& at(int b, int i) const { return vectors[std::size_t(b) * d + i]; }
};

HattedVectors hatted(const BasisSet& bs);

/// Safe vector for outcome x: <hat(Phi_b^i)|eta_x> = delta_{i,x(b)},
/// <Omega|eta_x> = 1, eta_x in the real span of the hatted vectors
/// (equivalently, its d x d reshape is hermitian).
struct SafeVector {
    long x = 0;
    Vector eta;
};

/// Shared factorization for the safe-vector system; the coefficient side is
/// identical for every x, only the right-hand side changes.
class SafeVectorSolver {
public:
    SafeVectorSolver(const HattedVectors& hv, const SpanClassification& cls);

    /// Least-squares solve restricted to the real span. Returns nullopt when
    /// the residual exceeds 1e-8 (no safe vector for this x).
    std::optional<SafeVector> solve(const std::vector<int>& x) const;
    std::optional<SafeVector> solve(long x_index) const;

    /// Independent route: full kd+1 equation system, minimum-norm solution.
    /// Kept for cross-checking the reduced solver.
    std::optional<SafeVector> solve_full(long x_index) const;

    int d() const { return d_; }
    int k() const { return k_; }

private:
    int d_, k_;
    // real coordinates over hermitian matrices; reduced system uses the
    // first d-1 projectors per basis plus the trace row
    RealMatrix reduced_pinv_;   // d^2 x (k(d-1)+1)
    RealMatrix reduced_rows_;   // (k(d-1)+1) x d^2
    RealMatrix full_pinv_;      // d^2 x (kd+1)
    RealMatrix full_rows_;      // (kd+1) x d^2
};

std::optional<SafeVector> solve_safe_vector(const HattedVectors& hv,
                                            const SpanClassification& cls,
                                            const std::vector<int>& x);

/// Alice's strategy: initial operator S (state Psi = (1 (x) S) Omega) and the
/// POVM F_x = d p(x) |eta_x><eta_x|, with the rank-deficiency residual
/// (projector onto the orthogonal complement of the span) assigned to the
/// lowest-index supported outcome.
struct Strategy {
    int d = 0;
    int k = 0;
    Matrix S;  // d x d, tr(S^* S) = 1
    struct Outcome {
        long index;
        double weight;  // p(x)
        Vector eta;
    };
    std::vector<Outcome> outcomes;  // sorted by index
    Matrix residual;                // d^2 x d^2, added to outcomes.front()

    Matrix povm_element(std::size_t outcome_pos) const;
    Matrix povm_sum() const;
};

Strategy build_strategy(const BasisSet& bs, const JointDistribution& jd);

struct VerifyReport {
    double max_offdiag = 0.0;  // max over i != x(b) of <hat|M_x|hat>
    std::vector<std::pair<long, double>> lambda;  // per outcome, mean over b of the diagonal
    double sum_check = 0.0;    // sum of lambda values; 1 for a valid strategy
    double min_eig = 0.0;      // smallest eigenvalue over all F_x
    double completeness = 0.0; // max |sum F_x - 1|
};

VerifyReport verify_strategy(const BasisSet& bs, const Strategy& st);

/// Recovers p(x) = <Omega|(1 (x) S)^* F_x (1 (x) S)|Omega>, normalized.
/// Requires a tomographically complete basis set and a verified strategy.
JointDistribution extract_classical_model(const BasisSet& bs, const Strategy& st);

/// S^* S, the reduced density operator of Alice's initial state.
Matrix reduced_state(const Strategy& st);

}  // namespace meanking

#endif
