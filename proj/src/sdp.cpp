#include "meanking/sdp.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace meanking {

namespace {

// A(p) = sum_x p_x |eta_x><eta_x| as a dense d^2 x d^2 hermitian matrix.
Matrix apply_map(const Matrix& etas, const RealVector& p) {
    return etas * p.asDiagonal() * etas.adjoint();
}

bool is_pd(const Matrix& m) {
    return Eigen::LLT<Matrix>(m).info() == Eigen::Success;
}

// tr(AB) for hermitian A, B.
double trace_product(const Matrix& a, const Matrix& b) {
    return a.cwiseProduct(b.conjugate()).sum().real();
}

}  // namespace

SdpResult unambiguous_value(const BasisSet& bs, long variable_cap, double rank_tol) {
    validate_basis_set(bs);
    SpanClassification cls = rank_of_span(bs, rank_tol);
    if (cls.rank != bs.k * (bs.d - 1) + 1)
        throw std::invalid_argument("unambiguous_value: basis set is degenerate");
    const int d = bs.d, d2 = bs.d * bs.d;
    const long n = pow_long(bs.d, bs.k);
    if (n > variable_cap) throw std::invalid_argument("unambiguous_value: variable cap exceeded");

    HattedVectors hv = hatted(bs);
    SafeVectorSolver solver(hv, cls);
    Matrix etas(d2, n);
    for (long x = 0; x < n; ++x) {
        auto sv = solver.solve(x);
        if (!sv) throw std::runtime_error("unambiguous_value: safe vector missing");
        etas.col(x) = sv->eta;
    }

    const Matrix c = Matrix::Identity(d2, d2) / double(d);

    // Primal-dual interior point method on the conic pair
    //   max 1'p   s.t.  A(p) + Z = 1/d,  p >= 0, Z >= 0
    //   min tr(L)/d  s.t.  s_x = <eta_x|L|eta_x> - 1 >= 0,  L >= 0.
    // Both sides stay exactly feasible (Z and s are recomputed from p and L
    // every iteration), so p's + tr(ZL) is the exact duality gap at the
    // iterate and certifies the reported value without any centering.
    //
    // Strictly feasible start: small uniform p, a large multiple of the
    // identity for L.
    Matrix gram_full = etas * etas.adjoint();
    Eigen::SelfAdjointEigenSolver<Matrix> es0(gram_full);
    double eps = 1.0 / (2.0 * d * es0.eigenvalues().maxCoeff());
    RealVector p = RealVector::Constant(n, eps);
    double min_norm = etas.colwise().squaredNorm().minCoeff();
    Matrix lam = (2.0 / min_norm) * Matrix::Identity(d2, d2);

    const double gap_target = 1e-6;
    const double tau = 0.97;  // fraction-to-boundary
    const int max_iters = 300;

    SdpResult res;
    res.ok = false;
    bool recenter = false;
    for (int iter = 0; iter < max_iters; ++iter) {
        Matrix z = c - apply_map(etas, p);
        Eigen::LLT<Matrix> llt(z);
        if (llt.info() != Eigen::Success)
            throw std::runtime_error("unambiguous_value: iterate left the cone");

        Matrix lam_e = lam * etas;
        RealVector s(n);
        for (long x = 0; x < n; ++x) s(x) = etas.col(x).dot(lam_e.col(x)).real() - 1.0;
        if (s.minCoeff() <= 0.0)
            throw std::runtime_error("unambiguous_value: dual slack left the cone");

        double gap = p.dot(s) + trace_product(z, lam);
        res.value = p.sum();
        res.gap = std::abs(gap);
        if (res.gap <= 0.5 * gap_target) {
            res.ok = true;
            break;
        }
        double mu = gap / double(n + d2);

        Matrix zinv = llt.solve(Matrix::Identity(d2, d2));
        Matrix zinv_e = zinv * etas;
        RealVector q(n);
        for (long x = 0; x < n; ++x) q(x) = etas.col(x).dot(zinv_e.col(x)).real();

        // Nesterov-Todd scaling point: W L W = Z with
        // W^{-1} = L^{1/2} (L^{1/2} Z L^{1/2})^{-1/2} L^{1/2}.
        Eigen::SelfAdjointEigenSolver<Matrix> les(lam);
        Matrix lam_half = les.operatorSqrt();
        Eigen::SelfAdjointEigenSolver<Matrix> ies(lam_half * z * lam_half);
        Matrix winv = lam_half * ies.operatorInverseSqrt() * lam_half;

        // Schur complement of the NT Newton system in the p block:
        // M_xy = |<eta_x|W^{-1}|eta_y>|^2 + delta_xy s_x / p_x.
        Matrix gw = etas.adjoint() * (winv * etas);
        RealMatrix m = gw.cwiseAbs2();
        m.diagonal() += s.cwiseQuotient(p);

        // Jacobi-scaled factorization: the diagonal spans many orders of
        // magnitude once constraints become active and a raw factorization
        // loses the direction to rounding error.
        RealVector scale = m.diagonal().cwiseSqrt().cwiseInverse();
        RealMatrix scaled = scale.asDiagonal() * m * scale.asDiagonal();
        Eigen::LLT<RealMatrix> mllt;
        for (double ridge = 1e-14;; ridge *= 100.0) {
            RealMatrix trial = scaled;
            trial.diagonal().array() += ridge;
            mllt.compute(trial);
            if (mllt.info() == Eigen::Success) break;
            if (ridge > 1e-4) throw std::runtime_error("unambiguous_value: Schur solve failed");
        }
        auto solve_m = [&](const RealVector& rhs) -> RealVector {
            return scale.asDiagonal() * RealVector(mllt.solve(scale.cwiseProduct(rhs)));
        };
        // dual direction implied by a primal direction dp and centering
        // target sigma*mu; exactly hermitian by construction
        auto dual_dir = [&](const RealVector& dp, double sigma_mu) -> Matrix {
            Matrix x = sigma_mu * zinv - lam + winv * apply_map(etas, dp) * winv;
            return 0.5 * (x + x.adjoint());
        };
        auto quad_forms = [&](const Matrix& dlam) -> RealVector {
            Matrix de = dlam * etas;
            RealVector out(n);
            for (long x = 0; x < n; ++x) out(x) = etas.col(x).dot(de.col(x)).real();
            return out;
        };
        // largest step in (0,1] keeping the orthant slack positive and the
        // matrix inside the cone, both with margin tau; the cone boundary
        // comes from the minimum eigenvalue of the pencil (dir, base)
        auto step_len = [&](const RealVector& v, const RealVector& dv, const Matrix& base,
                            const Matrix& dir) -> double {
            double alpha = 1.0 / tau;
            for (long x = 0; x < long(v.size()); ++x)
                if (dv(x) < 0.0) alpha = std::min(alpha, -v(x) / dv(x));
            Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(dir, base,
                                                                 Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
            if (ges.info() == Eigen::Success) {
                double theta = ges.eigenvalues().minCoeff();
                if (theta < 0.0) alpha = std::min(alpha, -1.0 / theta);
            }
            alpha = std::min(1.0, tau * alpha);
            while (alpha > 1e-13 && !is_pd(base + alpha * dir)) alpha *= 0.8;
            return alpha;
        };

        // predictor (affine-scaling direction, sigma = 0)
        RealVector dp_aff = solve_m(RealVector::Ones(n));
        Matrix dlam_aff = dual_dir(dp_aff, 0.0);
        RealVector ds_aff = quad_forms(dlam_aff);
        Matrix dz_aff = -apply_map(etas, dp_aff);
        double ap = step_len(p, dp_aff, z, dz_aff);
        double ad = step_len(s, ds_aff, lam, dlam_aff);
        double mu_aff = ((p + ap * dp_aff).dot(s + ad * ds_aff) +
                         trace_product(z + ap * dz_aff, lam + ad * dlam_aff)) /
                        double(n + d2);
        double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3);
        // after a short-step iteration the pair is far off-center and the
        // affine direction keeps hitting the boundary; one centering step
        // (sigma = 1) restores balanced complementarity products
        if (recenter) sigma = 1.0;

        // corrector: recenter toward sigma*mu, with the orthant-side
        // second-order Mehrotra term
        RealVector rhs = RealVector::Ones(n) + sigma * mu * (p.cwiseInverse() - q) -
                         dp_aff.cwiseProduct(ds_aff).cwiseQuotient(p);
        RealVector dp = solve_m(rhs);
        Matrix dlam = dual_dir(dp, sigma * mu);
        RealVector ds = quad_forms(dlam);
        Matrix dz = -apply_map(etas, dp);
        ap = step_len(p, dp, z, dz);
        ad = step_len(s, ds, lam, dlam);

        p += ap * dp;
        lam += ad * dlam;
        // the dual optimum is rank deficient; once the smallest eigenvalue
        // of L reaches rounding scale every dual step dies on the cone
        // boundary. Lift by a mu-proportional multiple of the identity: this
        // keeps L strictly interior, stays exactly dual feasible (s only
        // grows), and costs O(mu) in the gap, which vanishes as mu does.
        double lam_floor = 1e-2 * mu * d;
        double lmin =
            Eigen::SelfAdjointEigenSolver<Matrix>(lam, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
        if (lmin < lam_floor) lam += (lam_floor - lmin) * Matrix::Identity(d2, d2);
        recenter = !recenter && std::min(ap, ad) < 0.1;
        ++res.iterations;
        if (std::getenv("MEANKING_SDP_TRACE")) {
            double zmin = Eigen::SelfAdjointEigenSolver<Matrix>(z).eigenvalues().minCoeff();
            double lmin = Eigen::SelfAdjointEigenSolver<Matrix>(lam).eigenvalues().minCoeff();
            double smin = s.minCoeff(), pmin = p.minCoeff();
            std::fprintf(stderr,
                         "it=%3d gap=%.3e sigma=%.2e ap=%.3e ad=%.3e zmin=%.1e lmin=%.1e "
                         "pmin=%.1e smin=%.1e |dlam|=%.1e\n",
                         iter, gap, sigma, ap, ad, zmin, lmin, pmin, smin, dlam.norm());
        }
    }

    res.weights.d = bs.d;
    res.weights.k = bs.k;
    for (long x = 0; x < n; ++x)
        if (p(x) > 1e-12) res.weights.weights.emplace_back(x, p(x));
    return res;
}

bool check_sdp_lp_consistency(const BasisSet& bs) {
    SpanClassification cls = rank_of_span(bs);
    if (cls.rank != bs.d * bs.d)
        throw std::invalid_argument("check_sdp_lp_consistency: not tomographically complete");
    LpModelResult lp = solve_model_lp(transition_tensor(bs));
    SdpResult sdp = unambiguous_value(bs);
    return lp.feasible == (sdp.value >= 1.0 - 1e-5);
}

}  // namespace meanking
