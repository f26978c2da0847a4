#include "meanking/strategy.hpp"

#include <cmath>
#include <stdexcept>

namespace meanking {

namespace {

using RowMajorMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// |ab> component a*d+b, so a doubled-space vector reshapes row-major into the
// d x d matrix H with <hat(P)|v> = tr(P H) and <Omega|v> = tr(H).
Matrix reshape(const Vector& v, int d) {
    return Eigen::Map<const RowMajorMatrix>(v.data(), d, d);
}

Vector unreshape(const Matrix& h, int d) {
    Vector v(d * d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) v(a * d + b) = h(a, b);
    return v;
}

// Real coordinates of a hermitian matrix, isometric for the HS inner product.
RealVector herm_to_real(const Matrix& h, int d) {
    RealVector r(d * d);
    int pos = 0;
    for (int a = 0; a < d; ++a) r(pos++) = h(a, a).real();
    const double s = std::sqrt(2.0);
    for (int a = 0; a < d; ++a)
        for (int b = a + 1; b < d; ++b) {
            r(pos++) = s * h(a, b).real();
            r(pos++) = s * h(a, b).imag();
        }
    return r;
}

Matrix real_to_herm(const RealVector& r, int d) {
    Matrix h(d, d);
    int pos = 0;
    for (int a = 0; a < d; ++a) h(a, a) = r(pos++);
    const double s = 1.0 / std::sqrt(2.0);
    for (int a = 0; a < d; ++a)
        for (int b = a + 1; b < d; ++b) {
            double re = r(pos++) * s;
            double im = r(pos++) * s;
            h(a, b) = Complex(re, im);
            h(b, a) = Complex(re, -im);
        }
    return h;
}

}  // namespace

HattedVectors hatted(const BasisSet& bs) {
    HattedVectors hv;
    hv.d = bs.d;
    hv.k = bs.k;
    hv.vectors.reserve(std::size_t(bs.k) * bs.d);
    for (int b = 0; b < bs.k; ++b)
        for (int i = 0; i < bs.d; ++i) {
            Vector phi = bs.vec(b, i);
            Vector v(bs.d * bs.d);
            for (int a = 0; a < bs.d; ++a)
                for (int be = 0; be < bs.d; ++be) v(a * bs.d + be) = phi(a) * std::conj(phi(be));
            hv.vectors.push_back(std::move(v));
        }
    hv.omega = Vector::Zero(bs.d * bs.d);
    for (int a = 0; a < bs.d; ++a) hv.omega(a * bs.d + a) = 1.0;
    return hv;
}

SafeVectorSolver::SafeVectorSolver(const HattedVectors& hv, const SpanClassification& cls)
    : d_(hv.d), k_(hv.k) {
    if (cls.label == SpanLabel::degenerate)
        throw std::invalid_argument("SafeVectorSolver: degenerate basis set unsupported");
    const int d2 = d_ * d_;

    reduced_rows_.resize(k_ * (d_ - 1) + 1, d2);
    full_rows_.resize(k_ * d_ + 1, d2);
    int rr = 0;
    for (int b = 0; b < k_; ++b)
        for (int i = 0; i < d_; ++i) {
            Matrix proj = reshape(hv.at(b, i), d_);
            RealVector row = herm_to_real(proj, d_);
            full_rows_.row(b * d_ + i) = row.transpose();
            if (i < d_ - 1) reduced_rows_.row(rr++) = row.transpose();
        }
    RealVector trace_row = herm_to_real(Matrix::Identity(d_, d_), d_);
    reduced_rows_.row(rr) = trace_row.transpose();
    full_rows_.row(k_ * d_) = trace_row.transpose();

    reduced_pinv_ = reduced_rows_.completeOrthogonalDecomposition().pseudoInverse();
    full_pinv_ = full_rows_.completeOrthogonalDecomposition().pseudoInverse();
}

std::optional<SafeVector> SafeVectorSolver::solve(const std::vector<int>& x) const {
    return solve(encode_guess(x, d_));
}

namespace {

std::optional<SafeVector> finish_safe_solve(const RealVector& coords, long x_index,
                                            const RealMatrix& full_rows, int d, int k,
                                            const std::vector<int>& x) {
    RealVector check = full_rows * coords;
    double resid = 0.0;
    for (int b = 0; b < k; ++b)
        for (int i = 0; i < d; ++i)
            resid = std::max(resid,
                             std::abs(check(b * d + i) - (i == x[std::size_t(b)] ? 1.0 : 0.0)));
    resid = std::max(resid, std::abs(check(k * d) - 1.0));
    if (resid > 1e-8) return std::nullopt;
    return SafeVector{x_index, unreshape(real_to_herm(coords, d), d)};
}

}  // namespace

std::optional<SafeVector> SafeVectorSolver::solve(long x_index) const {
    std::vector<int> x = decode_guess(x_index, d_, k_);
    RealVector rhs(k_ * (d_ - 1) + 1);
    int rr = 0;
    for (int b = 0; b < k_; ++b)
        for (int i = 0; i < d_ - 1; ++i) rhs(rr++) = (i == x[std::size_t(b)]) ? 1.0 : 0.0;
    rhs(rr) = 1.0;
    return finish_safe_solve(reduced_pinv_ * rhs, x_index, full_rows_, d_, k_, x);
}

std::optional<SafeVector> SafeVectorSolver::solve_full(long x_index) const {
    std::vector<int> x = decode_guess(x_index, d_, k_);
    RealVector rhs(k_ * d_ + 1);
    for (int b = 0; b < k_; ++b)
        for (int i = 0; i < d_; ++i) rhs(b * d_ + i) = (i == x[std::size_t(b)]) ? 1.0 : 0.0;
    rhs(k_ * d_) = 1.0;
    return finish_safe_solve(full_pinv_ * rhs, x_index, full_rows_, d_, k_, x);
}

std::optional<SafeVector> solve_safe_vector(const HattedVectors& hv,
                                            const SpanClassification& cls,
                                            const std::vector<int>& x) {
    return SafeVectorSolver(hv, cls).solve(x);
}

Matrix Strategy::povm_element(std::size_t outcome_pos) const {
    const Outcome& o = outcomes[outcome_pos];
    Matrix f = double(d) * o.weight * (o.eta * o.eta.adjoint());
    if (outcome_pos == 0) f += residual;
    return f;
}

Matrix Strategy::povm_sum() const {
    const int d2 = d * d;
    Matrix sum = Matrix::Zero(d2, d2);
    for (const Outcome& o : outcomes) sum += double(d) * o.weight * (o.eta * o.eta.adjoint());
    sum += residual;
    return sum;
}

Strategy build_strategy(const BasisSet& bs, const JointDistribution& jd) {
    SpanClassification cls = rank_of_span(bs);
    if (cls.rank != bs.k * (bs.d - 1) + 1)
        throw std::invalid_argument("build_strategy: basis set is degenerate");
    if (std::abs(jd.total() - 1.0) > 1e-7)
        throw std::invalid_argument("build_strategy: distribution not normalized");
    TransitionTensor t = transition_tensor(bs);
    if (marginal_residual(jd, t) > 1e-7)
        throw std::invalid_argument("build_strategy: marginals do not match the basis set");

    const int d = bs.d, d2 = bs.d * bs.d;
    HattedVectors hv = hatted(bs);
    SafeVectorSolver solver(hv, cls);

    Strategy st;
    st.d = d;
    st.k = bs.k;
    st.S = Matrix::Identity(d, d) / std::sqrt(double(d));
    Matrix nsum = Matrix::Zero(d2, d2);
    for (auto& [idx, p] : jd.weights) {
        if (p <= 0) continue;
        auto sv = solver.solve(idx);
        if (!sv)
            throw std::runtime_error("build_strategy: safe vector missing (internal error)");
        nsum += double(d) * p * (sv->eta * sv->eta.adjoint());
        st.outcomes.push_back({idx, p, std::move(sv->eta)});
    }
    // On tomographically incomplete sets this is the projector onto the
    // orthogonal complement of the span; ~0 when complete.
    st.residual = Matrix::Identity(d2, d2) - nsum;
    return st;
}

namespace {

// (1 (x) S) acting on a doubled-space vector: row-major reshape H -> H S^T.
Vector apply_one_tensor_s(const Matrix& s, const Vector& v, int d) {
    Matrix h = reshape(v, d) * s.transpose();
    return unreshape(h, d);
}

}  // namespace

VerifyReport verify_strategy(const BasisSet& bs, const Strategy& st) {
    if (bs.d != st.d || bs.k != st.k)
        throw std::invalid_argument("verify_strategy: shape mismatch");
    const int d = bs.d, k = bs.k;
    HattedVectors hv = hatted(bs);

    std::vector<Vector> probes(std::size_t(k) * d);
    for (int b = 0; b < k; ++b)
        for (int i = 0; i < d; ++i)
            probes[std::size_t(b) * d + i] = apply_one_tensor_s(st.S, hv.at(b, i), d);

    VerifyReport rep;
    for (std::size_t pos = 0; pos < st.outcomes.size(); ++pos) {
        const auto& o = st.outcomes[pos];
        std::vector<int> x = decode_guess(o.index, d, k);
        double diag_mean = 0.0;
        for (int b = 0; b < k; ++b)
            for (int i = 0; i < d; ++i) {
                const Vector& v = probes[std::size_t(b) * d + i];
                double val = double(d) * o.weight * std::norm(o.eta.dot(v));
                if (pos == 0) val += (v.adjoint() * st.residual * v)(0).real();
                if (i == x[std::size_t(b)])
                    diag_mean += val / k;
                else
                    rep.max_offdiag = std::max(rep.max_offdiag, std::abs(val));
            }
        rep.lambda.emplace_back(o.index, diag_mean);
        rep.sum_check += diag_mean;
    }

    // rank-one elements have eigenvalue 0 in the orthogonal directions; the
    // designated outcome carries the residual and needs a full eigensolve
    if (!st.outcomes.empty()) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(st.povm_element(0));
        rep.min_eig = std::min(0.0, es.eigenvalues().minCoeff());
    }

    Matrix dev = st.povm_sum() - Matrix::Identity(d * d, d * d);
    rep.completeness = dev.cwiseAbs().maxCoeff();
    return rep;
}

JointDistribution extract_classical_model(const BasisSet& bs, const Strategy& st) {
    SpanClassification cls = rank_of_span(bs);
    if (cls.rank != bs.d * bs.d)
        throw std::invalid_argument("extract_classical_model: basis set not tomographically complete");
    VerifyReport rep = verify_strategy(bs, st);
    if (rep.max_offdiag >= 1e-8)
        throw std::invalid_argument("extract_classical_model: strategy fails verification");

    const int d = st.d;
    HattedVectors hv = hatted(bs);
    Vector w = apply_one_tensor_s(st.S, hv.omega, d);
    double norm = w.squaredNorm();  // = tr(S^* S)

    JointDistribution jd;
    jd.d = d;
    jd.k = st.k;
    double total = 0.0;
    std::vector<std::pair<long, double>> raw;
    for (std::size_t pos = 0; pos < st.outcomes.size(); ++pos) {
        const auto& o = st.outcomes[pos];
        double p = double(d) * o.weight * std::norm(o.eta.dot(w));
        if (pos == 0) p += (w.adjoint() * st.residual * w)(0).real();
        p /= norm;
        total += p;
        raw.emplace_back(o.index, p);
    }
    for (auto& [idx, p] : raw)
        if (p / total > 1e-12) jd.weights.emplace_back(idx, p / total);
    return jd;
}

Matrix reduced_state(const Strategy& st) { return st.S.adjoint() * st.S; }

}  // namespace meanking
