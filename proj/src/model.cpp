#include "meanking/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "meanking/simplex.hpp"

namespace meanking {

long pow_long(int base, int exp) {
    long r = 1;
    for (int i = 0; i < exp; ++i) {
        if (r > (1L << 62) / base) throw std::overflow_error("pow_long overflow");
        r *= base;
    }
    return r;
}

long encode_guess(const std::vector<int>& x, int d) {
    long idx = 0;
    for (int b = int(x.size()) - 1; b >= 0; --b) idx = idx * d + x[std::size_t(b)];
    return idx;
}

std::vector<int> decode_guess(long index, int d, int k) {
    std::vector<int> x(std::size_t(k), 0);
    for (int b = 0; b < k; ++b) {
        x[std::size_t(b)] = int(index % d);
        index /= d;
    }
    return x;
}

double JointDistribution::total() const {
    double s = 0.0;
    for (auto& [i, p] : weights) s += p;
    return s;
}

JointDistribution JointDistribution::uniform(int d, int k) {
    JointDistribution jd;
    jd.d = d;
    jd.k = k;
    long n = pow_long(d, k);
    double w = 1.0 / double(n);
    jd.weights.reserve(std::size_t(n));
    for (long i = 0; i < n; ++i) jd.weights.emplace_back(i, w);
    return jd;
}

RealMatrix marginal(const JointDistribution& jd, int b, int c) {
    if (b < 0 || b >= jd.k || c < 0 || c >= jd.k)
        throw std::invalid_argument("marginal: basis index out of range");
    RealMatrix m = RealMatrix::Zero(jd.d, jd.d);
    long db = pow_long(jd.d, b), dc = pow_long(jd.d, c);
    for (auto& [idx, p] : jd.weights) {
        int xb = int((idx / db) % jd.d);
        int xc = int((idx / dc) % jd.d);
        m(xb, xc) += p;
    }
    return m;
}

LpModelResult solve_model_lp(const TransitionTensor& t, long variable_cap) {
    const int d = t.d, k = t.k;
    long n = pow_long(d, k);
    if (n > variable_cap) throw std::invalid_argument("solve_model_lp: variable cap exceeded");

    LpModelResult res;
    if (k == 1) {
        // no pair constraints; the uniform distribution is always a model
        res.feasible = true;
        res.value = 1.0;
        res.jd = JointDistribution::uniform(d, k);
        return res;
    }

    // rows: for each unordered pair (b<c), a d x d block of inequalities
    std::vector<std::pair<int, int>> pairs;
    for (int b = 0; b < k; ++b)
        for (int c = b + 1; c < k; ++c) pairs.emplace_back(b, c);
    const int m = int(pairs.size()) * d * d;

    std::vector<double> rhs(std::size_t(m), 0.0);
    for (std::size_t pi = 0; pi < pairs.size(); ++pi)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                rhs[pi * d * d + std::size_t(i) * d + j] =
                    t.at(pairs[pi].first, pairs[pi].second, i, j);

    std::vector<long> dpow(std::size_t(k), 0);
    for (int b = 0; b < k; ++b) dpow[std::size_t(b)] = pow_long(d, b);

    std::vector<int> rowbuf(pairs.size());
    auto column_rows = [&](long x) -> const std::vector<int>& {
        for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
            int xb = int((x / dpow[std::size_t(pairs[pi].first)]) % d);
            int xc = int((x / dpow[std::size_t(pairs[pi].second)]) % d);
            rowbuf[pi] = int(pi) * d * d + xb * d + xc;
        }
        return rowbuf;
    };

    std::vector<double> cost(std::size_t(n), 1.0);
    SimplexResult sr = simplex_max(m, n, rhs, column_rows, cost);
    if (sr.status == SimplexResult::Status::unbounded)
        throw std::runtime_error("solve_model_lp: unbounded pivot (internal error)");
    if (sr.status == SimplexResult::Status::iteration_limit)
        throw std::runtime_error("solve_model_lp: iteration limit reached");

    res.value = sr.objective;
    res.feasible = sr.objective >= 1.0 - 1e-7;
    res.iterations = sr.iterations;
    res.jd.d = d;
    res.jd.k = k;
    for (long x = 0; x < n; ++x)
        if (sr.solution[std::size_t(x)] > 1e-12)
            res.jd.weights.emplace_back(x, sr.solution[std::size_t(x)]);
    return res;
}

double marginal_residual(const JointDistribution& jd, const TransitionTensor& t) {
    double r = 0.0;
    for (int b = 0; b < t.k; ++b)
        for (int c = b + 1; c < t.k; ++c) {
            RealMatrix m = marginal(jd, b, c);
            for (int i = 0; i < t.d; ++i)
                for (int j = 0; j < t.d; ++j)
                    r = std::max(r, std::abs(m(i, j) - t.at(b, c, i, j)));
        }
    return r;
}

bool bell_membership(const BellTriple& tr) {
    double cab = 4.0 * tr.q_ab - 1.0;
    double cbc = 4.0 * tr.q_bc - 1.0;
    double cca = 4.0 * tr.q_ca - 1.0;
    const double tol = 1e-12;
    return 1.0 + cab + cbc + cca >= -tol && 1.0 + cab - cbc - cca >= -tol &&
           1.0 - cab + cbc - cca >= -tol && 1.0 - cab - cbc + cca >= -tol;
}

BellTriple bell_triple_of(const BasisSet& bs) {
    if (bs.d != 2 || bs.k != 3)
        throw std::invalid_argument("bell_triple_of: requires d=2, k=3");
    TransitionTensor t = transition_tensor(bs);
    return {t.at(0, 1, 0, 0), t.at(1, 2, 0, 0), t.at(2, 0, 0, 0)};
}

TransitionTensor tensor_from_triple(const BellTriple& tr) {
    TransitionTensor t;
    t.d = 2;
    t.k = 3;
    t.data.assign(3 * 3 * 2 * 2, 0.0);
    const double q[3] = {tr.q_ab, tr.q_bc, tr.q_ca};
    const std::pair<int, int> pr[3] = {{0, 1}, {1, 2}, {2, 0}};
    for (int b = 0; b < 3; ++b) {
        t.at(b, b, 0, 0) = 0.5;
        t.at(b, b, 1, 1) = 0.5;
    }
    for (int p = 0; p < 3; ++p) {
        auto [b, c] = pr[p];
        t.at(b, c, 0, 0) = t.at(c, b, 0, 0) = q[p];
        t.at(b, c, 1, 1) = t.at(c, b, 1, 1) = q[p];
        t.at(b, c, 0, 1) = t.at(c, b, 1, 0) = 0.5 - q[p];
        t.at(b, c, 1, 0) = t.at(c, b, 0, 1) = 0.5 - q[p];
    }
    return t;
}

namespace {

double fit_residual(const std::vector<double>& p, const TransitionTensor& t,
                    const std::vector<long>& dpow) {
    const int d = t.d, k = t.k;
    double r = 0.0;
    RealMatrix m(d, d);
    for (int b = 0; b < k; ++b)
        for (int c = b + 1; c < k; ++c) {
            m.setZero();
            for (long x = 0; x < long(p.size()); ++x) {
                if (p[std::size_t(x)] == 0.0) continue;
                m(int((x / dpow[std::size_t(b)]) % d), int((x / dpow[std::size_t(c)]) % d)) +=
                    p[std::size_t(x)];
            }
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    r = std::max(r, std::abs(m(i, j) - t.at(b, c, i, j)));
        }
    return r;
}

}  // namespace

IterativeFitResult iterative_fit(const TransitionTensor& t, int max_sweeps, double tol,
                                 long variable_cap) {
    const int d = t.d, k = t.k;
    long n = pow_long(d, k);
    if (n > variable_cap) throw std::invalid_argument("iterative_fit: variable cap exceeded");

    std::vector<long> dpow(std::size_t(k), 0);
    for (int b = 0; b < k; ++b) dpow[std::size_t(b)] = pow_long(d, b);

    std::vector<double> p(std::size_t(n), 1.0 / double(n)), prev;
    IterativeFitResult res;
    res.residual = fit_residual(p, t, dpow);

    RealMatrix m(d, d), ratio(d, d);
    for (int sweep = 0; sweep < max_sweeps && res.residual > tol; ++sweep) {
        prev = p;
        for (int b = 0; b < k; ++b)
            for (int c = b + 1; c < k; ++c) {
                m.setZero();
                for (long x = 0; x < n; ++x)
                    m(int((x / dpow[std::size_t(b)]) % d), int((x / dpow[std::size_t(c)]) % d)) +=
                        p[std::size_t(x)];
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < d; ++j)
                        ratio(i, j) = m(i, j) > 0 ? t.at(b, c, i, j) / m(i, j) : 1.0;
                for (long x = 0; x < n; ++x)
                    p[std::size_t(x)] *=
                        ratio(int((x / dpow[std::size_t(b)]) % d), int((x / dpow[std::size_t(c)]) % d));
            }
        double r = fit_residual(p, t, dpow);
        if (r > res.residual) {
            // damp: mix with the previous iterate
            for (long x = 0; x < n; ++x)
                p[std::size_t(x)] = 0.5 * (p[std::size_t(x)] + prev[std::size_t(x)]);
            r = fit_residual(p, t, dpow);
            ++res.damping_events;
        }
        res.residual = r;
        res.sweeps = sweep + 1;
    }

    res.jd.d = d;
    res.jd.k = k;
    for (long x = 0; x < n; ++x)
        if (p[std::size_t(x)] > 1e-12) res.jd.weights.emplace_back(x, p[std::size_t(x)]);
    return res;
}

double debias_objective(const BasisSet& bs) {
    const double d2 = double(bs.d) * bs.d;
    double f = 0.0;
    for (int a = 0; a < bs.k; ++a)
        for (int b = a + 1; b < bs.k; ++b) {
            Matrix v = bs.bases[std::size_t(a)].adjoint() * bs.bases[std::size_t(b)];
            for (int i = 0; i < bs.d; ++i)
                for (int j = 0; j < bs.d; ++j) {
                    double w = std::norm(v(i, j));
                    f += w * w / d2;
                }
        }
    return f;
}

namespace {

// Anti-hermitian Riemannian gradients G_b for the left-translated
// parametrization U_b <- exp(-eta G_b) U_b.
std::vector<Matrix> debias_gradient(const BasisSet& bs) {
    const int d = bs.d, k = bs.k;
    const double d2 = double(d) * d;
    std::vector<Matrix> grads{std::size_t(k)};
    for (int b = 0; b < k; ++b) {
        Matrix euc = Matrix::Zero(d, d);  // dF/d(conj U_b)
        for (int a = 0; a < k; ++a) {
            if (a == b) continue;
            Matrix v = bs.bases[std::size_t(a)].adjoint() * bs.bases[std::size_t(b)];
            Matrix dmat(d, d);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) dmat(i, j) = (2.0 / d2) * std::norm(v(i, j)) * v(i, j);
            euc += bs.bases[std::size_t(a)] * dmat;
        }
        Matrix bmat = euc * bs.bases[std::size_t(b)].adjoint();
        grads[std::size_t(b)] = 0.5 * (bmat - bmat.adjoint());
    }
    return grads;
}

Matrix expm_antihermitian(const Matrix& g, double scale) {
    // exp(scale * g) with g anti-hermitian, via the hermitian matrix i*g
    Matrix h = Complex(0, 1) * g;
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    Vector phases(h.rows());
    for (int i = 0; i < h.rows(); ++i) {
        double t = -scale * es.eigenvalues()(i);
        phases(i) = Complex(std::cos(t), std::sin(t));
    }
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

void reorthonormalize(BasisSet& bs) {
    for (Matrix& u : bs.bases) {
        Eigen::HouseholderQR<Matrix> qr(u);
        Matrix q = qr.householderQ();
        Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
        for (int j = 0; j < bs.d; ++j) {
            Complex rjj = r(j, j);
            double a = std::abs(rjj);
            if (a > 0) q.col(j) *= rjj / a;
        }
        u = q;
    }
}

}  // namespace

DebiasResult debias(const BasisSet& bs, int max_steps, double tol) {
    DebiasResult res;
    res.bs = bs;
    res.objective = debias_objective(bs);
    double eta = 0.1;

    for (int step = 0; step < max_steps; ++step) {
        std::vector<Matrix> grads = debias_gradient(res.bs);
        double gnorm2 = 0.0;
        for (const Matrix& g : grads) gnorm2 += g.squaredNorm();
        if (std::sqrt(gnorm2) < tol) {
            res.converged = true;
            break;
        }

        // Armijo backtracking; slope along -G is -2 |G|^2
        bool accepted = false;
        eta = std::min(eta * 2.0, 1.0);
        while (eta > 1e-14) {
            BasisSet trial = res.bs;
            for (int b = 0; b < bs.k; ++b)
                trial.bases[std::size_t(b)] =
                    expm_antihermitian(grads[std::size_t(b)], -eta) * trial.bases[std::size_t(b)];
            double f = debias_objective(trial);
            if (f <= res.objective - 1e-4 * eta * 2.0 * gnorm2) {
                double rel = (res.objective - f) / std::max(res.objective, 1e-300);
                res.bs = std::move(trial);
                res.objective = f;
                res.steps = step + 1;
                res.trace.push_back(f);
                accepted = true;
                if (rel < tol) res.converged = true;
                break;
            }
            eta *= 0.5;
        }
        if (!accepted) break;  // line search exhausted; return best iterate
        if (res.converged) break;
        if ((step + 1) % 50 == 0) reorthonormalize(res.bs);
    }
    reorthonormalize(res.bs);
    res.objective = debias_objective(res.bs);
    return res;
}

}  // namespace meanking
