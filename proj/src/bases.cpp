#include "meanking/bases.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace meanking {

std::string to_string(SpanLabel label) {
    switch (label) {
        case SpanLabel::degenerate: return "degenerate";
        case SpanLabel::non_degenerate: return "non-degenerate";
        case SpanLabel::tomographically_complete: return "tomographically-complete";
    }
    return "?";
}

bool is_prime(int n) {
    if (n < 2) return false;
    for (int f = 2; f * f <= n; ++f)
        if (n % f == 0) return false;
    return true;
}

namespace {

Matrix haar_unitary(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix g(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            double re = gauss(rng);
            double im = gauss(rng);
            g(i, j) = Complex(re, im);
        }
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    // Fix the column phases so the triangular factor has positive diagonal;
    // without this the distribution is not Haar.
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < d; ++j) {
        Complex rjj = r(j, j);
        double a = std::abs(rjj);
        if (a > 0) q.col(j) *= rjj / a;
    }
    return q;
}

}  // namespace

BasisSet haar_random_basis_set(int d, int k, std::uint64_t seed) {
    if (d < 2) throw std::invalid_argument("haar_random_basis_set: d must be >= 2");
    if (k < 1) throw std::invalid_argument("haar_random_basis_set: k must be >= 1");
    std::mt19937_64 rng(seed);
    BasisSet bs;
    bs.d = d;
    bs.k = k;
    bs.bases.reserve(k);
    for (int b = 0; b < k; ++b) bs.bases.push_back(haar_unitary(d, rng));
    return bs;
}

BasisSet pauli_bases() {
    const double s = 1.0 / std::sqrt(2.0);
    const Complex I(0.0, 1.0);
    BasisSet bs;
    bs.d = 2;
    bs.k = 3;
    Matrix z(2, 2), x(2, 2), y(2, 2);
    z << 1, 0, 0, 1;
    x << s, s, s, -s;
    y << s, s, I * s, -I * s;
    bs.bases = {z, x, y};
    return bs;
}

BasisSet mub_basis_set(int d, int k) {
    if (!is_prime(d)) throw std::invalid_argument("mub_basis_set: d must be prime");
    if (k < 1 || k > d + 1) throw std::invalid_argument("mub_basis_set: k out of range");
    if (d == 2) {
        BasisSet bs = pauli_bases();
        bs.k = k;
        bs.bases.resize(k);
        return bs;
    }
    BasisSet bs;
    bs.d = d;
    bs.k = k;
    bs.bases.push_back(Matrix::Identity(d, d));
    const double norm = 1.0 / std::sqrt(double(d));
    for (int a = 0; a + 1 < k; ++a) {
        Matrix u(d, d);
        for (int i = 0; i < d; ++i)
            for (int m = 0; m < d; ++m) {
                long long e = (1LL * a * m * m + 1LL * i * m) % d;
                double phi = 2.0 * std::numbers::pi * double(e) / double(d);
                u(m, i) = norm * Complex(std::cos(phi), std::sin(phi));
            }
        bs.bases.push_back(u);
    }
    return bs;
}

double orthonormality_deviation(const BasisSet& bs) {
    double dev = 0.0;
    for (const Matrix& u : bs.bases) {
        Matrix g = u.adjoint() * u - Matrix::Identity(bs.d, bs.d);
        dev = std::max(dev, g.cwiseAbs().maxCoeff());
    }
    return dev;
}

void validate_basis_set(const BasisSet& bs, double tol) {
    if (bs.d < 2 || bs.k < 1) throw std::invalid_argument("BasisSet: d >= 2 and k >= 1 required");
    if (int(bs.bases.size()) != bs.k) throw std::invalid_argument("BasisSet: wrong basis count");
    for (const Matrix& u : bs.bases)
        if (u.rows() != bs.d || u.cols() != bs.d)
            throw std::invalid_argument("BasisSet: wrong vector shape");
    if (orthonormality_deviation(bs) > tol)
        throw std::invalid_argument("BasisSet: orthonormality violated");
}

TransitionTensor transition_tensor(const BasisSet& bs) {
    TransitionTensor t;
    t.d = bs.d;
    t.k = bs.k;
    t.data.assign(std::size_t(bs.k) * bs.k * bs.d * bs.d, 0.0);
    for (int b = 0; b < bs.k; ++b)
        for (int c = 0; c < bs.k; ++c) {
            Matrix ov = bs.bases[b].adjoint() * bs.bases[c];
            for (int i = 0; i < bs.d; ++i)
                for (int j = 0; j < bs.d; ++j)
                    t.at(b, c, i, j) = std::norm(ov(i, j)) / bs.d;
        }
    return t;
}

SpanClassification rank_of_span(const BasisSet& bs, double tol) {
    const int n = bs.k * bs.d;
    RealMatrix gram(n, n);
    for (int b = 0; b < bs.k; ++b)
        for (int c = 0; c < bs.k; ++c) {
            Matrix ov = bs.bases[b].adjoint() * bs.bases[c];
            for (int i = 0; i < bs.d; ++i)
                for (int j = 0; j < bs.d; ++j)
                    gram(b * bs.d + i, c * bs.d + j) = std::norm(ov(i, j));
        }
    Eigen::JacobiSVD<RealMatrix> svd(gram);
    const auto& sv = svd.singularValues();
    SpanClassification cls;
    double cutoff = sv.size() ? tol * sv(0) : 0.0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) ++cls.rank;
    const int d2 = bs.d * bs.d;
    if (cls.rank == d2)
        cls.label = SpanLabel::tomographically_complete;
    else if (cls.rank == bs.k * (bs.d - 1) + 1)
        cls.label = SpanLabel::non_degenerate;
    else
        cls.label = SpanLabel::degenerate;
    return cls;
}

double unbiasedness_check(const BasisSet& bs) {
    TransitionTensor t = transition_tensor(bs);
    const double d = bs.d;
    double dev = 0.0;
    for (int b = 0; b < bs.k; ++b)
        for (int c = 0; c < bs.k; ++c)
            for (int i = 0; i < bs.d; ++i)
                for (int j = 0; j < bs.d; ++j) {
                    double target = (b == c) ? (i == j ? 1.0 / d : 0.0) : 1.0 / (d * d);
                    dev = std::max(dev, std::abs(t.at(b, c, i, j) - target));
                }
    return dev;
}

}  // namespace meanking
