#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "meanking/bases.hpp"
#include "meanking/json_io.hpp"

using namespace meanking;

TEST_CASE("haar basis sets are orthonormal and deterministic") {
    BasisSet bs = haar_random_basis_set(2, 3, 42);
    CHECK(orthonormality_deviation(bs) < 1e-12);

    BasisSet again = haar_random_basis_set(2, 3, 42);
    for (int b = 0; b < 3; ++b)
        CHECK((bs.bases[b] - again.bases[b]).cwiseAbs().maxCoeff() == 0.0);

    BasisSet other = haar_random_basis_set(2, 3, 43);
    CHECK((bs.bases[0] - other.bases[0]).cwiseAbs().maxCoeff() > 1e-6);

    CHECK_THROWS_AS(haar_random_basis_set(1, 3, 0), std::invalid_argument);
    CHECK_THROWS_AS(haar_random_basis_set(2, 0, 0), std::invalid_argument);
}

TEST_CASE("haar overlap statistics match the 1/d law") {
    // mean of |<Phi_1^1|Phi_2^1>|^2 over Haar pairs is 1/d; cross-checked
    // against direct sampling of a uniform unit vector below
    const int trials = 100000;
    double acc = 0.0;
    for (int t = 0; t < trials; ++t) {
        BasisSet bs = haar_random_basis_set(3, 4, mix_seed(5, t));
        acc += std::norm(bs.vec(0, 0).dot(bs.vec(1, 0)));
    }
    CHECK(acc / trials == doctest::Approx(1.0 / 3.0).epsilon(0.03));

    // oracle: random unit vector against a fixed one, by normalizing
    // complex gaussians (unitary invariance of the gaussian measure)
    std::mt19937_64 rng(99);
    std::normal_distribution<double> gauss;
    double oracle = 0.0;
    for (int t = 0; t < trials; ++t) {
        Vector v(3);
        for (int i = 0; i < 3; ++i) v(i) = Complex(gauss(rng), gauss(rng));
        v.normalize();
        oracle += std::norm(v(0));
    }
    CHECK(oracle / trials == doctest::Approx(1.0 / 3.0).epsilon(0.03));
    CHECK(std::abs(acc / trials - oracle / trials) < 0.01);
}

TEST_CASE("pauli bases") {
    BasisSet bs = pauli_bases();
    CHECK(bs.d == 2);
    CHECK(bs.k == 3);
    CHECK(unbiasedness_check(bs) < 1e-12);

    TransitionTensor t = transition_tensor(bs);
    for (int b = 0; b < 3; ++b)
        for (int c = 0; c < 3; ++c)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    if (b == c)
                        CHECK(t.at(b, c, i, j) == doctest::Approx(i == j ? 0.5 : 0.0).epsilon(1e-12));
                    else
                        CHECK(t.at(b, c, i, j) == doctest::Approx(0.25).epsilon(1e-12));
                }

    SpanClassification cls = rank_of_span(bs);
    CHECK(cls.rank == 4);
    CHECK(cls.label == SpanLabel::tomographically_complete);
}

TEST_CASE("mub construction") {
    SUBCASE("d=3 full family is unbiased") {
        BasisSet bs = mub_basis_set(3, 4);
        CHECK(orthonormality_deviation(bs) < 1e-12);
        CHECK(unbiasedness_check(bs) < 1e-12);
        SpanClassification cls = rank_of_span(bs);
        CHECK(cls.rank == 9);
        CHECK(cls.label == SpanLabel::tomographically_complete);
    }
    SUBCASE("d=5 rank is k(d-1)+1") {
        BasisSet bs = mub_basis_set(5, 6);
        CHECK(unbiasedness_check(bs) < 1e-12);
        CHECK(rank_of_span(bs).rank == 25);
        CHECK(rank_of_span(bs).label == SpanLabel::tomographically_complete);

        BasisSet partial = mub_basis_set(5, 3);
        SpanClassification cls = rank_of_span(partial);
        CHECK(cls.rank == 3 * 4 + 1);
        CHECK(cls.label == SpanLabel::non_degenerate);
    }
    SUBCASE("d=2 falls back to the pauli eigenbases") {
        BasisSet bs = mub_basis_set(2, 3);
        BasisSet p = pauli_bases();
        for (int b = 0; b < 3; ++b)
            CHECK((bs.bases[b] - p.bases[b]).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("rejects invalid input") {
        CHECK_THROWS_AS(mub_basis_set(4, 3), std::invalid_argument);
        CHECK_THROWS_AS(mub_basis_set(6, 3), std::invalid_argument);
        CHECK_THROWS_AS(mub_basis_set(3, 5), std::invalid_argument);
        CHECK_THROWS_AS(mub_basis_set(3, 0), std::invalid_argument);
    }
}

TEST_CASE("transition tensor invariants") {
    BasisSet bs = haar_random_basis_set(3, 4, 11);
    TransitionTensor t = transition_tensor(bs);
    for (int b = 0; b < 4; ++b)
        for (int c = 0; c < 4; ++c) {
            double total = 0.0;
            for (int i = 0; i < 3; ++i) {
                double rowsum = 0.0;
                for (int j = 0; j < 3; ++j) {
                    total += t.at(b, c, i, j);
                    rowsum += t.at(b, c, i, j);
                    CHECK(t.at(b, c, i, j) == doctest::Approx(t.at(c, b, j, i)).epsilon(1e-12));
                }
                CHECK(rowsum == doctest::Approx(1.0 / 3.0).epsilon(1e-12));  // uniform marginals
            }
            CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        }
    for (int b = 0; b < 4; ++b)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                CHECK(t.at(b, b, i, j) == doctest::Approx(i == j ? 1.0 / 3 : 0.0).epsilon(1e-12));
}

TEST_CASE("identical bases give perfectly correlated pairs") {
    BasisSet bs = haar_random_basis_set(2, 1, 3);
    bs.k = 3;
    bs.bases = {bs.bases[0], bs.bases[0], bs.bases[0]};
    TransitionTensor t = transition_tensor(bs);
    for (int b = 0; b < 3; ++b)
        for (int c = 0; c < 3; ++c) CHECK(t.at(b, c, 0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    // off-diagonal deviation from the unbiasedness target is 1/d - 1/d^2
    CHECK(unbiasedness_check(bs) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("rank classification of degenerate configurations") {
    SUBCASE("repeated basis") {
        BasisSet bs = pauli_bases();
        bs.bases[2] = bs.bases[0];
        SpanClassification cls = rank_of_span(bs);
        CHECK(cls.rank == 3);
        CHECK(cls.label == SpanLabel::degenerate);
    }
    SUBCASE("coplanar but distinct bloch vectors") {
        // Bloch vectors (1,0,0), (0,1,0), (1,1,0)/sqrt(2); projectors span
        // only a 3-dimensional space
        auto bloch_basis = [](double nx, double ny, double nz) {
            Matrix u(2, 2);
            Matrix sigma(2, 2);
            sigma << nz, Complex(nx, -ny), Complex(nx, ny), -nz;
            Eigen::SelfAdjointEigenSolver<Matrix> es(sigma);
            u.col(0) = es.eigenvectors().col(1);  // +1 eigenvector
            u.col(1) = es.eigenvectors().col(0);
            return u;
        };
        const double s = 1.0 / std::sqrt(2.0);
        BasisSet bs;
        bs.d = 2;
        bs.k = 3;
        bs.bases = {bloch_basis(1, 0, 0), bloch_basis(0, 1, 0), bloch_basis(s, s, 0)};
        SpanClassification cls = rank_of_span(bs);
        CHECK(cls.rank == 3);
        CHECK(cls.label == SpanLabel::degenerate);
    }
}

TEST_CASE("rank is invariant under a global unitary rotation") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        BasisSet bs = haar_random_basis_set(3, 4, mix_seed(23, trial));
        SpanClassification before = rank_of_span(bs);
        BasisSet rotated = bs;
        Matrix u = haar_random_basis_set(3, 1, mix_seed(29, trial)).bases[0];
        for (Matrix& m : rotated.bases) m = u * m;
        SpanClassification after = rank_of_span(rotated);
        CHECK(before.rank == after.rank);
        CHECK(before.label == after.label);
    }
}

TEST_CASE("haar sets are unbiased only on a measure-zero set") {
    for (int trial = 0; trial < 20; ++trial)
        CHECK(unbiasedness_check(haar_random_basis_set(2, 3, mix_seed(31, trial))) > 1e-8);
}

TEST_CASE("basis set json round trip and validation") {
    BasisSet bs = haar_random_basis_set(3, 2, 77);
    BasisSet back = basis_set_from_json(basis_set_to_json(bs));
    CHECK(back.d == 3);
    CHECK(back.k == 2);
    for (int b = 0; b < 2; ++b)
        CHECK((bs.bases[b] - back.bases[b]).cwiseAbs().maxCoeff() < 1e-15);

    // non-orthonormal input must be rejected
    BasisSet bad = bs;
    bad.bases[0](0, 0) += 1e-3;
    CHECK_THROWS_AS(basis_set_from_json(basis_set_to_json(bad)), std::invalid_argument);
    CHECK_THROWS_AS(basis_set_from_json("{\"d\":2}"), std::invalid_argument);
    CHECK_THROWS_AS(basis_set_from_json("not json"), std::invalid_argument);
}
