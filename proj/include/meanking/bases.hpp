#ifndef MEANKING_BASES_HPP
#define MEANKING_BASES_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "meanking/common.hpp"

namespace meanking {

/// A collection of k orthonormal bases of a d-dimensional complex space.
/// bases[b] is a d x d unitary whose column i is the i-th basis vector.
struct BasisSet {
    int d = 0;
    int k = 0;
    std::vector<Matrix> bases;

    const Matrix& basis(int b) const { return bases[b]; }
    Vector vec(int b, int i) const { return bases[b].col(i); }
};

/// Pairwise joint probabilities p_bc(i,j) = (1/d)|<Phi_b^i|Phi_c^j>|^2.
struct TransitionTensor {
    int d = 0;
    int k = 0;
    std::vector<double> data;  // flat [b][c][i][j]

    double& at(int b, int c, int i, int j) {
        return data[((b * k + c) * d + i) * d + j];
    }
    double at(int b, int c, int i, int j) const {
        return data[((b * k + c) * d + i) * d + j];
    }
};

enum class SpanLabel { degenerate, non_degenerate, tomographically_complete };

struct SpanClassification {
    int rank = 0;
    SpanLabel label = SpanLabel::degenerate;
};

std::string to_string(SpanLabel label);

/// k independent Haar-distributed bases (Ginibre + QR with the phase fix
/// that makes the distribution exactly Haar). Deterministic per seed.
BasisSet haar_random_basis_set(int d, int k, std::uint64_t seed);

/// Eigenbases of sigma_z, sigma_x, sigma_y, in that order.
BasisSet pauli_bases();

/// First k bases of the standard prime-dimension MUB family:
/// computational basis, then for a = 0..d-1 the columns
/// (1/sqrt(d)) w^(a m^2 + i m), w = exp(2 pi i / d). d=2 maps to pauli_bases().
BasisSet mub_basis_set(int d, int k);

bool is_prime(int n);

/// Orthonormality check: max |<i|j> - delta_ij| over all bases.
double orthonormality_deviation(const BasisSet& bs);
void validate_basis_set(const BasisSet& bs, double tol = 1e-8);

TransitionTensor transition_tensor(const BasisSet& bs);

/// Numerical rank of the kd x kd Gram matrix M_{bi,cj} = |<Phi_b^i|Phi_c^j>|^2,
/// singular values below tol * sigma_max counted as zero.
SpanClassification rank_of_span(const BasisSet& bs, double tol = 1e-9);

/// max |p_bc(i,j) - (delta_bc delta_ij / d + (1-delta_bc)/d^2)|.
double unbiasedness_check(const BasisSet& bs);

}  // namespace meanking

#endif
