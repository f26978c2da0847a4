#ifndef MEANKING_COMMON_HPP
#define MEANKING_COMMON_HPP

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <random>

namespace meanking {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

// splitmix64 finalizer, used to derive independent per-sample seeds so
// parallel ensemble runs do not depend on scheduling.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace meanking

#endif
