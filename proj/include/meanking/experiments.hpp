#ifndef MEANKING_EXPERIMENTS_HPP
#define MEANKING_EXPERIMENTS_HPP

#include <functional>
#include <vector>

#include "meanking/bases.hpp"
#include "meanking/sdp.hpp"
#include "meanking/strategy.hpp"

#ifdef MEANKING_HAVE_OPENMP
#include <omp.h>
#endif

namespace meanking {

/// Runs fn(sample_index) for indices 0..n-1 and collects the results in
/// order. jobs == 1 is the serial reference path; jobs > 1 uses OpenMP.
/// Results are identical either way: every sample derives its own seed, so
/// nothing depends on scheduling.
template <typename T>
std::vector<T> run_ensemble(long n, int jobs, const std::function<T(long)>& fn) {
    std::vector<T> out;
    out.resize(std::size_t(n));
    if (jobs <= 1) {
        for (long i = 0; i < n; ++i) out[std::size_t(i)] = fn(i);
        return out;
    }
#ifdef MEANKING_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
    for (long i = 0; i < n; ++i) out[std::size_t(i)] = fn(i);
#else
    for (long i = 0; i < n; ++i) out[std::size_t(i)] = fn(i);
#endif
    return out;
}

/// Wilson score interval at 95%.
struct BinomialInterval {
    double lo = 0.0, hi = 0.0;
};
BinomialInterval wilson_interval(long successes, long trials);

struct GameRound {
    int basis;
    int king_outcome;
    long alice_outcome;
    int answer;
};

struct GameTranscript {
    long rounds = 0;
    long failures = 0;
    std::vector<GameRound> records;
    std::uint64_t seed = 0;
};

/// Plays the retrodiction game: king picks a basis uniformly, measures the
/// entangled state, Alice measures her POVM and answers x(b). The POVM
/// outcome distributions per (basis, outcome) pair are precomputed, since
/// the post-measurement state depends only on that pair.
GameTranscript run_game(const BasisSet& bs, const Strategy& st, long rounds, std::uint64_t seed,
                        bool keep_records = false);

struct ExperimentReport {
    int d = 0, k = 0;
    long samples = 0;
    double p_s = 0.0;  // fraction of samples with a classical model
    BinomialInterval p_s_interval;
    double e_s = 0.0;  // mean unambiguous-retrodiction value
    double e_s_stderr = 0.0;
    double max_sdp_gap = 0.0;
    double max_lp_residual = 0.0;  // marginal residual of feasible certificates
    std::uint64_t seed = 0;
    double seconds = 0.0;
};

/// One row of the Haar-ensemble table: N random (d, k=d+1) basis sets, LP
/// feasibility fraction and mean SDP value.
ExperimentReport estimate_table_row(int d, long samples, std::uint64_t seed, int jobs = 1);

struct FractionReport {
    long samples = 0;
    long hits = 0;
    double fraction = 0.0;
    BinomialInterval interval;
    std::uint64_t seed = 0;
};

/// Fraction of Haar-random qubit triples admitting a classical model
/// (Bell-tetrahedron membership); tends to 1/3.
FractionReport qubit_third(long samples, std::uint64_t seed, int jobs = 1);

struct Fig1Sample {
    BellTriple triple;
    bool classical = false;
};

/// Haar-random qubit triples with membership flags, for external plotting.
std::vector<Fig1Sample> fig1_samples(long samples, std::uint64_t seed, int jobs = 1);

}  // namespace meanking

#endif
