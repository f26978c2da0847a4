#include "meanking/experiments.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace meanking {

BinomialInterval wilson_interval(long successes, long trials) {
    if (trials <= 0) return {0.0, 1.0};
    const double z = 1.959963984540054;  // 97.5% normal quantile
    double n = double(trials);
    double phat = double(successes) / n;
    double z2 = z * z;
    double denom = 1.0 + z2 / n;
    double center = (phat + z2 / (2 * n)) / denom;
    double half = z * std::sqrt(phat * (1 - phat) / n + z2 / (4 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

namespace {

using RowMajorMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Vector apply_one_tensor_s(const Matrix& s, const Vector& v, int d) {
    Matrix h = Eigen::Map<const RowMajorMatrix>(v.data(), d, d) * s.transpose();
    Vector out(d * d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) out(a * d + b) = h(a, b);
    return out;
}

int sample_cdf(const std::vector<double>& cdf, double u) {
    auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) return int(cdf.size()) - 1;
    return int(it - cdf.begin());
}

}  // namespace

GameTranscript run_game(const BasisSet& bs, const Strategy& st, long rounds, std::uint64_t seed,
                        bool keep_records) {
    const int d = bs.d, k = bs.k;
    {
        VerifyReport rep = verify_strategy(bs, st);
        if (rep.max_offdiag >= 1e-8)
            throw std::invalid_argument("run_game: strategy fails verification");
    }

    // Psi = (1 (x) S) Omega; row-major reshape of Psi is S^T
    HattedVectors hv = hatted(bs);
    Vector psi = apply_one_tensor_s(st.S, hv.omega, d);
    psi /= psi.norm();

    // King outcome distribution per basis, collapsed state per (b,i), and
    // Alice's outcome distribution for each collapsed state.
    std::vector<std::vector<double>> king_cdf{std::size_t(k)};
    std::vector<std::vector<double>> alice_cdf(std::size_t(k) * d);
    for (int b = 0; b < k; ++b) {
        std::vector<double> probs(std::size_t(d), 0.0);
        for (int i = 0; i < d; ++i) {
            // (P_b^i (x) 1) psi = <phi_i| rows of the reshape
            Vector phi = bs.vec(b, i);
            Matrix m = Eigen::Map<const RowMajorMatrix>(psi.data(), d, d);
            Vector row = (phi.adjoint() * m).transpose();  // length d
            Vector collapsed = Vector::Zero(d * d);
            for (int a = 0; a < d; ++a)
                for (int be = 0; be < d; ++be) collapsed(a * d + be) = phi(a) * row(be);
            double pnorm = collapsed.squaredNorm();
            probs[std::size_t(i)] = pnorm;
            std::vector<double>& cdf = alice_cdf[std::size_t(b) * d + i];
            cdf.assign(st.outcomes.size(), 0.0);
            if (pnorm > 1e-15) {
                collapsed /= std::sqrt(pnorm);
                double acc = 0.0;
                for (std::size_t pos = 0; pos < st.outcomes.size(); ++pos) {
                    const auto& o = st.outcomes[pos];
                    double w = double(d) * o.weight * std::norm(o.eta.dot(collapsed));
                    if (pos == 0)
                        w += (collapsed.adjoint() * st.residual * collapsed)(0).real();
                    if (w < -1e-12)
                        throw std::runtime_error("run_game: negative outcome probability");
                    acc += std::max(w, 0.0);
                    cdf[pos] = acc;
                }
                if (std::abs(acc - 1.0) > 1e-9)
                    throw std::runtime_error("run_game: outcome distribution does not normalize");
                for (double& c : cdf) c /= acc;
            }
        }
        double acc = 0.0;
        std::vector<double>& cdf = king_cdf[std::size_t(b)];
        cdf.resize(std::size_t(d));
        for (int i = 0; i < d; ++i) {
            acc += probs[std::size_t(i)];
            cdf[std::size_t(i)] = acc;
        }
        if (std::abs(acc - 1.0) > 1e-9)
            throw std::runtime_error("run_game: king distribution does not normalize");
        for (double& c : cdf) c /= acc;
    }

    GameTranscript tr;
    tr.rounds = rounds;
    tr.seed = seed;
    if (keep_records) tr.records.reserve(std::size_t(rounds));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_int_distribution<int> pick_basis(0, k - 1);
    for (long r = 0; r < rounds; ++r) {
        int b = pick_basis(rng);
        int i = sample_cdf(king_cdf[std::size_t(b)], unif(rng));
        std::size_t pos = std::size_t(sample_cdf(alice_cdf[std::size_t(b) * d + i], unif(rng)));
        long x = st.outcomes[pos].index;
        int answer = decode_guess(x, d, k)[std::size_t(b)];
        if (answer != i) ++tr.failures;
        if (keep_records) tr.records.push_back({b, i, x, answer});
    }
    return tr;
}

ExperimentReport estimate_table_row(int d, long samples, std::uint64_t seed, int jobs) {
    const int k = d + 1;
    auto t0 = std::chrono::steady_clock::now();

    struct Sample {
        bool feasible;
        double value;
        double gap;
        double lp_residual;
    };
    std::function<Sample(long)> one = [&](long i) -> Sample {
        BasisSet bs = haar_random_basis_set(d, k, mix_seed(seed, std::uint64_t(i)));
        TransitionTensor t = transition_tensor(bs);
        LpModelResult lp = solve_model_lp(t);
        double resid = lp.feasible ? marginal_residual(lp.jd, t) : 0.0;
        SdpResult sdp = unambiguous_value(bs, kDefaultVariableCap, 1e-13);
        return {lp.feasible, sdp.value, sdp.gap, resid};
    };
    std::vector<Sample> results = run_ensemble<Sample>(samples, jobs, one);

    ExperimentReport rep;
    rep.d = d;
    rep.k = k;
    rep.samples = samples;
    rep.seed = seed;
    long hits = 0;
    double sum = 0.0, sumsq = 0.0;
    for (const Sample& s : results) {
        if (s.feasible) ++hits;
        sum += s.value;
        sumsq += s.value * s.value;
        rep.max_sdp_gap = std::max(rep.max_sdp_gap, s.gap);
        rep.max_lp_residual = std::max(rep.max_lp_residual, s.lp_residual);
    }
    rep.p_s = double(hits) / double(samples);
    rep.p_s_interval = wilson_interval(hits, samples);
    rep.e_s = sum / double(samples);
    double var = std::max(0.0, sumsq / double(samples) - rep.e_s * rep.e_s);
    rep.e_s_stderr = std::sqrt(var / double(samples));
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

FractionReport qubit_third(long samples, std::uint64_t seed, int jobs) {
    if (samples < 1) throw std::invalid_argument("qubit_third: samples must be >= 1");
    std::function<char(long)> one = [&](long i) -> char {
        BasisSet bs = haar_random_basis_set(2, 3, mix_seed(seed, std::uint64_t(i)));
        return bell_membership(bell_triple_of(bs)) ? 1 : 0;
    };
    std::vector<char> flags = run_ensemble<char>(samples, jobs, one);
    FractionReport rep;
    rep.samples = samples;
    rep.seed = seed;
    for (char f : flags) rep.hits += f;
    rep.fraction = double(rep.hits) / double(samples);
    rep.interval = wilson_interval(rep.hits, samples);
    return rep;
}

std::vector<Fig1Sample> fig1_samples(long samples, std::uint64_t seed, int jobs) {
    if (samples < 1) throw std::invalid_argument("fig1_samples: samples must be >= 1");
    std::function<Fig1Sample(long)> one = [&](long i) -> Fig1Sample {
        BasisSet bs = haar_random_basis_set(2, 3, mix_seed(seed, std::uint64_t(i)));
        BellTriple tr = bell_triple_of(bs);
        return {tr, bell_membership(tr)};
    };
    return run_ensemble<Fig1Sample>(samples, jobs, one);
}

}  // namespace meanking
