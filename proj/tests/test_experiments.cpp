#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "meanking/experiments.hpp"
#include "meanking/json_io.hpp"

using namespace meanking;

TEST_CASE("wilson interval") {
    BinomialInterval iv = wilson_interval(50, 100);
    CHECK(iv.lo < 0.5);
    CHECK(iv.hi > 0.5);
    CHECK(iv.hi - iv.lo < 0.25);
    // tighter with more data
    BinomialInterval big = wilson_interval(5000, 10000);
    CHECK(big.hi - big.lo < 0.03);
    // edge cases stay in [0,1] and avoid the normal-approximation collapse
    BinomialInterval zero = wilson_interval(0, 20);
    CHECK(zero.lo == 0.0);
    CHECK(zero.hi > 0.0);
    CHECK(zero.hi < 0.3);
    BinomialInterval all = wilson_interval(20, 20);
    CHECK(all.hi == 1.0);
    CHECK(all.lo < 1.0);
    BinomialInterval none = wilson_interval(0, 0);
    CHECK(none.lo == 0.0);
    CHECK(none.hi == 1.0);
}

TEST_CASE("perfect retrodiction on mub sets") {
    for (int d : {2, 3}) {
        BasisSet bs = mub_basis_set(d, d + 1);
        Strategy st = build_strategy(bs, JointDistribution::uniform(d, d + 1));
        GameTranscript tr = run_game(bs, st, 2000, 99, true);
        CHECK(tr.failures == 0);
        CHECK(tr.records.size() == 2000);
        // the answers in the records really match the king's outcomes
        for (const GameRound& r : tr.records) CHECK(r.answer == r.king_outcome);
    }
}

TEST_CASE("run_game statistics") {
    BasisSet bs = mub_basis_set(2, 3);
    Strategy st = build_strategy(bs, JointDistribution::uniform(2, 3));
    SUBCASE("deterministic per seed") {
        GameTranscript a = run_game(bs, st, 500, 7, true);
        GameTranscript b = run_game(bs, st, 500, 7, true);
        REQUIRE(a.records.size() == b.records.size());
        for (std::size_t i = 0; i < a.records.size(); ++i) {
            CHECK(a.records[i].basis == b.records[i].basis);
            CHECK(a.records[i].alice_outcome == b.records[i].alice_outcome);
        }
    }
    SUBCASE("king outcomes are uniform") {
        GameTranscript tr = run_game(bs, st, 20000, 5, true);
        long counts[2] = {0, 0};
        for (const GameRound& r : tr.records) ++counts[r.king_outcome];
        // each outcome has probability 1/2; 4 sigma band
        double frac = double(counts[0]) / 20000.0;
        CHECK(std::abs(frac - 0.5) < 4.0 * 0.5 / std::sqrt(20000.0));
    }
    SUBCASE("corrupted strategy is rejected") {
        Strategy bad = st;
        bad.outcomes[0].eta(0) += 0.1;
        CHECK_THROWS(run_game(bs, bad, 10, 1));
    }
}

TEST_CASE("serial and parallel ensembles agree") {
    std::function<double(long)> fn = [](long i) {
        std::mt19937_64 rng(mix_seed(17, std::uint64_t(i)));
        std::normal_distribution<double> normal;
        return normal(rng);
    };
    std::vector<double> serial = run_ensemble<double>(200, 1, fn);
    std::vector<double> parallel = run_ensemble<double>(200, 4, fn);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) CHECK(serial[i] == parallel[i]);
}

TEST_CASE("qubit third fraction") {
    FractionReport rep = qubit_third(20000, 12345);
    CHECK(rep.samples == 20000);
    CHECK(rep.hits > 0);
    // the limit is 1/3; 20000 samples put the estimate within ~0.01
    CHECK(std::abs(rep.fraction - 1.0 / 3.0) < 0.015);
    CHECK(rep.interval.lo < 1.0 / 3.0);
    CHECK(rep.interval.hi > 1.0 / 3.0);
    // identical under a parallel run
    FractionReport par = qubit_third(20000, 12345, 4);
    CHECK(par.hits == rep.hits);
}

TEST_CASE("fig1 samples carry consistent flags") {
    std::vector<Fig1Sample> samples = fig1_samples(500, 3);
    CHECK(samples.size() == 500);
    long classical = 0;
    for (const Fig1Sample& s : samples) {
        CHECK(s.classical == bell_membership(s.triple));
        CHECK(s.triple.q_ab >= 0.0);
        CHECK(s.triple.q_ab <= 0.5 + 1e-12);
        if (s.classical) ++classical;
    }
    CHECK(classical > 0);
    CHECK(classical < 500);
}

TEST_CASE("table row for qubits") {
    ExperimentReport rep = estimate_table_row(2, 300, 555);
    CHECK(rep.d == 2);
    CHECK(rep.k == 3);
    CHECK(rep.samples == 300);
    // ~1/3 of qubit triples admit a model; 300 samples give a wide but
    // usable band
    CHECK(rep.p_s > 0.2);
    CHECK(rep.p_s < 0.5);
    // mean value tends to 2/3 for qubit triples
    CHECK(rep.e_s > 0.6);
    CHECK(rep.e_s < 0.75);
    CHECK(rep.e_s <= 1.0 + 1e-9);
    CHECK(rep.e_s_stderr > 0.0);
    CHECK(rep.max_sdp_gap < 1e-6);
    CHECK(rep.max_lp_residual < 1e-6);
    CHECK(rep.seconds > 0.0);
    SUBCASE("csv row matches the header") {
        std::string header = report_csv_header();
        std::string row = report_csv_row(rep);
        CHECK(std::count(header.begin(), header.end(), ',') ==
              std::count(row.begin(), row.end(), ','));
        CHECK(row.find("2,3,300") == 0);
    }
}
