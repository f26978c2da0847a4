#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "meanking/experiments.hpp"
#include "meanking/json_io.hpp"

using namespace meanking;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open input file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text << "\n";
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::invalid_argument("cannot open output file: " + out_path);
        out << text << "\n";
    }
}

struct BasisSource {
    int dim = 0;
    int bases = 0;
    std::uint64_t seed = 0;
    bool mub = false;
    bool pauli = false;
    std::string in_path;

    void add_flags(CLI::App* cmd) {
        cmd->add_option("--dim", dim, "Hilbert space dimension");
        cmd->add_option("--bases", bases, "number of bases (default dim+1)");
        cmd->add_option("--seed", seed, "RNG seed for Haar sampling");
        cmd->add_flag("--mub", mub, "use the prime-dimension MUB family");
        cmd->add_flag("--pauli", pauli, "use the Pauli eigenbases (d=2)");
        cmd->add_option("--in", in_path, "read a BasisSet JSON file");
    }

    BasisSet get() const {
        if (!in_path.empty()) return basis_set_from_json(read_file(in_path));
        if (pauli) return pauli_bases();
        if (dim < 2) throw std::invalid_argument("need --dim, --pauli, or --in");
        int k = bases > 0 ? bases : dim + 1;
        if (mub) return mub_basis_set(dim, k);
        return haar_random_basis_set(dim, k, seed);
    }
};

int run(int argc, char** argv) {
    CLI::App app{"mean king retrodiction toolkit"};
    app.require_subcommand(1);

    // sample
    auto* sample = app.add_subcommand("sample", "emit a BasisSet as JSON");
    BasisSource sample_src;
    std::string sample_out;
    sample_src.add_flags(sample);
    sample->add_option("--out", sample_out, "output path (default stdout)");

    // classify
    auto* classify = app.add_subcommand("classify", "rank and unbiasedness report");
    BasisSource classify_src;
    double classify_tol = 1e-9;
    classify_src.add_flags(classify);
    classify->add_option("--tol", classify_tol, "relative singular value cutoff");

    // model
    auto* model = app.add_subcommand("model", "classical-model LP, optional iterative fit");
    BasisSource model_src;
    bool model_fit = false;
    double model_tol = 1e-8;
    int model_sweeps = 2000;
    std::string model_out;
    model_src.add_flags(model);
    model->add_flag("--fit", model_fit, "also run iterative proportional fitting");
    model->add_option("--tol", model_tol, "fit residual target");
    model->add_option("--sweeps", model_sweeps, "max fit sweeps");
    model->add_option("--out", model_out, "output path");

    // strategy
    auto* strategy = app.add_subcommand("strategy", "build and verify a strategy");
    BasisSource strategy_src;
    std::string strategy_out;
    strategy_src.add_flags(strategy);
    strategy->add_option("--out", strategy_out, "output path");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "build a strategy and play the game");
    BasisSource simulate_src;
    long simulate_rounds = 10000;
    std::uint64_t simulate_game_seed = 1;
    simulate_src.add_flags(simulate);
    simulate->add_option("--rounds", simulate_rounds, "rounds to play");
    simulate->add_option("--game-seed", simulate_game_seed, "seed for the game RNG");

    // value
    auto* value = app.add_subcommand("value", "unambiguous-retrodiction SDP value");
    BasisSource value_src;
    std::string value_out;
    value_src.add_flags(value);
    value->add_option("--out", value_out, "output path");

    // table
    auto* table = app.add_subcommand("table", "Haar-ensemble table row");
    int table_dim = 2;
    long table_samples = 1000;
    std::uint64_t table_seed = 0;
    int table_jobs = 1;
    std::string table_format = "csv", table_out;
    table->add_option("--dim", table_dim, "dimension (k = dim+1)")->required();
    table->add_option("--samples", table_samples, "sample count");
    table->add_option("--seed", table_seed, "ensemble seed");
    table->add_option("--jobs", table_jobs, "worker threads");
    table->add_option("--format", table_format, "csv or json");
    table->add_option("--out", table_out, "output path");

    // bell
    auto* bell = app.add_subcommand("bell", "qubit triple statistics");
    long bell_samples = 100000;
    std::uint64_t bell_seed = 0;
    int bell_jobs = 1;
    std::string bell_out;
    bell->add_option("--samples", bell_samples, "sample count");
    bell->add_option("--seed", bell_seed, "ensemble seed");
    bell->add_option("--jobs", bell_jobs, "worker threads");
    bell->add_option("--out", bell_out, "write fig-1 sample CSV here");

    // debias
    auto* debias_cmd = app.add_subcommand("debias", "gradient-search unbiasing");
    BasisSource debias_src;
    int debias_steps = 5000;
    double debias_tol = 1e-10;
    std::string debias_out;
    debias_src.add_flags(debias_cmd);
    debias_cmd->add_option("--steps", debias_steps, "max descent steps");
    debias_cmd->add_option("--tol", debias_tol, "convergence tolerance");
    debias_cmd->add_option("--out", debias_out, "output path");

    CLI11_PARSE(app, argc, argv);

    if (sample->parsed()) {
        write_output(basis_set_to_json(sample_src.get()), sample_out);
        return 0;
    }

    if (classify->parsed()) {
        BasisSet bs = classify_src.get();
        SpanClassification cls = rank_of_span(bs, classify_tol);
        std::cout << "{\"rank\":" << cls.rank << ",\"label\":\"" << to_string(cls.label)
                  << "\",\"unbiasedness_deviation\":" << unbiasedness_check(bs) << "}\n";
        return 0;
    }

    if (model->parsed()) {
        BasisSet bs = model_src.get();
        TransitionTensor t = transition_tensor(bs);
        LpModelResult lp = solve_model_lp(t);
        std::ostringstream os;
        os.precision(12);
        os << "{\"status\":\"" << (lp.feasible ? "feasible" : "infeasible")
           << "\",\"value\":" << lp.value << ",\"jd\":" << joint_distribution_to_json(lp.jd);
        if (model_fit) {
            IterativeFitResult fit = iterative_fit(t, model_sweeps, model_tol);
            os << ",\"fit_residual\":" << fit.residual << ",\"fit_sweeps\":" << fit.sweeps;
        }
        os << "}";
        write_output(os.str(), model_out);
        return lp.feasible ? 0 : 1;
    }

    if (strategy->parsed()) {
        BasisSet bs = strategy_src.get();
        LpModelResult lp = solve_model_lp(transition_tensor(bs));
        if (!lp.feasible) {
            std::cerr << "no classical model: LP value " << lp.value << "\n";
            return 1;
        }
        Strategy st = build_strategy(bs, lp.jd);
        VerifyReport rep = verify_strategy(bs, st);
        std::cerr << "max_offdiag=" << rep.max_offdiag << " completeness=" << rep.completeness
                  << " min_eig=" << rep.min_eig << "\n";
        write_output(strategy_to_json(st), strategy_out);
        return 0;
    }

    if (simulate->parsed()) {
        BasisSet bs = simulate_src.get();
        LpModelResult lp = solve_model_lp(transition_tensor(bs));
        if (!lp.feasible) {
            std::cerr << "no classical model: LP value " << lp.value << "\n";
            return 1;
        }
        Strategy st = build_strategy(bs, lp.jd);
        GameTranscript tr = run_game(bs, st, simulate_rounds, simulate_game_seed);
        std::cout << "{\"rounds\":" << tr.rounds << ",\"failures\":" << tr.failures << "}\n";
        return 0;
    }

    if (value->parsed()) {
        SdpResult res = unambiguous_value(value_src.get());
        write_output(sdp_result_to_json(res), value_out);
        return res.ok ? 0 : 3;
    }

    if (table->parsed()) {
        ExperimentReport rep = estimate_table_row(table_dim, table_samples, table_seed, table_jobs);
        if (table_format == "json") {
            std::ostringstream os;
            os.precision(10);
            os << "{\"d\":" << rep.d << ",\"k\":" << rep.k << ",\"N\":" << rep.samples
               << ",\"p_s\":" << rep.p_s << ",\"p_s_lo\":" << rep.p_s_interval.lo
               << ",\"p_s_hi\":" << rep.p_s_interval.hi << ",\"e_s\":" << rep.e_s
               << ",\"e_s_stderr\":" << rep.e_s_stderr << ",\"seed\":" << rep.seed
               << ",\"seconds\":" << rep.seconds << "}";
            write_output(os.str(), table_out);
        } else {
            write_output(report_csv_header() + "\n" + report_csv_row(rep), table_out);
        }
        return 0;
    }

    if (bell->parsed()) {
        FractionReport rep = qubit_third(bell_samples, bell_seed, bell_jobs);
        std::ostringstream os;
        os.precision(10);
        os << "{\"samples\":" << rep.samples << ",\"classical_fraction\":" << rep.fraction
           << ",\"lo\":" << rep.interval.lo << ",\"hi\":" << rep.interval.hi << "}";
        std::cout << os.str() << "\n";
        if (!bell_out.empty()) {
            std::ofstream out(bell_out);
            if (!out) throw std::invalid_argument("cannot open output file: " + bell_out);
            out << "q_ab,q_bc,q_ca,classical\n";
            out.precision(10);
            for (const Fig1Sample& s : fig1_samples(bell_samples, bell_seed, bell_jobs))
                out << s.triple.q_ab << ',' << s.triple.q_bc << ',' << s.triple.q_ca << ','
                    << (s.classical ? 1 : 0) << "\n";
        }
        return 0;
    }

    if (debias_cmd->parsed()) {
        DebiasResult res = debias(debias_src.get(), debias_steps, debias_tol);
        std::cerr << "objective=" << res.objective << " steps=" << res.steps
                  << " converged=" << (res.converged ? 1 : 0) << "\n";
        write_output(basis_set_to_json(res.bs), debias_out);
        return 0;
    }

    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::runtime_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
}
