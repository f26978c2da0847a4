#include <chrono>
#include <cstdlib>
#include <iostream>

#include "meanking/experiments.hpp"

using namespace meanking;

// Compares the serial reference path against the OpenMP path on the two
// ensemble kernels and checks that both produce identical statistics.
int main(int argc, char** argv) {
    long n_bell = argc > 1 ? std::atol(argv[1]) : 20000;
    long n_table = argc > 2 ? std::atol(argv[2]) : 300;
    int jobs = 4;
#ifdef MEANKING_HAVE_OPENMP
    jobs = omp_get_max_threads();
#endif

    auto time_it = [](auto&& fn) {
        auto t0 = std::chrono::steady_clock::now();
        fn();
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    FractionReport serial_bell, parallel_bell;
    double t_bell_serial = time_it([&] { serial_bell = qubit_third(n_bell, 7, 1); });
    double t_bell_parallel = time_it([&] { parallel_bell = qubit_third(n_bell, 7, jobs); });
    std::cout << "qubit_third n=" << n_bell << ": serial " << t_bell_serial << "s, " << jobs
              << " jobs " << t_bell_parallel << "s, speedup "
              << t_bell_serial / t_bell_parallel << "x\n";
    if (serial_bell.hits != parallel_bell.hits) {
        std::cerr << "MISMATCH: serial and parallel hit counts differ\n";
        return 1;
    }

    ExperimentReport serial_row, parallel_row;
    double t_row_serial = time_it([&] { serial_row = estimate_table_row(2, n_table, 7, 1); });
    double t_row_parallel = time_it([&] { parallel_row = estimate_table_row(2, n_table, 7, jobs); });
    std::cout << "table d=2 n=" << n_table << ": serial " << t_row_serial << "s, " << jobs
              << " jobs " << t_row_parallel << "s, speedup "
              << t_row_serial / t_row_parallel << "x\n";
    if (serial_row.p_s != parallel_row.p_s || serial_row.e_s != parallel_row.e_s) {
        std::cerr << "MISMATCH: serial and parallel table rows differ\n";
        return 1;
    }
    std::cout << "serial and parallel results identical\n";
    return 0;
}
