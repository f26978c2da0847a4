#ifndef MEANKING_JSON_IO_HPP
#define MEANKING_JSON_IO_HPP

#include <iosfwd>
#include <string>

#include "meanking/bases.hpp"
#include "meanking/experiments.hpp"
#include "meanking/model.hpp"
#include "meanking/sdp.hpp"
#include "meanking/strategy.hpp"

namespace meanking {

/// BasisSet wire format:
///   { "d": int, "k": int, "bases": [ [ [ [re, im] x d ] x d vectors ] x k ] }
/// with row = vector and 0-based indices throughout. Readers reject sets
/// violating orthonormality beyond 1e-8.
std::string basis_set_to_json(const BasisSet& bs);
BasisSet basis_set_from_json(const std::string& text);

/// { "d": int, "k": int, "weights": [ [index, p], ... ] } sorted by index,
/// weights below 1e-12 omitted.
std::string joint_distribution_to_json(const JointDistribution& jd);
JointDistribution joint_distribution_from_json(const std::string& text);

/// S as a d x d complex matrix, POVM as [index, packed lower triangle] pairs
/// (row-major rows, entries with column <= row, each [re, im]). The writer
/// asserts the POVM invariants before emitting.
std::string strategy_to_json(const Strategy& st);

std::string sdp_result_to_json(const SdpResult& res);

std::string report_csv_header();
std::string report_csv_row(const ExperimentReport& rep);

}  // namespace meanking

#endif
