#ifndef MEANKING_SIMPLEX_HPP
#define MEANKING_SIMPLEX_HPP

#include <functional>
#include <vector>

#include "meanking/common.hpp"

namespace meanking {

/// Revised primal simplex for  max c.v  s.t.  A v <= b,  v >= 0,  b >= 0.
/// Columns of A are 0/1 and supplied implicitly: column_rows(j) returns the
/// row indices where column j has a 1. Slack variables give the initial basis.
/// Dantzig pricing, with a switch to Bland's rule after a stall to rule out
/// cycling on degenerate vertices.
struct SimplexResult {
    enum class Status { optimal, unbounded, iteration_limit };
    Status status = Status::optimal;
    double objective = 0.0;
    std::vector<double> solution;  // structural variables only
    long iterations = 0;
};

SimplexResult simplex_max(int m, long n, const std::vector<double>& b,
                          const std::function<const std::vector<int>&(long)>& column_rows,
                          const std::vector<double>& c, long max_iterations = 0);

}  // namespace meanking

#endif
