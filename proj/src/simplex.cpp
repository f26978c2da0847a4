#include "meanking/simplex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace meanking {

namespace {
constexpr double kPivotTol = 1e-10;
constexpr double kReducedCostTol = 1e-9;
}  // namespace

SimplexResult simplex_max(int m, long n, const std::vector<double>& b,
                          const std::function<const std::vector<int>&(long)>& column_rows,
                          const std::vector<double>& c, long max_iterations) {
    if (max_iterations == 0) max_iterations = 50L * (m + 64);

    RealMatrix binv = RealMatrix::Identity(m, m);
    RealVector xb = Eigen::Map<const RealVector>(b.data(), m);
    std::vector<long> basis(m);  // variable index per row; j >= n is slack j-n
    for (int i = 0; i < m; ++i) basis[i] = n + i;
    std::vector<char> in_basis(std::size_t(n + m), 0);
    for (int i = 0; i < m; ++i) in_basis[std::size_t(n + i)] = 1;

    auto cost_of = [&](long j) { return j < n ? c[std::size_t(j)] : 0.0; };

    SimplexResult res;
    double last_obj = 0.0;
    long stall = 0;
    const long stall_limit = 4L * (m + 8);
    bool bland = false;

    RealVector y(m), w(m);

    for (long iter = 0; iter < max_iterations; ++iter) {
        // y = c_B^T B^{-1}
        y.setZero();
        for (int i = 0; i < m; ++i) {
            double cb = cost_of(basis[i]);
            if (cb != 0.0) y += cb * binv.row(i).transpose();
        }

        // pricing
        long enter = -1;
        double best = kReducedCostTol;
        for (long j = 0; j < n + m; ++j) {
            if (in_basis[std::size_t(j)]) continue;
            double rc;
            if (j < n) {
                rc = c[std::size_t(j)];
                for (int r : column_rows(j)) rc -= y(r);
            } else {
                rc = -y(int(j - n));
            }
            if (rc > best) {
                enter = j;
                if (bland) break;
                best = rc;
            } else if (bland && rc > kReducedCostTol) {
                enter = j;
                break;
            }
        }
        if (enter < 0) break;  // optimal

        // w = B^{-1} a_enter
        if (enter < n) {
            w.setZero();
            for (int r : column_rows(enter)) w += binv.col(r);
        } else {
            w = binv.col(int(enter - n));
        }

        // ratio test; ties broken toward the smallest basis index
        int leave = -1;
        double theta = std::numeric_limits<double>::infinity();
        for (int i = 0; i < m; ++i) {
            if (w(i) > kPivotTol) {
                double t = xb(i) / w(i);
                if (t < theta - 1e-12 ||
                    (t < theta + 1e-12 && (leave < 0 || basis[i] < basis[leave]))) {
                    theta = t;
                    leave = i;
                }
            }
        }
        if (leave < 0) {
            res.status = SimplexResult::Status::unbounded;
            res.iterations = iter;
            return res;
        }

        // pivot: update B^{-1} and x_B
        double piv = w(leave);
        binv.row(leave) /= piv;
        xb(leave) = theta;
        for (int i = 0; i < m; ++i) {
            if (i == leave) continue;
            double f = w(i);
            if (f != 0.0) {
                binv.row(i) -= f * binv.row(leave);
                xb(i) -= f * theta;
                if (xb(i) < 0 && xb(i) > -1e-11) xb(i) = 0;
            }
        }
        in_basis[std::size_t(basis[leave])] = 0;
        in_basis[std::size_t(enter)] = 1;
        basis[leave] = enter;
        res.iterations = iter + 1;

        // periodic refactorization to keep the explicit inverse accurate
        if ((iter + 1) % 300 == 0) {
            RealMatrix bmat = RealMatrix::Zero(m, m);
            for (int i = 0; i < m; ++i) {
                if (basis[i] < n)
                    for (int r : column_rows(basis[i])) bmat(r, i) = 1.0;
                else
                    bmat(int(basis[i] - n), i) = 1.0;
            }
            binv = bmat.partialPivLu().inverse();
            xb = binv * Eigen::Map<const RealVector>(b.data(), m);
            for (int i = 0; i < m; ++i)
                if (xb(i) < 0 && xb(i) > -1e-9) xb(i) = 0;
        }

        double obj = 0.0;
        for (int i = 0; i < m; ++i) obj += cost_of(basis[i]) * xb(i);
        if (obj > last_obj + 1e-12) {
            stall = 0;
            bland = false;
        } else if (++stall > stall_limit) {
            bland = true;
        }
        last_obj = obj;
    }

    if (res.iterations >= max_iterations) res.status = SimplexResult::Status::iteration_limit;
    res.solution.assign(std::size_t(n), 0.0);
    res.objective = 0.0;
    for (int i = 0; i < m; ++i) {
        if (basis[i] < n) res.solution[std::size_t(basis[i])] = std::max(0.0, xb(i));
        res.objective += cost_of(basis[i]) * std::max(0.0, xb(i));
    }
    return res;
}

}  // namespace meanking
