#pragma once

#include "rsn/common.hpp"

namespace rsn {

/// Dense two-phase simplex with Bland's rule. Built for the tiny linear
/// programs of this project (dimensions in the tens), where exactness and
/// determinism matter more than speed.
struct LpSolution {
    double value = 0.0;
    Vec x;
};

/// min c.x  s.t.  A x = b, x >= 0.
/// Throws Infeasible / Unbounded.
LpSolution solve_lp_eq(const Mat& A, const Vec& b, const Vec& c, double eps = 1e-9);

/// min c.x  s.t.  A x <= b, x >= 0 (slack variables added internally).
LpSolution solve_lp_ineq(const Mat& A, const Vec& b, const Vec& c, double eps = 1e-9);

/// min c.x  s.t.  A x = b, x >= 0, returning the lexicographically smallest
/// optimal vertex: after the optimum is found, each coordinate in index
/// order is minimized subject to optimality of all previous ones.
LpSolution solve_lp_eq_lex(const Mat& A, const Vec& b, const Vec& c, double eps = 1e-9);

}  // namespace rsn
