#include "rsn/simplex.hpp"

#include <cmath>
#include <vector>

namespace rsn {

namespace {

// Full-tableau two-phase simplex, Bland's rule throughout (finite by
// anti-cycling, deterministic by smallest-index selection).
class Tableau {
public:
    // A is m x n after b has been made nonnegative.
    Tableau(const Mat& A, const Vec& b, double eps) : m_(static_cast<int>(A.rows())),
                                                      n_(static_cast<int>(A.cols())),
                                                      eps_(eps) {
        T_ = Mat::Zero(m_ + 1, n_ + m_ + 1);
        T_.block(0, 0, m_, n_) = A;
        T_.block(0, n_, m_, m_) = Mat::Identity(m_, m_);
        T_.col(n_ + m_).head(m_) = b;
        basis_.resize(m_);
        for (int i = 0; i < m_; ++i) basis_[i] = n_ + i;
    }

    // Returns false when the phase-1 optimum is positive (infeasible).
    bool phase1() {
        // objective: sum of artificials; express in nonbasic terms
        T_.row(m_).setZero();
        for (int j = 0; j < n_ + m_; ++j)
            if (j >= n_) T_(m_, j) = 1.0;
        for (int i = 0; i < m_; ++i) T_.row(m_) -= T_.row(i);
        iterate(n_ + m_);
        const double art = -T_(m_, n_ + m_);
        if (art > 1e-7 * std::max(1.0, T_.col(n_ + m_).head(m_).cwiseAbs().maxCoeff() + 1.0))
            return false;
        // drive lingering artificials out of the basis
        for (int i = 0; i < m_; ++i) {
            if (basis_[i] < n_) continue;
            int enter = -1;
            for (int j = 0; j < n_; ++j)
                if (std::abs(T_(i, j)) > eps_) { enter = j; break; }
            if (enter >= 0) pivot(i, enter);
            // else: redundant row, harmless to leave (artificial stays at 0)
        }
        return true;
    }

    enum class Status { optimal, unbounded };

    Status phase2(const Vec& c) {
        T_.row(m_).setZero();
        T_.row(m_).head(n_) = c.transpose();
        for (int i = 0; i < m_; ++i)
            if (basis_[i] < n_) T_.row(m_) -= c(basis_[i]) * T_.row(i);
        return iterate(n_);  // artificial columns barred from re-entering
    }

    Vec solution() const {
        Vec x = Vec::Zero(n_);
        for (int i = 0; i < m_; ++i)
            if (basis_[i] < n_) x(basis_[i]) = T_(i, n_ + m_);
        return x;
    }

    double objective() const { return -T_(m_, n_ + m_); }

private:
    Status iterate(int n_cols) {
        for (;;) {
            int enter = -1;
            for (int j = 0; j < n_cols; ++j)
                if (T_(m_, j) < -eps_) { enter = j; break; }  // Bland: smallest index
            if (enter < 0) return Status::optimal;
            int leave = -1;
            double best = 0.0;
            for (int i = 0; i < m_; ++i) {
                if (T_(i, enter) <= eps_) continue;
                const double ratio = T_(i, n_ + m_) / T_(i, enter);
                if (leave < 0 || ratio < best - eps_ ||
                    (ratio < best + eps_ && basis_[i] < basis_[leave])) {
                    leave = i;
                    best = ratio;
                }
            }
            if (leave < 0) return Status::unbounded;
            pivot(leave, enter);
        }
    }

    void pivot(int row, int col) {
        T_.row(row) /= T_(row, col);
        for (int i = 0; i <= m_; ++i) {
            if (i == row) continue;
            const double f = T_(i, col);
            if (f != 0.0) T_.row(i) -= f * T_.row(row);
        }
        basis_[row] = col;
    }

    int m_, n_;
    double eps_;
    Mat T_;
    std::vector<int> basis_;
};

LpSolution solve_eq_impl(Mat A, Vec b, const Vec& c, double eps) {
    if (A.rows() != b.size() || A.cols() != c.size())
        throw Error("DimensionMismatch", "LP dimensions disagree");
    for (int i = 0; i < b.size(); ++i) {
        if (b(i) < 0.0) {
            A.row(i) = -A.row(i);
            b(i) = -b(i);
        }
    }
    Tableau t(A, b, eps);
    if (!t.phase1()) throw Error("Infeasible", "LP has no feasible point");
    if (t.phase2(c) == Tableau::Status::unbounded)
        throw Error("Unbounded", "LP objective is unbounded below");
    LpSolution sol;
    sol.x = t.solution();
    // tiny negatives from pivoting round-off
    sol.x = sol.x.cwiseMax(0.0);
    sol.value = c.dot(sol.x);
    return sol;
}

}  // namespace

LpSolution solve_lp_eq(const Mat& A, const Vec& b, const Vec& c, double eps) {
    return solve_eq_impl(A, b, c, eps);
}

LpSolution solve_lp_ineq(const Mat& A, const Vec& b, const Vec& c, double eps) {
    const int m = static_cast<int>(A.rows());
    const int n = static_cast<int>(A.cols());
    Mat Aeq(m, n + m);
    Aeq << A, Mat::Identity(m, m);
    Vec ceq = Vec::Zero(n + m);
    ceq.head(n) = c;
    LpSolution s = solve_eq_impl(Aeq, b, ceq, eps);
    s.x = s.x.head(n).eval();
    s.value = c.dot(s.x);
    return s;
}

LpSolution solve_lp_eq_lex(const Mat& A, const Vec& b, const Vec& c, double eps) {
    LpSolution best = solve_eq_impl(A, b, c, eps);
    const int m = static_cast<int>(A.rows());
    const int n = static_cast<int>(A.cols());
    // Minimize each coordinate in turn over the optimal face, freezing the
    // coordinates already minimized as equality rows.
    Mat Aa(m + 1 + n, n);
    Vec ba(m + 1 + n);
    Aa.topRows(m) = A;
    ba.head(m) = b;
    Aa.row(m) = c.transpose();
    ba(m) = best.value;
    int extra = 0;
    for (int j = 0; j < n; ++j) {
        Vec ej = Vec::Zero(n);
        ej(j) = 1.0;
        LpSolution s = solve_eq_impl(Aa.topRows(m + 1 + extra), ba.head(m + 1 + extra), ej, eps);
        Aa.row(m + 1 + extra) = ej.transpose();
        ba(m + 1 + extra) = s.value;
        ++extra;
        best.x = s.x;
    }
    best.value = c.dot(best.x);
    return best;
}

}  // namespace rsn
