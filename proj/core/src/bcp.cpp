#include "rsn/bcp.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>

#include "rsn/stochastic.hpp"

namespace rsn {

namespace {

// All I-subsets of {0..J-1}, visited in lexicographic order.
template <typename F>
void for_each_subset(int J, int I, F&& f) {
    std::vector<int> idx(I);
    for (int i = 0; i < I; ++i) idx[i] = i;
    for (;;) {
        f(idx);
        int k = I - 1;
        while (k >= 0 && idx[k] == J - I + k) --k;
        if (k < 0) return;
        ++idx[k];
        for (int l = k + 1; l < I; ++l) idx[l] = idx[l - 1] + 1;
    }
}

double binom(int n, int k) {
    double v = 1.0;
    for (int i = 1; i <= k; ++i) v *= static_cast<double>(n - k + i) / i;
    return v;
}

}  // namespace

EffectiveCost::EffectiveCost(const NetworkTopology& topology, const Mat& M, const Vec& h) {
    KM_ = topology.incidence * M;
    h_ = h;
    const int I = static_cast<int>(KM_.rows());
    const int J = static_cast<int>(KM_.cols());
    if (h_.size() != J) throw Error("DimensionMismatch", "holding cost length");
    // Vertices of the dual polyhedron {y : (KM)^T y <= h}. It is pointed
    // because the local columns give KM full row rank, so for every w >= 0
    // the dual optimum sits at one of these vertices.
    if (binom(J, I) <= 20000.0) {
        const Mat At = KM_.transpose();  // J x I
        for_each_subset(J, I, [&](const std::vector<int>& idx) {
            Mat B(I, I);
            Vec rhs(I);
            for (int i = 0; i < I; ++i) {
                B.row(i) = At.row(idx[i]);
                rhs(i) = h_(idx[i]);
            }
            Eigen::FullPivLU<Mat> lu(B);
            if (!lu.isInvertible()) return;
            Vec y = lu.solve(rhs);
            if (((At * y).array() > h_.array() + 1e-9).any()) return;
            for (const Vec& v : dual_vertices_)
                if ((v - y).cwiseAbs().maxCoeff() < 1e-9) return;
            dual_vertices_.push_back(y);
        });
        have_dual_ = !dual_vertices_.empty();
    }
}

std::pair<double, Vec> EffectiveCost::evaluate(const Vec& w) const {
    if (w.size() != dim()) throw Error("DimensionMismatch", "workload length");
    LpSolution s = solve_lp_eq_lex(KM_, w, h_);
    return {s.value, s.x};
}

double EffectiveCost::value(const Vec& w) const {
    if (have_dual_) {
        double best = -std::numeric_limits<double>::infinity();
        for (const Vec& y : dual_vertices_) best = std::max(best, w.dot(y));
        return best;
    }
    return solve_lp_eq(KM_, w, h_).value;
}

double EffectiveCost::bound_constant(int n_dirs) const {
    if (n_dirs < 1) throw Error("InvalidArgument", "n_dirs must be >= 1");
    const int I = dim();
    RngStream rng(0x9d7f3c2b, {17});
    double c = 1.0 + 1e-9;
    int used = 0;
    auto probe = [&](Vec d) {
        d /= d.norm();
        const double v = value(d);
        if (v > 0.0) c = std::max({c, v, 1.0 / v});
        ++used;
    };
    for (int i = 0; i < I && used < n_dirs; ++i) probe(Vec::Unit(I, i));
    if (used < n_dirs && I > 1) probe(Vec::Ones(I));
    while (used < n_dirs) {
        Vec d(I);
        for (int i = 0; i < I; ++i) d(i) = rng.uniform();
        if (d.norm() < 1e-6) continue;
        probe(d);
    }
    return c;
}

EffectiveCost::MonotoneReport EffectiveCost::check_monotone(int n_pairs,
                                                            std::uint64_t seed) const {
    const int I = dim();
    RngStream rng(seed, {29});
    MonotoneReport rep;
    for (int k = 0; k < n_pairs; ++k) {
        Vec w1(I), d(I);
        for (int i = 0; i < I; ++i) {
            w1(i) = 10.0 * rng.uniform();
            d(i) = 5.0 * rng.uniform();
        }
        const Vec w2 = w1 + d;
        ++rep.pairs_checked;
        if (value(w1) > value(w2) + 1e-9) {
            rep.monotone = false;
            rep.w_low = w1;
            rep.w_high = w2;
            return rep;
        }
    }
    return rep;
}

Mat psd_sqrt(const Mat& Sigma) {
    Eigen::SelfAdjointEigenSolver<Mat> es(Sigma);
    if (es.info() != Eigen::Success) throw Error("EigenFailure", "eigendecomposition failed");
    Vec ev = es.eigenvalues();
    for (int i = 0; i < ev.size(); ++i) {
        if (ev(i) < -1e-12)
            throw Error("NotPSD", "eigenvalue " + std::to_string(ev(i)));
        if (ev(i) < 0.0) ev(i) = 0.0;
    }
    return es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

BcpModel make_bcp(const Vec& theta, const Mat& Sigma, std::shared_ptr<const EffectiveCost> hhat) {
    BcpModel b;
    b.theta = theta;
    b.Sigma = Sigma;
    b.Lambda = psd_sqrt(Sigma);
    b.hhat = std::move(hhat);
    return b;
}

BcpModel make_bcp(const HeavyTrafficModel& m) {
    const LimitQuantities q = derive_limits(m);
    auto hhat = std::make_shared<EffectiveCost>(m.topology, q.M, m.h);
    return make_bcp(q.theta, q.Sigma, std::move(hhat));
}

std::pair<Mat, Mat> skorokhod_reflect(const Mat& psi, const Vec& w0) {
    const int n = static_cast<int>(psi.rows());
    const int I = static_cast<int>(psi.cols());
    if (w0.size() != I) throw Error("DimensionMismatch", "w0 length");
    if (n > 0 && ((psi.row(0).transpose() + w0).array() < -1e-12).any())
        throw Error("InvalidArgument", "w0 + psi(0) must be nonnegative");
    Mat phi(n, I), eta(n, I);
    for (int i = 0; i < I; ++i) {
        double running = 0.0;  // sup of -x so far, floored at 0
        for (int k = 0; k < n; ++k) {
            const double x = w0(i) + psi(k, i);
            running = std::max(running, -x);
            eta(k, i) = running;
            phi(k, i) = x + running;
        }
    }
    return {phi, eta};
}

RbmEstimate rbm_stationary_cost(const BcpModel& bcp, const RbmParams& params) {
    const int I = static_cast<int>(bcp.theta.size());
    for (int i = 0; i < I; ++i)
        if (bcp.theta(i) >= 0.0)
            throw Error("UnstableDrift", "theta_" + std::to_string(i + 1) + " = " +
                                             std::to_string(bcp.theta(i)) + " >= 0");
    if (params.dt <= 0.0 || params.horizon <= params.burn_in || params.n_reps < 2)
        throw Error("InvalidArgument", "bad RBM parameters");

    const long long n_steps = static_cast<long long>(std::llround(params.horizon / params.dt));
    const long long n_burn = static_cast<long long>(std::llround(params.burn_in / params.dt));
    const double sdt = std::sqrt(params.dt);
    const Vec drift = bcp.theta * params.dt;
    Vec diag2(I);  // 2 Sigma_ii dt, for the bridge-minimum draw
    for (int i = 0; i < I; ++i) diag2(i) = 2.0 * bcp.Sigma(i, i) * params.dt;

    std::vector<double> rep_mean(params.n_reps);
    for (int rep = 0; rep < params.n_reps; ++rep) {
        RngStream rng(params.seed, {3, static_cast<std::uint64_t>(rep)});
        Vec W = Vec::Zero(I), xi(I);
        double acc = 0.0;
        for (long long k = 0; k < n_steps; ++k) {
            for (int i = 0; i < I; ++i) xi(i) = rng.normal();
            Vec dx = drift + sdt * (bcp.Lambda * xi);
            if (params.bridge_correction) {
                // The plain reflected recursion never sees excursions below 0
                // inside a step and underestimates the boundary push by
                // O(sqrt(dt)). Reflect at the simulated Brownian-bridge
                // minimum instead (exact in 1D, per-coordinate otherwise).
                for (int i = 0; i < I; ++i) {
                    const double lu = std::log(rng.uniform());
                    const double m =
                        0.5 * (-dx(i) + std::sqrt(dx(i) * dx(i) - diag2(i) * lu));
                    W(i) += dx(i) + std::max(m - W(i), 0.0);
                }
            } else {
                W = (W + dx).cwiseMax(0.0);
            }
            if (k >= n_burn) acc += bcp.hhat->value(W);
        }
        rep_mean[rep] = acc / static_cast<double>(n_steps - n_burn);
    }

    double mean = 0.0;
    for (double v : rep_mean) mean += v;
    mean /= params.n_reps;
    double var = 0.0;
    for (double v : rep_mean) var += (v - mean) * (v - mean);
    var /= (params.n_reps - 1);
    boost::math::students_t dist(params.n_reps - 1);
    const double tq = boost::math::quantile(dist, 0.975);

    RbmEstimate est;
    est.estimate = mean;
    est.ci_halfwidth = tq * std::sqrt(var / params.n_reps);
    est.n_reps = params.n_reps;
    return est;
}

BoundReport lower_bound_report(const HeavyTrafficModel& m, const RbmParams& params) {
    const LimitQuantities q = derive_limits(m);
    BoundReport rep;
    rep.theta = q.theta;
    rep.Sigma = q.Sigma;
    rep.stable = q.stable;
    if (!q.stable) {
        rep.bound_kind = "infinite_unstable";
        rep.bound_value = std::numeric_limits<double>::infinity();
        rep.note = "some workload drift component is nonnegative; "
                   "the ergodic cost diverges under every admissible policy";
        return rep;
    }
    BcpModel bcp = make_bcp(m);
    const auto mono = bcp.hhat->check_monotone(2000, params.seed ^ 0x5bd1e995u);
    rep.monotone_pairs = mono.pairs_checked;
    const RbmEstimate est = rbm_stationary_cost(bcp, params);
    rep.bound_value = est.estimate;
    rep.ci_halfwidth = est.ci_halfwidth;
    if (mono.monotone) {
        rep.bound_kind = "exact_monotone";
        rep.note = "effective cost passed the sampled monotonicity check; "
                   "the value equals the workload-control optimum up to Monte Carlo error";
    } else {
        rep.bound_kind = "upper_bound_nonmonotone";
        rep.note = "effective cost is not monotone; the reported value only "
                   "upper-bounds the workload-control optimum, which itself "
                   "lower-bounds the achievable ergodic cost";
    }
    return rep;
}

}  // namespace rsn
