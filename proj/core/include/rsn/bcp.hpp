#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "rsn/model.hpp"
#include "rsn/simplex.hpp"

namespace rsn {

/// The effective cost on workloads: hhat(w) = min{ h.q : K M q = w, q >= 0 }.
/// Values are evaluated through a precomputed list of dual vertices when the
/// topology is small enough (hhat(w) = max over dual vertices y of w.y);
/// the simplex path below stays authoritative for the minimizer q*.
class EffectiveCost {
public:
    EffectiveCost(const NetworkTopology& topology, const Mat& M, const Vec& h);

    int dim() const { return static_cast<int>(KM_.rows()); }

    /// Optimal value and the lexicographically smallest optimal vertex q*.
    std::pair<double, Vec> evaluate(const Vec& w) const;

    /// Optimal value only (fast path; falls back to the simplex when dual
    /// vertices were not enumerated).
    double value(const Vec& w) const;

    /// Estimates the equivalence constant c_h with c_h^{-1}|w| <= hhat(w) <= c_h|w|
    /// by probing n_dirs unit directions of the nonnegative orthant
    /// (coordinate axes first, then deterministic random directions).
    double bound_constant(int n_dirs) const;

    struct MonotoneReport {
        bool monotone = true;
        long pairs_checked = 0;
        Vec w_low, w_high;  // first counterexample when monotone == false
    };
    /// Samples ordered pairs w1 <= w2 and looks for hhat(w1) > hhat(w2).
    MonotoneReport check_monotone(int n_pairs, std::uint64_t seed) const;

    const Mat& equality_matrix() const { return KM_; }
    const Vec& holding_cost() const { return h_; }

private:
    Mat KM_;  // I x J
    Vec h_;
    std::vector<Vec> dual_vertices_;
    bool have_dual_ = false;
};

/// Drift, covariance factor, and effective cost of the workload diffusion.
struct BcpModel {
    Vec theta;
    Mat Sigma;
    Mat Lambda;  // Lambda Lambda^T = Sigma
    std::shared_ptr<const EffectiveCost> hhat;
};

/// Symmetric square root of a PSD matrix; eigenvalues in (-1e-12, 0) are
/// clipped to zero, anything more negative is rejected.
Mat psd_sqrt(const Mat& Sigma);

BcpModel make_bcp(const Vec& theta, const Mat& Sigma, std::shared_ptr<const EffectiveCost> hhat);
BcpModel make_bcp(const HeavyTrafficModel& m);

/// Coordinate-wise Skorokhod reflection of the grid path w0 + psi into the
/// nonnegative orthant. Rows of psi are grid samples (n x I). Returns
/// (phi, eta) with phi = w0 + psi + eta, phi >= 0, eta nondecreasing from 0,
/// and eta_i increasing only where phi_i = 0.
std::pair<Mat, Mat> skorokhod_reflect(const Mat& psi, const Vec& w0);

struct RbmParams {
    double dt = 1e-3;
    double horizon = 2000.0;  // per replication
    double burn_in = 400.0;
    int n_reps = 16;
    std::uint64_t seed = 1;
    /// Refine the per-step reflection with the Brownian-bridge running
    /// minimum, removing the O(sqrt(dt)) boundary bias of the plain
    /// discrete recursion. See notes in rbm_stationary_cost.
    bool bridge_correction = true;
};

struct RbmEstimate {
    double estimate = 0.0;
    double ci_halfwidth = 0.0;  // 95%, across replications
    int n_reps = 0;
};

/// Long-run average of hhat over the reflected diffusion with drift theta
/// (< 0 required) and covariance Sigma. Replications use independent streams;
/// the CI comes from replication means.
RbmEstimate rbm_stationary_cost(const BcpModel& bcp, const RbmParams& params);

struct BoundReport {
    Vec theta;
    Mat Sigma;
    bool stable = false;
    // "exact_monotone": hhat passed the sampled monotonicity check, so the
    //   value equals the diffusion-control optimum (up to MC error).
    // "upper_bound_nonmonotone": hhat failed the check; the reported value
    //   only upper-bounds the diffusion-control optimum.
    // "infinite_unstable": some theta_i >= 0; the ergodic value is infinite.
    std::string bound_kind;
    double bound_value = 0.0;  // +inf when unstable
    double ci_halfwidth = 0.0;
    long monotone_pairs = 0;
    std::string note;
};

BoundReport lower_bound_report(const HeavyTrafficModel& m, const RbmParams& params);

}  // namespace rsn
