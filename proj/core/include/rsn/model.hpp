#pragma once

#include <string>
#include <vector>

#include "rsn/common.hpp"

namespace rsn {

/// Static description of a resource sharing network: which job types use
/// which resources, and how much capacity each resource has.
struct NetworkTopology {
    int num_resources = 0;  // I
    int num_types = 0;      // J
    Mat incidence;          // I x J, entries 0/1; row i marks the resources type j occupies
    Vec capacity;           // length I, strictly positive
    // resource i -> the dedicated job type whose incidence column is e_i
    // (lowest-index qualifying column)
    std::vector<int> local_type;

    bool uses(int resource, int type) const { return incidence(resource, type) != 0.0; }
    /// A type is shared when it occupies two or more resources.
    bool is_shared(int type) const { return incidence.col(type).sum() >= 2.0; }
};

/// Validates the incidence matrix and capacities. Every column must touch at
/// least one resource, every resource needs a dedicated (local) type, and
/// capacities must be positive.
NetworkTopology validate_topology(const Mat& K, const Vec& C);

enum class Family { exponential, erlang, uniform, hyperexponential };

Family family_from_string(const std::string& s);
std::string to_string(Family f);

/// The limiting description of a network sequence approaching criticality:
/// limit rates, first-order corrections, limit standard deviations, holding
/// costs, and the sampling family for each primitive.
struct HeavyTrafficModel {
    NetworkTopology topology;
    Vec alpha;      // limit arrival rates, > 0
    Vec beta;       // limit service rates (1 / mean job size), > 0
    Vec alpha_bar;  // first-order arrival corrections
    Vec beta_bar;   // first-order service corrections
    Vec sigma_u;    // limit interarrival standard deviations, > 0
    Vec sigma_v;    // limit job-size standard deviations, > 0
    Vec h;          // holding costs, > 0
    std::vector<Family> arrival_family;
    std::vector<Family> service_family;

    Vec rho() const { return alpha.cwiseQuotient(beta); }
};

/// Checks dimensions, positivity, the critical-load identity C = K rho, and
/// that each distribution family can realize its target moments at every r.
void validate_model(const HeavyTrafficModel& m, double tol = 1e-9);

struct LimitQuantities {
    Vec rho;    // length J, nominal allocation
    Vec eta;    // length J
    Vec theta;  // length I, workload drift
    Mat Sigma;  // I x I, workload covariance
    Mat M;      // J x J diagonal, entries 1/beta_j
    bool stable = false;  // theta < 0 componentwise
};

/// Derives the limit drift and covariance of the workload from the model.
/// Throws HeavyTrafficViolation when |C - K rho| exceeds tol.
LimitQuantities derive_limits(const HeavyTrafficModel& m, double tol = 1e-9);

/// Rates of the r-th network in the sequence: alpha^r = alpha + alpha_bar/r,
/// beta^r = beta + beta_bar/r. The per-r standard deviations keep the
/// coefficient of variation fixed, so sigma^{u,r} -> sigma_u as r grows.
struct RateSequence {
    int r = 0;
    Vec alpha_r, beta_r;
    Vec sigma_u_r, sigma_v_r;
    Vec rho_r;
    Mat M_r;  // J x J diagonal, entries 1/beta^r_j
};

RateSequence rates_at(const HeavyTrafficModel& m, int r);

}  // namespace rsn
