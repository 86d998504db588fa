#include "rsn/policies.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "rsn/simplex.hpp"

namespace rsn {

Vec nominal_static(const PolicySnapshot& s) { return s.limits->rho; }

Vec hgi_greedy(const PolicySnapshot& s) {
    const NetworkTopology& top = *s.topology;
    const int J = top.num_types;
    const CountVec& Q = *s.queue;
    Vec b = Vec::Zero(J);
    std::vector<int> active;
    for (int j = 0; j < J; ++j)
        if (Q(j) > 0) active.push_back(j);
    if (active.empty()) return b;
    const int n = static_cast<int>(active.size());

    Mat A(top.num_resources, n);
    Vec util(n);  // how many resources a unit of rate keeps busy
    for (int k = 0; k < n; ++k) {
        A.col(k) = top.incidence.col(active[k]);
        util(k) = top.incidence.col(active[k]).sum();
    }

    // Stage 1 (work conservation): the largest total busy capacity the
    // backlog can absorb. Idling a resource that has work only inflates the
    // workload, so this is fixed first.
    const double u_star = -solve_lp_ineq(A, top.capacity, (-util).eval()).value;

    // Stage 2 (composition steering): among allocations attaining u_star,
    // drain the types holding more than the cheapest composition q*
    // consistent with the current workload, and hold back the types below it.
    const Mat KMr = top.incidence * s.rates->M_r;
    const Vec q_star = solve_lp_eq_lex(KMr, s.workload, *s.h).x;
    Vec g = Vec::Zero(n);
    for (int k = 0; k < n; ++k) {
        const int j = active[k];
        const double surplus = static_cast<double>(Q(j)) - q_star(j);
        const double w = s.h->coeff(j) * s.rates->beta_r(j);
        if (surplus > 0.5)
            g(k) = w;
        else if (surplus < -0.5)
            g(k) = -w;
    }
    Mat A2(A.rows() + 1, n);
    A2.topRows(A.rows()) = A;
    A2.row(A.rows()) = -util.transpose();
    Vec b2(A.rows() + 1);
    b2.head(A.rows()) = top.capacity;
    b2(A.rows()) = -(u_star - 1e-9 * (1.0 + std::abs(u_star)));
    const LpSolution sol = solve_lp_ineq(A2, b2, (-g).eval());
    for (int k = 0; k < n; ++k) b(active[k]) = sol.x(k);
    return b;
}

Vec max_pressure(const PolicySnapshot& s) {
    const NetworkTopology& top = *s.topology;
    const int J = top.num_types;
    const CountVec& Q = *s.queue;
    std::vector<int> active;
    for (int j = 0; j < J; ++j)
        if (Q(j) > 0) active.push_back(j);
    Vec b = Vec::Zero(J);
    if (active.empty()) return b;
    const int n = static_cast<int>(active.size());
    Mat A(top.num_resources, n);
    Vec c(n);
    for (int k = 0; k < n; ++k) {
        A.col(k) = top.incidence.col(active[k]);
        c(k) = -static_cast<double>(Q(active[k])) * s.rates->beta_r(active[k]);
    }
    LpSolution sol = solve_lp_ineq(A, top.capacity, c);
    for (int k = 0; k < n; ++k) b(active[k]) = sol.x(k);
    return b;
}

namespace {

class FnPolicy : public Policy {
public:
    using Fn = Vec (*)(const PolicySnapshot&);
    FnPolicy(std::string name, Fn fn) : name_(std::move(name)), fn_(fn) {}
    Vec rates(const PolicySnapshot& s) const override { return fn_(s); }
    const std::string& name() const override { return name_; }

private:
    std::string name_;
    Fn fn_;
};

}  // namespace

std::unique_ptr<Policy> make_policy(const std::string& name) {
    if (name == "nominal") return std::make_unique<FnPolicy>(name, &nominal_static);
    if (name == "hgi") return std::make_unique<FnPolicy>(name, &hgi_greedy);
    if (name == "maxpressure") return std::make_unique<FnPolicy>(name, &max_pressure);
    throw Error("UnknownPolicy", "'" + name + "'");
}

}  // namespace rsn
