// Acceptance gate: each criterion below is exercised by `acceptance <n>`,
// prints exactly one "criterion n: PASS/FAIL" line, and exits nonzero on
// failure. Criterion 9 additionally needs the path of the rsnlab binary.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rsn/bcp.hpp"
#include "rsn/harness.hpp"
#include "rsn/model.hpp"
#include "rsn/policies.hpp"
#include "rsn/sim.hpp"
#include "rsn/simplex.hpp"

using namespace rsn;

namespace {

namespace fs = std::filesystem;

struct Check {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& msg) {
        if (!cond) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += msg;
        }
    }
    void note(const std::string& msg) {
        if (!detail.empty()) detail += "; ";
        detail += msg;
    }
};

Scenario load(const std::string& name) {
    return load_scenario(fs::path(RSN_SCENARIO_DIR) / (name + ".json"));
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / v.size();
}

double se_of(const std::vector<double>& v) {
    double m = mean_of(v), s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / (v.size() - 1) / v.size());
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g", x);
    return buf;
}

/// J samples per policy at a single r, common random numbers across policies.
std::map<std::string, std::vector<double>> run_cells(const Scenario& sc,
                                                     const std::vector<std::string>& policies,
                                                     int r) {
    Scenario one = sc;
    one.r_grid = {r};
    MatrixResult res = run_matrix(one, policies);
    std::map<std::string, std::vector<double>> out;
    for (const auto& row : res.rows) {
        if (row.failed) throw Error("CellFailed", row.error);
        out[row.policy].push_back(row.J);
    }
    return out;
}

// ---------------------------------------------------------------------------

Check criterion1() {
    Check c;
    HeavyTrafficModel m = load("single_queue").model;
    LimitQuantities lq = derive_limits(m);
    c.require(lq.theta(0) == -1.0 && lq.Sigma(0, 0) == 2.0 && lq.stable,
              "limits are not exactly theta=-1, Sigma=2");
    RbmParams p;  // dt=1e-3, horizon 2000, 16 reps
    p.seed = derive_seed(1, {0xb0u});
    RbmEstimate est = rbm_stationary_cost(make_bcp(m), p);
    c.require(std::abs(est.estimate - 1.0) <= est.ci_halfwidth,
              "estimate " + fmt(est.estimate) + " misses 1.0 by more than its CI " +
                  fmt(est.ci_halfwidth));
    c.require(est.ci_halfwidth <= 0.03, "CI halfwidth " + fmt(est.ci_halfwidth) + " > 0.03");
    c.note("estimate " + fmt(est.estimate) + " +- " + fmt(est.ci_halfwidth));
    return c;
}

Check criterion2() {
    Check c;
    const std::vector<std::string> policies = {"nominal", "hgi", "maxpressure"};
    for (const std::string& name : {std::string("single_queue"), std::string("linear2"),
                                    std::string("x_network")}) {
        Scenario sc = load(name);
        BoundReport bound = lower_bound_report(sc.model, sc.bound);
        auto cells = run_cells(sc, policies, 20);
        for (const auto& [policy, js] : cells) {
            double m = mean_of(js), se = se_of(js);
            c.require(m >= bound.bound_value - 3.0 * se,
                      name + "/" + policy + ": mean J " + fmt(m) + " < bound " +
                          fmt(bound.bound_value) + " - 3*SE (" + fmt(se) + ")");
        }
        c.note(name + " bound " + fmt(bound.bound_value));
    }
    return c;
}

Check criterion3() {
    Check c;
    for (const std::string& name : {std::string("single_queue"), std::string("linear2")}) {
        Scenario sc = load(name);
        BoundReport bound = lower_bound_report(sc.model, sc.bound);
        auto cells = run_cells(sc, {"hgi"}, 20);
        double m = mean_of(cells.at("hgi"));
        c.require(m <= 1.25 * bound.bound_value,
                  name + ": hgi mean J " + fmt(m) + " exceeds 1.25 * bound " +
                      fmt(bound.bound_value));
        c.note(name + " hgi " + fmt(m) + " vs bound " + fmt(bound.bound_value));
    }
    return c;
}

Check criterion4() {
    Check c;
    double worst = 0.0;
    for (const std::string& name :
         {std::string("single_queue"), std::string("linear2"), std::string("x_network"),
          std::string("unstable")}) {
        Scenario sc = load(name);
        for (const char* pname : {"nominal", "hgi", "maxpressure"}) {
            SimOptions opts;
            opts.grid_dt = sc.grid_dt;
            // both empty and backlogged starts
            for (long long q0v : {0LL, 30LL}) {
                CountVec q0 = CountVec::Constant(sc.model.topology.num_types, q0v);
                auto [trace, metrics] =
                    run(sc.model, 10, *make_policy(pname), 30.0, q0,
                        derive_seed(sc.base_seed, {4u, static_cast<std::uint64_t>(q0v)}), opts);
                double gap = scaled_views(trace).identity_gap.maxCoeff();
                worst = std::max(worst, gap);
            }
        }
    }
    c.require(worst < 1e-8, "max reconstruction gap " + fmt(worst) + " >= 1e-8");
    c.note("max gap " + fmt(worst));
    return c;
}

Check criterion5() {
    Check c;
    Scenario sc = load("linear2");
    const int r = 20;
    const double T = 2100.0;
    SimOptions opts;
    opts.grid_dt = 1.0;
    opts.record_events = false;
    opts.burn_in_fraction = 0.0;
    CountVec q0 = CountVec::Constant(3, 100000);  // backlogged for the whole run
    auto [trace, metrics] =
        run(sc.model, r, *make_policy("nominal"), T, q0, derive_seed(sc.base_seed, {5u}), opts);
    c.require(trace.grid.queue.minCoeff() > 0.0, "a queue emptied during the run");

    ScaledViews v = scaled_views(trace);
    const long long n = static_cast<long long>(v.t.size()) - 1;
    c.require(n >= 2000, "only " + std::to_string(n) + " unit windows");
    Mat inc(n, 2);
    for (long long k = 0; k < n; ++k) inc.row(k) = v.Xhat.row(k + 1) - v.Xhat.row(k);

    LimitQuantities lq = derive_limits(sc.model);
    Vec mu = inc.colwise().mean().transpose();
    Mat centered = inc.rowwise() - mu.transpose();
    Mat S = centered.transpose() * centered / double(n - 1);
    for (int i = 0; i < 2; ++i) {
        double se = std::sqrt(S(i, i) / double(n));
        c.require(std::abs(mu(i) - lq.theta(i)) <= 3.0 * se,
                  "mean increment " + fmt(mu(i)) + " misses theta_i " + fmt(lq.theta(i)) +
                      " (3*SE " + fmt(3.0 * se) + ")");
        for (int j = 0; j <= i; ++j) {
            double se_cov = std::sqrt((S(i, i) * S(j, j) + S(i, j) * S(i, j)) / double(n));
            c.require(std::abs(S(i, j) - lq.Sigma(i, j)) <= 3.0 * se_cov,
                      "cov(" + std::to_string(i) + "," + std::to_string(j) + ") = " +
                          fmt(S(i, j)) + " misses " + fmt(lq.Sigma(i, j)) + " (3*SE " +
                          fmt(3.0 * se_cov) + ")");
        }
    }
    c.note("mean (" + fmt(mu(0)) + "," + fmt(mu(1)) + "), var (" + fmt(S(0, 0)) + "," +
           fmt(S(1, 1)) + "), cov " + fmt(S(0, 1)));
    return c;
}

Check criterion6() {
    Check c;
    Scenario sc = load("single_queue");
    auto p = make_policy("hgi");
    std::vector<double> frac_mean, frac_se;
    for (int r : {5, 10, 20}) {
        std::vector<double> fracs;
        for (int rep = 0; rep < sc.replications; ++rep) {
            SimOptions opts;
            opts.grid_dt = sc.grid_dt;
            opts.burn_in_fraction = sc.burn_in_fraction;
            auto [trace, metrics] = run(
                sc.model, r, *p, sc.horizon_at(r), sc.q0_at(r),
                derive_seed(sc.base_seed,
                            {static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(rep)}),
                opts);
            fracs.push_back(residual_diagnostics(trace, sc.diag_eps).service_avg.maxCoeff());
        }
        frac_mean.push_back(mean_of(fracs));
        frac_se.push_back(se_of(fracs));
    }
    for (int k = 1; k < 3; ++k) {
        double slack = std::sqrt(frac_se[k] * frac_se[k] + frac_se[k - 1] * frac_se[k - 1]);
        c.require(frac_mean[k] <= frac_mean[k - 1] + slack,
                  "fraction rose from " + fmt(frac_mean[k - 1]) + " to " + fmt(frac_mean[k]) +
                      " (slack " + fmt(slack) + ")");
    }
    c.note("fractions " + fmt(frac_mean[0]) + " -> " + fmt(frac_mean[1]) + " -> " +
           fmt(frac_mean[2]));
    return c;
}

Check criterion7() {
    Check c;

    // Skorokhod point examples
    {
        Mat psi(101, 1);
        for (int k = 0; k <= 100; ++k) psi(k, 0) = -k / 100.0;
        auto [phi, eta] = skorokhod_reflect(psi, Vec::Zero(1));
        c.require(phi.cwiseAbs().maxCoeff() < 1e-12 && std::abs(eta(100, 0) - 1.0) < 1e-12,
                  "pure-pushing example failed");
    }
    {
        Mat psi(50, 1);
        for (int k = 0; k < 50; ++k) psi(k, 0) = 0.1 * k;
        auto [phi, eta] = skorokhod_reflect(psi, Vec::Zero(1));
        c.require((phi - psi).cwiseAbs().maxCoeff() < 1e-12 &&
                      eta.cwiseAbs().maxCoeff() < 1e-12,
                  "no-reflection example failed");
    }
    {
        std::vector<double> vals;
        for (int k = 0; k <= 100; ++k) vals.push_back(-k / 100.0);
        for (int k = 1; k <= 200; ++k) vals.push_back(-1.0 + k / 100.0);
        Mat psi(static_cast<int>(vals.size()), 1);
        for (int k = 0; k < psi.rows(); ++k) psi(k, 0) = vals[k];
        auto [phi, eta] = skorokhod_reflect(psi, Vec::Zero(1));
        c.require(std::abs(phi(psi.rows() - 1, 0) - 2.0) < 1e-12 &&
                      std::abs(eta(psi.rows() - 1, 0) - 1.0) < 1e-12,
                  "down-then-up example failed");
    }

    // LP / effective-cost point examples
    {
        Mat A(2, 3);
        A << 1, 0, 1, 0, 1, 1;
        Vec b(2);
        b << 2, 3;
        LpSolution lex = solve_lp_eq_lex(A, b, Vec::Ones(3));
        c.require(std::abs(lex.value - 3.0) < 1e-9 && std::abs(lex.x(0)) < 1e-9 &&
                      std::abs(lex.x(1) - 1.0) < 1e-9 && std::abs(lex.x(2) - 2.0) < 1e-9,
                  "linear-network LP example failed");

        Scenario lin = load("linear2");
        LimitQuantities lq = derive_limits(lin.model);
        EffectiveCost hc(lin.model.topology, lq.M, lin.model.h);
        c.require(std::abs(hc.value(Vec::Zero(2))) < 1e-12, "hhat(0) != 0");
        Vec w(2);
        w << 1, 1;
        c.require(hc.bound_constant(64) >= std::sqrt(2.0) - 1e-9, "c_h below sqrt(2)");
        c.require(hc.check_monotone(2000, 1).monotone, "monotone case misclassified");
    }

    // 100 random piecewise-linear paths: complementarity and Lipschitz-2
    std::mt19937_64 rng(20240817);
    std::normal_distribution<double> g(0.0, 1.0);
    auto random_path = [&](int n, int dim) {
        Mat psi = Mat::Zero(n, dim);
        for (int k = 1; k < n; ++k)
            for (int d = 0; d < dim; ++d) psi(k, d) = psi(k - 1, d) + 0.3 * g(rng) - 0.02;
        return psi;
    };
    for (int trial = 0; trial < 100 && c.ok; ++trial) {
        const int n = 200, dim = 2;
        Mat psi = random_path(n, dim);
        Vec w0 = Vec::Constant(dim, 0.3);
        auto [phi, eta] = skorokhod_reflect(psi, w0);
        c.require(phi.minCoeff() >= -1e-12, "reflection left the orthant");
        for (int k = 1; k < n && c.ok; ++k)
            for (int d = 0; d < dim; ++d) {
                double inc = eta(k, d) - eta(k - 1, d);
                c.require(inc >= -1e-12, "control decreased");
                if (inc > 1e-12)
                    c.require(phi(k, d) < 1e-9, "control moved away from the boundary");
            }
        Mat psi2 = random_path(n, dim);
        auto [phi2, eta2] = skorokhod_reflect(psi2, w0);
        c.require((phi - phi2).cwiseAbs().maxCoeff() <=
                      2.0 * (psi - psi2).cwiseAbs().maxCoeff() + 1e-10,
                  "Lipschitz-2 comparison failed");
    }
    return c;
}

Check criterion8() {
    Check c;
    Scenario sc = load("unstable");
    BoundReport bound = lower_bound_report(sc.model, sc.bound);
    c.require(bound.bound_kind == "infinite_unstable",
              "bound_kind is '" + bound.bound_kind + "'");

    auto p = make_policy("nominal");
    std::vector<double> w_mean, w_se;
    for (double T : {50.0, 100.0, 200.0}) {
        std::vector<double> ws;
        for (int rep = 0; rep < sc.replications; ++rep) {
            SimOptions opts;
            opts.grid_dt = sc.grid_dt;
            opts.burn_in_fraction = sc.burn_in_fraction;
            opts.record_events = false;
            auto [trace, metrics] =
                run(sc.model, 20, *p, T, sc.q0_at(20),
                    derive_seed(sc.base_seed, {20u, static_cast<std::uint64_t>(rep)}), opts);
            ws.push_back(metrics.workload_avg.maxCoeff());
        }
        w_mean.push_back(mean_of(ws));
        w_se.push_back(se_of(ws));
    }
    for (int k = 1; k < 3; ++k) {
        double pooled = std::sqrt(w_se[k] * w_se[k] + w_se[k - 1] * w_se[k - 1]);
        c.require(w_mean[k] - w_mean[k - 1] > pooled,
                  "time-average did not increase from T settings " + fmt(w_mean[k - 1]) +
                      " to " + fmt(w_mean[k]));
    }
    c.note("avg What " + fmt(w_mean[0]) + " -> " + fmt(w_mean[1]) + " -> " + fmt(w_mean[2]));
    return c;
}

Check criterion9(const std::string& rsnlab) {
    Check c;
    fs::path tmp = fs::temp_directory_path() / "rsn_accept9";
    fs::remove_all(tmp);
    fs::create_directories(tmp);
    fs::path scen = fs::path(RSN_SCENARIO_DIR) / "single_queue.json";
    for (const char* sub : {"a", "b"}) {
        std::string cmd = "\"" + rsnlab + "\" run \"" + scen.string() + "\" --out \"" +
                          (tmp / sub).string() + "\" >/dev/null 2>&1";
        int rc = std::system(cmd.c_str());
        c.require(rc == 0, std::string("rsnlab run ") + sub + " exited with " +
                               std::to_string(rc));
    }
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    for (const char* f : {"results.csv", "bound.json"}) {
        std::string a = slurp(tmp / "a" / f), b = slurp(tmp / "b" / f);
        c.require(!a.empty() && a == b, std::string(f) + " differs between identical runs");
    }
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: acceptance <criterion 1..9> [rsnlab path]\n");
        return 2;
    }
    const int n = std::atoi(argv[1]);
    Check c;
    try {
        switch (n) {
            case 1: c = criterion1(); break;
            case 2: c = criterion2(); break;
            case 3: c = criterion3(); break;
            case 4: c = criterion4(); break;
            case 5: c = criterion5(); break;
            case 6: c = criterion6(); break;
            case 7: c = criterion7(); break;
            case 8: c = criterion8(); break;
            case 9:
                if (argc < 3) {
                    std::fprintf(stderr, "criterion 9 needs the rsnlab path\n");
                    return 2;
                }
                c = criterion9(argv[2]);
                break;
            default:
                std::fprintf(stderr, "unknown criterion %d\n", n);
                return 2;
        }
    } catch (const std::exception& e) {
        c.ok = false;
        c.note(std::string("exception: ") + e.what());
    }
    std::printf("criterion %d: %s%s%s\n", n, c.ok ? "PASS" : "FAIL",
                c.detail.empty() ? "" : " — ", c.detail.c_str());
    return c.ok ? 0 : 1;
}
