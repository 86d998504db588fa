#include "rsn/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <thread>

namespace rsn {

namespace {

using nlohmann::json;

Vec parse_vec(const json& j, const std::string& field, int expect = -1) {
    if (!j.contains(field))
        throw Error("SchemaError", "missing field '" + field + "'");
    const json& a = j.at(field);
    if (!a.is_array()) throw Error("SchemaError", "field '" + field + "' must be an array");
    Vec v(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i].is_number())
            throw Error("SchemaError", "field '" + field + "' must hold numbers");
        v(static_cast<int>(i)) = a[i].get<double>();
    }
    if (expect >= 0 && v.size() != expect)
        throw Error("SchemaError", "field '" + field + "' has length " +
                                       std::to_string(v.size()) + ", expected " +
                                       std::to_string(expect));
    return v;
}

std::vector<Family> parse_families(const json& j, const std::string& field, int expect) {
    if (!j.contains(field)) throw Error("SchemaError", "missing field '" + field + "'");
    const json& a = j.at(field);
    if (!a.is_array() || static_cast<int>(a.size()) != expect)
        throw Error("SchemaError", "field '" + field + "' must list one family per job type");
    std::vector<Family> out;
    for (const auto& e : a) {
        if (!e.is_string()) throw Error("SchemaError", "field '" + field + "' must hold strings");
        out.push_back(family_from_string(e.get<std::string>()));
    }
    return out;
}

}  // namespace

CountVec Scenario::q0_at(int r) const {
    CountVec q(q0_scaled.size());
    for (int j = 0; j < q0_scaled.size(); ++j)
        q(j) = static_cast<long long>(std::llround(q0_scaled(j) * r));
    return q;
}

Scenario load_scenario_json(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error("SchemaError", origin + ": " + e.what());
    }
    Scenario sc;
    if (!j.contains("name") || !j.at("name").is_string())
        throw Error("SchemaError", "missing field 'name'");
    sc.name = j.at("name").get<std::string>();

    if (!j.contains("K") || !j.at("K").is_array() || j.at("K").empty())
        throw Error("SchemaError", "missing field 'K'");
    const json& kj = j.at("K");
    const int I = static_cast<int>(kj.size());
    const int J = static_cast<int>(kj[0].size());
    Mat K(I, J);
    for (int i = 0; i < I; ++i) {
        if (!kj[i].is_array() || static_cast<int>(kj[i].size()) != J)
            throw Error("SchemaError", "field 'K' must be a rectangular matrix");
        for (int c = 0; c < J; ++c) K(i, c) = kj[i][c].get<double>();
    }
    const Vec C = parse_vec(j, "C", I);

    HeavyTrafficModel m;
    m.topology = validate_topology(K, C);
    m.alpha = parse_vec(j, "alpha", J);
    m.beta = parse_vec(j, "beta", J);
    m.alpha_bar = parse_vec(j, "alpha_bar", J);
    m.beta_bar = parse_vec(j, "beta_bar", J);
    m.sigma_u = parse_vec(j, "sigma_u", J);
    m.sigma_v = parse_vec(j, "sigma_v", J);
    m.h = parse_vec(j, "h", J);
    m.arrival_family = parse_families(j, "arrival_families", J);
    m.service_family = parse_families(j, "service_families", J);
    validate_model(m);
    sc.model = m;

    sc.q0_scaled = j.contains("q0_scaled") ? parse_vec(j, "q0_scaled", J) : Vec::Zero(J);
    if ((sc.q0_scaled.array() < 0.0).any())
        throw Error("SchemaError", "field 'q0_scaled' must be nonnegative");

    if (!j.contains("r_grid")) throw Error("SchemaError", "missing field 'r_grid'");
    for (const auto& e : j.at("r_grid")) {
        const int r = e.get<int>();
        if (!sc.r_grid.empty() && r <= sc.r_grid.back())
            throw Error("SchemaError", "field 'r_grid' must be strictly increasing");
        if (r < 1) throw Error("SchemaError", "field 'r_grid' entries must be positive");
        sc.r_grid.push_back(r);
    }
    if (sc.r_grid.empty()) throw Error("SchemaError", "field 'r_grid' must be nonempty");
    for (int r : sc.r_grid) rates_at(m, r);  // reject r too small for the corrections

    if (j.contains("horizon_factor")) sc.horizon_factor = j.at("horizon_factor").get<double>();
    if (j.contains("horizon")) sc.horizon_fixed = j.at("horizon").get<double>();
    if (sc.horizon_factor <= 0.0 && sc.horizon_fixed <= 0.0)
        throw Error("SchemaError", "field 'horizon_factor' must be positive");
    if (j.contains("replications")) sc.replications = j.at("replications").get<int>();
    if (sc.replications < 1) throw Error("SchemaError", "field 'replications' must be >= 1");
    if (j.contains("base_seed")) sc.base_seed = j.at("base_seed").get<std::uint64_t>();
    if (j.contains("grid_dt")) sc.grid_dt = j.at("grid_dt").get<double>();
    if (sc.grid_dt <= 0.0) throw Error("SchemaError", "field 'grid_dt' must be positive");
    if (j.contains("burn_in_fraction"))
        sc.burn_in_fraction = j.at("burn_in_fraction").get<double>();
    if (sc.burn_in_fraction < 0.0 || sc.burn_in_fraction >= 1.0)
        throw Error("SchemaError", "field 'burn_in_fraction' must lie in [0, 1)");
    if (j.contains("diagnostics")) {
        const json& d = j.at("diagnostics");
        if (d.contains("eps")) sc.diag_eps = d.at("eps").get<double>();
        if (d.contains("drift_window")) sc.drift_window = d.at("drift_window").get<double>();
    }
    if (j.contains("bound")) {
        const json& b = j.at("bound");
        if (b.contains("dt")) sc.bound.dt = b.at("dt").get<double>();
        if (b.contains("horizon")) sc.bound.horizon = b.at("horizon").get<double>();
        if (b.contains("burn_in")) sc.bound.burn_in = b.at("burn_in").get<double>();
        if (b.contains("replications")) sc.bound.n_reps = b.at("replications").get<int>();
    }
    sc.bound.seed = derive_seed(sc.base_seed, {0xb0u});
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("FileNotFound", path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_scenario_json(ss.str(), path.string());
}

MatrixResult run_matrix(const Scenario& scenario, const std::vector<std::string>& policies,
                        RunMatrixOptions opts) {
    if (policies.empty()) throw Error("EmptyMatrix", "no policies selected");
    for (const auto& p : policies) make_policy(p);  // fail fast on unknown names

    MatrixResult res;
    res.scenario = scenario;
    res.policies = policies;
    res.bound = lower_bound_report(scenario.model, scenario.bound);

    struct Cell {
        std::string policy;
        int r;
        int rep;
    };
    std::vector<Cell> cells;
    for (const auto& p : policies)
        for (int r : scenario.r_grid)
            for (int rep = 0; rep < scenario.replications; ++rep) cells.push_back({p, r, rep});
    res.rows.resize(cells.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= cells.size()) return;
            const Cell& cell = cells[k];
            ResultRow& row = res.rows[k];
            row.scenario = scenario.name;
            row.policy = cell.policy;
            row.r = cell.r;
            row.rep = cell.rep;
            row.T = scenario.horizon_at(cell.r);
            // replications share seeds across policies (common random numbers)
            row.seed = derive_seed(scenario.base_seed,
                                   {static_cast<std::uint64_t>(cell.r),
                                    static_cast<std::uint64_t>(cell.rep)});
            try {
                auto policy = make_policy(cell.policy);
                SimOptions so;
                so.grid_dt = scenario.grid_dt;
                so.burn_in_fraction = scenario.burn_in_fraction;
                auto [trace, metrics] = run(scenario.model, cell.r, *policy, row.T,
                                            scenario.q0_at(cell.r), row.seed, so);
                row.J = metrics.cost;
                row.J_noburn = metrics.cost_noburn;
                row.W_avg = metrics.workload_avg;
                const ResidualDiagnostics diag = residual_diagnostics(trace, scenario.diag_eps);
                row.resA_sup = diag.arrival_sup.maxCoeff();
                row.resS_avg = diag.service_avg.maxCoeff();
                row.alloc_drift =
                    allocation_drift(trace, scenario.drift_window, scenario.diag_eps);
                row.wall_ms = opts.record_wall ? metrics.wall_ms : 0.0;
            } catch (const std::exception& e) {
                row.failed = true;
                row.error = e.what();
                row.W_avg = Vec::Zero(scenario.model.topology.num_resources);
            }
        }
    };

    int n_threads = opts.threads > 0 ? opts.threads
                                     : static_cast<int>(std::thread::hardware_concurrency());
    if (n_threads < 1) n_threads = 1;
    n_threads = std::min<int>(n_threads, static_cast<int>(cells.size()));
    std::vector<std::thread> pool;
    for (int i = 1; i < n_threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    for (const auto& row : res.rows)
        if (row.failed) ++res.failed_cells;
    return res;
}

}  // namespace rsn
