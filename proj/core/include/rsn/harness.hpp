#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rsn/bcp.hpp"
#include "rsn/model.hpp"
#include "rsn/sim.hpp"

namespace rsn {

/// A fully validated experiment description, loaded from a JSON scenario
/// file. See README for the schema.
struct Scenario {
    std::string name;
    HeavyTrafficModel model;
    Vec q0_scaled;               // length J; q0 at parameter r is round(r * q0_scaled)
    std::vector<int> r_grid;     // strictly increasing
    double horizon_factor = 10.0;  // scaled horizon T = horizon_factor * r
    double horizon_fixed = 0.0;    // when > 0, overrides horizon_factor
    int replications = 8;
    std::uint64_t base_seed = 1;
    double grid_dt = 0.1;
    double burn_in_fraction = 0.2;
    double diag_eps = 0.5;       // residual-diagnostic threshold
    double drift_window = 1.0;   // allocation-drift window (scaled)
    RbmParams bound;             // Monte Carlo parameters of the bound

    double horizon_at(int r) const {
        return horizon_fixed > 0.0 ? horizon_fixed : horizon_factor * r;
    }
    CountVec q0_at(int r) const;
};

/// Parses and validates a scenario file. Throws Error with code
/// "SchemaError" (naming the field) or any model/stochastic validation code.
Scenario load_scenario(const std::filesystem::path& path);
Scenario load_scenario_json(const std::string& text, const std::string& origin = "<string>");

struct ResultRow {
    std::string scenario;
    std::string policy;
    int r = 0;
    double T = 0.0;
    int rep = 0;
    std::uint64_t seed = 0;
    double J = 0.0;         // burn-in removed
    double J_noburn = 0.0;
    Vec W_avg;              // length I
    double resA_sup = 0.0;  // max over types of the arrival-residual sup indicator
    double resS_avg = 0.0;  // max over types of the service-residual time average
    double alloc_drift = 0.0;
    double wall_ms = 0.0;
    bool failed = false;
    std::string error;
};

struct MatrixResult {
    Scenario scenario;
    std::vector<std::string> policies;
    std::vector<ResultRow> rows;  // sorted by (policy, r, rep)
    BoundReport bound;
    int failed_cells = 0;
};

struct RunMatrixOptions {
    int threads = 0;          // 0 = hardware concurrency
    bool record_wall = false; // when false, wall_ms is written as 0 for reproducible files
};

/// Runs every (policy, r, replication) cell plus the bound. Cell failures
/// are recorded in the row and counted; the matrix keeps going.
MatrixResult run_matrix(const Scenario& scenario, const std::vector<std::string>& policies,
                        RunMatrixOptions opts = {});

/// Report writers. All output is deterministic given the input structs
/// (fixed formatting, fixed row order).
void write_results_csv(const MatrixResult& res, const std::filesystem::path& path);
std::string bound_json_string(const BoundReport& bound);
void write_bound_json(const BoundReport& bound, const std::filesystem::path& path);
void write_summary(const MatrixResult& res, const std::filesystem::path& path);
void write_svg_plot(const MatrixResult& res, const std::filesystem::path& path);
void write_trace_csv(const Trace& trace, const std::filesystem::path& path);

/// Convenience: results.csv, bound.json, summary.txt, plot.svg under out_dir.
void write_reports(const MatrixResult& res, const std::filesystem::path& out_dir);

}  // namespace rsn
