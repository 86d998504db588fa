#pragma once

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "rsn/model.hpp"
#include "rsn/policies.hpp"
#include "rsn/stochastic.hpp"

namespace rsn {

enum class EventKind : std::uint8_t { arrival = 0, completion = 1, review = 2 };

struct SimOptions {
    double grid_dt = 0.1;  // scaled spacing of recorded samples
    double burn_in_fraction = 0.2;  // head fraction of the horizon excluded from the burned cost
    double max_review = std::numeric_limits<double>::infinity();  // unscaled; forces extra policy reviews
    bool disable_arrivals = false;  // test hook: drain-only runs
    bool record_events = true;      // the grid is always recorded
};

struct SimState {
    double t = 0.0;        // unscaled clock
    CountVec queue;        // Q, length J
    Vec next_arrival;      // absolute unscaled arrival times
    Vec hol_remaining;     // remaining work of the head-of-line job (valid iff hol_active)
    std::vector<char> hol_active;
    std::vector<long long> arrival_index;  // consumed interarrival renewals
    std::vector<long long> service_index;  // consumed job-size renewals
    CountVec cum_arrivals;     // A(t)
    CountVec cum_completions;  // S(B(t))
    Vec cum_alloc;             // B(t), capacity * time
    Vec current_rates;         // b in force over the last interval
};

/// Columnar per-grid-time samples, enough to reconstruct every scaled view.
struct GridSamples {
    std::vector<double> t_scaled;
    Mat queue;            // n x J
    Mat cum_arrivals;     // n x J
    Mat cum_completions;  // n x J
    Mat cum_alloc;        // n x J
    Mat next_arrival;     // n x J, absolute unscaled
    Mat hol_residual;     // n x J, 0 where no job has consumed its renewal
    long long rows() const { return static_cast<long long>(t_scaled.size()); }
};

struct Trace {
    NetworkTopology topology;
    RateSequence rates;
    LimitQuantities limits;
    Vec h;
    CountVec q0;
    double horizon = 0.0;  // scaled
    double grid_dt = 0.1;

    bool has_event_log = false;

    // event log, columnar; empty when record_events was false
    std::vector<double> event_time;  // unscaled epochs
    std::vector<EventKind> event_kind;
    std::vector<std::int32_t> event_type;
    std::vector<std::int32_t> event_queue;  // row-major (n_events x J), post-event Q
    std::vector<double> event_alloc;        // row-major (n_events x J), B at the epoch

    GridSamples grid;

    int r() const { return rates.r; }
    long long n_events() const { return static_cast<long long>(event_time.size()); }
};

struct RunMetrics {
    double cost = 0.0;         // finite-horizon ergodic cost, burn-in removed
    double cost_noburn = 0.0;  // same over the full horizon
    Vec workload_avg;          // time-average of scaled workload, burn-in removed
    std::uint64_t seed = 0;
    long long n_events = 0;
    double wall_ms = 0.0;
};

/// Event-driven simulator of the r-th network. One instance per run; runs
/// with distinct seeds share nothing mutable.
class Simulator {
public:
    Simulator(const HeavyTrafficModel& m, int r, const CountVec& q0, std::uint64_t seed,
              SimOptions opts = {});

    struct StepResult {
        EventKind kind;
        int type;      // -1 for review
        double t;      // unscaled epoch
    };

    /// Advances to the next event under the given policy. Throws
    /// InfeasibleRates when the policy requests K b > C.
    StepResult step(const Policy& policy);

    /// Runs until the scaled horizon, recording grid samples and, when
    /// enabled, the event log. Call once.
    std::pair<Trace, RunMetrics> run(const Policy& policy, double horizon_scaled);

    const SimState& state() const { return state_; }
    const RateSequence& rates() const { return rates_; }
    double clock_scaled() const { return state_.t / (static_cast<double>(r_) * r_); }

private:
    Vec decide_rates(const Policy& policy);
    StepResult next_event(const Vec& b) const;
    void apply_event(EventKind kind, int type);
    void ensure_hol(int j);
    void advance(double dt, const Vec& b);
    void record_grid_until(double t_limit, const Vec& b);
    void log_event(EventKind kind, int type);

    HeavyTrafficModel model_;
    RateSequence rates_;
    LimitQuantities limits_;
    Mat KMr_;  // I x J
    int r_;
    SimOptions opts_;
    std::uint64_t seed_;
    SimState state_;
    std::vector<DistributionSpec> arr_spec_, svc_spec_;
    std::vector<RngStream> arr_stream_, svc_stream_;

    // integrals, maintained exactly over the piecewise-constant queue path
    double cost_integral_ = 0.0;          // unscaled  int h.Q dt
    double cost_integral_burn_ = 0.0;     // the part before the burn-in epoch
    Vec queue_integral_;                  // unscaled  int Q dt (post burn-in)
    double burn_epoch_ = 0.0;             // unscaled
    double horizon_unscaled_ = 0.0;

    Trace trace_;
    long long grid_count_ = 0;  // rows recorded so far
    bool run_mode_ = false;
};

/// Convenience wrapper: simulate model r under policy from q0 with the given
/// seed over the scaled horizon.
std::pair<Trace, RunMetrics> run(const HeavyTrafficModel& m, int r, const Policy& policy,
                                 double horizon_scaled, const CountVec& q0, std::uint64_t seed,
                                 SimOptions opts = {});

/// Scaled processes on the recorded grid, plus the reconstruction gap
/// max_i |What_i - (what0 + Xhat + Uhat)_i| per grid row.
struct ScaledViews {
    std::vector<double> t;  // scaled
    Mat Qhat;               // n x J
    Mat What;               // n x I
    Mat Uhat;               // n x I
    Mat Xhat;               // n x I
    Vec identity_gap;       // n
};
ScaledViews scaled_views(const Trace& trace);

/// Empirical residual diagnostics at threshold eps:
///   arrival_sup_j  = sup over the grid of 1{ scaled arrival residual > eps }
///   service_avg_j  = grid time-average of 1{ scaled service residual > eps }
struct ResidualDiagnostics {
    Vec arrival_sup;  // per type, 0 or 1
    Vec service_avg;  // per type, in [0,1]
};
ResidualDiagnostics residual_diagnostics(const Trace& trace, double eps);

/// Time-averaged fraction of grid times t at which the fluid-scaled
/// allocation over [t, t+window] strays from the nominal line rho*s by more
/// than eps (sup over event epochs inside the window). Needs the event log.
double allocation_drift(const Trace& trace, double window, double eps);

/// Windowed triples (workload now, centered-noise increments, control
/// increments) at n_samples uniformly spaced start times.
struct OccupationSample {
    double t0 = 0.0;            // scaled window start
    Vec workload;               // What(t0), length I
    Mat noise_increment;        // (m+1) x I, Xhat(t0 + k dt_g) - Xhat(t0)
    Mat control_increment;      // (m+1) x I, Uhat(t0 + k dt_g) - Uhat(t0)
};
std::vector<OccupationSample> occupation_samples(const Trace& trace, double window, int n_samples);

/// Exact scaled cost integral  int_a^b h.Qhat dt  from the event log.
double cost_integral(const Trace& trace, double from_scaled, double to_scaled);

}  // namespace rsn
