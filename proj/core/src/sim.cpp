#include "rsn/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace rsn {

namespace {
constexpr double kTie = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

Simulator::Simulator(const HeavyTrafficModel& m, int r, const CountVec& q0, std::uint64_t seed,
                     SimOptions opts)
    : model_(m), rates_(rates_at(m, r)), limits_(derive_limits(m)), r_(r), opts_(opts),
      seed_(seed) {
    const int J = m.topology.num_types;
    if (q0.size() != J) throw Error("DimensionMismatch", "q0 length");
    if ((q0.array() < 0).any()) throw Error("InvalidArgument", "q0 must be nonnegative");
    KMr_ = m.topology.incidence * rates_.M_r;

    arr_spec_.reserve(J);
    svc_spec_.reserve(J);
    for (int j = 0; j < J; ++j) {
        arr_spec_.push_back(solve_params(m.arrival_family[j], 1.0 / rates_.alpha_r(j),
                                         rates_.sigma_u_r(j)));
        svc_spec_.push_back(solve_params(m.service_family[j], 1.0 / rates_.beta_r(j),
                                         rates_.sigma_v_r(j)));
        arr_stream_.emplace_back(seed, std::initializer_list<std::uint64_t>{
                                           1, static_cast<std::uint64_t>(j)});
        svc_stream_.emplace_back(seed, std::initializer_list<std::uint64_t>{
                                           2, static_cast<std::uint64_t>(j)});
    }

    state_.queue = q0;
    state_.next_arrival = Vec(J);
    state_.hol_remaining = Vec::Zero(J);
    state_.hol_active.assign(J, 0);
    state_.arrival_index.assign(J, 0);
    state_.service_index.assign(J, 0);
    state_.cum_arrivals = CountVec::Zero(J);
    state_.cum_completions = CountVec::Zero(J);
    state_.cum_alloc = Vec::Zero(J);
    state_.current_rates = Vec::Zero(J);
    for (int j = 0; j < J; ++j) {
        state_.next_arrival(j) =
            opts_.disable_arrivals ? kInf : sample(arr_spec_[j], arr_stream_[j]);
        if (q0(j) > 0) {
            state_.hol_remaining(j) = sample(svc_spec_[j], svc_stream_[j]);
            state_.hol_active[j] = 1;
            state_.service_index[j] = 1;
        }
    }
    queue_integral_ = Vec::Zero(J);
}

void Simulator::ensure_hol(int j) {
    if (!state_.hol_active[j] && state_.queue(j) > 0) {
        state_.hol_remaining(j) = sample(svc_spec_[j], svc_stream_[j]);
        state_.hol_active[j] = 1;
        ++state_.service_index[j];
    }
}

Vec Simulator::decide_rates(const Policy& policy) {
    PolicySnapshot snap;
    snap.t_scaled = clock_scaled();
    snap.r = r_;
    snap.queue = &state_.queue;
    snap.workload = KMr_ * state_.queue.cast<double>();
    snap.topology = &model_.topology;
    snap.rates = &rates_;
    snap.limits = &limits_;
    snap.h = &model_.h;
    Vec b = policy.rates(snap);
    if (b.size() != model_.topology.num_types)
        throw Error("InfeasibleRates", "policy '" + policy.name() + "' returned wrong length");
    for (int j = 0; j < b.size(); ++j)
        if (state_.queue(j) == 0 || b(j) < 0.0) b(j) = 0.0;
    const Vec load = model_.topology.incidence * b - model_.topology.capacity;
    if (load.maxCoeff() > 1e-9)
        throw Error("InfeasibleRates",
                    "policy '" + policy.name() + "' exceeds capacity by " +
                        std::to_string(load.maxCoeff()));
    for (int j = 0; j < b.size(); ++j)
        if (b(j) > 0.0) ensure_hol(j);
    return b;
}

void Simulator::record_grid_until(double t_limit, const Vec& b) {
    const int J = model_.topology.num_types;
    GridSamples& g = trace_.grid;
    const double gstep = opts_.grid_dt * static_cast<double>(r_) * r_;
    while (grid_count_ < g.queue.rows()) {
        const double tg = static_cast<double>(grid_count_) * gstep;
        if (tg > t_limit + kTie) break;
        const double dt = std::max(tg - state_.t, 0.0);
        const long long k = grid_count_;
        g.t_scaled[static_cast<std::size_t>(k)] =
            static_cast<double>(grid_count_) * opts_.grid_dt;
        for (int j = 0; j < J; ++j) {
            g.queue(k, j) = static_cast<double>(state_.queue(j));
            g.cum_arrivals(k, j) = static_cast<double>(state_.cum_arrivals(j));
            g.cum_completions(k, j) = static_cast<double>(state_.cum_completions(j));
            g.cum_alloc(k, j) = state_.cum_alloc(j) + b(j) * dt;
            g.next_arrival(k, j) = state_.next_arrival(j);
            g.hol_residual(k, j) =
                state_.hol_active[j] ? std::max(state_.hol_remaining(j) - b(j) * dt, 0.0) : 0.0;
        }
        ++grid_count_;
    }
}

void Simulator::advance(double dt, const Vec& b) {
    if (dt < 0.0) dt = 0.0;
    record_grid_until(state_.t + dt, b);
    const double hq = model_.h.dot(state_.queue.cast<double>());
    const double t1 = state_.t + dt;
    if (run_mode_) {
        cost_integral_ += hq * dt;
        if (state_.t < burn_epoch_) {
            const double before = std::min(t1, burn_epoch_) - state_.t;
            cost_integral_burn_ += hq * before;
            if (t1 > burn_epoch_)
                queue_integral_ += state_.queue.cast<double>() * (t1 - burn_epoch_);
        } else {
            queue_integral_ += state_.queue.cast<double>() * dt;
        }
    }
    for (int j = 0; j < b.size(); ++j) {
        if (b(j) > 0.0 && state_.hol_active[j])
            state_.hol_remaining(j) = std::max(state_.hol_remaining(j) - b(j) * dt, 0.0);
        state_.cum_alloc(j) += b(j) * dt;
    }
    state_.t = t1;
    state_.current_rates = b;
}

void Simulator::log_event(EventKind kind, int type) {
    if (!run_mode_ || !opts_.record_events) return;
    const int J = model_.topology.num_types;
    trace_.event_time.push_back(state_.t);
    trace_.event_kind.push_back(kind);
    trace_.event_type.push_back(type);
    for (int j = 0; j < J; ++j) {
        trace_.event_queue.push_back(static_cast<std::int32_t>(state_.queue(j)));
        trace_.event_alloc.push_back(state_.cum_alloc(j));
    }
}

// Tie order within kTie: arrivals first (by type index), then completions
// (by type index), then review.
Simulator::StepResult Simulator::next_event(const Vec& b) const {
    const int J = model_.topology.num_types;
    double dt = opts_.max_review;
    EventKind kind = EventKind::review;
    int type = -1;
    for (int j = 0; j < J; ++j) {
        const double d = state_.next_arrival(j) - state_.t;
        if (d < dt - kTie || (d < dt + kTie && kind == EventKind::review)) {
            dt = d;
            kind = EventKind::arrival;
            type = j;
        }
    }
    for (int j = 0; j < J; ++j) {
        if (b(j) <= 0.0 || !state_.hol_active[j]) continue;
        const double d = state_.hol_remaining(j) / b(j);
        if (d < dt - kTie || (d < dt + kTie && kind == EventKind::review)) {
            dt = d;
            kind = EventKind::completion;
            type = j;
        }
    }
    return {kind, type, state_.t + dt};
}

void Simulator::apply_event(EventKind kind, int type) {
    switch (kind) {
        case EventKind::arrival:
            state_.queue(type) += 1;
            state_.cum_arrivals(type) += 1;
            ++state_.arrival_index[type];
            state_.next_arrival(type) = state_.t + sample(arr_spec_[type], arr_stream_[type]);
            break;
        case EventKind::completion:
            state_.queue(type) -= 1;
            state_.cum_completions(type) += 1;
            state_.hol_remaining(type) = 0.0;
            state_.hol_active[type] = 0;
            break;
        case EventKind::review:
            break;
    }
    log_event(kind, type);
}

Simulator::StepResult Simulator::step(const Policy& policy) {
    const Vec b = decide_rates(policy);
    const StepResult ev = next_event(b);
    if (!std::isfinite(ev.t))
        throw Error("NoEvent", "no pending event and no review interval");
    advance(ev.t - state_.t, b);
    apply_event(ev.kind, ev.type);
    return {ev.kind, ev.type, state_.t};
}

std::pair<Trace, RunMetrics> Simulator::run(const Policy& policy, double horizon_scaled) {
    if (horizon_scaled <= 0.0) throw Error("InvalidArgument", "horizon must be positive");
    if (run_mode_ || state_.t != 0.0)
        throw Error("InvalidArgument", "run() requires a fresh Simulator");
    const auto wall0 = std::chrono::steady_clock::now();
    const int J = model_.topology.num_types;
    const double r2 = static_cast<double>(r_) * r_;
    horizon_unscaled_ = r2 * horizon_scaled;
    burn_epoch_ = opts_.burn_in_fraction * horizon_unscaled_;
    run_mode_ = true;

    trace_.topology = model_.topology;
    trace_.rates = rates_;
    trace_.limits = limits_;
    trace_.h = model_.h;
    trace_.q0 = state_.queue;
    trace_.horizon = horizon_scaled;
    trace_.grid_dt = opts_.grid_dt;
    trace_.has_event_log = opts_.record_events;
    const long long n_grid =
        static_cast<long long>(std::floor(horizon_scaled / opts_.grid_dt + 1e-9)) + 1;
    trace_.grid.t_scaled.assign(static_cast<std::size_t>(n_grid), 0.0);
    trace_.grid.queue = Mat::Zero(n_grid, J);
    trace_.grid.cum_arrivals = Mat::Zero(n_grid, J);
    trace_.grid.cum_completions = Mat::Zero(n_grid, J);
    trace_.grid.cum_alloc = Mat::Zero(n_grid, J);
    trace_.grid.next_arrival = Mat::Zero(n_grid, J);
    trace_.grid.hol_residual = Mat::Zero(n_grid, J);
    grid_count_ = 0;

    long long n_events = 0;
    while (state_.t < horizon_unscaled_ - kTie) {
        const Vec b = decide_rates(policy);
        const StepResult ev = next_event(b);
        if (ev.t >= horizon_unscaled_) {
            advance(horizon_unscaled_ - state_.t, b);
            break;
        }
        advance(ev.t - state_.t, b);
        apply_event(ev.kind, ev.type);
        ++n_events;
    }
    record_grid_until(horizon_unscaled_, state_.current_rates);

    const double r3 = r2 * r_;
    const double span = horizon_scaled * (1.0 - opts_.burn_in_fraction);
    RunMetrics metrics;
    metrics.cost = (cost_integral_ - cost_integral_burn_) / (r3 * span);
    metrics.cost_noburn = cost_integral_ / (r3 * horizon_scaled);
    metrics.workload_avg = (KMr_ * queue_integral_) / (r3 * span);
    metrics.seed = seed_;
    metrics.n_events = n_events;
    metrics.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - wall0)
                          .count();
    return {std::move(trace_), metrics};
}

std::pair<Trace, RunMetrics> run(const HeavyTrafficModel& m, int r, const Policy& policy,
                                 double horizon_scaled, const CountVec& q0, std::uint64_t seed,
                                 SimOptions opts) {
    Simulator sim(m, r, q0, seed, opts);
    return sim.run(policy, horizon_scaled);
}

ScaledViews scaled_views(const Trace& trace) {
    const int r = trace.rates.r;
    const double rd = static_cast<double>(r);
    const double r2 = rd * rd;
    const long long n = trace.grid.rows();
    const int I = trace.topology.num_resources;
    const Mat& K = trace.topology.incidence;
    const Mat KMr = K * trace.rates.M_r;
    const Vec w0 = (KMr * trace.q0.cast<double>()) / rd;
    const Vec drift_term = K * (trace.rates.rho_r - trace.limits.rho);

    ScaledViews v;
    v.t = trace.grid.t_scaled;
    v.Qhat = trace.grid.queue / rd;
    v.What = Mat(n, I);
    v.Uhat = Mat(n, I);
    v.Xhat = Mat(n, I);
    v.identity_gap = Vec(n);
    for (long long k = 0; k < n; ++k) {
        const double tu = trace.grid.t_scaled[static_cast<std::size_t>(k)] * r2;
        const Vec q = trace.grid.queue.row(k).transpose();
        const Vec cumA = trace.grid.cum_arrivals.row(k).transpose();
        const Vec cumS = trace.grid.cum_completions.row(k).transpose();
        const Vec cumB = trace.grid.cum_alloc.row(k).transpose();
        const Vec Ahat = (cumA - tu * trace.rates.alpha_r) / rd;
        const Vec Shat = (cumS - trace.rates.beta_r.cwiseProduct(cumB)) / rd;
        const Vec What = (KMr * q) / rd;
        const Vec Uhat = (tu * trace.topology.capacity - K * cumB) / rd;
        const Vec Xhat = KMr * (Ahat - Shat) + (tu / rd) * drift_term;
        v.What.row(k) = What.transpose();
        v.Uhat.row(k) = Uhat.transpose();
        v.Xhat.row(k) = Xhat.transpose();
        v.identity_gap(k) = (What - (w0 + Xhat + Uhat)).cwiseAbs().maxCoeff();
    }
    return v;
}

ResidualDiagnostics residual_diagnostics(const Trace& trace, double eps) {
    const double rd = static_cast<double>(trace.rates.r);
    const double r2 = rd * rd;
    const long long n = trace.grid.rows();
    const int J = trace.topology.num_types;
    ResidualDiagnostics d;
    d.arrival_sup = Vec::Zero(J);
    d.service_avg = Vec::Zero(J);
    if (n == 0) return d;
    for (int j = 0; j < J; ++j) {
        double exceed_a = 0.0;
        long long exceed_s = 0;
        for (long long k = 0; k < n; ++k) {
            const double tu = trace.grid.t_scaled[static_cast<std::size_t>(k)] * r2;
            const double ups_a = (trace.grid.next_arrival(k, j) - tu) / rd;
            const double ups_s = trace.grid.hol_residual(k, j) / rd;
            if (ups_a > eps) exceed_a = 1.0;
            if (ups_s > eps) ++exceed_s;
        }
        d.arrival_sup(j) = exceed_a;
        d.service_avg(j) = static_cast<double>(exceed_s) / static_cast<double>(n);
    }
    return d;
}

// The sup inside each window is taken over the event epochs it contains
// (plus the window start), where the piecewise-linear fluid allocation has
// its breakpoints.
double allocation_drift(const Trace& trace, double window, double eps) {
    if (window < 0.0) throw Error("InvalidArgument", "window must be nonnegative");
    if (window > trace.horizon) throw Error("WindowExceedsHorizon", "window exceeds the horizon");
    if (!trace.has_event_log)
        throw Error("InvalidArgument", "allocation_drift needs the event log");
    const double r2 = static_cast<double>(trace.rates.r) * trace.rates.r;
    const int J = trace.topology.num_types;
    const long long n = trace.grid.rows();
    const long long ne = trace.n_events();

    long long exceed = 0, total = 0;
    long long lo = 0;
    for (long long k = 0; k < n; ++k) {
        const double t0 = trace.grid.t_scaled[static_cast<std::size_t>(k)];
        if (t0 + window > trace.horizon + 1e-12) break;
        ++total;
        while (lo < ne && trace.event_time[static_cast<std::size_t>(lo)] <= t0 * r2) ++lo;
        bool over = false;
        for (int j = 0; j < J && !over; ++j) {
            const double base =
                (trace.grid.cum_alloc(k, j) + trace.grid.hol_residual(k, j)) / r2;
            const double rho_j = trace.limits.rho(j);
            for (long long e = lo; e < ne; ++e) {
                const double te = trace.event_time[static_cast<std::size_t>(e)];
                if (te > (t0 + window) * r2) break;
                const double s = te / r2 - t0;
                const double Bbar = trace.event_alloc[static_cast<std::size_t>(e * J + j)] / r2;
                const double f = std::max(Bbar - base, 0.0) - rho_j * s;
                if (std::abs(f) > eps) {
                    over = true;
                    break;
                }
            }
        }
        if (over) ++exceed;
    }
    if (total == 0) return 0.0;
    return static_cast<double>(exceed) / static_cast<double>(total);
}

std::vector<OccupationSample> occupation_samples(const Trace& trace, double window,
                                                 int n_samples) {
    if (n_samples < 1) throw Error("InvalidArgument", "n_samples must be >= 1");
    if (window > trace.horizon + 1e-12)
        throw Error("WindowExceedsHorizon", "window exceeds the horizon");
    const ScaledViews v = scaled_views(trace);
    const long long n = static_cast<long long>(v.t.size());
    const long long m = static_cast<long long>(std::llround(window / trace.grid_dt));
    const long long last = n - 1 - m;
    if (last < 0) throw Error("WindowExceedsHorizon", "grid too coarse for the window");
    std::vector<OccupationSample> out;
    out.reserve(static_cast<std::size_t>(n_samples));
    for (int k = 0; k < n_samples; ++k) {
        const long long idx =
            (n_samples == 1) ? 0
                             : static_cast<long long>(std::llround(
                                   static_cast<double>(k) * last / (n_samples - 1)));
        OccupationSample s;
        s.t0 = v.t[static_cast<std::size_t>(idx)];
        s.workload = v.What.row(idx).transpose();
        s.noise_increment = Mat(m + 1, v.Xhat.cols());
        s.control_increment = Mat(m + 1, v.Uhat.cols());
        for (long long l = 0; l <= m; ++l) {
            s.noise_increment.row(l) = v.Xhat.row(idx + l) - v.Xhat.row(idx);
            s.control_increment.row(l) = v.Uhat.row(idx + l) - v.Uhat.row(idx);
        }
        out.push_back(std::move(s));
    }
    return out;
}

double cost_integral(const Trace& trace, double from_scaled, double to_scaled) {
    if (!trace.has_event_log)
        throw Error("InvalidArgument", "cost_integral needs the event log");
    const double r2 = static_cast<double>(trace.rates.r) * trace.rates.r;
    const double r3 = r2 * trace.rates.r;
    const double a = from_scaled * r2;
    const double b = to_scaled * r2;
    const int J = trace.topology.num_types;
    double integral = 0.0;
    Vec q = trace.q0.cast<double>();
    double t_prev = 0.0;
    auto add = [&](double t0, double t1) {
        const double lo = std::max(t0, a), hi = std::min(t1, b);
        if (hi > lo) integral += trace.h.dot(q) * (hi - lo);
    };
    for (long long e = 0; e < trace.n_events(); ++e) {
        const double te = trace.event_time[static_cast<std::size_t>(e)];
        add(t_prev, te);
        for (int j = 0; j < J; ++j)
            q(j) = static_cast<double>(trace.event_queue[static_cast<std::size_t>(e * J + j)]);
        t_prev = te;
    }
    add(t_prev, trace.horizon * r2);
    return integral / r3;
}

}  // namespace rsn
