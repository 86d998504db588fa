#include <benchmark/benchmark.h>

#include "rsn/bcp.hpp"
#include "rsn/harness.hpp"
#include "rsn/policies.hpp"
#include "rsn/sim.hpp"
#include "rsn/simplex.hpp"

using namespace rsn;

namespace {

HeavyTrafficModel linear_network() {
    Mat K(2, 3);
    K << 1, 0, 1, 0, 1, 1;
    Vec C(2);
    C << 2, 2;
    HeavyTrafficModel m;
    m.topology = validate_topology(K, C);
    m.alpha = Vec::Ones(3);
    m.beta = Vec::Ones(3);
    m.alpha_bar = -Vec::Ones(3);
    m.beta_bar = Vec::Zero(3);
    m.sigma_u = Vec::Ones(3);
    m.sigma_v = Vec::Ones(3);
    m.h = Vec::Ones(3);
    m.arrival_family = std::vector<Family>(3, Family::exponential);
    m.service_family = std::vector<Family>(3, Family::exponential);
    return m;
}

void bench_sim_events(benchmark::State& state) {
    HeavyTrafficModel m = linear_network();
    auto policy = make_policy(state.range(0) == 0 ? "nominal" : "hgi");
    std::uint64_t seed = 1;
    SimOptions opts;
    opts.record_events = false;
    for (auto _ : state) {
        state.PauseTiming();
        Simulator sim(m, 10, CountVec::Zero(3), seed++, opts);
        state.ResumeTiming();
        for (int k = 0; k < 1000; ++k) sim.step(*policy);
    }
    state.SetItemsProcessed(state.iterations() * 1000);
}

void bench_effective_cost(benchmark::State& state) {
    HeavyTrafficModel m = linear_network();
    EffectiveCost hc(m.topology, derive_limits(m).M, m.h);
    Vec w(2);
    w << 1.7, 0.4;
    for (auto _ : state) {
        benchmark::DoNotOptimize(hc.value(w));
        w(0) = 2.1 - w(0);  // defeat caching
    }
}

void bench_lp_vertex(benchmark::State& state) {
    HeavyTrafficModel m = linear_network();
    Mat KM = m.topology.incidence * derive_limits(m).M;
    Vec w(2);
    w << 1.7, 0.4;
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_lp_eq_lex(KM, w, m.h));
        w(0) = 2.1 - w(0);
    }
}

void bench_rbm_step(benchmark::State& state) {
    HeavyTrafficModel m = linear_network();
    BcpModel bcp = make_bcp(m);
    RbmParams p;
    p.dt = 1e-3;
    p.horizon = 10.0;
    p.burn_in = 1.0;
    p.n_reps = 2;
    for (auto _ : state) {
        p.seed++;
        benchmark::DoNotOptimize(rbm_stationary_cost(bcp, p));
    }
    state.SetItemsProcessed(state.iterations() * 20000);  // steps per call
}

}  // namespace

BENCHMARK(bench_sim_events)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(bench_effective_cost);
BENCHMARK(bench_lp_vertex);
BENCHMARK(bench_rbm_step)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
