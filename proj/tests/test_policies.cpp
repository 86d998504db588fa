#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "rsn/policies.hpp"

using namespace rsn;
using rsn::testutil::thrown_code;

namespace {

struct SnapshotFixture {
    HeavyTrafficModel model;
    RateSequence rates;
    LimitQuantities limits;
    CountVec queue;

    SnapshotFixture(HeavyTrafficModel m, int r, const CountVec& q)
        : model(std::move(m)),
          rates(rates_at(model, r)),
          limits(derive_limits(model)),
          queue(q) {}

    PolicySnapshot snap() const {
        PolicySnapshot s;
        s.t_scaled = 0.0;
        s.r = rates.r;
        s.queue = &queue;
        s.workload = model.topology.incidence * rates.M_r * queue.cast<double>();
        s.topology = &model.topology;
        s.rates = &rates;
        s.limits = &limits;
        s.h = &model.h;
        return s;
    }
};

CountVec counts(std::initializer_list<long long> v) {
    CountVec q(static_cast<int>(v.size()));
    int i = 0;
    for (long long x : v) q(i++) = x;
    return q;
}

}  // namespace

TEST_SUITE("policies") {

TEST_CASE("nominal: always the nominal allocation") {
    SnapshotFixture f(testutil::linear_network(), 10, counts({4, 4, 4}));
    Vec b = nominal_static(f.snap());
    CHECK(b.isApprox(f.limits.rho, 1e-14));
    CHECK((f.model.topology.incidence * b - f.model.topology.capacity).cwiseAbs().maxCoeff() <
          1e-12);

    SnapshotFixture one(testutil::canonical_single_queue(), 10, counts({5}));
    CHECK(nominal_static(one.snap())(0) == 1.0);
}

TEST_CASE("hgi: empty network does nothing") {
    SnapshotFixture f(testutil::linear_network(), 10, counts({0, 0, 0}));
    CHECK(hgi_greedy(f.snap()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("hgi: single backlogged queue takes the full capacity") {
    SnapshotFixture f(testutil::canonical_single_queue(), 10, counts({5}));
    CHECK(hgi_greedy(f.snap())(0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("hgi: locals take their full resource when the shared queue is empty") {
    SnapshotFixture f(testutil::linear_network(), 10, counts({5, 5, 0}));
    Vec b = hgi_greedy(f.snap());
    CHECK(b(0) == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(b(1) == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(b(2) == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("hgi: a lone shared backlog keeps both resources busy") {
    SnapshotFixture f(testutil::linear_network(), 10, counts({0, 0, 5}));
    Vec b = hgi_greedy(f.snap());
    CHECK(b(2) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("hgi: overstocked locals drain ahead of the shared type") {
    // Workload (10,10) is carried cheapest as q* = (0,0,10); the locals are
    // above their target and must drain at full speed while the shared type
    // waits.
    SnapshotFixture f(testutil::linear_network(), 10, counts({5, 5, 5}));
    Vec b = hgi_greedy(f.snap());
    CHECK(b(0) == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(b(1) == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(b(2) == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("hgi: feasibility and per-resource work conservation on random states") {
    SnapshotFixture proto(testutil::linear_network(), 20, counts({0, 0, 0}));
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        CountVec q(3);
        for (int j = 0; j < 3; ++j) q(j) = static_cast<long long>(rng() % 7);
        SnapshotFixture f(testutil::linear_network(), 20, q);
        Vec b = hgi_greedy(f.snap());
        CHECK((b.array() >= -1e-9).all());
        Vec used = f.model.topology.incidence * b;
        CHECK((used - f.model.topology.capacity).maxCoeff() <= 1e-7);
        for (int j = 0; j < 3; ++j)
            if (q(j) == 0) CHECK(b(j) == doctest::Approx(0.0).epsilon(1e-6));
        for (int i = 0; i < 2; ++i) {
            bool has_work = false;
            for (int j = 0; j < 3; ++j)
                if (q(j) > 0 && f.model.topology.uses(i, j)) has_work = true;
            if (has_work)
                CHECK(used(i) == doctest::Approx(f.model.topology.capacity(i)).epsilon(1e-7));
        }
    }
}

TEST_CASE("maxpressure: point examples") {
    SnapshotFixture one(testutil::canonical_single_queue(), 10, counts({5}));
    CHECK(max_pressure(one.snap())(0) == doctest::Approx(1.0).epsilon(1e-6));

    SnapshotFixture f1(testutil::linear_network(), 10, counts({5, 5, 0}));
    Vec b1 = max_pressure(f1.snap());
    CHECK(b1(0) == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(b1(1) == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(b1(2) == doctest::Approx(0.0).epsilon(1e-6));

    SnapshotFixture f2(testutil::linear_network(), 10, counts({0, 0, 5}));
    Vec b2 = max_pressure(f2.snap());
    CHECK(b2(2) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("maxpressure: objective dominates the nominal allocation") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 200; ++trial) {
        CountVec q(3);
        for (int j = 0; j < 3; ++j) q(j) = static_cast<long long>(rng() % 5);
        SnapshotFixture f(testutil::linear_network(), 10, q);
        Vec bp = max_pressure(f.snap());
        Vec bn = nominal_static(f.snap());
        for (int j = 0; j < 3; ++j)
            if (q(j) == 0) bn(j) = 0.0;  // the simulator's clamp
        double obj_p = 0.0, obj_n = 0.0;
        for (int j = 0; j < 3; ++j) {
            obj_p += q(j) * f.rates.beta_r(j) * bp(j);
            obj_n += q(j) * f.rates.beta_r(j) * bn(j);
        }
        CHECK(obj_p >= obj_n - 1e-9);
    }
}

TEST_CASE("policy lookup by name") {
    for (const char* n : {"nominal", "hgi", "maxpressure"}) {
        auto p = make_policy(n);
        REQUIRE(p);
        CHECK(p->name() == n);
    }
    CHECK(thrown_code([] { make_policy("lifo"); }) == "UnknownPolicy");
}

}  // TEST_SUITE
