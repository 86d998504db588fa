#pragma once

#include <memory>
#include <string>

#include "rsn/model.hpp"

namespace rsn {

/// Read-only view of the state a policy may base its decision on: the
/// current clock, queue counts, and workload. No future randomness is
/// reachable through it, so event-driven policies are non-anticipative by
/// construction.
struct PolicySnapshot {
    double t_scaled = 0.0;
    int r = 0;
    const CountVec* queue = nullptr;       // length J
    Vec workload;                          // length I, K M^r Q (unscaled)
    const NetworkTopology* topology = nullptr;
    const RateSequence* rates = nullptr;
    const LimitQuantities* limits = nullptr;
    const Vec* h = nullptr;  // holding costs, length J
};

/// A decision rule mapping a snapshot to a desired rate vector b >= 0 with
/// K b <= C. The simulator zeroes rates on empty queues before checking
/// feasibility.
class Policy {
public:
    virtual ~Policy() = default;
    virtual Vec rates(const PolicySnapshot& s) const = 0;
    virtual const std::string& name() const = 0;
};

/// b = rho: every type runs at its nominal allocation.
Vec nominal_static(const PolicySnapshot& s);

/// Workload-greedy rule, solved as two nested linear programs over the
/// backlogged types: first maximize the total busy capacity (so no resource
/// idles while it has reachable work), then, among allocations attaining
/// that maximum, drain the types holding more than the cheapest composition
/// q* consistent with the current workload and hold back the types below it.
Vec hgi_greedy(const PolicySnapshot& s);

/// Max-weight: b maximizes sum_j Q_j beta_j b_j over K b <= C, b >= 0,
/// b_j = 0 on empty queues (deterministic simplex vertex).
Vec max_pressure(const PolicySnapshot& s);

/// Lookup by scenario-file name: "nominal", "hgi", "maxpressure".
std::unique_ptr<Policy> make_policy(const std::string& name);

}  // namespace rsn
