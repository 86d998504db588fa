#pragma once

#include <string>

#include "rsn/model.hpp"

namespace rsn::testutil {

/// Critically loaded single queue: alpha = beta = 1, alpha_bar = -1,
/// beta_bar = 0, sigma_u = sigma_v = 1, h = 1, exponential primitives.
/// Limits: theta = -1, Sigma = 2.
inline HeavyTrafficModel canonical_single_queue() {
    HeavyTrafficModel m;
    m.topology = validate_topology(Mat::Ones(1, 1), Vec::Ones(1));
    m.alpha = Vec::Ones(1);
    m.beta = Vec::Ones(1);
    m.alpha_bar = -Vec::Ones(1);
    m.beta_bar = Vec::Zero(1);
    m.sigma_u = Vec::Ones(1);
    m.sigma_v = Vec::Ones(1);
    m.h = Vec::Ones(1);
    m.arrival_family = {Family::exponential};
    m.service_family = {Family::exponential};
    validate_model(m);
    return m;
}

/// Two resources sharing one type: K = [[1,0,1],[0,1,1]], C = (2,2),
/// symmetric exponential primitives. Limits: theta = (-2,-2),
/// Sigma = [[4,2],[2,4]].
inline HeavyTrafficModel linear_network(const Vec& h) {
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
    m.h = h;
    m.arrival_family = {Family::exponential, Family::exponential, Family::exponential};
    m.service_family = {Family::exponential, Family::exponential, Family::exponential};
    validate_model(m);
    return m;
}

inline HeavyTrafficModel linear_network() { return linear_network(Vec::Ones(3)); }

/// Checks that an Error carrying the given code is thrown.
template <typename Fn>
std::string thrown_code(Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

}  // namespace rsn::testutil
