#include "rsn/model.hpp"

#include <cmath>
#include <sstream>

#include "rsn/stochastic.hpp"

namespace rsn {

namespace {

std::string vec_str(const Vec& v) {
    std::ostringstream os;
    os << "(";
    for (int i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v(i);
    os << ")";
    return os.str();
}

}  // namespace

NetworkTopology validate_topology(const Mat& K, const Vec& C) {
    const int I = static_cast<int>(K.rows());
    const int J = static_cast<int>(K.cols());
    if (I <= 0 || J <= 0) throw Error("EmptyTopology", "incidence matrix must be nonempty");
    if (C.size() != I)
        throw Error("DimensionMismatch", "capacity length " + std::to_string(C.size()) +
                                             " does not match " + std::to_string(I) + " resources");
    for (int i = 0; i < I; ++i)
        for (int j = 0; j < J; ++j)
            if (K(i, j) != 0.0 && K(i, j) != 1.0)
                throw Error("NonBinaryIncidence", "K(" + std::to_string(i + 1) + "," +
                                                      std::to_string(j + 1) + ") = " +
                                                      std::to_string(K(i, j)));
    for (int j = 0; j < J; ++j)
        if (K.col(j).sum() == 0.0)
            throw Error("EmptyColumn", "job type " + std::to_string(j + 1) + " uses no resource");
    for (int i = 0; i < I; ++i)
        if (C(i) <= 0.0)
            throw Error("NonPositiveCapacity", "resource " + std::to_string(i + 1) +
                                                   " has capacity " + std::to_string(C(i)));

    NetworkTopology t;
    t.num_resources = I;
    t.num_types = J;
    t.incidence = K;
    t.capacity = C;
    t.local_type.assign(I, -1);
    for (int i = 0; i < I; ++i) {
        for (int j = 0; j < J; ++j) {
            if (K(i, j) == 1.0 && K.col(j).sum() == 1.0) {
                t.local_type[i] = j;
                break;  // lowest qualifying index
            }
        }
        if (t.local_type[i] < 0)
            throw Error("MissingLocalTraffic",
                        "resource " + std::to_string(i + 1) + " has no dedicated job type");
    }
    return t;
}

Family family_from_string(const std::string& s) {
    if (s == "exponential") return Family::exponential;
    if (s == "erlang") return Family::erlang;
    if (s == "uniform") return Family::uniform;
    if (s == "hyperexponential") return Family::hyperexponential;
    throw Error("UnknownFamily", "'" + s + "'");
}

std::string to_string(Family f) {
    switch (f) {
        case Family::exponential: return "exponential";
        case Family::erlang: return "erlang";
        case Family::uniform: return "uniform";
        case Family::hyperexponential: return "hyperexponential";
    }
    throw Error("UnknownFamily", "corrupt enum");
}

void validate_model(const HeavyTrafficModel& m, double tol) {
    const int J = m.topology.num_types;
    auto need = [&](const Vec& v, const char* name) {
        if (v.size() != J)
            throw Error("DimensionMismatch",
                        std::string(name) + " has length " + std::to_string(v.size()) +
                            ", expected " + std::to_string(J));
    };
    need(m.alpha, "alpha");
    need(m.beta, "beta");
    need(m.alpha_bar, "alpha_bar");
    need(m.beta_bar, "beta_bar");
    need(m.sigma_u, "sigma_u");
    need(m.sigma_v, "sigma_v");
    need(m.h, "h");
    if (static_cast<int>(m.arrival_family.size()) != J ||
        static_cast<int>(m.service_family.size()) != J)
        throw Error("DimensionMismatch", "family lists must have one entry per job type");
    for (int j = 0; j < J; ++j) {
        if (m.alpha(j) <= 0.0) throw Error("NonPositiveRate", "alpha_" + std::to_string(j + 1));
        if (m.beta(j) <= 0.0) throw Error("NonPositiveRate", "beta_" + std::to_string(j + 1));
        if (m.sigma_u(j) <= 0.0) throw Error("NonPositiveSigma", "sigma_u_" + std::to_string(j + 1));
        if (m.sigma_v(j) <= 0.0) throw Error("NonPositiveSigma", "sigma_v_" + std::to_string(j + 1));
        if (m.h(j) <= 0.0) throw Error("NonPositiveCost", "h_" + std::to_string(j + 1));
    }
    // The cv of each primitive is constant along the sequence (see rates_at),
    // so realizability at the limit settles it for every r.
    for (int j = 0; j < J; ++j) {
        solve_params(m.arrival_family[j], 1.0 / m.alpha(j), m.sigma_u(j));
        solve_params(m.service_family[j], 1.0 / m.beta(j), m.sigma_v(j));
    }
    const Vec rho = m.rho();
    const Vec gap = m.topology.capacity - m.topology.incidence * rho;
    if (gap.cwiseAbs().maxCoeff() > tol)
        throw Error("HeavyTrafficViolation", "C = " + vec_str(m.topology.capacity) +
                                                 " but K rho = " +
                                                 vec_str(m.topology.incidence * rho));
}

LimitQuantities derive_limits(const HeavyTrafficModel& m, double tol) {
    validate_model(m, tol);
    const int J = m.topology.num_types;
    LimitQuantities q;
    q.rho = m.rho();
    q.eta = Vec(J);
    for (int j = 0; j < J; ++j)
        q.eta(j) = (m.alpha_bar(j) * m.beta(j) - m.alpha(j) * m.beta_bar(j)) /
                   (m.beta(j) * m.beta(j));
    q.theta = m.topology.incidence * q.eta;
    q.M = m.beta.cwiseInverse().asDiagonal();
    Vec diag(J);
    for (int j = 0; j < J; ++j) {
        const double su = std::pow(m.alpha(j), 3) * m.sigma_u(j) * m.sigma_u(j);
        const double sv = std::pow(m.beta(j), 3) * m.sigma_v(j) * m.sigma_v(j) * q.rho(j);
        diag(j) = su + sv;
    }
    const Mat KM = m.topology.incidence * q.M;
    q.Sigma = KM * diag.asDiagonal() * KM.transpose();
    q.Sigma = 0.5 * (q.Sigma + q.Sigma.transpose()).eval();  // kill asymmetric rounding
    q.stable = (q.theta.array() < 0.0).all();
    return q;
}

RateSequence rates_at(const HeavyTrafficModel& m, int r) {
    if (r <= 0) throw Error("InvalidArgument", "r must be positive");
    const int J = m.topology.num_types;
    RateSequence s;
    s.r = r;
    s.alpha_r = m.alpha + m.alpha_bar / static_cast<double>(r);
    s.beta_r = m.beta + m.beta_bar / static_cast<double>(r);
    for (int j = 0; j < J; ++j) {
        if (s.alpha_r(j) <= 0.0)
            throw Error("RateNonPositive", "alpha^r_" + std::to_string(j + 1) + " at r=" +
                                               std::to_string(r));
        if (s.beta_r(j) <= 0.0)
            throw Error("RateNonPositive", "beta^r_" + std::to_string(j + 1) + " at r=" +
                                               std::to_string(r));
    }
    // cv held fixed along the sequence, so the per-r sd scales with the mean
    // and sigma^{.,r} -> sigma as r -> infinity
    s.sigma_u_r = Vec(J);
    s.sigma_v_r = Vec(J);
    for (int j = 0; j < J; ++j) {
        const double cv_u = m.sigma_u(j) * m.alpha(j);   // sd / mean at the limit
        const double cv_v = m.sigma_v(j) * m.beta(j);
        s.sigma_u_r(j) = cv_u / s.alpha_r(j);
        s.sigma_v_r(j) = cv_v / s.beta_r(j);
    }
    s.rho_r = s.alpha_r.cwiseQuotient(s.beta_r);
    s.M_r = s.beta_r.cwiseInverse().asDiagonal();
    return s;
}

}  // namespace rsn
