#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

#include "rsn/model.hpp"

namespace rsn {

/// A positive distribution with analytically solved parameters so that the
/// first two moments match the requested targets exactly.
struct DistributionSpec {
    Family family = Family::exponential;
    double mean = 0.0;
    double sd = 0.0;
    // family parameters:
    //   exponential:      a = rate
    //   erlang:           a = shape k (integral), b = rate
    //   uniform:          a, b = endpoints, 0 < a < b
    //   hyperexponential: a = branch probability p, b = rate1, c = rate2
    double a = 0.0, b = 0.0, c = 0.0;
};

/// Solves family parameters for the given mean and standard deviation.
/// Throws UnrealizableCV when the family cannot reach cv = sd/mean:
/// exponential needs cv = 1, erlang an integral 1/cv^2, uniform cv < 1/sqrt(3),
/// hyperexponential cv > 1.
DistributionSpec solve_params(Family family, double mean, double sd);

/// A self-contained random stream keyed by (seed, id tuple). Identical keys
/// reproduce the identical sequence bit for bit; distinct keys give
/// independent streams, so replications parallelize without coordination.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::initializer_list<std::uint64_t> id)
        : eng_(derive_seed(seed, id)) {}

    /// Uniform on the open interval (0, 1).
    double uniform() {
        return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal (Box-Muller, pair cached).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        double m = std::sqrt(-2.0 * std::log(u1));
        spare_ = m * std::sin(6.283185307179586476925286766559 * u2);
        have_spare_ = true;
        return m * std::cos(6.283185307179586476925286766559 * u2);
    }

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Draws one strictly positive variate and advances the stream.
double sample(const DistributionSpec& spec, RngStream& stream);

}  // namespace rsn
