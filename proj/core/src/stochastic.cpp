#include "rsn/stochastic.hpp"

#include <cmath>

namespace rsn {

DistributionSpec solve_params(Family family, double mean, double sd) {
    if (!(mean > 0.0) || !(sd > 0.0))
        throw Error("InvalidArgument", "mean and sd must be positive");
    const double cv = sd / mean;
    DistributionSpec spec;
    spec.family = family;
    spec.mean = mean;
    spec.sd = sd;
    switch (family) {
        case Family::exponential: {
            if (std::abs(cv - 1.0) > 1e-9)
                throw Error("UnrealizableCV",
                            "exponential requires cv = 1, got " + std::to_string(cv));
            spec.a = 1.0 / mean;  // rate
            return spec;
        }
        case Family::erlang: {
            const double k_real = 1.0 / (cv * cv);
            const double k = std::round(k_real);
            if (k < 1.0 || std::abs(k_real - k) > 1e-6)
                throw Error("UnrealizableCV",
                            "erlang requires an integral 1/cv^2, got " + std::to_string(k_real));
            spec.a = k;            // shape
            spec.b = k / mean;     // rate
            return spec;
        }
        case Family::uniform: {
            const double half = std::sqrt(3.0) * sd;
            if (!(mean - half > 0.0))
                throw Error("UnrealizableCV",
                            "uniform requires cv < 1/sqrt(3), got " + std::to_string(cv));
            spec.a = mean - half;
            spec.b = mean + half;
            return spec;
        }
        case Family::hyperexponential: {
            if (!(cv > 1.0))
                throw Error("UnrealizableCV",
                            "hyperexponential requires cv > 1, got " + std::to_string(cv));
            // balanced-mean two-branch mixture: branch i taken with prob p_i
            // contributes p_i/lambda_i = mean/2 each; z parametrizes the split
            const double z = std::sqrt((cv * cv - 1.0) / (cv * cv + 1.0));
            const double p = 0.5 * (1.0 + z);
            spec.a = p;
            spec.b = 2.0 * p / mean;
            spec.c = 2.0 * (1.0 - p) / mean;
            return spec;
        }
    }
    throw Error("UnknownFamily", "corrupt enum");
}

double sample(const DistributionSpec& spec, RngStream& stream) {
    switch (spec.family) {
        case Family::exponential:
            return -std::log(stream.uniform()) / spec.a;
        case Family::erlang: {
            // product of uniforms; shape is small in practice (cv >= ~0.2)
            double prod = 1.0;
            const int k = static_cast<int>(spec.a);
            for (int i = 0; i < k; ++i) prod *= stream.uniform();
            return -std::log(prod) / spec.b;
        }
        case Family::uniform:
            return spec.a + (spec.b - spec.a) * stream.uniform();
        case Family::hyperexponential: {
            const double u = stream.uniform();
            const double rate = (stream.uniform() < spec.a) ? spec.b : spec.c;
            return -std::log(u) / rate;
        }
    }
    throw Error("UnknownFamily", "corrupt enum");
}

}  // namespace rsn
