#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace rsn {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CountVec = Eigen::Matrix<long long, Eigen::Dynamic, 1>;

/// Error with a stable machine-readable code (e.g. "MissingLocalTraffic").
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministically folds a tuple of ids into a base seed. Distinct id
/// tuples give statistically unrelated seeds; identical tuples reproduce
/// the same seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> id) {
    std::uint64_t s = splitmix64(base);
    for (std::uint64_t v : id) s = splitmix64(s ^ splitmix64(v));
    return s;
}

}  // namespace rsn
