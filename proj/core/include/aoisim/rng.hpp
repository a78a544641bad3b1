#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace aoisim {

// splitmix64 finalizer; used to derive independent stream seeds from one
// master seed so that adding a stream never perturbs existing ones.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_stream(std::uint64_t master, std::uint64_t tag, std::uint64_t index = 0) {
    return mix64(mix64(master ^ mix64(tag)) + index);
}

// stream tags (arbitrary fixed constants)
inline constexpr std::uint64_t kStreamAoi = 0xA01;
inline constexpr std::uint64_t kStreamNoise = 0xA02;
inline constexpr std::uint64_t kStreamSample = 0xA03;
inline constexpr std::uint64_t kStreamReplication = 0xA04;
inline constexpr std::uint64_t kStreamMisc = 0xA05;

/// Deterministic random stream. Uniform and normal variates are generated
/// with explicit arithmetic (no std::*_distribution) so that realized paths
/// are pinned by the seed alone.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // uniform on [0,1)
    double u01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // uniform on (0,1]
    double u01_open() { return static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * u01(); }

    bool bernoulli(double p) { return u01() < p; }

    // standard normal via Box-Muller; one cached mate per pair
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = u01_open();
        const double u2 = u01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace aoisim
