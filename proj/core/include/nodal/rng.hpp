#pragma once

#include <cstdint>
#include <cmath>
#include <random>

#include "nodal/geometry.hpp"

namespace nodal {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Stream seed for path `index` of an ensemble with the given master seed;
// results do not depend on the order in which paths are run.
inline std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t s = master;
    std::uint64_t a = splitmix64(s);
    s = a ^ (0xD1B54A32D192ED03ULL * (index + 1));
    return splitmix64(s);
}

// Seedable, splittable Gaussian source.  Per-path streams are derived from
// (master seed, stream index) so ensemble results do not depend on the order
// in which paths are simulated.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : engine_(mix(seed, 0)) {}
    GaussianStream(std::uint64_t master_seed, std::uint64_t stream_index)
        : engine_(mix(master_seed, stream_index + 1)) {}

    // N(0,1) via Box-Muller; the spare value is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform_open();
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    geo::Vec2 normal_vec2(double stddev) {
        return {stddev * normal(), stddev * normal()};
    }

    double uniform01() {  // [0,1)
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

private:
    double uniform_open() {  // (0,1]
        return 1.0 - uniform01();
    }
    static std::uint64_t mix(std::uint64_t seed, std::uint64_t index) {
        std::uint64_t s = seed;
        std::uint64_t a = splitmix64(s);
        s = a ^ (0xD1B54A32D192ED03ULL * (index + 1));
        std::uint64_t b = splitmix64(s);
        (void)splitmix64(s);
        return b ^ s;
    }

    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace nodal
