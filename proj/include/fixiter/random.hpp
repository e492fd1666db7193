#pragma once

#include <cstdint>
#include <random>

#include "fixiter/point.hpp"

namespace fixiter {

// Uniform doubles are derived from raw engine bits rather than
// std::uniform_real_distribution, whose output is implementation-defined.
// Every sampled artifact must be reproducible from the seed alone.

inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_in(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

inline Point random_point(std::mt19937_64& rng, std::size_t dim, double halfwidth) {
    std::vector<double> c(dim);
    for (double& v : c) v = uniform_in(rng, -halfwidth, halfwidth);
    return Point(std::move(c));
}

}  // namespace fixiter
