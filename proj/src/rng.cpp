#include "declqg/rng.hpp"

#include <cmath>
#include <numbers>

namespace declqg {

double GaussianStream::next() {
    if (has_cache) {
        has_cache = false;
        return cache;
    }
    const double u1 = 1.0 - rng.uniform01();  // (0, 1]
    const double u2 = rng.uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cache = radius * std::sin(angle);
    has_cache = true;
    return radius * std::cos(angle);
}

Vec GaussianStream::draw(int n) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v(i) = next();
    return v;
}

GaussianStream noise_stream(uint64_t seed, uint64_t replicate, NoiseSource source) {
    GaussianStream s;
    s.rng.state = SplitMix64::mix(
        seed + SplitMix64::kGamma * (4 * replicate + static_cast<uint64_t>(source) + 1));
    return s;
}

}  // namespace declqg
