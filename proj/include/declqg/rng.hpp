#pragma once

#include <cstdint>

#include "declqg/types.hpp"

namespace declqg {

// splitmix64: state walks the golden-ratio sequence, output is the standard
// finalizer. Used both as the substream scrambler and as the draw generator,
// so any implementation can reproduce the streams from the scheme below.
struct SplitMix64 {
    uint64_t state = 0;

    static constexpr uint64_t kGamma = 0x9E3779B97F4A7C15ull;

    static uint64_t mix(uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    uint64_t next() {
        state += kGamma;
        return mix(state);
    }

    double uniform01() {  // [0, 1), 53-bit mantissa
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }
};

// One noise source of one replicate. Each (replicate, source) pair owns an
// independent substream so that resampling a single source leaves the others
// untouched. Stream scheme (documented for reproducibility):
//   state0 = mix(seed + kGamma * (4*replicate + source + 1))
// with sources 0 = x0, 1 = process noise, 2 = v1, 3 = v2.
enum class NoiseSource : uint64_t { X0 = 0, Process = 1, V1 = 2, V2 = 3 };

// Standard normals via Box-Muller on splitmix64 uniforms, second value cached.
struct GaussianStream {
    SplitMix64 rng;
    bool has_cache = false;
    double cache = 0.0;

    double next();
    Vec draw(int n);
};

GaussianStream noise_stream(uint64_t seed, uint64_t replicate, NoiseSource source);

}  // namespace declqg
