#pragma once

#include <cstdint>
#include <random>

namespace ghzclock {

using Stream = std::mt19937_64;

// Independent stream for (seed, index); used to give every trial its own generator.
Stream make_stream(std::uint64_t seed, std::uint64_t index);

// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Stream& s) { return static_cast<double>(s() >> 11) * 0x1.0p-53; }

}  // namespace ghzclock
