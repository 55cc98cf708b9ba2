#pragma once

/// @file rng.hpp
/// @brief Counter-based random numbers keyed by (seed, stream, counter)
///
/// Every draw is a pure function of its key, so results do not depend on
/// the order or thread in which they are requested.

#include "pinflow/vec2.hpp"

#include <cstdint>

namespace pinflow {

/// SplitMix64 finalizer
std::uint64_t splitmix64(std::uint64_t x);

/// 64-bit hash of a (seed, stream, counter, lane) key
std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter, std::uint64_t lane = 0);

/// Uniform double in (0, 1)
double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter, std::uint64_t lane = 0);

/// Two independent standard normals via Box-Muller
Vec2 counter_normal_pair(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);

} // namespace pinflow
