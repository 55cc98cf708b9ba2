#include "pinflow/rng.hpp"

#include <cmath>
#include <numbers>

namespace pinflow {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter, std::uint64_t lane) {
    std::uint64_t h = splitmix64(seed ^ 0x5851f42d4c957f2dULL);
    h = splitmix64(h ^ stream);
    h = splitmix64(h ^ counter);
    return splitmix64(h ^ lane);
}

double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter, std::uint64_t lane) {
    // 53 random bits, shifted off zero
    const std::uint64_t bits = counter_hash(seed, stream, counter, lane) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

Vec2 counter_normal_pair(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    const double u1 = counter_uniform(seed, stream, counter, 0);
    const double u2 = counter_uniform(seed, stream, counter, 1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(t), r * std::sin(t)};
}

} // namespace pinflow
