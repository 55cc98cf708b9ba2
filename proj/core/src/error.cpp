#include "pinflow/error.hpp"

#include <cstdio>

namespace pinflow {

namespace {
std::string collision_message(std::size_t i, std::size_t j, double d) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "near collision between vortices %zu and %zu (distance %.3e)", i, j, d);
    return buf;
}
} // namespace

NearCollision::NearCollision(std::size_t i, std::size_t j, double distance, double time, long step)
    : NumericalError(collision_message(i, j, distance), time, step), i_(i), j_(j), distance_(distance) {}

} // namespace pinflow
