#pragma once

/// @file error.hpp
/// @brief Exception hierarchy shared by all pinflow modules

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pinflow {

/// Base class for every error raised by the library
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid user input or configuration (bad parameters, malformed descriptors)
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

/// A numerical procedure failed (non-convergence, CFL violation, NaN)
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what, double time = -1.0, long step = -1)
        : Error(what), time_(time), step_(step) {}

    /// Simulation time at failure, or negative when not applicable
    double time() const { return time_; }
    /// Step index at failure, or negative when not applicable
    long step() const { return step_; }

private:
    double time_;
    long step_;
};

/// Two vortices came closer than the softening radius
class NearCollision : public NumericalError {
public:
    NearCollision(std::size_t i, std::size_t j, double distance, double time = -1.0, long step = -1);

    std::size_t first() const { return i_; }
    std::size_t second() const { return j_; }
    double distance() const { return distance_; }

private:
    std::size_t i_, j_;
    double distance_;
};

/// Throws ConfigError with the given message when cond is false
inline void require(bool cond, const std::string& message) {
    if (!cond) throw ConfigError(message);
}

} // namespace pinflow
