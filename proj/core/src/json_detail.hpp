#pragma once

// Internal JSON helpers shared by the configuration readers.

#include "pinflow/error.hpp"
#include "pinflow/params.hpp"
#include "pinflow/particles.hpp"
#include "pinflow/pinning.hpp"

#include <json.hpp>

#include <string>

namespace pinflow::detail {

using json = nlohmann::json;

/// Reads an optional member with a default, raising ConfigError on type mismatch
template <class T>
T get_or(const json& j, const char* key, const T& fallback) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("field '") + key + "': " + e.what());
    }
}

/// Reads a required member
template <class T>
T get_req(const json& j, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("missing required field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("field '") + key + "': " + e.what());
    }
}

Vec2 get_vec2(const json& j, const char* key, Vec2 fallback);

PinningLandscape landscape_from_json(const json& j);
Params params_from_json(const json& j);
BlobSpec blob_from_json(const json& j);
std::vector<Vec2> initial_positions_from_json(const json& j);

} // namespace pinflow::detail
