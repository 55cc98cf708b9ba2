#include "pinflow/error.hpp"
#include "pinflow/particles.hpp"
#include "pinflow/rng.hpp"

#include "json_detail.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>

namespace pinflow {

std::vector<Vec2> sample_blob(const BlobSpec& spec) {
    require(spec.radius > 0.0 && std::isfinite(spec.radius), "blob radius must be positive");
    require(spec.aspect > 0.0 && std::isfinite(spec.aspect), "blob aspect must be positive");
    require(spec.count >= 1, "blob needs at least one point");
    std::vector<Vec2> x(spec.count);
    const double n = static_cast<double>(spec.count);
    if (spec.sampler == BlobSampler::gaussian) {
        for (std::size_t i = 0; i < spec.count; ++i) {
            const Vec2 z = counter_normal_pair(spec.seed, i, 0xb10b);
            x[i] = spec.center + Vec2{spec.radius * z.x, spec.radius * spec.aspect * z.y};
        }
    } else {
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        const double rot = 2.0 * std::numbers::pi * counter_uniform(spec.seed, 0x5f10, 0);
        for (std::size_t k = 0; k < spec.count; ++k) {
            const double u = (static_cast<double>(k) + 0.5) / n;
            // radial quantile of the 2D Gaussian: P(|z| <= r) = 1 - exp(-r^2 / 2)
            const double r = spec.radius * std::sqrt(-2.0 * std::log1p(-u));
            const double th = rot + golden * static_cast<double>(k);
            x[k] = spec.center + Vec2{r * std::cos(th), spec.aspect * r * std::sin(th)};
        }
    }
    return x;
}

namespace detail {

BlobSpec blob_from_json(const json& j) {
    BlobSpec b;
    b.center = get_vec2(j, "center", {0.0, 0.0});
    b.radius = get_req<double>(j, "radius");
    b.count = get_req<std::size_t>(j, "N");
    b.seed = get_or<std::uint64_t>(j, "seed", 0);
    b.aspect = get_or<double>(j, "aspect", 1.0);
    const std::string s = get_or<std::string>(j, "sampler", "gaussian");
    if (s == "gaussian") b.sampler = BlobSampler::gaussian;
    else if (s == "sunflower") b.sampler = BlobSampler::sunflower;
    else throw ConfigError("unknown blob sampler '" + s + "'");
    return b;
}

std::vector<Vec2> initial_positions_from_json(const json& j) {
    const std::string kind = get_or<std::string>(j, "kind", "blob");
    if (kind == "points") {
        const json pts = get_req<json>(j, "points");
        if (!pts.is_array()) throw ConfigError("'points' must be an array of [x, y]");
        std::vector<Vec2> x;
        for (const auto& p : pts) {
            if (!p.is_array() || p.size() != 2) throw ConfigError("each point must be [x, y]");
            x.push_back({p[0].get<double>(), p[1].get<double>()});
        }
        return x;
    }
    if (kind == "blob") return sample_blob(blob_from_json(j));
    throw ConfigError("unknown initial condition kind '" + kind + "'");
}

} // namespace detail

std::vector<Vec2> initial_positions_from_json(const std::string& text) {
    detail::json j;
    try {
        j = detail::json::parse(text);
    } catch (const detail::json::parse_error& e) {
        throw ConfigError(std::string("initial condition JSON: ") + e.what());
    }
    return detail::initial_positions_from_json(j);
}

namespace {

void put_u64(std::ostream& os, std::uint64_t v) {
    char b[8];
    for (int k = 0; k < 8; ++k) b[k] = static_cast<char>((v >> (8 * k)) & 0xff);
    os.write(b, 8);
}

std::uint64_t get_u64(std::istream& is) {
    unsigned char b[8];
    if (!is.read(reinterpret_cast<char*>(b), 8)) throw Error("truncated PSNP1 stream");
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(b[k]) << (8 * k);
    return v;
}

void put_num(std::ostream& os, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
}

} // namespace

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << "t,i,x,y\n";
    for (std::size_t s = 0; s < traj.times.size(); ++s)
        for (std::size_t i = 0; i < traj.snapshots[s].size(); ++i) {
            put_num(os, traj.times[s]);
            os << ',' << i << ',';
            put_num(os, traj.snapshots[s][i].x);
            os << ',';
            put_num(os, traj.snapshots[s][i].y);
            os << '\n';
        }
}

void write_diagnostics_csv(std::ostream& os, const Trajectory& traj) {
    os << "t,energy,cx,cy,mean_displacement\n";
    for (std::size_t s = 0; s < traj.times.size(); ++s) {
        for (double v : {traj.times[s], traj.energy[s], traj.center_of_mass[s].x, traj.center_of_mass[s].y}) {
            put_num(os, v);
            os << ',';
        }
        put_num(os, traj.mean_displacement[s]);
        os << '\n';
    }
}

void write_snapshot_binary(std::ostream& os, double t, const std::vector<Vec2>& x) {
    os.write("PSNP1", 5);
    put_u64(os, x.size());
    put_u64(os, std::bit_cast<std::uint64_t>(t));
    for (const Vec2& p : x) {
        put_u64(os, std::bit_cast<std::uint64_t>(p.x));
        put_u64(os, std::bit_cast<std::uint64_t>(p.y));
    }
}

std::vector<Vec2> read_snapshot_binary(std::istream& is, double* t) {
    char m[5];
    if (!is.read(m, 5) || std::string(m, 5) != "PSNP1") throw Error("not a PSNP1 stream");
    const std::uint64_t n = get_u64(is);
    const double time = std::bit_cast<double>(get_u64(is));
    if (t) *t = time;
    if (n > (1u << 26)) throw Error("PSNP1 header has implausible size");
    std::vector<Vec2> x(n);
    for (auto& p : x) {
        p.x = std::bit_cast<double>(get_u64(is));
        p.y = std::bit_cast<double>(get_u64(is));
    }
    return x;
}

} // namespace pinflow
