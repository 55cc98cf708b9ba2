#include "pinflow/pinning.hpp"
#include "pinflow/error.hpp"
#include "pinflow/rng.hpp"

#include "json_detail.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pinflow {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

class ConstantCell final : public CellPotential {
public:
    explicit ConstantCell(double c) : c_(c) {}
    double value(Vec2) const override { return c_; }
    Vec2 gradient(Vec2) const override { return {}; }
    Sym2 hessian(Vec2) const override { return {}; }
    double min_value() const override { return c_; }
    double max_value() const override { return c_; }
    std::string kind() const override { return c_ == 0.0 ? "zero" : "constant"; }

private:
    double c_;
};

class Cosine1DCell final : public CellPotential {
public:
    explicit Cosine1DCell(double a) : a_(a) {}
    double value(Vec2 y) const override { return a_ * std::cos(two_pi * y.x); }
    Vec2 gradient(Vec2 y) const override { return {-two_pi * a_ * std::sin(two_pi * y.x), 0.0}; }
    Sym2 hessian(Vec2 y) const override { return {-two_pi * two_pi * a_ * std::cos(two_pi * y.x), 0.0, 0.0}; }
    double min_value() const override { return -std::abs(a_); }
    double max_value() const override { return std::abs(a_); }
    std::string kind() const override { return "cosine1d"; }

private:
    double a_;
};

class EggboxCell final : public CellPotential {
public:
    explicit EggboxCell(double a) : a_(a) {}
    double value(Vec2 y) const override { return a_ * (std::cos(two_pi * y.x) + std::cos(two_pi * y.y)); }
    Vec2 gradient(Vec2 y) const override {
        return {-two_pi * a_ * std::sin(two_pi * y.x), -two_pi * a_ * std::sin(two_pi * y.y)};
    }
    Sym2 hessian(Vec2 y) const override {
        const double f = -two_pi * two_pi * a_;
        return {f * std::cos(two_pi * y.x), 0.0, f * std::cos(two_pi * y.y)};
    }
    double min_value() const override { return -2.0 * std::abs(a_); }
    double max_value() const override { return 2.0 * std::abs(a_); }
    std::string kind() const override { return "eggbox"; }

private:
    double a_;
};

/// Locates the extrema of a smooth periodic cell function by sampling plus Newton polishing
template <class Cell>
std::pair<double, double> cell_extrema(const Cell& c, int n) {
    Vec2 ymin{}, ymax{};
    double vmin = INFINITY, vmax = -INFINITY;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const Vec2 y{double(i) / n, double(j) / n};
            const double v = c.value(y);
            if (v < vmin) vmin = v, ymin = y;
            if (v > vmax) vmax = v, ymax = y;
        }
    auto polish = [&](Vec2 y, double v0, bool is_min) {
        double best = v0;
        for (int it = 0; it < 30; ++it) {
            const Vec2 g = c.gradient(y);
            const Sym2 H = c.hessian(y);
            const double det = H.xx * H.yy - H.xy * H.xy;
            if (std::abs(det) < 1e-300) break;
            const Vec2 step{(H.yy * g.x - H.xy * g.y) / det, (H.xx * g.y - H.xy * g.x) / det};
            if (norm(step) > 1.0 / n) break;
            y -= step;
            const double v = c.value(y);
            if (is_min ? v < best : v > best) best = v;
            if (norm(step) < 1e-14) break;
        }
        return best;
    };
    return {polish(ymin, vmin, true), polish(ymax, vmax, false)};
}

class FourierCell final : public CellPotential {
public:
    FourierCell(std::vector<FourierMode> modes, double mean, std::string kind)
        : modes_(std::move(modes)), mean_(mean), kind_(std::move(kind)) {
        auto [lo, hi] = cell_extrema(*this, 256);
        min_ = lo;
        max_ = hi;
    }
    double value(Vec2 y) const override {
        double s = mean_;
        for (const auto& m : modes_) {
            const double t = two_pi * (m.k1 * y.x + m.k2 * y.y);
            s += m.cos_coef * std::cos(t) + m.sin_coef * std::sin(t);
        }
        return s;
    }
    Vec2 gradient(Vec2 y) const override {
        Vec2 g{};
        for (const auto& m : modes_) {
            const double t = two_pi * (m.k1 * y.x + m.k2 * y.y);
            const double d = two_pi * (-m.cos_coef * std::sin(t) + m.sin_coef * std::cos(t));
            g += Vec2{d * m.k1, d * m.k2};
        }
        return g;
    }
    Sym2 hessian(Vec2 y) const override {
        Sym2 H{};
        for (const auto& m : modes_) {
            const double t = two_pi * (m.k1 * y.x + m.k2 * y.y);
            const double d = -two_pi * two_pi * (m.cos_coef * std::cos(t) + m.sin_coef * std::sin(t));
            H.xx += d * m.k1 * m.k1;
            H.xy += d * m.k1 * m.k2;
            H.yy += d * m.k2 * m.k2;
        }
        return H;
    }
    double min_value() const override { return min_; }
    double max_value() const override { return max_; }
    std::string kind() const override { return kind_; }

private:
    std::vector<FourierMode> modes_;
    double mean_;
    std::string kind_;
    double min_ = 0.0, max_ = 0.0;
};

/// Catmull-Rom weights and their first two derivatives at fractional offset t
struct CubicWeights {
    double w[4], d[4], dd[4];
    explicit CubicWeights(double t) {
        const double t2 = t * t, t3 = t2 * t;
        w[0] = 0.5 * (-t3 + 2 * t2 - t);
        w[1] = 0.5 * (3 * t3 - 5 * t2 + 2);
        w[2] = 0.5 * (-3 * t3 + 4 * t2 + t);
        w[3] = 0.5 * (t3 - t2);
        d[0] = 0.5 * (-3 * t2 + 4 * t - 1);
        d[1] = 0.5 * (9 * t2 - 10 * t);
        d[2] = 0.5 * (-9 * t2 + 8 * t + 1);
        d[3] = 0.5 * (3 * t2 - 2 * t);
        dd[0] = 0.5 * (-6 * t + 4);
        dd[1] = 0.5 * (18 * t - 10);
        dd[2] = 0.5 * (-18 * t + 8);
        dd[3] = 0.5 * (6 * t - 2);
    }
};

class TabulatedCell final : public CellPotential {
public:
    TabulatedCell(int n, std::vector<double> v) : n_(n), v_(std::move(v)) {
        require(n >= 4, "tabulated cell needs at least 4 samples per side");
        require(v_.size() == static_cast<std::size_t>(n) * n, "tabulated cell value count must be n*n");
        for (double x : v_) require(std::isfinite(x), "tabulated cell values must be finite");
        min_ = INFINITY;
        max_ = -INFINITY;
        const int m = 4 * n_;
        for (int j = 0; j < m; ++j)
            for (int i = 0; i < m; ++i) {
                const double x = value({double(i) / m, double(j) / m});
                min_ = std::min(min_, x);
                max_ = std::max(max_, x);
            }
    }
    double value(Vec2 y) const override { return eval(y, 0); }
    Vec2 gradient(Vec2 y) const override { return {eval(y, 1), eval(y, 2)}; }
    Sym2 hessian(Vec2 y) const override { return {eval(y, 3), eval(y, 4), eval(y, 5)}; }
    double min_value() const override { return min_; }
    double max_value() const override { return max_; }
    std::string kind() const override { return "tabulated"; }

private:
    /// what: 0 value, 1 d1, 2 d2, 3 d11, 4 d12, 5 d22
    double eval(Vec2 y, int what) const {
        const double sx = (y.x - std::floor(y.x)) * n_, sy = (y.y - std::floor(y.y)) * n_;
        const int i0 = static_cast<int>(std::floor(sx)), j0 = static_cast<int>(std::floor(sy));
        const CubicWeights wx(sx - i0), wy(sy - j0);
        const double* ax = what == 1 || what == 4 ? wx.d : what == 3 ? wx.dd : wx.w;
        const double* ay = what == 2 || what == 4 ? wy.d : what == 5 ? wy.dd : wy.w;
        double s = 0.0;
        for (int b = 0; b < 4; ++b) {
            const int j = ((j0 + b - 1) % n_ + n_) % n_;
            double row = 0.0;
            for (int a = 0; a < 4; ++a) {
                const int i = ((i0 + a - 1) % n_ + n_) % n_;
                row += ax[a] * v_[static_cast<std::size_t>(j) * n_ + i];
            }
            s += ay[b] * row;
        }
        const double fx = (what == 1 || what == 4) ? n_ : (what == 3 ? double(n_) * n_ : 1.0);
        const double fy = (what == 2 || what == 4) ? n_ : (what == 5 ? double(n_) * n_ : 1.0);
        return s * fx * fy;
    }

    int n_;
    std::vector<double> v_;
    double min_, max_;
};

} // namespace

std::shared_ptr<const CellPotential> make_constant_cell(double value) {
    require(std::isfinite(value), "constant landscape value must be finite");
    return std::make_shared<ConstantCell>(value);
}

std::shared_ptr<const CellPotential> make_cosine1d_cell(double amplitude) {
    require(std::isfinite(amplitude), "amplitude must be finite");
    return std::make_shared<Cosine1DCell>(amplitude);
}

std::shared_ptr<const CellPotential> make_eggbox_cell(double amplitude) {
    require(std::isfinite(amplitude), "amplitude must be finite");
    return std::make_shared<EggboxCell>(amplitude);
}

std::shared_ptr<const CellPotential> make_fourier_cell(std::vector<FourierMode> modes, double mean) {
    for (const auto& m : modes)
        require(std::isfinite(m.cos_coef) && std::isfinite(m.sin_coef), "Fourier coefficients must be finite");
    return std::make_shared<FourierCell>(std::move(modes), mean, "fourier");
}

std::shared_ptr<const CellPotential> make_tilted_random_fourier_cell(std::uint64_t seed, int modes, double amplitude) {
    require(modes >= 1 && modes <= 32, "tilted_random_fourier needs 1 <= modes <= 32");
    require(std::isfinite(amplitude), "amplitude must be finite");
    std::vector<FourierMode> list;
    double total = 0.0;
    std::uint64_t counter = 0;
    for (int k1 = 0; k1 <= modes; ++k1)
        for (int k2 = -modes; k2 <= modes; ++k2) {
            if (k1 == 0 && k2 <= 0) continue; // half plane: k and -k give the same real mode
            const Vec2 z = counter_normal_pair(seed, 0x7a11, counter++);
            const double tilt = 1.0 / double(k1 * k1 + k2 * k2);
            FourierMode m{k1, k2, z.x * tilt, z.y * tilt};
            total += std::abs(m.cos_coef) + std::abs(m.sin_coef);
            list.push_back(m);
        }
    const double s = total > 0.0 ? amplitude / total : 0.0;
    for (auto& m : list) {
        m.cos_coef *= s;
        m.sin_coef *= s;
    }
    return std::make_shared<FourierCell>(std::move(list), 0.0, "tilted_random_fourier");
}

std::shared_ptr<const CellPotential> make_tabulated_cell(int n, std::vector<double> values) {
    return std::make_shared<TabulatedCell>(n, std::move(values));
}

double SlowModulation::value(Vec2 x) const { return 1.0 + amplitude * std::cos(dot(wavevector, x)); }

Vec2 SlowModulation::gradient(Vec2 x) const { return (-amplitude * std::sin(dot(wavevector, x))) * wavevector; }

PinningLandscape::PinningLandscape() : PinningLandscape(make_constant_cell(0.0)) {}

PinningLandscape::PinningLandscape(std::shared_ptr<const CellPotential> cell, double eta, double scale,
                                   SlowModulation slow)
    : cell_(std::move(cell)), eta_(eta), scale_(scale), slow_(slow) {
    require(cell_ != nullptr, "landscape needs a cell potential");
    require(eta > 0.0 && eta <= 1.0, "pin separation eta must lie in (0, 1]");
    require(std::isfinite(scale), "landscape scale must be finite");
    require(std::isfinite(slow.amplitude) && std::isfinite(slow.wavevector.x) && std::isfinite(slow.wavevector.y),
            "slow modulation must be finite");
}

PinningLandscape PinningLandscape::zero() { return PinningLandscape(); }

PinningLandscape PinningLandscape::washboard(double eta) {
    return PinningLandscape(make_cosine1d_cell(-1.0 / two_pi), eta);
}

PinningLandscape PinningLandscape::eggbox(double eta) { return PinningLandscape(make_eggbox_cell(-1.0 / two_pi), eta); }

PinningSample PinningLandscape::eval(Vec2 x) const {
    const Vec2 y = (1.0 / eta_) * x;
    const double c = cell_->value(y);
    const Vec2 gc = cell_->gradient(y);
    PinningSample s;
    if (slow_.active()) {
        const double m = slow_.value(x);
        s.h = eta_ * scale_ * m * c;
        s.gradh = scale_ * (m * gc + eta_ * c * slow_.gradient(x));
    } else {
        s.h = eta_ * scale_ * c;
        s.gradh = scale_ * gc;
    }
    s.a = std::exp(s.h);
    return s;
}

double PinningLandscape::cell_value(Vec2 y, Vec2 x_slow) const {
    return scale_ * (slow_.active() ? slow_.value(x_slow) : 1.0) * cell_->value(y);
}

Vec2 PinningLandscape::cell_gradient(Vec2 y, Vec2 x_slow) const {
    return (scale_ * (slow_.active() ? slow_.value(x_slow) : 1.0)) * cell_->gradient(y);
}

Sym2 PinningLandscape::cell_hessian(Vec2 y, Vec2 x_slow) const {
    const double f = scale_ * (slow_.active() ? slow_.value(x_slow) : 1.0);
    const Sym2 H = cell_->hessian(y);
    return {f * H.xx, f * H.xy, f * H.yy};
}

double PinningLandscape::osc(Vec2 x_slow) const {
    return std::abs(scale_ * (slow_.active() ? slow_.value(x_slow) : 1.0)) * cell_->osc();
}

bool PinningLandscape::admissible_nonpositive() const {
    const double smin = slow_.active() ? 1.0 - std::abs(slow_.amplitude) : 1.0;
    const double smax = slow_.active() ? 1.0 + std::abs(slow_.amplitude) : 1.0;
    // h0 = scale * s * c; check the worst combination of factor signs
    double worst = -INFINITY;
    for (double s : {smin, smax})
        for (double c : {cell_->min_value(), cell_->max_value()}) worst = std::max(worst, scale_ * s * c);
    return worst <= 0.0;
}

bool PinningLandscape::is_zero() const {
    return scale_ == 0.0 || (cell_->min_value() == 0.0 && cell_->max_value() == 0.0);
}

ScalarField PinningLandscape::sample_h(const Grid2D& g) const {
    return ScalarField::sample(g, [this](Vec2 x) { return eval(x).h; });
}

VectorField PinningLandscape::sample_gradh(const Grid2D& g) const {
    return VectorField::sample(g, [this](Vec2 x) { return eval(x).gradh; });
}

ScalarField PinningLandscape::sample_a(const Grid2D& g) const {
    return ScalarField::sample(g, [this](Vec2 x) { return eval(x).a; });
}

namespace detail {

Vec2 get_vec2(const json& j, const char* key, Vec2 fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw ConfigError(std::string("field '") + key + "' must be a 2-element number array");
    return {v[0].get<double>(), v[1].get<double>()};
}

PinningLandscape landscape_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("landscape descriptor must be an object");
    const std::string kind = get_or<std::string>(j, "kind", "zero");
    std::shared_ptr<const CellPotential> cell;
    if (kind == "zero") {
        cell = make_constant_cell(0.0);
    } else if (kind == "constant") {
        cell = make_constant_cell(get_req<double>(j, "value"));
    } else if (kind == "cosine1d") {
        cell = make_cosine1d_cell(get_req<double>(j, "amplitude"));
    } else if (kind == "washboard") {
        cell = make_cosine1d_cell(-1.0 / two_pi);
    } else if (kind == "eggbox") {
        cell = make_eggbox_cell(get_or<double>(j, "amplitude", -1.0 / two_pi));
    } else if (kind == "tilted_random_fourier") {
        cell = make_tilted_random_fourier_cell(get_req<std::uint64_t>(j, "seed"), get_req<int>(j, "modes"),
                                               get_req<double>(j, "amplitude"));
    } else if (kind == "fourier") {
        std::vector<FourierMode> modes;
        const json list = get_req<json>(j, "modes");
        if (!list.is_array()) throw ConfigError("'modes' must be an array of [k1, k2, cos, sin]");
        for (const auto& m : list) {
            if (!m.is_array() || m.size() != 4) throw ConfigError("each Fourier mode must be [k1, k2, cos, sin]");
            modes.push_back({m[0].get<int>(), m[1].get<int>(), m[2].get<double>(), m[3].get<double>()});
        }
        cell = make_fourier_cell(std::move(modes), get_or<double>(j, "mean", 0.0));
    } else if (kind == "tabulated") {
        cell = make_tabulated_cell(get_req<int>(j, "n"), get_req<std::vector<double>>(j, "values"));
    } else {
        throw ConfigError("unknown landscape kind '" + kind + "'");
    }
    SlowModulation slow;
    if (j.contains("slow")) {
        const json& s = j.at("slow");
        const std::string sk = get_or<std::string>(s, "kind", "cosine");
        if (sk != "cosine" && sk != "none") throw ConfigError("unknown slow modulation kind '" + sk + "'");
        if (sk == "cosine") {
            slow.amplitude = get_req<double>(s, "amplitude");
            slow.wavevector = get_vec2(s, "wavevector", {0.0, 0.0});
        }
    }
    return PinningLandscape(cell, get_or<double>(j, "eta", 1.0), get_or<double>(j, "scale", 1.0), slow);
}

} // namespace detail

PinningLandscape landscape_from_json(const std::string& text) {
    detail::json j;
    try {
        j = detail::json::parse(text);
    } catch (const detail::json::parse_error& e) {
        throw ConfigError(std::string("landscape JSON: ") + e.what());
    }
    return detail::landscape_from_json(j);
}

} // namespace pinflow
