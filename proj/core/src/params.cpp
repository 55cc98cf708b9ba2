#include "pinflow/params.hpp"
#include "pinflow/error.hpp"

#include <cmath>

namespace pinflow {

std::string to_string(Regime r) {
    switch (r) {
    case Regime::GL1: return "GL1";
    case Regime::GL2: return "GL2";
    case Regime::GL3: return "GL3";
    case Regime::GL1p: return "GL1'";
    case Regime::GL2p: return "GL2'";
    case Regime::GP: return "GP";
    }
    return "?";
}

Regime parse_regime(const std::string& s) {
    if (s == "GL1") return Regime::GL1;
    if (s == "GL2") return Regime::GL2;
    if (s == "GL3") return Regime::GL3;
    if (s == "GL1'" || s == "GL1p") return Regime::GL1p;
    if (s == "GL2'" || s == "GL2p") return Regime::GL2p;
    if (s == "GP") return Regime::GP;
    throw ConfigError("unknown regime '" + s + "'");
}

Params Params::mixed(double alpha, double beta) {
    Params p;
    p.alpha = alpha;
    p.beta = beta;
    return p;
}

std::optional<double> regime_kappa(Regime r, double lambda) {
    switch (r) {
    case Regime::GL1: return 1.0;
    case Regime::GL2: return lambda;
    case Regime::GL1p:
    case Regime::GL2p: return 0.0;
    default: return std::nullopt;
    }
}

void Params::validate() const {
    require(std::isfinite(alpha) && std::isfinite(beta), "alpha and beta must be finite");
    require(alpha >= 0.0, "alpha must be non-negative");
    require(std::abs(alpha * alpha + beta * beta - 1.0) <= 1e-12, "alpha^2 + beta^2 must equal 1");
    require(temperature >= 0.0 && std::isfinite(temperature), "temperature must be non-negative");
    require(std::isfinite(lambda) && std::isfinite(kappa), "lambda and kappa must be finite");
    if (regime) {
        if (auto k = regime_kappa(*regime, lambda))
            require(std::abs(*k - kappa) <= 1e-12, "kappa inconsistent with regime " + to_string(*regime));
    }
}

} // namespace pinflow
