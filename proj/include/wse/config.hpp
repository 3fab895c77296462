#pragma once

// Closed-string configurations in light-cone gauge: mode tables, the
// transverse embedding X^I(tau, sigma) with exact derivatives, and the checks
// on the equations of motion and the light-cone constraints.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "quadrature.hpp"

namespace wse {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

enum class Chirality { Right, Left };

inline const char* to_string(Chirality c) { return c == Chirality::Right ? "right" : "left"; }

/// +1 for right movers (tau - sigma), -1 for left movers (tau + sigma).
inline double sigma_sign(Chirality c) { return c == Chirality::Right ? 1.0 : -1.0; }

struct ModeSpec {
    int direction = 2;
    int harmonic = 1;     // k, with omega_k = k
    double amplitude = 0; // r (or r-tilde for left movers)
    double phase = 0;     // gamma
    Chirality chirality = Chirality::Right;

    double omega() const { return static_cast<double>(harmonic); }
    /// Phase argument omega*(tau -/+ sigma + gamma).
    double argument(double tau, double sigma) const {
        return omega() * (tau - sigma_sign(chirality) * sigma + phase);
    }
};

/// Closed string (beta = 1, sigma in [0, 2pi]) in a D-dimensional Minkowski
/// background. Transverse directions are I = 2 .. D-1.
struct StringConfiguration {
    int dimension = 4;
    double alpha_prime = 0.5;
    double p_plus = 1.0;
    std::map<int, double> zero_modes; // alpha_0^I
    std::map<int, double> centers;    // x_0^I
    std::vector<ModeSpec> modes;

    std::size_t transverse_count() const { return static_cast<std::size_t>(dimension - 2); }
    static std::size_t slot(int direction) { return static_cast<std::size_t>(direction - 2); }
    double prefactor() const { return std::sqrt(2.0 * alpha_prime); }

    int max_harmonic() const {
        int k = 1;
        for (const auto& m : modes) k = std::max(k, m.harmonic);
        return k;
    }

    /// 2 alpha' sum omega r^2, the natural scale of g_ss.
    double metric_scale() const {
        double s = 0.0;
        for (const auto& m : modes) s += m.omega() * m.amplitude * m.amplitude;
        return 2.0 * alpha_prime * s;
    }
};

inline void validate(const StringConfiguration& cfg) {
    if (cfg.dimension < 4) throw ConfigError("dimension", "must be an integer >= 4");
    if (!(cfg.alpha_prime > 0.0) || !std::isfinite(cfg.alpha_prime))
        throw ConfigError("alpha_prime", "must be a positive real");
    if (!(cfg.p_plus > 0.0) || !std::isfinite(cfg.p_plus))
        throw ConfigError("p_plus", "must be a positive real");
    const auto in_range = [&](int d) { return d >= 2 && d <= cfg.dimension - 1; };
    for (const auto& [d, v] : cfg.zero_modes) {
        if (!in_range(d)) throw ConfigError("zero_modes", "direction " + std::to_string(d) + " outside 2.." + std::to_string(cfg.dimension - 1));
        if (!std::isfinite(v)) throw ConfigError("zero_modes", "value must be finite");
    }
    for (const auto& [d, v] : cfg.centers) {
        if (!in_range(d)) throw ConfigError("centers", "direction " + std::to_string(d) + " outside 2.." + std::to_string(cfg.dimension - 1));
        if (!std::isfinite(v)) throw ConfigError("centers", "value must be finite");
    }
    for (std::size_t i = 0; i < cfg.modes.size(); ++i) {
        const auto& m = cfg.modes[i];
        const std::string field = "modes[" + std::to_string(i) + "]";
        if (!in_range(m.direction))
            throw ConfigError(field + ".direction", "direction " + std::to_string(m.direction) + " outside 2.." + std::to_string(cfg.dimension - 1));
        if (m.harmonic < 1) throw ConfigError(field + ".harmonic", "harmonic must be >= 1");
        if (!(m.amplitude >= 0.0) || !std::isfinite(m.amplitude))
            throw ConfigError(field + ".amplitude", "amplitude must be a finite real >= 0");
        if (!std::isfinite(m.phase)) throw ConfigError(field + ".phase", "phase must be finite");
        for (std::size_t j = 0; j < i; ++j) {
            const auto& o = cfg.modes[j];
            if (o.direction == m.direction && o.harmonic == m.harmonic && o.chirality == m.chirality)
                throw ConfigError(field, "duplicate mode (direction " + std::to_string(m.direction) +
                                             ", harmonic " + std::to_string(m.harmonic) + ", " +
                                             to_string(m.chirality) + ") also given as modes[" +
                                             std::to_string(j) + "]");
        }
    }
}

namespace detail {

inline int line_of_offset(std::string_view text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

inline double require_number(const nlohmann::json& node, const std::string& field) {
    if (!node.is_number()) throw ConfigError(field, "expected a number");
    return node.get<double>();
}

inline int require_integer(const nlohmann::json& node, const std::string& field) {
    if (node.is_number_integer()) return node.get<int>();
    if (node.is_number_float()) {
        const double v = node.get<double>();
        if (std::floor(v) == v && std::abs(v) < 1e9) return static_cast<int>(v);
    }
    throw ConfigError(field, "expected an integer");
}

inline std::map<int, double> parse_direction_table(const nlohmann::json& node, const std::string& field) {
    if (!node.is_array()) throw ConfigError(field, "expected a list of {direction, value}");
    std::map<int, double> table;
    for (std::size_t i = 0; i < node.size(); ++i) {
        const auto& entry = node[i];
        const std::string here = field + "[" + std::to_string(i) + "]";
        if (!entry.is_object()) throw ConfigError(here, "expected an object");
        for (const auto& [key, _] : entry.items())
            if (key != "direction" && key != "value") throw ConfigError(here + "." + key, "unknown key");
        if (!entry.contains("direction")) throw ConfigError(here + ".direction", "missing");
        if (!entry.contains("value")) throw ConfigError(here + ".value", "missing");
        const int d = require_integer(entry["direction"], here + ".direction");
        if (table.count(d)) throw ConfigError(here, "direction " + std::to_string(d) + " listed twice");
        table[d] = require_number(entry["value"], here + ".value");
    }
    return table;
}

} // namespace detail

/// Parses a JSON configuration document and validates it.
///
/// Keys: dimension (required), alpha_prime (default 1/2), p_plus (default 1),
/// zero_modes / centers (lists of {direction, value}), modes (list of
/// {direction, harmonic, amplitude, phase, chirality}; phase defaults to 0).
inline StringConfiguration parse_configuration(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("", std::string("malformed document: ") + e.what(),
                          detail::line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1));
    }
    if (!doc.is_object()) throw ConfigError("", "top level must be an object", 1);

    for (const auto& [key, _] : doc.items()) {
        static const char* known[] = {"dimension", "alpha_prime", "p_plus", "zero_modes", "centers", "modes"};
        if (std::find(std::begin(known), std::end(known), key) == std::end(known))
            throw ConfigError(key, "unknown key");
    }

    StringConfiguration cfg;
    if (!doc.contains("dimension")) throw ConfigError("dimension", "missing");
    cfg.dimension = detail::require_integer(doc["dimension"], "dimension");
    if (doc.contains("alpha_prime")) cfg.alpha_prime = detail::require_number(doc["alpha_prime"], "alpha_prime");
    if (doc.contains("p_plus")) cfg.p_plus = detail::require_number(doc["p_plus"], "p_plus");
    if (doc.contains("zero_modes")) cfg.zero_modes = detail::parse_direction_table(doc["zero_modes"], "zero_modes");
    if (doc.contains("centers")) cfg.centers = detail::parse_direction_table(doc["centers"], "centers");

    if (doc.contains("modes")) {
        const auto& modes = doc["modes"];
        if (!modes.is_array()) throw ConfigError("modes", "expected a list");
        for (std::size_t i = 0; i < modes.size(); ++i) {
            const auto& entry = modes[i];
            const std::string here = "modes[" + std::to_string(i) + "]";
            if (!entry.is_object()) throw ConfigError(here, "expected an object");
            for (const auto& [key, _] : entry.items()) {
                if (key != "direction" && key != "harmonic" && key != "amplitude" && key != "phase" &&
                    key != "chirality")
                    throw ConfigError(here + "." + key, "unknown key");
            }
            for (const char* required : {"direction", "harmonic", "amplitude", "chirality"})
                if (!entry.contains(required)) throw ConfigError(here + "." + required, "missing");
            ModeSpec m;
            m.direction = detail::require_integer(entry["direction"], here + ".direction");
            m.harmonic = detail::require_integer(entry["harmonic"], here + ".harmonic");
            m.amplitude = detail::require_number(entry["amplitude"], here + ".amplitude");
            if (entry.contains("phase")) m.phase = detail::require_number(entry["phase"], here + ".phase");
            const auto& chir = entry["chirality"];
            if (!chir.is_string()) throw ConfigError(here + ".chirality", "expected \"right\" or \"left\"");
            const auto s = chir.get<std::string>();
            if (s == "right") m.chirality = Chirality::Right;
            else if (s == "left") m.chirality = Chirality::Left;
            else throw ConfigError(here + ".chirality", "expected \"right\" or \"left\", got \"" + s + "\"");
            cfg.modes.push_back(m);
        }
    }
    validate(cfg);
    return cfg;
}

inline StringConfiguration load_configuration(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open configuration file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_configuration(buffer.str());
}

/// Serializes back to the document schema (round-trips through parse_configuration).
inline std::string to_document(const StringConfiguration& cfg) {
    nlohmann::json doc;
    doc["dimension"] = cfg.dimension;
    doc["alpha_prime"] = cfg.alpha_prime;
    doc["p_plus"] = cfg.p_plus;
    doc["zero_modes"] = nlohmann::json::array();
    for (const auto& [d, v] : cfg.zero_modes) doc["zero_modes"].push_back({{"direction", d}, {"value", v}});
    doc["centers"] = nlohmann::json::array();
    for (const auto& [d, v] : cfg.centers) doc["centers"].push_back({{"direction", d}, {"value", v}});
    doc["modes"] = nlohmann::json::array();
    for (const auto& m : cfg.modes)
        doc["modes"].push_back({{"direction", m.direction},
                                {"harmonic", m.harmonic},
                                {"amplitude", m.amplitude},
                                {"phase", m.phase},
                                {"chirality", to_string(m.chirality)}});
    return doc.dump(2);
}

// ---------------------------------------------------------------------------
// Embedding

/// Value and derivatives of one scalar function of (tau, sigma).
struct Jet2 {
    double value = 0;
    double t = 0;  // d/dtau
    double s = 0;  // d/dsigma
    double tt = 0;
    double ss = 0;
    double ts = 0;

    Jet2& operator+=(const Jet2& o) {
        value += o.value;
        t += o.t;
        s += o.s;
        tt += o.tt;
        ss += o.ss;
        ts += o.ts;
        return *this;
    }
    Jet2 operator*(double c) const { return {value * c, t * c, s * c, tt * c, ss * c, ts * c}; }
};

/// Jet of the unit mode term (r / sqrt(omega)) cos(omega(tau -/+ sigma + gamma)).
struct TrigTerm {
    Jet2 operator()(const ModeSpec& m, double tau, double sigma) const {
        const double w = m.omega();
        const double chi = sigma_sign(m.chirality);
        const double phi = m.argument(tau, sigma);
        const double c = std::cos(phi);
        const double s = std::sin(phi);
        const double a = m.amplitude / std::sqrt(w);
        Jet2 j;
        j.value = a * c;
        j.t = -a * w * s;
        j.s = a * w * chi * s;
        j.tt = -a * w * w * c;
        j.ss = -a * w * w * chi * chi * c;
        j.ts = a * w * w * chi * c;
        return j;
    }
};

/// Per-direction jets of X^I, indexed by I - 2.
struct EmbeddingJet {
    std::vector<Jet2> direction;
};

/// X^I and its derivatives up to second order. `term` evaluates one mode
/// term; tests substitute a corrupted evaluator through it.
template <class TermEval = TrigTerm>
EmbeddingJet embedding_jet(const StringConfiguration& cfg, double tau, double sigma, const TermEval& term = {}) {
    EmbeddingJet out;
    out.direction.assign(cfg.transverse_count(), Jet2{});
    const double pre = cfg.prefactor();
    for (const auto& [d, x0] : cfg.centers) out.direction[StringConfiguration::slot(d)].value += x0;
    for (const auto& [d, a0] : cfg.zero_modes) {
        auto& j = out.direction[StringConfiguration::slot(d)];
        j.value += pre * a0 * tau;
        j.t += pre * a0;
    }
    for (const auto& m : cfg.modes) out.direction[StringConfiguration::slot(m.direction)] += term(m, tau, sigma) * pre;
    return out;
}

inline std::vector<double> embedding(const StringConfiguration& cfg, double tau, double sigma) {
    const auto jet = embedding_jet(cfg, tau, sigma);
    std::vector<double> x;
    x.reserve(jet.direction.size());
    for (const auto& j : jet.direction) x.push_back(j.value);
    return x;
}

inline EmbeddingJet embedding_derivatives(const StringConfiguration& cfg, double tau, double sigma) {
    return embedding_jet(cfg, tau, sigma);
}

/// (-d_tau^2 + d_sigma^2) X^I per direction.
template <class TermEval = TrigTerm>
std::vector<double> wave_residual(const StringConfiguration& cfg, double tau, double sigma, const TermEval& term = {}) {
    const auto jet = embedding_jet(cfg, tau, sigma, term);
    std::vector<double> r;
    r.reserve(jet.direction.size());
    for (const auto& j : jet.direction) r.push_back(-j.tt + j.ss);
    return r;
}

/// Scale of the second derivatives, sqrt(2 alpha') sum r omega^{3/2}; the
/// wave residual is judged relative to it.
inline double second_derivative_scale(const StringConfiguration& cfg) {
    double s = 0.0;
    for (const auto& m : cfg.modes) s += m.amplitude * std::pow(m.omega(), 1.5);
    return std::max(cfg.prefactor() * s, 1.0);
}

struct XMinusDerivatives {
    double tau = 0;
    double sigma = 0;
};

/// d_tau X^- and d_sigma X^- from the light-cone constraints.
inline XMinusDerivatives x_minus_derivatives(const StringConfiguration& cfg, double tau, double sigma) {
    const auto jet = embedding_jet(cfg, tau, sigma);
    double tt = 0.0;
    double ss = 0.0;
    double ts = 0.0;
    for (const auto& j : jet.direction) {
        tt += j.t * j.t;
        ss += j.s * j.s;
        ts += j.t * j.s;
    }
    const double ap = cfg.alpha_prime * cfg.p_plus;
    return {(tt + ss) / (2.0 * ap), ts / ap};
}

/// Level-matching tolerance with unit amplitudes.
inline constexpr double level_match_tolerance = 1e-8;

/// |integral over sigma in [0, 2pi] of d_sigma X^-| on the slice tau; zero iff
/// X^- is periodic. Composite Gauss-Legendre, 8 panels per harmonic x 8 nodes.
inline double level_match_residual(const StringConfiguration& cfg, double tau = 0.0) {
    if (cfg.modes.empty()) return 0.0;
    static const auto rule = quad::gauss_legendre(8);
    const auto panels = static_cast<std::size_t>(8 * cfg.max_harmonic());
    const double integral = quad::composite_gauss(
        [&](double sigma) { return x_minus_derivatives(cfg, tau, sigma).sigma; }, 0.0, two_pi, panels, rule);
    return std::abs(integral);
}

inline bool is_level_matched(const StringConfiguration& cfg) {
    return level_match_residual(cfg) <= level_match_tolerance;
}

struct ConstraintSample {
    double tau;
    double sigma;
    std::vector<double> residual;
};

struct ConstraintReport {
    double wave_residual_max = 0;     // relative to second_derivative_scale
    double level_match_residual = 0;
    bool level_matched = true;
    std::vector<ConstraintSample> samples;
};

/// Wave residual sweep over `points` uniformly random (tau, sigma) plus the
/// level-match residual.
inline ConstraintReport constraint_report(const StringConfiguration& cfg, std::size_t points = 64,
                                          std::uint64_t seed = 1) {
    ConstraintReport rep;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, two_pi);
    const double scale = second_derivative_scale(cfg);
    for (std::size_t i = 0; i < points; ++i) {
        const double tau = uni(rng);
        const double sigma = uni(rng);
        auto r = wave_residual(cfg, tau, sigma);
        for (double v : r) rep.wave_residual_max = std::max(rep.wave_residual_max, std::abs(v) / scale);
        rep.samples.push_back({tau, sigma, std::move(r)});
    }
    rep.level_match_residual = level_match_residual(cfg);
    rep.level_matched = rep.level_match_residual <= level_match_tolerance;
    return rep;
}

} // namespace wse
