#pragma once

// Closed-form topological spectra: the discrete relations between mode
// amplitudes, their inversion, and sampled amplitude surfaces.

#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "config.hpp"
#include "errors.hpp"

namespace wse {

enum class Family { TwoParallel, ThreeModes, FourModes, General };

inline const char* to_string(Family f) {
    switch (f) {
    case Family::TwoParallel: return "two-parallel";
    case Family::ThreeModes: return "three-modes";
    case Family::FourModes: return "four-modes";
    case Family::General: return "general";
    }
    return "?";
}

/// Left-hand side of a spectrum relation, lhs = n.
struct SpectrumRelation {
    Family family = Family::TwoParallel;
    double lhs_value = 0.0;
    bool conjectured = false;
    std::vector<std::string> notes;
};

namespace detail {

inline double spectral_prefactor(double harmonic_product) { return 4.0 / std::numbers::pi * harmonic_product; }

// prefactor * ln(num / den) with degenerate cases rejected.
inline double spectral_log(double prefactor, double num, double den, const char* what) {
    if (!(den > 0.0) || !(num > 0.0) || !std::isfinite(num / den))
        throw DegenerateSpectrumError(std::string(what) + ": logarithm argument is singular");
    return prefactor * std::log(num / den);
}

} // namespace detail

/// (4/pi) w_k w_l ln[(sqrt(w_l) r~ + sqrt(w_k) r)^2 / (sqrt(w_l) r~ - sqrt(w_k) r)^2].
/// Signed amplitudes are accepted; a negative amplitude is a pi phase shift.
inline double spectrum_two_parallel(double omega_k, double omega_l, double r, double r_tilde) {
    const double a = std::sqrt(omega_k) * r;
    const double b = std::sqrt(omega_l) * r_tilde;
    const double plus = a + b;
    const double minus = a - b;
    return detail::spectral_log(detail::spectral_prefactor(omega_k * omega_l), plus * plus, minus * minus,
                                "two-parallel spectrum");
}

/// Three modes: right k in J1 and J2, left l in J1.
inline double spectrum_three_modes(double omega_k, double omega_l, double r1, double r_tilde1, double r2) {
    const double a1 = std::sqrt(omega_k) * r1;
    const double b1 = std::sqrt(omega_l) * r_tilde1;
    const double a2 = std::sqrt(omega_k) * r2;
    const double plus = a1 + b1;
    const double minus = a1 - b1;
    return detail::spectral_log(detail::spectral_prefactor(omega_k * omega_l), plus * plus + a2 * a2,
                                minus * minus + a2 * a2, "three-mode spectrum");
}

/// Four modes: right k and left l in both J1 and J2.
inline double spectrum_four_modes(double omega_k, double omega_l, double r1, double r_tilde1, double r2,
                                  double r_tilde2) {
    const double a1 = std::sqrt(omega_k) * r1;
    const double b1 = std::sqrt(omega_l) * r_tilde1;
    const double a2 = std::sqrt(omega_k) * r2;
    const double b2 = std::sqrt(omega_l) * r_tilde2;
    const double p1 = a1 + b1;
    const double m1 = a1 - b1;
    const double p2 = a2 + b2;
    const double m2 = a2 - b2;
    return detail::spectral_log(detail::spectral_prefactor(omega_k * omega_l), p1 * p1 + p2 * p2,
                                m1 * m1 + m2 * m2, "four-mode spectrum");
}

/// Conjectured general spectrum:
/// (4/pi) prod_{(k,l)} w_k w_l ln[sum_I (sum_k sqrt(w_k) r_k^I + sum_l sqrt(w_l) r~_l^I)^2
///                               / sum_I (sum_k sqrt(w_k) r_k^I - sum_l sqrt(w_l) r~_l^I)^2],
/// the product running over the distinct (right harmonic, left harmonic) pairs.
inline SpectrumRelation spectrum_general_relation(const StringConfiguration& cfg) {
    SpectrumRelation rel;
    rel.family = Family::General;
    rel.conjectured = true;
    if (cfg.modes.empty()) throw DegenerateSpectrumError("general spectrum: configuration has no modes");

    std::map<int, std::pair<double, double>> sums; // direction -> (right, left)
    std::set<int> right_h;
    std::set<int> left_h;
    for (const auto& m : cfg.modes) {
        const double c = std::sqrt(m.omega()) * m.amplitude;
        auto& [right, left] = sums[m.direction];
        if (m.chirality == Chirality::Right) {
            right += c;
            right_h.insert(m.harmonic);
        } else {
            left += c;
            left_h.insert(m.harmonic);
        }
    }
    double num = 0.0;
    double den = 0.0;
    for (const auto& [dir, s] : sums) {
        const double plus = s.first + s.second;
        const double minus = s.first - s.second;
        num += plus * plus;
        den += minus * minus;
    }
    double product = 1.0;
    for (int k : right_h)
        for (int l : left_h) product *= static_cast<double>(k) * static_cast<double>(l);

    if (right_h.empty() || left_h.empty()) rel.notes.emplace_back("no interaction: modes of a single chirality");
    rel.lhs_value = detail::spectral_log(detail::spectral_prefactor(product), num, den, "general spectrum");
    if (rel.lhs_value == 0.0 && rel.notes.empty()) rel.notes.emplace_back("no interaction: log argument is one");
    return rel;
}

inline double spectrum_general(const StringConfiguration& cfg) { return spectrum_general_relation(cfg).lhs_value; }

enum class Branch { TildeGreater, TildeSmaller };

inline const char* to_string(Branch b) { return b == Branch::TildeGreater ? "greater" : "smaller"; }

/// omega_kl = (4/pi) w_k w_l.
inline double omega_kl(double omega_k, double omega_l) { return detail::spectral_prefactor(omega_k * omega_l); }

/// r~ solving spectrum_two_parallel(w_k, w_l, r, r~) = n on the chosen branch
/// (|sqrt(w_l) r~| above or below sqrt(w_k) r). Negative n gives negative r~.
inline double invert_two_parallel(double omega_k, double omega_l, double r, long n, Branch branch) {
    if (n == 0) throw DegenerateSpectrumError("n = 0 has no finite two-parallel solution");
    if (!(r > 0.0)) throw std::invalid_argument("invert_two_parallel: r must be positive");
    const double e = std::exp(static_cast<double>(n) / (2.0 * omega_kl(omega_k, omega_l)));
    const double a = std::sqrt(omega_k) * r;
    const double b = branch == Branch::TildeGreater ? a * (e + 1.0) / (e - 1.0) : a * (e - 1.0) / (e + 1.0);
    return b / std::sqrt(omega_l);
}

struct SurfaceRow {
    long n;
    double r_k;
    double r_tilde_l;
    Branch branch;
};

struct SpectrumSurface {
    std::vector<SurfaceRow> rows;
    std::vector<std::string> notes;
};

/// Both branch solutions for every n in n_set and every r_k in r_grid.
inline SpectrumSurface spectrum_surface(double omega_k, double omega_l, const std::vector<long>& n_set,
                                        const std::vector<double>& r_grid) {
    SpectrumSurface out;
    for (long n : n_set) {
        if (n == 0) {
            out.notes.emplace_back("n = 0 omitted (degenerate spectrum)");
            continue;
        }
        for (double r : r_grid) {
            if (!(r > 0.0)) {
                out.notes.emplace_back("r_k = " + std::to_string(r) + " omitted (non-positive)");
                continue;
            }
            for (Branch b : {Branch::TildeGreater, Branch::TildeSmaller})
                out.rows.push_back({n, r, invert_two_parallel(omega_k, omega_l, r, n, b), b});
        }
    }
    return out;
}

} // namespace wse
