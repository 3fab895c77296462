#pragma once

// Induced-metric geometry of the worldsheet in conformal gauge,
// g = g_ss (-dtau^2 + dsigma^2).

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <utility>
#include <vector>

#include "config.hpp"
#include "errors.hpp"

namespace wse {

/// g_ss and its partial derivatives up to second order.
struct MetricJet {
    double g = 0;
    double t = 0;
    double s = 0;
    double tt = 0;
    double ss = 0;
    double ts = 0;
};

namespace detail {

// Precomputed coefficients of one mode's contribution to a sigma-profile jet.
struct ProfileTerm {
    double omega, chi, shift; // phase argument omega*(tau - chi*sigma) + shift
    double v, t, s, tt, ts, ss;

    ProfileTerm(const ModeSpec& m, double pre) {
        const double w = m.omega();
        const double a = pre * m.amplitude / std::sqrt(w);
        omega = w;
        chi = sigma_sign(m.chirality);
        shift = w * m.phase;
        v = a * w * chi;
        t = a * w * w * chi;
        s = -a * w * w;
        tt = -a * w * w * w * chi;
        ts = a * w * w * w;
        ss = tt;
    }

    void add_to(Jet2& j, double tau, double sigma) const {
        const double phi = omega * (tau - chi * sigma) + shift;
        const double sn = std::sin(phi);
        const double cs = std::cos(phi);
        j.value += v * sn;
        j.t += t * cs;
        j.s += s * cs;
        j.tt += tt * sn;
        j.ts += ts * sn;
        j.ss += ss * sn;
    }
};

inline void add_profile_term(Jet2& j, const ModeSpec& m, double pre, double tau, double sigma) {
    ProfileTerm(m, pre).add_to(j, tau, sigma);
}

} // namespace detail

/// Jets of the sigma-profiles h_I = d_sigma X^I (to second order, i.e. third
/// derivatives of X), indexed by I - 2.
inline std::vector<Jet2> sigma_profiles(const StringConfiguration& cfg, double tau, double sigma) {
    std::vector<Jet2> h(cfg.transverse_count());
    const double pre = cfg.prefactor();
    for (const auto& m : cfg.modes) detail::add_profile_term(h[StringConfiguration::slot(m.direction)], m, pre, tau, sigma);
    return h;
}

/// Weighted combination sum_I w_I h_I of the sigma-profiles.
inline Jet2 combined_profile(const StringConfiguration& cfg, const std::vector<double>& weights, double tau,
                             double sigma) {
    const double pre = cfg.prefactor();
    Jet2 out;
    for (const auto& m : cfg.modes) {
        const std::size_t i = StringConfiguration::slot(m.direction);
        if (i >= weights.size() || weights[i] == 0.0) continue;
        Jet2 term;
        detail::add_profile_term(term, m, pre, tau, sigma);
        out += term * weights[i];
    }
    return out;
}

/// Conformal factor g_ss = sum_I (d_sigma X^I)^2 with closed-form derivatives.
class ConformalFactorField {
public:
    explicit ConformalFactorField(StringConfiguration cfg)
        : cfg_(std::move(cfg)), tolerance_(1e-12 * cfg_.metric_scale()) {
        std::map<int, std::vector<detail::ProfileTerm>> groups;
        for (const auto& m : cfg_.modes) groups[m.direction].emplace_back(m, cfg_.prefactor());
        for (auto& [dir, terms] : groups) groups_.push_back(std::move(terms));
    }

    const StringConfiguration& configuration() const { return cfg_; }

    /// g_ss at or below this value counts as singular.
    double singular_tolerance() const { return tolerance_; }

    MetricJet jet(double tau, double sigma) const {
        MetricJet m;
        for (const auto& group : groups_) {
            Jet2 h;
            for (const auto& term : group) term.add_to(h, tau, sigma);
            m.g += h.value * h.value;
            m.t += 2.0 * h.value * h.t;
            m.s += 2.0 * h.value * h.s;
            m.tt += 2.0 * (h.t * h.t + h.value * h.tt);
            m.ss += 2.0 * (h.s * h.s + h.value * h.ss);
            m.ts += 2.0 * (h.t * h.s + h.value * h.ts);
        }
        return m;
    }

    double operator()(double tau, double sigma) const { return jet(tau, sigma).g; }

private:
    StringConfiguration cfg_;
    std::vector<std::vector<detail::ProfileTerm>> groups_; // modes sharing a direction
    double tolerance_;
};

inline ConformalFactorField conformal_factor(const StringConfiguration& cfg) { return ConformalFactorField(cfg); }

/// Metric given directly by a jet function; used for analytic test metrics.
class SyntheticField {
public:
    SyntheticField(std::function<MetricJet(double, double)> jet, double tolerance = 1e-300)
        : jet_(std::move(jet)), tolerance_(tolerance) {}

    double singular_tolerance() const { return tolerance_; }
    MetricJet jet(double tau, double sigma) const { return jet_(tau, sigma); }
    double operator()(double tau, double sigma) const { return jet_(tau, sigma).g; }

private:
    std::function<MetricJet(double, double)> jet_;
    double tolerance_;
};

/// g_ss from the double sum over mode pairs sharing a direction,
/// 2 alpha' sum sqrt(w w') c c' sin(phi) sin(phi') with c = r (right), -r (left).
inline double conformal_factor_series(const StringConfiguration& cfg, double tau, double sigma) {
    double total = 0.0;
    for (const auto& a : cfg.modes) {
        const double ca = sigma_sign(a.chirality) * a.amplitude * std::sqrt(a.omega()) * std::sin(a.argument(tau, sigma));
        for (const auto& b : cfg.modes) {
            if (b.direction != a.direction) continue;
            total += ca * sigma_sign(b.chirality) * b.amplitude * std::sqrt(b.omega()) * std::sin(b.argument(tau, sigma));
        }
    }
    return 2.0 * cfg.alpha_prime * total;
}

/// Coefficient of dtau^dsigma in the Euler form,
/// -(1/4pi) [d_tau(g_t/g) - d_sigma(g_s/g)].
template <class Field>
double euler_density(const Field& field, double tau, double sigma) {
    const MetricJet m = field.jet(tau, sigma);
    if (!(m.g > field.singular_tolerance())) throw SingularPointError(tau, sigma, m.g);
    const double num = (m.g * m.tt - m.t * m.t) - (m.g * m.ss - m.s * m.s);
    return -num / (4.0 * std::numbers::pi * m.g * m.g);
}

/// Same as euler_density without the singular check; for quadrature kernels
/// that have already excluded the singular set.
inline double euler_density_unchecked(const MetricJet& m) {
    const double num = (m.g * m.tt - m.t * m.t) - (m.g * m.ss - m.s * m.s);
    return -num / (4.0 * std::numbers::pi * m.g * m.g);
}

struct OneForm {
    double tau = 0;   // coefficient of dtau
    double sigma = 0; // coefficient of dsigma
};

/// Spin connection w^1_2 of the orthonormal coframe sqrt(g)(dtau, dsigma):
/// w = (1/2)(d_sigma ln g) dtau + (1/2)(d_tau ln g) dsigma, so that
/// dw = -2 pi e dtau^dsigma.
inline OneForm spin_connection_unchecked(const MetricJet& m) { return {0.5 * m.s / m.g, 0.5 * m.t / m.g}; }

template <class Field>
OneForm spin_connection(const Field& field, double tau, double sigma) {
    const MetricJet m = field.jet(tau, sigma);
    if (!(m.g > field.singular_tolerance())) throw SingularPointError(tau, sigma, m.g);
    return spin_connection_unchecked(m);
}

// ---------------------------------------------------------------------------
// Null-coordinate patches for a right k-mode and a left l-mode.

enum class PatchKind { I, II, III, IV };

inline const char* to_string(PatchKind k) {
    switch (k) {
    case PatchKind::I: return "I";
    case PatchKind::II: return "II";
    case PatchKind::III: return "III";
    case PatchKind::IV: return "IV";
    }
    return "?";
}

inline constexpr std::array<PatchKind, 4> all_patch_kinds = {PatchKind::I, PatchKind::II, PatchKind::III, PatchKind::IV};

/// Signs (s_x, s_y) of x = s_x sin u, y = s_y sin v.
inline std::pair<double, double> patch_signs(PatchKind k) {
    switch (k) {
    case PatchKind::I: return {1.0, 1.0};
    case PatchKind::II: return {1.0, -1.0};
    case PatchKind::III: return {-1.0, 1.0};
    case PatchKind::IV: return {-1.0, -1.0};
    }
    return {1.0, 1.0};
}

struct NullPatch {
    PatchKind kind = PatchKind::I;
    int k = 1;                  // right harmonic
    int l = 1;                  // left harmonic
    double gamma = 0;           // right phase
    double gamma_tilde = 0;     // left phase
    int right_direction = 2;
    int left_direction = 2;

    bool parallel() const { return right_direction == left_direction; }
    /// Number of regions of this kind tiling [0, 2pi]^2.
    int multiplicity() const { return 2 * k * l; }
    double u(double tau, double sigma) const { return k * (tau - sigma + gamma); }
    double v(double tau, double sigma) const { return l * (tau + sigma + gamma_tilde); }
};

struct PatchPoint {
    double x = 0;
    double y = 0;
};

inline PatchPoint null_patch_map(const NullPatch& patch, double tau, double sigma) {
    const auto [sx, sy] = patch_signs(patch.kind);
    return {sx * std::sin(patch.u(tau, sigma)), sy * std::sin(patch.v(tau, sigma))};
}

/// d(x, y)/d(tau, sigma) = 2kl s_x s_y cos u cos v.
inline double null_patch_jacobian(const NullPatch& patch, double tau, double sigma) {
    const auto [sx, sy] = patch_signs(patch.kind);
    return 2.0 * patch.k * patch.l * sx * sy * std::cos(patch.u(tau, sigma)) * std::cos(patch.v(tau, sigma));
}

/// Kind whose chart is orientation preserving at (tau, sigma).
inline PatchKind patch_kind_at(int k, int l, double gamma, double gamma_tilde, double tau, double sigma) {
    const bool cu = std::cos(k * (tau - sigma + gamma)) >= 0.0;
    const bool cv = std::cos(l * (tau + sigma + gamma_tilde)) >= 0.0;
    if (cu && cv) return PatchKind::I;
    if (cu) return PatchKind::II;
    if (cv) return PatchKind::III;
    return PatchKind::IV;
}

struct PatchAmplitudes {
    double r = 0;       // right amplitude r_k
    double r_tilde = 0; // left amplitude r~_l
};

/// Euler form coefficient of dx^dy on a patch, i.e. the pullback of the
/// conformal-coordinate density through the orientation-preserving chart.
///
/// Parallel modes:      -(s_x s_y / pi) A B / (A x - s_x s_y B y)^2
/// Perpendicular modes: (2 / pi) A^2 B^2 x y / (A^2 x^2 + B^2 y^2)^2
/// with A = sqrt(k) r, B = sqrt(l) r~.
inline double euler_density_null(const NullPatch& patch, const PatchAmplitudes& amp, double x, double y) {
    const double a = std::sqrt(static_cast<double>(patch.k)) * amp.r;
    const double b = std::sqrt(static_cast<double>(patch.l)) * amp.r_tilde;
    const auto [sx, sy] = patch_signs(patch.kind);
    const double orient = sx * sy;
    if (patch.parallel()) {
        const double d = a * x - orient * b * y;
        if (std::abs(d) <= 1e-12 * (a + b)) throw SingularPointError(x, y, d * d);
        return -orient * a * b / (std::numbers::pi * d * d);
    }
    const double d = a * a * x * x + b * b * y * y;
    if (d <= 1e-24 * (a * a + b * b)) throw SingularPointError(x, y, d);
    return 2.0 * a * a * b * b * x * y / (std::numbers::pi * d * d);
}

} // namespace wse
