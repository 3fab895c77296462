#pragma once

// Integral of the Euler form over the fundamental domain by three methods:
// principal-value area quadrature, Stokes boundary integral of the spin
// connection, and the null-patch decomposition.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "config.hpp"
#include "errors.hpp"
#include "geometry.hpp"
#include "locus.hpp"
#include "quadrature.hpp"

namespace wse {

enum class Method { PV2D, Boundary, Patch };

inline const char* to_string(Method m) {
    switch (m) {
    case Method::PV2D: return "pv2d";
    case Method::Boundary: return "boundary";
    case Method::Patch: return "patch";
    }
    return "?";
}

struct Domain {
    double tau0 = 0.0;
    double tau1 = two_pi;
    double sigma0 = 0.0;
    double sigma1 = two_pi;

    double area() const { return (tau1 - tau0) * (sigma1 - sigma0); }
    bool full_period() const {
        return std::abs(tau1 - tau0 - two_pi) < 1e-14 && std::abs(sigma1 - sigma0 - two_pi) < 1e-14;
    }
};

inline const std::vector<double>& default_schedule() {
    static const std::vector<double> widths{0.02, 0.01, 0.005, 0.0025};
    return widths;
}

struct IntegrationOptions {
    double abs_tol = 1e-8;       // outer (tau) tolerance
    double inner_tol = 1e-9;     // inner (sigma) tolerance per kept interval
    std::size_t max_intervals = 2000;
    double step = 0.01;          // contour tracing step
    std::size_t circle_nodes = 256;
};

struct LocusSummary {
    SingularLocus::Shape shape = SingularLocus::Shape::Empty;
    std::size_t curves = 0;
    std::size_t points = 0;
    double tolerance = 0.0;
};

inline LocusSummary summarize(const SingularLocus& locus) {
    LocusSummary s;
    s.shape = locus.shape;
    s.tolerance = locus.tolerance;
    for (const auto& c : locus.components) (c.kind == SingularLocus::Kind::Curve ? s.curves : s.points) += 1;
    return s;
}

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    Method method = Method::PV2D;
    LocusSummary singular_report;
    std::vector<std::pair<double, double>> extrapolation_trace; // (width, value), widths decreasing
    double quadrature_error = 0.0;
    bool degenerate = false;
    bool converged = true;
    std::vector<std::pair<std::string, double>> partials;
    std::vector<std::string> notes;
};

namespace detail {

inline void check_schedule(std::span<const double> widths) {
    if (widths.size() < 3) throw std::invalid_argument("exclusion schedule needs at least 3 widths");
    for (std::size_t i = 0; i < widths.size(); ++i) {
        if (!(widths[i] > 0.0)) throw std::invalid_argument("exclusion widths must be positive");
        if (i > 0 && !(widths[i] < widths[i - 1]))
            throw std::invalid_argument("exclusion widths must be strictly decreasing");
    }
}

using Interval = std::pair<double, double>;

inline std::vector<Interval> complement(std::vector<Interval> cut, double x0, double x1) {
    std::sort(cut.begin(), cut.end());
    std::vector<Interval> kept;
    double cursor = x0;
    for (const auto& [a, b] : cut) {
        const double lo = std::max(a, x0);
        const double hi = std::min(b, x1);
        if (hi <= lo) continue;
        if (lo > cursor) kept.emplace_back(cursor, lo);
        cursor = std::max(cursor, hi);
    }
    if (cursor < x1) kept.emplace_back(cursor, x1);
    return kept;
}

// Extrapolated value, its error, and the convergence verdict for a schedule.
struct Finish {
    double value;
    double error;
    bool converged;
};

inline Finish finish(std::span<const double> widths, std::span<const double> values, double quad_error) {
    const auto ex = quad::extrapolate_to_zero(widths, values);
    const std::size_t n = values.size();
    double error = std::abs(values[n - 1] - ex.value) + quad_error;
    // Residuals between successive widths must shrink unless already at the
    // quadrature floor.
    const double floor = 10.0 * quad_error + 1e-9 * std::max(1.0, std::abs(ex.value));
    bool converged = true;
    for (std::size_t i = 0; i + 2 < n; ++i) {
        const double d0 = std::abs(values[i] - values[i + 1]);
        const double d1 = std::abs(values[i + 1] - values[i + 2]);
        if (d1 > floor && d1 >= d0) converged = false;
    }
    if (!std::isfinite(ex.value)) converged = false;
    return {ex.value, error, converged};
}

} // namespace detail

/// Excluded neighbourhood of the singular locus for an exclusion width delta:
/// strips |h| < delta |grad h| around curves (h the effective sigma-profile)
/// and discs of radius delta around isolated points.
class ExclusionRegion {
public:
    enum class Axis { Tau, Sigma };

    ExclusionRegion(const SingularLocus& locus, const StringConfiguration* cfg) : locus_(locus), cfg_(cfg) {
        if (locus_.shape == SingularLocus::Shape::Curves && !cfg_)
            throw std::invalid_argument("curve exclusion requires the owning configuration");
        if (cfg_) samples_ = 512 * static_cast<std::size_t>(cfg_->max_harmonic());
    }

    const SingularLocus& locus() const { return locus_; }

    /// Strip function q = h^2 - delta^2 |grad h|^2 (negative inside the strip).
    double strip_function(double tau, double sigma, double delta) const {
        const Jet2 h = combined_profile(*cfg_, locus_.profile_weights, tau, sigma);
        return h.value * h.value - delta * delta * (h.t * h.t + h.s * h.s);
    }

    bool excluded(double tau, double sigma, double delta) const {
        if (locus_.shape == SingularLocus::Shape::Curves) return strip_function(tau, sigma, delta) < 0.0;
        if (locus_.shape == SingularLocus::Shape::Points)
            for (const auto& p : locus_.points())
                if (detail::torus_distance(p, {tau, sigma}) < delta) return true;
        return false;
    }

    /// Kept sub-intervals of the axis-aligned line through `fixed`, varying
    /// the given coordinate over [x0, x1].
    std::vector<detail::Interval> kept(Axis axis, double fixed, double x0, double x1, double delta) const {
        switch (locus_.shape) {
        case SingularLocus::Shape::Curves: return kept_curves(axis, fixed, x0, x1, delta);
        case SingularLocus::Shape::Points: return kept_points(axis, fixed, x0, x1, delta);
        default: return {{x0, x1}};
        }
    }

    /// Tau values where the kept set on sigma lines changes topology (points case).
    std::vector<double> breakpoints(double delta) const {
        std::vector<double> out;
        if (locus_.shape != SingularLocus::Shape::Points) return out;
        for (const auto& p : locus_.points())
            for (double m : {-1.0, 0.0, 1.0})
                for (double d : {-delta, delta}) out.push_back(p.tau + m * two_pi + d);
        return out;
    }

private:
    std::vector<detail::Interval> kept_points(Axis axis, double fixed, double x0, double x1, double delta) const {
        std::vector<detail::Interval> cut;
        for (const auto& p : locus_.points()) {
            const double across = axis == Axis::Sigma ? p.tau : p.sigma;
            const double along = axis == Axis::Sigma ? p.sigma : p.tau;
            const double d = detail::wrap_delta(fixed - across);
            if (std::abs(d) >= delta) continue;
            const double half = std::sqrt(delta * delta - d * d);
            for (double m = std::floor((x0 - along - half) / two_pi); along + m * two_pi - half < x1; m += 1.0)
                cut.emplace_back(along + m * two_pi - half, along + m * two_pi + half);
        }
        return detail::complement(std::move(cut), x0, x1);
    }

    // q and its derivative along the axis.
    std::pair<double, double> strip_jet(Axis axis, double fixed, double x, double delta) const {
        const double tau = axis == Axis::Sigma ? fixed : x;
        const double sigma = axis == Axis::Sigma ? x : fixed;
        const Jet2 h = combined_profile(*cfg_, locus_.profile_weights, tau, sigma);
        const double q = h.value * h.value - delta * delta * (h.t * h.t + h.s * h.s);
        const double dq = axis == Axis::Sigma
                              ? 2.0 * h.value * h.s - 2.0 * delta * delta * (h.t * h.ts + h.s * h.ss)
                              : 2.0 * h.value * h.t - 2.0 * delta * delta * (h.t * h.tt + h.s * h.ts);
        return {q, dq};
    }

    std::vector<detail::Interval> kept_curves(Axis axis, double fixed, double x0, double x1, double delta) const {
        auto q = [&](double x) { return strip_jet(axis, fixed, x, delta).first; };
        auto dq = [&](double x) { return strip_jet(axis, fixed, x, delta).second; };
        const std::size_t n = std::max<std::size_t>(
            64, static_cast<std::size_t>(std::ceil(samples_ * (x1 - x0) / two_pi)));
        const double dx = (x1 - x0) / static_cast<double>(n);
        std::vector<double> xs(n + 1), qs(n + 1), ds(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            xs[i] = i == n ? x1 : x0 + dx * static_cast<double>(i);
            std::tie(qs[i], ds[i]) = strip_jet(axis, fixed, xs[i], delta);
        }
        // Roots of q: sign changes between samples, plus pairs hidden in a
        // cell where q stays positive at both ends but has an interior minimum.
        std::vector<double> roots;
        for (std::size_t i = 0; i < n; ++i) {
            if ((qs[i] < 0.0) != (qs[i + 1] < 0.0)) {
                roots.push_back(quad::polish_root(q, xs[i], xs[i + 1], qs[i], qs[i + 1]));
            } else if (qs[i] >= 0.0 && ds[i] < 0.0 && ds[i + 1] > 0.0) {
                const double xm = quad::polish_root(dq, xs[i], xs[i + 1], ds[i], ds[i + 1]);
                const double qm = q(xm);
                if (qm < 0.0) {
                    roots.push_back(quad::polish_root(q, xs[i], xm, qs[i], qm));
                    roots.push_back(quad::polish_root(q, xm, xs[i + 1], qm, qs[i + 1]));
                }
            }
        }
        std::sort(roots.begin(), roots.end());
        // Alternate kept/excluded starting from the sign at x0.
        std::vector<detail::Interval> kept;
        bool inside = qs[0] >= 0.0;
        double start = x0;
        for (double r : roots) {
            if (inside && r > start) kept.emplace_back(start, r);
            inside = !inside;
            start = r;
        }
        if (inside && x1 > start) kept.emplace_back(start, x1);
        return kept;
    }

    SingularLocus locus_;
    const StringConfiguration* cfg_;
    std::size_t samples_ = 512;
};

namespace detail {

template <class Field>
std::pair<double, double> pv_at_width(const Field& field, const ExclusionRegion& region, const Domain& dom,
                                      double delta, const IntegrationOptions& opt, bool& ok) {
    double inner_error = 0.0;
    auto inner = [&](double tau) {
        double total = 0.0;
        for (const auto& [a, b] : region.kept(ExclusionRegion::Axis::Sigma, tau, dom.sigma0, dom.sigma1, delta)) {
            auto f = [&](double s) { return euler_density_unchecked(field.jet(tau, s)); };
            const auto r = quad::integrate_adaptive(f, a, b, opt.inner_tol, 1e-12, opt.max_intervals);
            if (!r.converged) ok = false;
            inner_error = std::max(inner_error, r.error);
            total += r.value;
        }
        return total;
    };
    const auto bps = region.breakpoints(delta);
    const auto outer = bps.empty()
                           ? quad::integrate_adaptive(inner, dom.tau0, dom.tau1, opt.abs_tol, 1e-12, opt.max_intervals)
                           : quad::integrate_smoothed(inner, dom.tau0, dom.tau1, opt.abs_tol, 1e-12, opt.max_intervals, bps);
    if (!outer.converged) ok = false;
    return {outer.value, outer.error + (dom.tau1 - dom.tau0) * inner_error};
}

} // namespace detail

/// Area integral of the Euler density over the domain minus the exclusion
/// region, for each width in the schedule, extrapolated to zero width.
template <class Field>
QuadratureResult integrate_euler_pv(const Field& field, const SingularLocus& locus, const StringConfiguration* cfg,
                                    const Domain& dom = {}, std::span<const double> schedule = default_schedule(),
                                    const IntegrationOptions& opt = {}) {
    detail::check_schedule(schedule);
    QuadratureResult out;
    out.method = Method::PV2D;
    out.singular_report = summarize(locus);
    if (locus.degenerate()) {
        out.degenerate = true;
        out.notes.emplace_back("degenerate conformal factor (g_ss = 0 identically); value set to 0");
        return out;
    }
    const ExclusionRegion region(locus, cfg);
    std::vector<double> values;
    double quad_error = 0.0;
    bool ok = true;
    const bool excise = locus.shape == SingularLocus::Shape::Curves || locus.shape == SingularLocus::Shape::Points;
    for (double delta : schedule) {
        const auto [v, e] = detail::pv_at_width(field, region, dom, delta, opt, ok);
        values.push_back(v);
        out.extrapolation_trace.emplace_back(delta, v);
        quad_error = e;
        if (!excise) break;
    }
    if (!excise) {
        out.value = values.front();
        out.quadrature_error = quad_error;
        out.error_estimate = quad_error;
        out.converged = ok;
        out.notes.emplace_back("no singular locus; plain area integral");
        return out;
    }
    const auto fin = detail::finish(schedule, values, quad_error);
    out.value = fin.value;
    out.error_estimate = fin.error;
    out.quadrature_error = quad_error;
    out.converged = ok && fin.converged;
    if (!ok) out.notes.emplace_back("adaptive quadrature hit its interval limit");
    if (!fin.converged) out.notes.emplace_back("extrapolation residuals are not decreasing");
    return out;
}

inline QuadratureResult integrate_euler_pv(const ConformalFactorField& field,
                                           std::span<const double> schedule = default_schedule(),
                                           const IntegrationOptions& opt = {}) {
    const auto locus = locate_singular_locus(field);
    return integrate_euler_pv(field, locus, &field.configuration(), Domain{}, schedule, opt);
}

// ---------------------------------------------------------------------------
// Boundary method

namespace detail {

// Line integral of the spin connection along the level set G = 0 between
// chord endpoints a and b, as a G7/K15 pair in the chord parameter.
template <class Field, class G>
quad::detail::Segment level_segment(const Field& field, const G& level, const Point2& a, const Point2& b) {
    const double dt = b.tau - a.tau;
    const double ds = b.sigma - a.sigma;
    const double len = std::hypot(dt, ds);
    const double nt = -ds / len;
    const double ns = dt / len;
    auto f = [&](double t) {
        const double pt = a.tau + t * dt;
        const double ps = a.sigma + t * ds;
        double lambda = 0.0;
        LevelValue v{};
        for (int it = 0; it < 30; ++it) {
            v = level(pt + lambda * nt, ps + lambda * ns);
            const double slope = v.t * nt + v.s * ns;
            const double step = v.value / slope;
            lambda -= step;
            if (std::abs(step) < 1e-15) break;
        }
        v = level(pt + lambda * nt, ps + lambda * ns);
        const double slope = v.t * nt + v.s * ns;
        const double dlambda = -(v.t * dt + v.s * ds) / slope;
        const OneForm w = spin_connection_unchecked(field.jet(pt + lambda * nt, ps + lambda * ns));
        return w.tau * (dt + dlambda * nt) + w.sigma * (ds + dlambda * ns);
    };
    return quad::detail::gk15(f, 0.0, 1.0);
}

// Counterclockwise integral of the spin connection over the domain edges,
// skipping excised parts.
template <class Field>
std::pair<double, double> edge_integral(const Field& field, const ExclusionRegion& region, const Domain& dom,
                                        double delta, const IntegrationOptions& opt) {
    using Axis = ExclusionRegion::Axis;
    double value = 0.0;
    double error = 0.0;
    auto run = [&](Axis axis, double fixed, double sign) {
        const double x0 = axis == Axis::Tau ? dom.tau0 : dom.sigma0;
        const double x1 = axis == Axis::Tau ? dom.tau1 : dom.sigma1;
        for (const auto& [a, b] : region.kept(axis, fixed, x0, x1, delta)) {
            auto f = [&](double x) {
                const auto m = axis == Axis::Tau ? field.jet(x, fixed) : field.jet(fixed, x);
                const OneForm w = spin_connection_unchecked(m);
                return axis == Axis::Tau ? w.tau : w.sigma;
            };
            const auto r = quad::integrate_adaptive(f, a, b, opt.inner_tol, 1e-12, opt.max_intervals);
            value += sign * r.value;
            error += r.error;
        }
    };
    run(Axis::Tau, dom.sigma0, 1.0);    // bottom, tau increasing
    run(Axis::Sigma, dom.tau1, 1.0);    // right, sigma increasing
    run(Axis::Tau, dom.sigma1, -1.0);   // top, tau decreasing
    run(Axis::Sigma, dom.tau0, -1.0);   // left, sigma decreasing
    return {value, error};
}

} // namespace detail

/// Stokes form of the Euler integral: -(1/2pi) times the integral of the spin
/// connection over the boundary of the kept region (domain edges plus the
/// boundaries of the excised strips and discs), extrapolated to zero width.
template <class Field>
QuadratureResult integrate_euler_boundary(const Field& field, const SingularLocus& locus,
                                          const StringConfiguration* cfg, const Domain& dom = {},
                                          std::span<const double> schedule = default_schedule(),
                                          const IntegrationOptions& opt = {}) {
    detail::check_schedule(schedule);
    QuadratureResult out;
    out.method = Method::Boundary;
    out.singular_report = summarize(locus);
    if (locus.degenerate()) {
        out.degenerate = true;
        out.notes.emplace_back("degenerate conformal factor (g_ss = 0 identically); value set to 0");
        return out;
    }
    const bool excise = locus.shape == SingularLocus::Shape::Curves || locus.shape == SingularLocus::Shape::Points;
    if (excise && !dom.full_period())
        throw UnsupportedShapeError("boundary method with a singular locus requires the full periodic domain");

    const ExclusionRegion region(locus, cfg);
    constexpr double inv = -1.0 / two_pi;
    std::vector<double> values;
    double quad_error = 0.0;
    double edge_residual = 0.0;
    bool ok = true;

    for (double delta : schedule) {
        const auto [edge, edge_err] = detail::edge_integral(field, region, dom, delta, opt);
        double inner = 0.0;
        double inner_err = 0.0;

        if (locus.shape == SingularLocus::Shape::Curves) {
            const auto weights = locus.profile_weights;
            for (double side : {1.0, -1.0}) {
                auto level = [&, side](double t, double s) {
                    const Jet2 h = combined_profile(*cfg, weights, t, s);
                    const double n = std::hypot(h.t, h.s);
                    const double nt = (h.t * h.tt + h.s * h.ts) / n;
                    const double ns = (h.t * h.ts + h.s * h.ss) / n;
                    return LevelValue{side * h.value - delta * n, side * h.t - delta * nt, side * h.s - delta * ns};
                };
                for (const auto& comp : locus.components) {
                    const Point2 p = comp.points.front();
                    const Jet2 h = combined_profile(*cfg, weights, p.tau, p.sigma);
                    const double n = std::hypot(h.t, h.s);
                    const Point2 seed{p.tau + side * delta * h.t / n, p.sigma + side * delta * h.s / n};
                    const double step = std::min(opt.step, 2.0 * delta);
                    const Contour c = trace_contour(level, seed, step, n);
                    if (!c.closed) {
                        ok = false;
                        out.notes.emplace_back("strip boundary did not close");
                        continue;
                    }
                    for (std::size_t i = 0; i + 1 < c.vertices.size(); ++i) {
                        const auto seg = detail::level_segment(field, level, c.vertices[i], c.vertices[i + 1]);
                        inner += seg.value;
                        inner_err += seg.error;
                    }
                }
            }
        } else if (locus.shape == SingularLocus::Shape::Points) {
            const std::size_t m = opt.circle_nodes;
            for (const auto& p : locus.points()) {
                // Clockwise circle: the kept exterior lies on the left.
                auto circle = [&](std::size_t nodes) {
                    double acc = 0.0;
                    for (std::size_t j = 0; j < nodes; ++j) {
                        const double th = -two_pi * static_cast<double>(j) / static_cast<double>(nodes);
                        const double c = std::cos(th);
                        const double s = std::sin(th);
                        const OneForm w = spin_connection_unchecked(field.jet(p.tau + delta * c, p.sigma + delta * s));
                        acc += w.tau * (delta * s) + w.sigma * (-delta * c);
                    }
                    return acc * two_pi / static_cast<double>(nodes);
                };
                const double fine = circle(m);
                inner += fine;
                inner_err += std::abs(fine - circle(m / 2));
            }
        }

        const double v = inv * (edge + inner);
        values.push_back(v);
        out.extrapolation_trace.emplace_back(delta, v);
        quad_error = std::abs(inv) * (edge_err + inner_err);
        edge_residual = inv * edge;
        if (!excise) break;
    }
    out.partials.emplace_back("edge", edge_residual);
    if (!excise) {
        out.value = values.front();
        out.quadrature_error = quad_error;
        out.error_estimate = quad_error;
        out.converged = ok;
        out.notes.emplace_back("no singular locus; domain edges only");
        return out;
    }
    const auto fin = detail::finish(schedule, values, quad_error);
    out.value = fin.value;
    out.error_estimate = fin.error;
    out.quadrature_error = quad_error;
    out.converged = ok && fin.converged;
    if (!fin.converged) out.notes.emplace_back("excision sequence is not converging");
    return out;
}

inline QuadratureResult integrate_euler_boundary(const ConformalFactorField& field,
                                                 std::span<const double> schedule = default_schedule(),
                                                 const IntegrationOptions& opt = {}) {
    const auto locus = locate_singular_locus(field);
    return integrate_euler_boundary(field, locus, &field.configuration(), Domain{}, schedule, opt);
}

// ---------------------------------------------------------------------------
// Patch method

/// The two-mode structure covered by null patches: one right mode and one
/// left mode with nonzero amplitudes.
struct PatchPair {
    ModeSpec right;
    ModeSpec left;

    NullPatch patch(PatchKind kind) const {
        return {kind, right.harmonic, left.harmonic, right.phase, left.phase, right.direction, left.direction};
    }
    PatchAmplitudes amplitudes() const { return {right.amplitude, left.amplitude}; }
};

inline PatchPair patch_pair(const StringConfiguration& cfg) {
    std::vector<ModeSpec> active;
    for (const auto& m : cfg.modes)
        if (m.amplitude > 0.0) active.push_back(m);
    if (active.size() != 2 || active[0].chirality == active[1].chirality)
        throw UnsupportedShapeError("patch method needs exactly one right and one left mode");
    return active[0].chirality == Chirality::Right ? PatchPair{active[0], active[1]}
                                                   : PatchPair{active[1], active[0]};
}

/// Integral of the patch density over [-1, 1]^2 minus the exclusion around
/// its singular set: the strip of half-width delta about A x = s B y
/// (parallel) or the disc of radius delta about the origin (perpendicular).
inline std::pair<double, double> patch_integral(const NullPatch& patch, const PatchAmplitudes& amp, double delta,
                                                const IntegrationOptions& opt = {}) {
    const double a = std::sqrt(static_cast<double>(patch.k)) * amp.r;
    const double b = std::sqrt(static_cast<double>(patch.l)) * amp.r_tilde;
    const auto [sx, sy] = patch_signs(patch.kind);
    const double orient = sx * sy;
    const double norm = std::hypot(a, b);

    auto kept = [&](double x) {
        std::vector<detail::Interval> cut;
        if (patch.parallel()) {
            const double center = orient * a * x / b;
            const double half = delta * norm / b;
            cut.emplace_back(center - half, center + half);
        } else if (std::abs(x) < delta) {
            const double half = std::sqrt(delta * delta - x * x);
            cut.emplace_back(-half, half);
        }
        return detail::complement(std::move(cut), -1.0, 1.0);
    };

    std::vector<double> bps{0.0};
    if (patch.parallel()) {
        for (double e : {-1.0, 1.0})
            for (double d : {-delta, delta}) bps.push_back(orient * (e * b + d * norm) / a);
    } else {
        bps.push_back(-delta);
        bps.push_back(delta);
    }

    double inner_error = 0.0;
    bool ok = true;
    auto inner = [&](double x) {
        double total = 0.0;
        for (const auto& [lo, hi] : kept(x)) {
            auto f = [&](double y) { return euler_density_null(patch, amp, x, y); };
            const auto r = quad::integrate_adaptive(f, lo, hi, opt.inner_tol, 1e-12, opt.max_intervals);
            if (!r.converged) ok = false;
            inner_error = std::max(inner_error, r.error);
            total += r.value;
        }
        return total;
    };
    const auto outer = quad::integrate_smoothed(inner, -1.0, 1.0, opt.abs_tol, 1e-12, opt.max_intervals, bps);
    if (!ok || !outer.converged) throw NonConvergenceError("patch quadrature did not converge");
    return {outer.value, outer.error + 2.0 * inner_error};
}

/// Sum over the four patch kinds, each weighted by its multiplicity 2kl, of
/// the excluded-region patch integrals, extrapolated to zero width. Partials
/// report the finite part of each kind (pole in the width removed) times its
/// multiplicity, and the I+IV and II+III combinations.
inline QuadratureResult integrate_patches(const StringConfiguration& cfg,
                                          std::span<const double> schedule = default_schedule(),
                                          const IntegrationOptions& opt = {}) {
    detail::check_schedule(schedule);
    const PatchPair pair = patch_pair(cfg);
    QuadratureResult out;
    out.method = Method::Patch;
    out.singular_report.shape = pair.right.direction == pair.left.direction ? SingularLocus::Shape::Curves
                                                                            : SingularLocus::Shape::Points;

    std::array<std::vector<double>, 4> per_kind;
    std::vector<double> totals;
    double quad_error = 0.0;
    for (double delta : schedule) {
        double total = 0.0;
        double err = 0.0;
        for (std::size_t i = 0; i < 4; ++i) {
            const NullPatch patch = pair.patch(all_patch_kinds[i]);
            const auto [v, e] = patch_integral(patch, pair.amplitudes(), delta, opt);
            const double mult = static_cast<double>(patch.multiplicity());
            per_kind[i].push_back(v);
            total += mult * v;
            err += mult * e;
        }
        totals.push_back(total);
        out.extrapolation_trace.emplace_back(delta, total);
        quad_error = err;
    }
    const double mult = static_cast<double>(pair.patch(PatchKind::I).multiplicity());
    std::array<double, 4> finite{};
    for (std::size_t i = 0; i < 4; ++i) {
        finite[i] = mult * quad::finite_part_with_pole(schedule, per_kind[i]).first;
        out.partials.emplace_back(to_string(all_patch_kinds[i]), finite[i]);
    }
    out.partials.emplace_back("I+IV", finite[0] + finite[3]);
    out.partials.emplace_back("II+III", finite[1] + finite[2]);
    out.partials.emplace_back("regions per kind", mult);

    const auto fin = detail::finish(schedule, totals, quad_error);
    out.value = fin.value;
    out.error_estimate = fin.error;
    out.quadrature_error = quad_error;
    out.converged = fin.converged;
    if (!fin.converged) out.notes.emplace_back("extrapolation residuals are not decreasing");
    return out;
}

struct CharacteristicNumber {
    long n = 0;
    double deviation = 0.0;
};

/// Nearest integer to the integral, accepted when within `tolerance`.
inline CharacteristicNumber characteristic_number(const QuadratureResult& result, double tolerance = 0.05) {
    if (!result.converged) throw NonConvergenceError(std::string(to_string(result.method)) + " integral did not converge");
    const long n = std::lround(result.value);
    const double deviation = std::abs(result.value - static_cast<double>(n));
    if (deviation > tolerance)
        throw NotNearIntegralError(result.value, n, deviation, tolerance, result.extrapolation_trace);
    return {n, deviation};
}

} // namespace wse
