#pragma once

// Zero set of g_ss on the periodic domain [0, 2pi]^2 and closed-contour
// tracing on the torus.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "config.hpp"
#include "geometry.hpp"
#include "quadrature.hpp"

namespace wse {

struct Point2 {
    double tau = 0;
    double sigma = 0;
};

/// Value and gradient of a level-set function.
struct LevelValue {
    double value = 0;
    double t = 0;
    double s = 0;
};

namespace detail {

inline double wrap_delta(double d) { return d - two_pi * std::round(d / two_pi); }

inline double torus_distance(const Point2& a, const Point2& b) {
    return std::hypot(wrap_delta(a.tau - b.tau), wrap_delta(a.sigma - b.sigma));
}

inline double wrap_angle(double x) {
    x = std::fmod(x, two_pi);
    if (x < 0) x += two_pi;
    return x < two_pi ? x : 0.0;
}

// Newton projection onto G = 0 along the gradient.
template <class G>
std::optional<Point2> project_to_level(const G& level, Point2 p, double scale) {
    for (int it = 0; it < 50; ++it) {
        const LevelValue v = level(p.tau, p.sigma);
        const double n2 = v.t * v.t + v.s * v.s;
        if (!(n2 > 0.0)) return std::nullopt;
        const double step = v.value / n2;
        p.tau -= step * v.t;
        p.sigma -= step * v.s;
        if (std::abs(step) * std::sqrt(n2) <= 1e-15 * scale || std::abs(step) < 1e-15) return p;
    }
    const LevelValue v = level(p.tau, p.sigma);
    if (std::abs(v.value) <= 1e-10 * scale) return p;
    return std::nullopt;
}

inline double segment_distance(const Point2& p, const Point2& a, const Point2& b, double* param = nullptr) {
    const double dt = b.tau - a.tau;
    const double ds = b.sigma - a.sigma;
    const double len2 = dt * dt + ds * ds;
    double t = len2 > 0 ? ((p.tau - a.tau) * dt + (p.sigma - a.sigma) * ds) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    if (param) *param = t;
    return std::hypot(a.tau + t * dt - p.tau, a.sigma + t * ds - p.sigma);
}

} // namespace detail

/// Closed contour on the torus as an unwrapped vertex chain; the last vertex
/// equals the first shifted by a lattice vector (2pi a, 2pi b).
struct Contour {
    std::vector<Point2> vertices;
    bool closed = false;

    double length() const {
        double L = 0.0;
        for (std::size_t i = 0; i + 1 < vertices.size(); ++i)
            L += std::hypot(vertices[i + 1].tau - vertices[i].tau, vertices[i + 1].sigma - vertices[i].sigma);
        return L;
    }
};

/// Traces the level set G = 0 through `seed`, oriented so that G > 0 lies on
/// the left (counterclockwise boundary of {G > 0} in (tau, sigma)).
/// `scale` is the magnitude of G used for convergence tests.
template <class G>
Contour trace_contour(const G& level, Point2 seed, double step, double scale, double max_length = 400.0) {
    Contour c;
    auto start = detail::project_to_level(level, seed, scale);
    if (!start) return c;
    const Point2 p0 = *start;
    c.vertices.push_back(p0);

    auto tangent = [&](const Point2& p, double& tt, double& ts) {
        const LevelValue v = level(p.tau, p.sigma);
        const double n = std::hypot(v.t, v.s);
        if (!(n > 0.0)) return false;
        tt = v.s / n;
        ts = -v.t / n;
        return true;
    };

    double h = step;
    double travelled = 0.0;
    Point2 p = p0;
    while (travelled < max_length) {
        double t1, s1;
        if (!tangent(p, t1, s1)) return c;
        // Heun predictor, Newton corrector.
        Point2 q{p.tau + h * t1, p.sigma + h * s1};
        double t2, s2;
        if (!tangent(q, t2, s2)) return c;
        double tm = 0.5 * (t1 + t2);
        double sm = 0.5 * (s1 + s2);
        const double nm = std::hypot(tm, sm);
        q = {p.tau + h * tm / nm, p.sigma + h * sm / nm};
        auto next = detail::project_to_level(level, q, scale);
        const double turn = std::abs(t1 * s2 - s1 * t2);
        if (!next || turn > 0.15 || detail::torus_distance(*next, q) > 0.25 * h) {
            h *= 0.5;
            if (h < 1e-9) return c;
            continue;
        }
        // Closure: the new chord passes over the start point (mod lattice).
        if (travelled > 2.0 * step) {
            const Point2 shift{p0.tau + two_pi * std::round((p.tau - p0.tau) / two_pi),
                               p0.sigma + two_pi * std::round((p.sigma - p0.sigma) / two_pi)};
            double param = 0.0;
            const double d = detail::segment_distance(shift, p, *next, &param);
            if (d < 0.05 * h && param > 0.0) {
                c.vertices.push_back(shift);
                c.closed = true;
                return c;
            }
        }
        travelled += std::hypot(next->tau - p.tau, next->sigma - p.sigma);
        p = *next;
        c.vertices.push_back(p);
        if (turn < 0.03) h = std::min(step, 1.5 * h);
    }
    return c;
}

/// Zero set of g_ss on [0, 2pi]^2.
struct SingularLocus {
    enum class Shape { Empty, Degenerate, Curves, Points };
    enum class Kind { Point, Curve };

    struct Component {
        Kind kind = Kind::Point;
        std::vector<Point2> points; // one point, or an ordered closed chain
    };

    Shape shape = Shape::Empty;
    std::vector<Component> components;
    /// Curve case: g = (sum_I w_I h_I)^2 up to rounding; the combination
    /// defines the strip function.
    std::vector<double> profile_weights;
    double tolerance = 0;

    bool degenerate() const { return shape == Shape::Degenerate; }

    std::vector<Point2> points() const {
        std::vector<Point2> out;
        for (const auto& c : components)
            if (c.kind == Kind::Point) out.push_back(c.points.front());
        return out;
    }
};

inline const char* to_string(SingularLocus::Shape s) {
    switch (s) {
    case SingularLocus::Shape::Empty: return "empty";
    case SingularLocus::Shape::Degenerate: return "degenerate";
    case SingularLocus::Shape::Curves: return "curves";
    case SingularLocus::Shape::Points: return "points";
    }
    return "?";
}

namespace detail {

// Leading eigenvector of a small symmetric matrix by power iteration.
inline std::vector<double> leading_eigenvector(const std::vector<std::vector<double>>& m, double& lambda) {
    const std::size_t n = m.size();
    std::vector<double> v(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 0.1 * static_cast<double>(i);
    lambda = 0.0;
    for (int it = 0; it < 500; ++it) {
        std::vector<double> w(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) w[i] += m[i][j] * v[j];
        double norm = 0.0;
        for (double x : w) norm += x * x;
        norm = std::sqrt(norm);
        if (!(norm > 0.0)) break;
        for (auto& x : w) x /= norm;
        lambda = norm;
        v = std::move(w);
    }
    return v;
}

} // namespace detail

/// Locates the zero set of g_ss: sign changes of the sigma-profiles along the
/// lines of a grid x grid base grid, polished by a bracketing root solver,
/// then chained into closed curves (rank-1 profiles) or Gauss-Newton refined
/// into isolated points (otherwise).
inline SingularLocus locate_singular_locus(const ConformalFactorField& field, std::size_t grid = 256) {
    const auto& cfg = field.configuration();
    SingularLocus locus;
    locus.tolerance = field.singular_tolerance();

    const std::size_t n_dir = cfg.transverse_count();
    std::vector<bool> active(n_dir, false);
    for (const auto& m : cfg.modes)
        if (m.amplitude > 0.0) active[StringConfiguration::slot(m.direction)] = true;
    if (std::none_of(active.begin(), active.end(), [](bool b) { return b; })) {
        locus.shape = SingularLocus::Shape::Degenerate;
        return locus;
    }

    const double spacing = two_pi / static_cast<double>(grid);
    std::vector<std::vector<double>> gram(n_dir, std::vector<double>(n_dir, 0.0));
    std::vector<double> g_grid(grid * grid);
    double g_max = 0.0;
    for (std::size_t i = 0; i < grid; ++i) {
        for (std::size_t j = 0; j < grid; ++j) {
            const auto h = sigma_profiles(cfg, i * spacing, j * spacing);
            double g = 0.0;
            for (std::size_t a = 0; a < n_dir; ++a) {
                g += h[a].value * h[a].value;
                for (std::size_t b = 0; b < n_dir; ++b) gram[a][b] += h[a].value * h[b].value;
            }
            g_grid[i * grid + j] = g;
            g_max = std::max(g_max, g);
        }
    }
    if (!(g_max > locus.tolerance)) {
        locus.shape = SingularLocus::Shape::Degenerate;
        return locus;
    }

    double trace = 0.0;
    for (std::size_t a = 0; a < n_dir; ++a) trace += gram[a][a];
    double lambda = 0.0;
    const auto lead = detail::leading_eigenvector(gram, lambda);
    const bool rank_one = (trace - lambda) <= 1e-20 * trace;

    if (rank_one) {
        locus.shape = SingularLocus::Shape::Curves;
        locus.profile_weights = lead;
        const auto weights = lead;
        auto level = [&cfg, weights](double t, double s) {
            const Jet2 j = combined_profile(cfg, weights, t, s);
            return LevelValue{j.value, j.t, j.s};
        };
        const double scale = std::sqrt(g_max);

        // Seeds: zero crossings along grid rows and columns.
        std::vector<Point2> seeds;
        auto along = [&](bool rows) {
            for (std::size_t i = 0; i < grid; ++i) {
                const double fixed = i * spacing;
                auto f = [&](double x) {
                    return rows ? level(fixed, x).value : level(x, fixed).value;
                };
                double prev = f(0.0);
                for (std::size_t j = 1; j <= grid; ++j) {
                    const double x = j * spacing;
                    const double cur = f(x);
                    if ((prev < 0.0) != (cur < 0.0) && prev != 0.0) {
                        const double root = quad::polish_root(f, x - spacing, x, prev, cur);
                        seeds.push_back(rows ? Point2{fixed, detail::wrap_angle(root)}
                                             : Point2{detail::wrap_angle(root), fixed});
                    }
                    prev = cur;
                }
            }
        };
        along(true);
        along(false);

        std::vector<bool> used(seeds.size(), false);
        const double step = std::min(0.01, 0.5 * spacing * 4.0);
        for (std::size_t sidx = 0; sidx < seeds.size(); ++sidx) {
            if (used[sidx]) continue;
            Contour c = trace_contour(level, seeds[sidx], step, scale);
            used[sidx] = true;
            if (!c.closed) throw NonConvergenceError("singular curve tracing did not close");
            for (std::size_t q = 0; q < seeds.size(); ++q) {
                if (used[q]) continue;
                for (std::size_t v = 0; v + 1 < c.vertices.size(); ++v) {
                    const auto& a = c.vertices[v];
                    Point2 sp{a.tau + detail::wrap_delta(seeds[q].tau - a.tau),
                              a.sigma + detail::wrap_delta(seeds[q].sigma - a.sigma)};
                    if (std::abs(sp.tau - a.tau) > 0.1 || std::abs(sp.sigma - a.sigma) > 0.1) continue;
                    if (detail::segment_distance(sp, a, c.vertices[v + 1]) < 1e-3) {
                        used[q] = true;
                        break;
                    }
                }
            }
            locus.components.push_back({SingularLocus::Kind::Curve, std::move(c.vertices)});
        }
        if (locus.components.empty()) locus.shape = SingularLocus::Shape::Empty;
        return locus;
    }

    // Isolated common zeros: Gauss-Newton from local minima of g on the grid.
    locus.shape = SingularLocus::Shape::Points;
    std::vector<Point2> found;
    auto g_at = [&](std::ptrdiff_t i, std::ptrdiff_t j) {
        const auto n = static_cast<std::ptrdiff_t>(grid);
        return g_grid[static_cast<std::size_t>(((i % n + n) % n) * n + ((j % n + n) % n))];
    };
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(grid); ++i) {
        for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(grid); ++j) {
            const double g0 = g_at(i, j);
            if (g0 > 0.05 * g_max) continue;
            bool is_min = true;
            for (int di = -1; di <= 1 && is_min; ++di)
                for (int dj = -1; dj <= 1; ++dj)
                    if ((di || dj) && g_at(i + di, j + dj) < g0) {
                        is_min = false;
                        break;
                    }
            if (!is_min) continue;
            Point2 p{i * spacing, j * spacing};
            for (int it = 0; it < 60; ++it) {
                const auto h = sigma_profiles(cfg, p.tau, p.sigma);
                double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
                for (const auto& hj : h) {
                    a11 += hj.t * hj.t;
                    a12 += hj.t * hj.s;
                    a22 += hj.s * hj.s;
                    b1 += hj.t * hj.value;
                    b2 += hj.s * hj.value;
                }
                const double det = a11 * a22 - a12 * a12;
                if (!(std::abs(det) > 0.0)) break;
                const double dt = (a22 * b1 - a12 * b2) / det;
                const double ds = (a11 * b2 - a12 * b1) / det;
                p.tau -= dt;
                p.sigma -= ds;
                if (std::hypot(dt, ds) < 1e-15) break;
            }
            p = {detail::wrap_angle(p.tau), detail::wrap_angle(p.sigma)};
            if (field(p.tau, p.sigma) > locus.tolerance) continue;
            const bool dup = std::any_of(found.begin(), found.end(),
                                         [&](const Point2& q) { return detail::torus_distance(p, q) < 1e-7; });
            if (!dup) found.push_back(p);
        }
    }
    std::sort(found.begin(), found.end(), [](const Point2& a, const Point2& b) {
        return a.tau < b.tau || (a.tau == b.tau && a.sigma < b.sigma);
    });
    for (const auto& p : found) locus.components.push_back({SingularLocus::Kind::Point, {p}});
    if (found.empty()) locus.shape = SingularLocus::Shape::Empty;
    return locus;
}

} // namespace wse
