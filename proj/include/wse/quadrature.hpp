#pragma once

// One-dimensional quadrature building blocks: Gauss-Legendre rules, globally
// adaptive Gauss-Kronrod (7/15), polynomial extrapolation to zero width, and
// scalar root polishing.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <queue>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <boost/math/tools/roots.hpp>

namespace wse::quad {

struct Rule {
    std::vector<double> nodes;   // on [-1, 1]
    std::vector<double> weights;
};

namespace detail {

// P_n(x) and P_n'(x) by the three-term recurrence.
inline std::pair<double, double> legendre(std::size_t n, double x) {
    double p0 = 1.0;
    double p1 = x;
    for (std::size_t k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = pk;
    }
    const double dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
    return {p1, dp};
}

} // namespace detail

/// n-point Gauss-Legendre rule, Newton iteration on P_n from Chebyshev guesses.
inline Rule gauss_legendre(std::size_t n) {
    if (n == 0) throw std::invalid_argument("gauss_legendre: n must be positive");
    Rule rule;
    rule.nodes.assign(n, 0.0);
    rule.weights.assign(n, 0.0);
    if (n == 1) {
        rule.weights[0] = 2.0;
        return rule;
    }
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            const auto [p, dp] = detail::legendre(n, x);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double dp = detail::legendre(n, x).second;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

/// Composite Gauss-Legendre over [a, b] with `panels` equal panels.
template <class F>
double composite_gauss(F&& f, double a, double b, std::size_t panels, const Rule& rule) {
    const double width = (b - a) / static_cast<double>(panels);
    double total = 0.0;
    for (std::size_t p = 0; p < panels; ++p) {
        const double lo = a + width * static_cast<double>(p);
        const double mid = lo + 0.5 * width;
        double acc = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i)
            acc += rule.weights[i] * f(mid + 0.5 * width * rule.nodes[i]);
        total += 0.5 * width * acc;
    }
    return total;
}

namespace detail {

// QUADPACK G7/K15 abscissae and weights.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Segment& other) const { return error < other.error; }
};

// Kronrod value with the QUADPACK error estimate
// resasc * min(1, (200 |K - G| / resasc)^1.5).
template <class F>
Segment gk15(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    std::array<double, 15> fv{};
    fv[7] = f(center);
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        fv[j] = f(center - dx);
        fv[14 - j] = f(center + dx);
    }
    double resk = fv[7] * kWgk[7];
    double resg = fv[7] * kWg[3];
    double resabs = std::abs(resk);
    for (int j = 0; j < 7; ++j) {
        const double pair = fv[j] + fv[14 - j];
        resk += kWgk[j] * pair;
        resabs += kWgk[j] * (std::abs(fv[j]) + std::abs(fv[14 - j]));
        if (j % 2 == 1) resg += kWg[j / 2] * pair;
    }
    const double mean = 0.5 * resk;
    double resasc = kWgk[7] * std::abs(fv[7] - mean);
    for (int j = 0; j < 7; ++j) resasc += kWgk[j] * (std::abs(fv[j] - mean) + std::abs(fv[14 - j] - mean));
    resasc *= std::abs(half);
    resabs *= std::abs(half);
    double err = std::abs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(err, 50.0 * eps * resabs);
    return {a, b, resk * half, err};
}

} // namespace detail

struct AdaptiveResult {
    double value = 0.0;
    double error = 0.0;
    std::size_t evaluations = 0;
    std::size_t intervals = 0;
    bool converged = true;
};

/// Globally adaptive G7/K15 on [a, b]: the segment with the largest error
/// estimate is bisected until the summed error meets max(abs_tol, rel_tol*|I|).
/// Optional interior breakpoints seed the initial partition.
template <class F>
AdaptiveResult integrate_adaptive(F&& f, double a, double b, double abs_tol, double rel_tol = 0.0,
                                  std::size_t max_intervals = 4000,
                                  std::span<const double> breakpoints = {}) {
    AdaptiveResult out;
    if (!(b > a)) return out;

    std::vector<double> cuts{a};
    for (double p : breakpoints)
        if (p > a && p < b) cuts.push_back(p);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::priority_queue<detail::Segment> heap;
    double value = 0.0;
    double error = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        auto seg = detail::gk15(f, cuts[i], cuts[i + 1]);
        out.evaluations += 15;
        value += seg.value;
        error += seg.error;
        heap.push(seg);
    }

    while (error > std::max(abs_tol, rel_tol * std::abs(value))) {
        if (heap.size() >= max_intervals) {
            out.converged = false;
            break;
        }
        const auto worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            out.converged = false;
            break;
        }
        heap.pop();
        auto left = detail::gk15(f, worst.a, mid);
        auto right = detail::gk15(f, mid, worst.b);
        out.evaluations += 30;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum to shed the drift of incremental updates.
    out.value = 0.0;
    out.error = 0.0;
    out.intervals = heap.size();
    std::vector<detail::Segment> segments;
    segments.reserve(heap.size());
    while (!heap.empty()) {
        segments.push_back(heap.top());
        heap.pop();
    }
    std::sort(segments.begin(), segments.end(),
              [](const auto& x, const auto& y) { return x.a < y.a; });
    for (const auto& s : segments) {
        out.value += s.value;
        out.error += s.error;
    }
    return out;
}

/// Adaptive quadrature after the substitution x = c_i + (c_{i+1} - c_i) t^2 (3 - 2t)
/// on each piece between sorted breakpoints; square-root behaviour at the
/// breakpoints becomes analytic in t.
template <class F>
AdaptiveResult integrate_smoothed(F&& f, double a, double b, double abs_tol, double rel_tol,
                                  std::size_t max_intervals, std::span<const double> breakpoints) {
    std::vector<double> cuts{a};
    for (double p : breakpoints)
        if (p > a && p < b) cuts.push_back(p);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    const std::size_t pieces = cuts.size() - 1;
    auto mapped = [&](double t) {
        const std::size_t i = std::min(static_cast<std::size_t>(t), pieces - 1);
        const double u = t - static_cast<double>(i);
        const double len = cuts[i + 1] - cuts[i];
        return f(cuts[i] + len * u * u * (3.0 - 2.0 * u)) * len * 6.0 * u * (1.0 - u);
    };
    std::vector<double> unit;
    for (std::size_t i = 1; i < pieces; ++i) unit.push_back(static_cast<double>(i));
    return integrate_adaptive(mapped, 0.0, static_cast<double>(pieces), abs_tol, rel_tol,
                              std::max(max_intervals, 2 * pieces), unit);
}

/// Polynomial extrapolation of (width, value) samples to width -> 0 (Neville).
/// `diagonal` receives the successive extrapolants using 1, 2, ... samples
/// taken in the given order.
struct Extrapolation {
    double value = 0.0;
    std::vector<double> diagonal;
};

inline Extrapolation extrapolate_to_zero(std::span<const double> widths, std::span<const double> values) {
    if (widths.size() != values.size() || widths.empty())
        throw std::invalid_argument("extrapolate_to_zero: mismatched or empty samples");
    const std::size_t n = widths.size();
    std::vector<std::vector<double>> table(n, std::vector<double>(n, 0.0));
    Extrapolation out;
    for (std::size_t i = 0; i < n; ++i) {
        table[i][0] = values[i];
        for (std::size_t j = 1; j <= i; ++j) {
            const double hi = widths[i - j];
            const double lo = widths[i];
            table[i][j] = (hi * table[i][j - 1] - lo * table[i - 1][j - 1]) / (hi - lo);
        }
        out.diagonal.push_back(table[i][i]);
    }
    out.value = table[n - 1][n - 1];
    return out;
}

/// Finite part of samples modeled as c_{-1}/w + c_0 + c_1 w + ... (as many
/// terms as samples). Returns c_0 and c_{-1}.
inline std::pair<double, double> finite_part_with_pole(std::span<const double> widths,
                                                       std::span<const double> values) {
    // w*V(w) is a polynomial in w whose constant term is c_{-1} and whose
    // linear coefficient is c_0.
    const std::size_t n = widths.size();
    if (n < 2 || values.size() != n) throw std::invalid_argument("finite_part_with_pole: need >= 2 samples");
    // Solve the Vandermonde system for w*V(w) = sum_j a_j w^j, j = 0..n-1.
    std::vector<std::vector<double>> m(n, std::vector<double>(n + 1));
    for (std::size_t i = 0; i < n; ++i) {
        double p = 1.0;
        for (std::size_t j = 0; j < n; ++j) {
            m[i][j] = p;
            p *= widths[i];
        }
        m[i][n] = widths[i] * values[i];
    }
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
        std::swap(m[c], m[piv]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c) continue;
            const double factor = m[r][c] / m[c][c];
            for (std::size_t k = c; k <= n; ++k) m[r][k] -= factor * m[c][k];
        }
    }
    return {m[1][n] / m[1][1], m[0][n] / m[0][0]};
}

/// Root of f bracketed by [a, b] (f(a), f(b) of opposite sign), TOMS 748.
template <class F>
double polish_root(F&& f, double a, double b, double fa, double fb, unsigned bits = 52) {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    boost::uintmax_t iterations = 200;
    auto tol = boost::math::tools::eps_tolerance<double>(bits);
    const auto [lo, hi] = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, iterations);
    return 0.5 * (lo + hi);
}

} // namespace wse::quad
