#pragma once

// Worldsheet Hamiltonian and its discretization by the two-parallel spectrum.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "config.hpp"
#include "errors.hpp"
#include "quadrature.hpp"
#include "spectra.hpp"

namespace wse {

/// H0 = sum_K (alpha_0^K)^2.
inline double zero_mode_energy(const StringConfiguration& cfg) {
    double h0 = 0.0;
    for (const auto& [d, a0] : cfg.zero_modes) h0 += a0 * a0;
    return h0;
}

/// H = H0 + sum over modes of omega r^2.
inline double hamiltonian(const StringConfiguration& cfg) {
    double h = zero_mode_energy(cfg);
    for (const auto& m : cfg.modes) h += m.omega() * m.amplitude * m.amplitude;
    return h;
}

/// (1 / 4 pi alpha') integral over sigma of (d_tau X)^2 + (d_sigma X)^2 on the
/// slice tau, by composite Gauss-Legendre.
inline double hamiltonian_density_quadrature(const StringConfiguration& cfg, double tau = 0.0) {
    static const auto rule = quad::gauss_legendre(8);
    const auto panels = static_cast<std::size_t>(8 * cfg.max_harmonic());
    const double integral = quad::composite_gauss(
        [&](double sigma) {
            double acc = 0.0;
            for (const auto& j : embedding_jet(cfg, tau, sigma).direction) acc += j.t * j.t + j.s * j.s;
            return acc;
        },
        0.0, two_pi, panels, rule);
    return integral / (4.0 * std::numbers::pi * cfg.alpha_prime);
}

namespace detail {

inline double branch_ratio(double omega_k, double omega_l, long n, Branch branch) {
    if (n == 0) throw DegenerateSpectrumError("n = 0: the discrete Hamiltonian is undefined");
    const double e = std::exp(static_cast<double>(n) / (2.0 * omega_kl(omega_k, omega_l)));
    return branch == Branch::TildeGreater ? (e + 1.0) / (e - 1.0) : (e - 1.0) / (e + 1.0);
}

} // namespace detail

/// H_n = H0 + w_k r^2 [1 + q^2] with q = (E+1)/(E-1) (greater r~) or
/// (E-1)/(E+1) (smaller r~), E = exp(n / 2 omega_kl).
inline double hamiltonian_discrete(double omega_k, double omega_l, double r, double h0, long n, Branch branch) {
    if (!(r > 0.0)) throw std::invalid_argument("hamiltonian_discrete: r must be positive");
    const double q = detail::branch_ratio(omega_k, omega_l, n, branch);
    return h0 + omega_k * r * r * (1.0 + q * q);
}

/// Mixed form with both amplitudes present:
/// H0 - 2 sqrt(w_k w_l) r r~ (1 + e^{n/omega_kl}) / (1 - e^{n/omega_kl}).
inline double hamiltonian_mixed(double omega_k, double omega_l, double r, double r_tilde, double h0, long n) {
    if (n == 0) throw DegenerateSpectrumError("n = 0: the discrete Hamiltonian is undefined");
    const double e = std::exp(static_cast<double>(n) / omega_kl(omega_k, omega_l));
    return h0 - 2.0 * std::sqrt(omega_k * omega_l) * r * r_tilde * (1.0 + e) / (1.0 - e);
}

/// Limit of H_n for |n| -> infinity on either branch.
inline double hamiltonian_asymptote(double omega_k, double r, double h0) { return h0 + 2.0 * omega_k * r * r; }

struct EnergyEntry {
    long n;
    double h;
};

struct EnergySpectrum {
    double h0 = 0.0;
    double omega_k = 1.0;
    double omega_l = 1.0;
    double r_k = 1.0;
    Branch branch = Branch::TildeGreater;
    std::vector<EnergyEntry> entries; // sorted by n, n != 0
    std::vector<long> undefined;      // requested n with no finite H_n
    double h_inf = 0.0;
};

inline EnergySpectrum energy_table(double omega_k, double omega_l, double r, double h0, std::vector<long> n_range,
                                   Branch branch) {
    EnergySpectrum out;
    out.h0 = h0;
    out.omega_k = omega_k;
    out.omega_l = omega_l;
    out.r_k = r;
    out.branch = branch;
    out.h_inf = hamiltonian_asymptote(omega_k, r, h0);
    std::sort(n_range.begin(), n_range.end());
    n_range.erase(std::unique(n_range.begin(), n_range.end()), n_range.end());
    for (long n : n_range) {
        if (n == 0) {
            out.undefined.push_back(n);
            continue;
        }
        out.entries.push_back({n, hamiltonian_discrete(omega_k, omega_l, r, h0, n, branch)});
    }
    return out;
}

/// CSV `n,H_n,branch` with `#` header lines carrying the conventions. With
/// `gnuplot_friendly`, whitespace-separated `n H_n` blocks, one per branch,
/// separated by two blank lines.
inline void write_energy_csv(std::ostream& os, const std::vector<EnergySpectrum>& tables, bool gnuplot_friendly = false) {
    if (tables.empty()) return;
    const auto& t0 = tables.front();
    fmt::print(os, "# H0 = {:.17g}\n", t0.h0);
    fmt::print(os, "# H_inf = {:.17g}\n", t0.h_inf);
    fmt::print(os, "# omega_k = {:.17g}\n# omega_l = {:.17g}\n# r_k = {:.17g}\n", t0.omega_k, t0.omega_l, t0.r_k);
    fmt::print(os, "# convention: H0 = sum (alpha_0)^2 without alpha' factors; omega_kl = (4/pi) omega_k omega_l\n");
    if (!gnuplot_friendly) {
        fmt::print(os, "n,H_n,branch\n");
        for (const auto& t : tables) {
            std::size_t e = 0;
            for (long u : t.undefined) {
                for (; e < t.entries.size() && t.entries[e].n < u; ++e)
                    fmt::print(os, "{},{:.17g},{}\n", t.entries[e].n, t.entries[e].h, to_string(t.branch));
                fmt::print(os, "{},undefined (degenerate spectrum),{}\n", u, to_string(t.branch));
            }
            for (; e < t.entries.size(); ++e)
                fmt::print(os, "{},{:.17g},{}\n", t.entries[e].n, t.entries[e].h, to_string(t.branch));
        }
        return;
    }
    bool first = true;
    for (const auto& t : tables) {
        if (!first) fmt::print(os, "\n\n");
        first = false;
        fmt::print(os, "# branch {}\n# n H_n\n", to_string(t.branch));
        for (long u : t.undefined) fmt::print(os, "# n = {} undefined (degenerate spectrum)\n", u);
        for (const auto& e : t.entries) fmt::print(os, "{} {:.17g}\n", e.n, e.h);
    }
}

} // namespace wse
