#pragma once

// Command-line front end. run_cli parses arguments, dispatches to a
// subcommand, and returns the process exit code:
//   0 success, 1 numeric non-convergence or FAIL, 2 input error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "config.hpp"
#include "energy.hpp"
#include "errors.hpp"
#include "geometry.hpp"
#include "integrate.hpp"
#include "locus.hpp"
#include "spectra.hpp"

namespace wse {

enum ExitCode : int { ExitOk = 0, ExitNumeric = 1, ExitInput = 2 };

/// FNV-1a over the canonical configuration document.
inline std::string config_digest(const StringConfiguration& cfg) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : to_document(cfg)) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return fmt::format("{:016x}", h);
}

/// Accumulated output of one command.
struct RunReport {
    std::string command;
    std::string digest;
    std::vector<std::string> lines;
    std::vector<std::string> warnings;

    template <class... Args>
    void add(fmt::format_string<Args...> f, Args&&... args) {
        lines.push_back(fmt::format(f, std::forward<Args>(args)...));
    }
    void warn(std::string w) { warnings.push_back(std::move(w)); }

    void render(std::ostream& os) const {
        fmt::print(os, "command: {}\n", command);
        if (!digest.empty()) fmt::print(os, "config digest: {}\n", digest);
        for (const auto& l : lines) fmt::print(os, "{}\n", l);
        for (const auto& w : warnings) fmt::print(os, "warning: {}\n", w);
    }
};

struct CliOptions {
    std::string config;
    std::string out;
    double rel_tol = 0.01;
    std::uint64_t seed = 1;
};

namespace detail {

inline void add_quadrature(RunReport& rep, const QuadratureResult& r) {
    const char* m = to_string(r.method);
    rep.add("[{}] value = {:.12g} +/- {:.3g}", m, r.value, r.error_estimate);
    if (r.method == Method::Patch)
        rep.add("[{}] singular locus: {}", m, to_string(r.singular_report.shape));
    else
        rep.add("[{}] singular locus: {} ({} curves, {} points)", m, to_string(r.singular_report.shape),
                r.singular_report.curves, r.singular_report.points);
    for (const auto& [w, v] : r.extrapolation_trace) rep.add("[{}] trace width {:.6g}: {:.12g}", m, w, v);
    for (const auto& [k, v] : r.partials) rep.add("[{}] partial {}: {:.12g}", m, k, v);
    for (const auto& n : r.notes) rep.add("[{}] note: {}", m, n);
    if (r.degenerate) rep.warn(fmt::format("{}: degenerate conformal factor, value set to 0", m));
    if (!r.converged) rep.warn(fmt::format("{}: not converged", m));
}

inline void add_level_match(RunReport& rep, const StringConfiguration& cfg) {
    const double lm = level_match_residual(cfg);
    rep.add("level-match residual = {:.6g} (tolerance {:.1g})", lm, level_match_tolerance);
    if (lm > level_match_tolerance)
        rep.warn(fmt::format("level matching violated (residual {:.6g}): X^- is not periodic", lm));
}

class Output {
public:
    explicit Output(const std::string& path, std::ostream& fallback) : os_(&fallback) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw ConfigError("out", "cannot open '" + path + "' for writing");
            os_ = &file_;
        }
    }
    std::ostream& stream() { return *os_; }

private:
    std::ofstream file_;
    std::ostream* os_;
};

inline StringConfiguration require_config(const CliOptions& o) {
    if (o.config.empty()) throw ConfigError("config", "--config is required for this command");
    return load_configuration(o.config);
}

// Closed-form value for a configuration, when a family applies.
struct ClosedForm {
    std::optional<double> value;
    std::string family;
    bool conjectured = false;
};

inline ClosedForm closed_form(const StringConfiguration& cfg) {
    std::vector<ModeSpec> active;
    for (const auto& m : cfg.modes)
        if (m.amplitude > 0.0) active.push_back(m);
    ClosedForm c;
    if (active.size() == 1) {
        c.value = 0.0;
        c.family = "single mode (no interaction)";
    } else if (active.size() == 2 && active[0].chirality != active[1].chirality) {
        const auto& r = active[0].chirality == Chirality::Right ? active[0] : active[1];
        const auto& l = active[0].chirality == Chirality::Right ? active[1] : active[0];
        if (r.direction == l.direction) {
            c.value = spectrum_two_parallel(r.omega(), l.omega(), r.amplitude, l.amplitude);
            c.family = "two-parallel";
        } else {
            c.value = 0.0;
            c.family = "perpendicular";
        }
    } else if (!active.empty()) {
        c.value = spectrum_general(cfg);
        c.family = "general";
        c.conjectured = true;
    }
    return c;
}

inline Branch parse_branch(const std::string& s) {
    if (s == "greater") return Branch::TildeGreater;
    if (s == "smaller") return Branch::TildeSmaller;
    throw ConfigError("branch", "expected 'greater' or 'smaller'");
}

} // namespace detail

inline int cmd_validate(const CliOptions& o, std::ostream& os) {
    RunReport rep;
    rep.command = "validate " + o.config;
    const auto cfg = detail::require_config(o);
    rep.digest = config_digest(cfg);
    rep.add("dimension = {}, alpha' = {:.6g}, p+ = {:.6g}, modes = {}", cfg.dimension, cfg.alpha_prime, cfg.p_plus,
            cfg.modes.size());
    const auto cr = constraint_report(cfg, 64, o.seed);
    rep.add("wave residual (max relative over {} points, seed {}) = {:.3g}", cr.samples.size(), o.seed,
            cr.wave_residual_max);
    if (cr.wave_residual_max > 1e-12) rep.warn("wave residual above 1e-12");
    detail::add_level_match(rep, cfg);
    detail::Output out(o.out, os);
    rep.render(out.stream());
    return ExitOk;
}

inline int cmd_embed(const CliOptions& o, std::size_t grid, std::ostream& os) {
    const auto cfg = detail::require_config(o);
    const auto field = conformal_factor(cfg);
    detail::Output out(o.out, os);
    auto& s = out.stream();
    fmt::print(s, "# config digest {}\n# alpha' = {:.17g}\n# orientation: dtau^dsigma, tau first\n",
               config_digest(cfg), cfg.alpha_prime);
    fmt::print(s, "tau,sigma");
    for (int d = 2; d < cfg.dimension; ++d) fmt::print(s, ",X{}", d);
    fmt::print(s, ",g_ss,euler_density\n");
    for (std::size_t i = 0; i < grid; ++i) {
        for (std::size_t j = 0; j < grid; ++j) {
            const double tau = two_pi * static_cast<double>(i) / static_cast<double>(grid);
            const double sigma = two_pi * static_cast<double>(j) / static_cast<double>(grid);
            fmt::print(s, "{:.17g},{:.17g}", tau, sigma);
            for (double x : embedding(cfg, tau, sigma)) fmt::print(s, ",{:.17g}", x);
            const double g = field(tau, sigma);
            if (g > field.singular_tolerance())
                fmt::print(s, ",{:.17g},{:.17g}\n", g, euler_density(field, tau, sigma));
            else
                fmt::print(s, ",{:.17g},singular\n", g);
        }
    }
    return ExitOk;
}

inline int cmd_euler(const CliOptions& o, const std::string& method, double tolerance, std::ostream& os) {
    RunReport rep;
    rep.command = fmt::format("euler {} --method {} --tolerance {}", o.config, method, tolerance);
    const auto cfg = detail::require_config(o);
    rep.digest = config_digest(cfg);
    detail::add_level_match(rep, cfg);
    const auto field = conformal_factor(cfg);
    const auto locus = locate_singular_locus(field);

    std::vector<QuadratureResult> results;
    if (method == "pv" || method == "all") results.push_back(integrate_euler_pv(field, locus, &cfg));
    if (method == "boundary" || method == "all") results.push_back(integrate_euler_boundary(field, locus, &cfg));
    if (method == "patch" || method == "all") {
        try {
            results.push_back(integrate_patches(cfg));
        } catch (const UnsupportedShapeError& e) {
            if (method == "patch") throw;
            rep.add("[patch] skipped: {}", e.what());
        }
    }
    int code = ExitOk;
    for (const auto& r : results) {
        detail::add_quadrature(rep, r);
        try {
            const auto cn = characteristic_number(r, tolerance);
            rep.add("[{}] characteristic number n = {} (deviation {:.3g})", to_string(r.method), cn.n, cn.deviation);
        } catch (const NotNearIntegralError& e) {
            rep.add("[{}] not near-integral: nearest {} deviation {:.6g} > tolerance {:.3g}", to_string(r.method),
                    e.nearest(), e.deviation(), tolerance);
            code = ExitNumeric;
        } catch (const NonConvergenceError& e) {
            rep.add("[{}] no characteristic number: {}", to_string(r.method), e.what());
            code = ExitNumeric;
        }
    }
    detail::Output out(o.out, os);
    rep.render(out.stream());
    return code;
}

struct SpectrumArgs {
    std::string family = "two-parallel";
    double omega_k = 1.0;
    double omega_l = 1.0;
    double r = 1.0;
    double r_tilde = 2.0;
    double r2 = 0.0;
    double r_tilde2 = 0.0;
    std::optional<long> invert;
    std::string branch = "greater";
    bool surface = false;
    std::vector<long> n_set{1, 2, 3, 4, 5};
    std::vector<double> r_grid{0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0};
};

inline int cmd_spectrum(const CliOptions& o, const SpectrumArgs& a, std::ostream& os) {
    if (a.surface) {
        const auto surf = spectrum_surface(a.omega_k, a.omega_l, a.n_set, a.r_grid);
        detail::Output out(o.out, os);
        auto& s = out.stream();
        fmt::print(s, "# omega_k = {:.17g}\n# omega_l = {:.17g}\n", a.omega_k, a.omega_l);
        for (const auto& n : surf.notes) fmt::print(s, "# {}\n", n);
        fmt::print(s, "n,r_k,r_tilde_l,branch\n");
        for (const auto& row : surf.rows)
            fmt::print(s, "{},{:.17g},{:.17g},{}\n", row.n, row.r_k, row.r_tilde_l, to_string(row.branch));
        return ExitOk;
    }
    RunReport rep;
    if (a.invert) {
        rep.command = fmt::format("spectrum --invert {} --branch {}", *a.invert, a.branch);
        const double rt = invert_two_parallel(a.omega_k, a.omega_l, a.r, *a.invert, detail::parse_branch(a.branch));
        rep.add("two-parallel inversion: omega_k = {:.6g}, omega_l = {:.6g}, r_k = {:.17g}", a.omega_k, a.omega_l, a.r);
        rep.add("r_tilde_l = {:.17g} (branch {})", rt, a.branch);
        rep.add("check: lhs = {:.17g}", spectrum_two_parallel(a.omega_k, a.omega_l, a.r, rt));
    } else {
        rep.command = "spectrum --family " + a.family;
        SpectrumRelation rel;
        if (a.family == "two-parallel") {
            rel.family = Family::TwoParallel;
            rel.lhs_value = spectrum_two_parallel(a.omega_k, a.omega_l, a.r, a.r_tilde);
        } else if (a.family == "three-modes") {
            rel.family = Family::ThreeModes;
            rel.lhs_value = spectrum_three_modes(a.omega_k, a.omega_l, a.r, a.r_tilde, a.r2);
        } else if (a.family == "four-modes") {
            rel.family = Family::FourModes;
            rel.lhs_value = spectrum_four_modes(a.omega_k, a.omega_l, a.r, a.r_tilde, a.r2, a.r_tilde2);
        } else if (a.family == "general") {
            const auto cfg = detail::require_config(o);
            rep.digest = config_digest(cfg);
            rel = spectrum_general_relation(cfg);
        } else {
            throw ConfigError("family", "unknown family '" + a.family + "'");
        }
        rep.add("family {}: lhs = {:.17g}", to_string(rel.family), rel.lhs_value);
        rep.add("nearest n = {}", std::lround(rel.lhs_value));
        for (const auto& n : rel.notes) rep.add("note: {}", n);
        if (rel.conjectured) rep.warn("conjectured formula (general spectrum)");
    }
    detail::Output out(o.out, os);
    rep.render(out.stream());
    return ExitOk;
}

struct EnergyArgs {
    double omega_k = 1.0;
    double omega_l = 1.0;
    double r = 1.0;
    double h0 = 1.0;
    long n_min = 1;
    long n_max = 20;
    std::string branch = "greater";
    bool gnuplot_friendly = false;
};

inline int cmd_energy(const CliOptions& o, const EnergyArgs& a, std::ostream& os) {
    std::vector<long> range;
    for (long n = a.n_min; n <= a.n_max; ++n) range.push_back(n);
    std::vector<Branch> branches;
    if (a.branch == "both")
        branches = {Branch::TildeGreater, Branch::TildeSmaller};
    else
        branches = {detail::parse_branch(a.branch)};
    std::vector<EnergySpectrum> tables;
    for (Branch b : branches) tables.push_back(energy_table(a.omega_k, a.omega_l, a.r, a.h0, range, b));
    detail::Output out(o.out, os);
    write_energy_csv(out.stream(), tables, a.gnuplot_friendly);
    return ExitOk;
}

inline int cmd_crosscheck(const CliOptions& o, std::ostream& os) {
    RunReport rep;
    rep.command = fmt::format("crosscheck {} --rel-tol {}", o.config, o.rel_tol);
    const auto cfg = detail::require_config(o);
    rep.digest = config_digest(cfg);
    detail::add_level_match(rep, cfg);
    const auto field = conformal_factor(cfg);
    const auto locus = locate_singular_locus(field);

    std::vector<QuadratureResult> results{integrate_euler_pv(field, locus, &cfg),
                                          integrate_euler_boundary(field, locus, &cfg)};
    try {
        results.push_back(integrate_patches(cfg));
    } catch (const UnsupportedShapeError& e) {
        rep.add("[patch] skipped: {}", e.what());
    }
    for (const auto& r : results) detail::add_quadrature(rep, r);

    detail::ClosedForm closed;
    try {
        closed = detail::closed_form(cfg);
    } catch (const DegenerateSpectrumError& e) {
        rep.add("closed form: {}", e.what());
    }
    if (!closed.value) {
        rep.add("no closed form applies; numeric-only report");
        detail::Output out(o.out, os);
        rep.render(out.stream());
        return ExitOk;
    }
    const double c = *closed.value;
    rep.add("closed form ({}{}) = {:.12g}", closed.family, closed.conjectured ? ", conjectured" : "", c);
    if (closed.conjectured) rep.warn("closed form is the conjectured general spectrum");
    int code = ExitOk;
    const double threshold = o.rel_tol * std::max(std::abs(c), 0.1);
    for (const auto& r : results) {
        const double dev = std::abs(r.value - c);
        const bool pass = r.converged && dev <= threshold;
        rep.add("[{}] numeric {:.12g} +/- {:.3g} vs closed {:.12g}: abs dev {:.6g}, rel dev {:.6g} -> {}",
                to_string(r.method), r.value, r.error_estimate, c, dev, c != 0.0 ? dev / std::abs(c) : dev,
                pass ? "PASS" : "FAIL");
        if (!pass) code = ExitNumeric;
    }
    detail::Output out(o.out, os);
    rep.render(out.stream());
    return code;
}

/// Parses argv and runs the selected subcommand; errors go to `err`.
inline int run_cli(int argc, const char* const* argv, std::ostream& os = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Euler-class spectra of closed bosonic strings"};
    app.require_subcommand(1);
    CliOptions o;
    app.add_option("--config", o.config, "configuration file (JSON)");
    app.add_option("--out", o.out, "write output to this file instead of stdout");
    app.add_option("--rel-tol", o.rel_tol, "relative tolerance for cross-checks")->check(CLI::PositiveNumber);
    app.add_option("--seed", o.seed, "seed for randomized sweeps");

    auto* validate = app.add_subcommand("validate", "parse and check a configuration");
    auto* embed = app.add_subcommand("embed", "CSV grid of the embedding, g_ss and the Euler density");
    std::size_t grid = 64;
    embed->add_option("--grid", grid, "points per axis")->check(CLI::PositiveNumber);

    auto* euler = app.add_subcommand("euler", "integrate the Euler form");
    std::string method = "all";
    double tolerance = 0.05;
    euler->add_option("--method", method)->check(CLI::IsMember({"pv", "boundary", "patch", "all"}));
    euler->add_option("--tolerance", tolerance, "characteristic-number tolerance")->check(CLI::PositiveNumber);

    auto* spectrum = app.add_subcommand("spectrum", "closed-form spectra");
    SpectrumArgs sa;
    long invert = 0;
    spectrum->add_option("--family", sa.family)
        ->check(CLI::IsMember({"two-parallel", "three-modes", "four-modes", "general"}));
    spectrum->add_option("--omega-k", sa.omega_k)->check(CLI::PositiveNumber);
    spectrum->add_option("--omega-l", sa.omega_l)->check(CLI::PositiveNumber);
    spectrum->add_option("--r", sa.r, "right amplitude in J1");
    spectrum->add_option("--r-tilde", sa.r_tilde, "left amplitude in J1");
    spectrum->add_option("--r2", sa.r2, "right amplitude in J2");
    spectrum->add_option("--r-tilde2", sa.r_tilde2, "left amplitude in J2");
    auto* inv = spectrum->add_option("--invert", invert, "solve the two-parallel relation for r~ at this n");
    spectrum->add_option("--branch", sa.branch)->check(CLI::IsMember({"greater", "smaller"}));
    spectrum->add_flag("--surface", sa.surface, "emit the amplitude surface CSV");
    spectrum->add_option("--n-set", sa.n_set)->delimiter(',');
    spectrum->add_option("--r-grid", sa.r_grid)->delimiter(',');

    auto* energy = app.add_subcommand("energy", "discrete energy table");
    EnergyArgs ea;
    energy->add_option("--omega-k", ea.omega_k)->check(CLI::PositiveNumber);
    energy->add_option("--omega-l", ea.omega_l)->check(CLI::PositiveNumber);
    energy->add_option("--r", ea.r)->check(CLI::PositiveNumber);
    energy->add_option("--h0", ea.h0);
    energy->add_option("--n-min", ea.n_min);
    energy->add_option("--n-max", ea.n_max);
    energy->add_option("--branch", ea.branch)->check(CLI::IsMember({"greater", "smaller", "both"}));
    energy->add_flag("--gnuplot-friendly", ea.gnuplot_friendly);

    auto* crosscheck = app.add_subcommand("crosscheck", "numeric integrals against closed forms");

    for (auto* sub : {validate, embed, euler, spectrum, energy, crosscheck}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        fmt::print(os, "{}", app.help());
        return ExitOk;
    } catch (const CLI::ParseError& e) {
        fmt::print(err, "error: {}\n", e.what());
        return ExitInput;
    }
    if (inv->count() > 0) sa.invert = invert;

    try {
        if (*validate) return cmd_validate(o, os);
        if (*embed) return cmd_embed(o, grid, os);
        if (*euler) return cmd_euler(o, method, tolerance, os);
        if (*spectrum) return cmd_spectrum(o, sa, os);
        if (*energy) return cmd_energy(o, ea, os);
        if (*crosscheck) return cmd_crosscheck(o, os);
    } catch (const ConfigError& e) {
        fmt::print(err, "input error: {}\n", e.what());
        return ExitInput;
    } catch (const UnsupportedShapeError& e) {
        fmt::print(err, "input error: {}\n", e.what());
        return ExitInput;
    } catch (const DegenerateSpectrumError& e) {
        fmt::print(err, "input error: {}\n", e.what());
        return ExitInput;
    } catch (const std::invalid_argument& e) {
        fmt::print(err, "input error: {}\n", e.what());
        return ExitInput;
    } catch (const Error& e) {
        fmt::print(err, "numeric error: {}\n", e.what());
        return ExitNumeric;
    }
    return ExitInput;
}

} // namespace wse
