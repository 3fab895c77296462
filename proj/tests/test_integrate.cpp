#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "wse/integrate.hpp"
#include "wse/spectra.hpp"

using namespace wse;

namespace {

constexpr double pi = std::numbers::pi;

StringConfiguration two_modes(int k, int l, double r, double rt, bool parallel, double g = 0.0, double gt = 0.0) {
    StringConfiguration cfg;
    cfg.modes.push_back({2, k, r, g, Chirality::Right});
    cfg.modes.push_back({parallel ? 2 : 3, l, rt, gt, Chirality::Left});
    return cfg;
}

double partial(const QuadratureResult& r, const std::string& key) {
    for (const auto& [k, v] : r.partials)
        if (k == key) return v;
    ADD_FAILURE() << "missing partial " << key;
    return 0.0;
}

// ln g = a (sigma^2 - tau^2) has constant density a / pi.
SyntheticField constant_curvature(double a) {
    return SyntheticField([a](double t, double s) {
        const double g = std::exp(a * (s * s - t * t));
        const double lt = -2 * a * t;
        const double ls = 2 * a * s;
        return MetricJet{g, g * lt, g * ls, g * (lt * lt - 2 * a), g * (ls * ls + 2 * a), g * lt * ls};
    });
}

} // namespace

TEST(Quadrature, GaussLegendreExactForPolynomials) {
    const auto rule = quad::gauss_legendre(6);
    const double v = quad::composite_gauss([](double x) { return std::pow(x, 11) - 3 * x * x; }, 0.0, 2.0, 1, rule);
    EXPECT_NEAR(v, std::pow(2.0, 12) / 12 - 8.0, 1e-11);
}

TEST(Quadrature, AdaptiveHandlesEndpointSingularity) {
    const auto r = quad::integrate_adaptive([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-10);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value, 2.0, 1e-8);
}

TEST(Quadrature, SmoothedRemovesKinks) {
    const std::vector<double> bps{0.3};
    const auto r = quad::integrate_smoothed([](double x) { return std::sqrt(std::abs(x - 0.3)); }, 0.0, 1.0, 1e-12, 0.0,
                                            2000, bps);
    const double expect = (2.0 / 3.0) * (std::pow(0.3, 1.5) + std::pow(0.7, 1.5));
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value, expect, 1e-11);
}

TEST(Quadrature, ExtrapolationExactForPolynomialsInWidth) {
    const std::vector<double> w{0.02, 0.01, 0.005, 0.0025};
    std::vector<double> v;
    for (double d : w) v.push_back(1.5 - 2 * d + 7 * d * d - d * d * d);
    EXPECT_NEAR(quad::extrapolate_to_zero(w, v).value, 1.5, 1e-12);

    std::vector<double> p;
    for (double d : w) p.push_back(0.25 / d + 1.5 - 2 * d + 7 * d * d);
    const auto [c0, pole] = quad::finite_part_with_pole(w, p);
    EXPECT_NEAR(c0, 1.5, 1e-9);
    EXPECT_NEAR(pole, 0.25, 1e-12);
}

TEST(Quadrature, PolishedRootToFullPrecision) {
    auto f = [](double x) { return std::cos(x) - x; };
    const double r = quad::polish_root(f, 0.0, 1.0, f(0.0), f(1.0));
    EXPECT_NEAR(r, 0.7390851332151607, 1e-15);
}

TEST(Schedule, Validated) {
    const auto f = conformal_factor(two_modes(1, 1, 1.0, 2.0, true));
    const std::vector<double> shortlist{0.02, 0.01};
    const std::vector<double> increasing{0.01, 0.02, 0.03};
    EXPECT_THROW(integrate_euler_pv(f, shortlist), std::invalid_argument);
    EXPECT_THROW(integrate_euler_pv(f, increasing), std::invalid_argument);
}

TEST(PrincipalValue, PerpendicularVanishes) {
    const auto r = integrate_euler_pv(conformal_factor(two_modes(1, 2, 1.0, 0.7, false)));
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(r.singular_report.shape, SingularLocus::Shape::Points);
    EXPECT_EQ(r.singular_report.points, 16u);
    EXPECT_LE(std::abs(r.value), 1e-3);
    EXPECT_EQ(r.extrapolation_trace.size(), default_schedule().size());
}

TEST(PrincipalValue, NoModesDegenerate) {
    const auto r = integrate_euler_pv(conformal_factor(StringConfiguration{}));
    EXPECT_EQ(r.value, 0.0);
    EXPECT_TRUE(r.degenerate);
}

TEST(PrincipalValue, ConstantCurvatureSubdomain) {
    const double a = 0.3;
    const auto f = constant_curvature(a);
    const Domain dom{0.2, 1.0, -0.5, 0.7};
    const auto r = integrate_euler_pv(f, SingularLocus{}, nullptr, dom);
    EXPECT_NEAR(r.value, dom.area() * a / pi, 1e-8);
}

TEST(PrincipalValue, ParallelMatchesClosedForm) {
    const auto r = integrate_euler_pv(conformal_factor(two_modes(1, 1, 1.0, 2.0, true)));
    const double closed = spectrum_two_parallel(1, 1, 1.0, 2.0);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value, closed, 0.01 * closed);
}

TEST(Boundary, ConstantCurvatureSubdomain) {
    const double a = 0.3;
    const auto f = constant_curvature(a);
    const Domain dom{0.2, 1.0, -0.5, 0.7};
    const auto r = integrate_euler_boundary(f, SingularLocus{}, nullptr, dom);
    const double expect = dom.area() * a / pi;
    EXPECT_NEAR(r.value, expect, 0.005 * expect);
}

TEST(Boundary, AgreesWithPrincipalValue) {
    for (const auto& cfg : {two_modes(1, 1, 1.0, 2.0, true), two_modes(1, 2, 1.0, 3.0, true, 0.3, 1.1),
                            two_modes(1, 2, 1.0, 0.7, false)}) {
        const auto f = conformal_factor(cfg);
        const auto pv = integrate_euler_pv(f);
        const auto bd = integrate_euler_boundary(f);
        EXPECT_TRUE(bd.converged);
        EXPECT_LE(std::abs(pv.value - bd.value), pv.error_estimate + bd.error_estimate);
    }
}

TEST(Boundary, AgreesWithPrincipalValueAtEveryWidth) {
    const auto f = conformal_factor(two_modes(1, 1, 1.0, 2.0, true));
    const auto pv = integrate_euler_pv(f);
    const auto bd = integrate_euler_boundary(f);
    ASSERT_EQ(pv.extrapolation_trace.size(), bd.extrapolation_trace.size());
    for (std::size_t i = 0; i < pv.extrapolation_trace.size(); ++i)
        EXPECT_NEAR(pv.extrapolation_trace[i].second, bd.extrapolation_trace[i].second, 1e-6);
}

TEST(Boundary, NoModesDegenerate) {
    const auto r = integrate_euler_boundary(conformal_factor(StringConfiguration{}));
    EXPECT_EQ(r.value, 0.0);
    EXPECT_TRUE(r.degenerate);
}

TEST(Patches, PerpendicularEachKindVanishes) {
    const auto cfg = two_modes(1, 2, 1.0, 0.5, false);
    const auto pair = patch_pair(cfg);
    for (auto kind : all_patch_kinds) {
        const auto patch = pair.patch(kind);
        EXPECT_EQ(patch.multiplicity(), 4);
        for (double d : default_schedule()) EXPECT_NEAR(patch_integral(patch, pair.amplitudes(), d).first, 0.0, 1e-8);
    }
    const auto r = integrate_patches(cfg);
    EXPECT_NEAR(r.value, 0.0, 1e-6);
    EXPECT_EQ(partial(r, "regions per kind"), 4.0);
}

TEST(Patches, OrientedPairsCarryClosedForm) {
    const auto r = integrate_patches(two_modes(1, 1, 1.0, 3.0, true));
    const double closed = spectrum_two_parallel(1, 1, 1.0, 3.0);
    EXPECT_NEAR(partial(r, "I+IV"), closed, 1e-6 * closed);
    EXPECT_NEAR(partial(r, "II+III"), -closed, 1e-6 * closed);
}

TEST(Patches, ParallelMatchesClosedForm) {
    const auto r = integrate_patches(two_modes(1, 1, 1.0, 3.0, true));
    const double closed = spectrum_two_parallel(1, 1, 1.0, 3.0);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value, closed, 0.01 * closed);
}

TEST(Patches, RequiresOneRightOneLeft) {
    StringConfiguration cfg;
    cfg.modes.push_back({2, 1, 1.0, 0.0, Chirality::Right});
    EXPECT_THROW(integrate_patches(cfg), UnsupportedShapeError);
}

TEST(CharacteristicNumber, NearIntegral) {
    QuadratureResult r;
    r.value = 0.0003;
    const auto n = characteristic_number(r, 0.05);
    EXPECT_EQ(n.n, 0);
    EXPECT_NEAR(n.deviation, 0.0003, 1e-15);
}

TEST(CharacteristicNumber, NotNearIntegral) {
    QuadratureResult r;
    r.value = 2.51;
    r.extrapolation_trace = {{0.02, 2.5}, {0.01, 2.51}};
    try {
        characteristic_number(r, 0.05);
        FAIL() << "expected NotNearIntegralError";
    } catch (const NotNearIntegralError& e) {
        EXPECT_EQ(e.nearest(), 3);
        EXPECT_EQ(e.trace().size(), 2u);
    }
    r.value = 2.0;
    r.converged = false;
    EXPECT_THROW(characteristic_number(r), NonConvergenceError);
}

TEST(CharacteristicNumber, InvertedAmplitudeRoundTrip) {
    const double rt = invert_two_parallel(1, 1, 1.0, 3, Branch::TildeGreater);
    const auto r = integrate_euler_pv(conformal_factor(two_modes(1, 1, 1.0, rt, true)));
    EXPECT_EQ(characteristic_number(r).n, 3);
}
