#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "wse/locus.hpp"

using namespace wse;

namespace {

constexpr double pi = std::numbers::pi;

StringConfiguration two_modes(int k, int l, double r, double rt, bool parallel, double g = 0.0, double gt = 0.0) {
    StringConfiguration cfg;
    cfg.modes.push_back({2, k, r, g, Chirality::Right});
    cfg.modes.push_back({parallel ? 2 : 3, l, rt, gt, Chirality::Left});
    return cfg;
}

} // namespace

TEST(Locus, NoModesDegenerate) {
    const auto locus = locate_singular_locus(conformal_factor(StringConfiguration{}));
    EXPECT_TRUE(locus.degenerate());
    EXPECT_TRUE(locus.components.empty());
}

TEST(Locus, ParallelModesGiveClosedCurvesOnZeroSet) {
    const auto f = conformal_factor(two_modes(1, 1, 1.0, 2.0, true));
    const auto locus = locate_singular_locus(f);
    ASSERT_EQ(locus.shape, SingularLocus::Shape::Curves);
    EXPECT_EQ(locus.components.size(), 2u);
    const double scale = f.configuration().metric_scale();
    for (const auto& c : locus.components) {
        EXPECT_EQ(c.kind, SingularLocus::Kind::Curve);
        EXPECT_GT(c.points.size(), 50u);
        for (const auto& p : c.points) {
            const double h = std::sin(p.tau - p.sigma) - 2.0 * std::sin(p.tau + p.sigma);
            EXPECT_NEAR(h, 0.0, 1e-9);
            EXPECT_LE(f(p.tau, p.sigma), 1e-12 * scale);
        }
    }
}

TEST(Locus, HigherHarmonicCurveCount) {
    const auto locus = locate_singular_locus(conformal_factor(two_modes(2, 3, 1.0, 2.0, true)));
    ASSERT_EQ(locus.shape, SingularLocus::Shape::Curves);
    EXPECT_EQ(locus.components.size(), 6u);
}

TEST(Locus, PerpendicularModesGiveIsolatedPoints) {
    // Common zeros of sin(tau - sigma) and sin 2(tau + sigma): u in {0, pi}, v in {0, pi/2, pi, 3pi/2}
    // with v = 2(tau + sigma); each (u, v) lifts to 2 points of the torus.
    const auto f = conformal_factor(two_modes(1, 2, 1.0, 0.5, false));
    const auto locus = locate_singular_locus(f);
    ASSERT_EQ(locus.shape, SingularLocus::Shape::Points);
    const auto pts = locus.points();
    EXPECT_EQ(pts.size(), 16u);
    for (const auto& p : pts) {
        EXPECT_NEAR(std::sin(p.tau - p.sigma), 0.0, 1e-9);
        EXPECT_NEAR(std::sin(2 * (p.tau + p.sigma)), 0.0, 1e-9);
        EXPECT_GE(p.tau, 0.0);
        EXPECT_LT(p.tau, 2 * pi);
    }
}

TEST(Locus, SingleModeCurves) {
    StringConfiguration cfg;
    cfg.modes.push_back({2, 1, 1.0, 0.0, Chirality::Right});
    const auto locus = locate_singular_locus(conformal_factor(cfg));
    ASSERT_EQ(locus.shape, SingularLocus::Shape::Curves);
    EXPECT_EQ(locus.components.size(), 2u);
}

TEST(Contour, TracesUnitCircleCounterclockwise) {
    auto level = [](double t, double s) {
        return LevelValue{1.0 - (t - 3) * (t - 3) - (s - 3) * (s - 3), -2 * (t - 3), -2 * (s - 3)};
    };
    const auto c = trace_contour(level, {4.0, 3.0}, 0.01, 1.0);
    ASSERT_TRUE(c.closed);
    EXPECT_NEAR(c.length(), 2 * pi, 1e-3);
    double area = 0.0;
    for (std::size_t i = 0; i + 1 < c.vertices.size(); ++i)
        area += c.vertices[i].tau * c.vertices[i + 1].sigma - c.vertices[i + 1].tau * c.vertices[i].sigma;
    EXPECT_NEAR(0.5 * area, pi, 1e-3);
}

TEST(Torus, DistanceWraps) {
    EXPECT_NEAR(detail::torus_distance({0.01, 0.0}, {2 * pi - 0.01, 0.0}), 0.02, 1e-14);
    EXPECT_NEAR(detail::wrap_angle(-0.5), 2 * pi - 0.5, 1e-14);
}
