#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "wse/spectra.hpp"

using namespace wse;

namespace {

constexpr double pi = std::numbers::pi;

StringConfiguration modes(std::initializer_list<ModeSpec> list, int dimension = 5) {
    StringConfiguration cfg;
    cfg.dimension = dimension;
    cfg.modes = list;
    return cfg;
}

} // namespace

TEST(TwoParallel, EqualAmplitudesDegenerate) {
    EXPECT_THROW(spectrum_two_parallel(1, 1, 1.3, 1.3), DegenerateSpectrumError);
}

TEST(TwoParallel, UnitCharacteristicNumber) {
    const double e = std::exp(pi / 8);
    EXPECT_NEAR(spectrum_two_parallel(1, 1, 1.0, (e + 1) / (e - 1)), 1.0, 1e-13);
}

TEST(TwoParallel, HandArithmetic) {
    // (4/pi) * 2 * ln[(sqrt2 * 2 + 1)^2 / (sqrt2 * 2 - 1)^2]
    const double a = 1.0;
    const double b = std::sqrt(2.0) * 2.0;
    EXPECT_NEAR(spectrum_two_parallel(1, 2, 1.0, 2.0), 8 / pi * std::log((a + b) * (a + b) / ((a - b) * (a - b))), 1e-13);
    EXPECT_NEAR(spectrum_two_parallel(1, 1, 1.0, 2.0), 4 / pi * std::log(9.0), 1e-14);
}

TEST(TwoParallel, SwapSymmetry) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> w(0.5, 4.0);
    std::uniform_real_distribution<double> r(0.1, 3.0);
    for (int i = 0; i < 100; ++i) {
        const double wk = w(rng), wl = w(rng), a = r(rng), b = r(rng);
        const double x = spectrum_two_parallel(wk, wl, a, b);
        EXPECT_NEAR(spectrum_two_parallel(wl, wk, b, a), x, 1e-12 * std::abs(x));
    }
}

TEST(ThreeModes, Reductions) {
    EXPECT_EQ(spectrum_three_modes(2, 3, 0.7, 1.9, 0.0), spectrum_two_parallel(2, 3, 0.7, 1.9));
    EXPECT_LT(std::abs(spectrum_three_modes(2, 3, 0.7, 1.9, 1e6)), 1e-9);
    EXPECT_NEAR(spectrum_three_modes(1, 1, 1, 1, 1), 4 / pi * std::log(5.0), 1e-14);
}

TEST(FourModes, Reductions) {
    EXPECT_EQ(spectrum_four_modes(2, 3, 0.7, 1.9, 0.4, 0.0), spectrum_three_modes(2, 3, 0.7, 1.9, 0.4));
    // Identical pairs: (2 p^2) / (2 m^2) = p^2 / m^2.
    EXPECT_NEAR(spectrum_four_modes(1, 2, 0.7, 1.9, 0.7, 1.9), spectrum_two_parallel(1, 2, 0.7, 1.9), 1e-13);
    EXPECT_THROW(spectrum_four_modes(2, 2, 1, 1, 1, 1), DegenerateSpectrumError);
}

TEST(General, SingleModeNoInteraction) {
    const auto rel = spectrum_general_relation(modes({{2, 1, 1.0, 0.0, Chirality::Right}}));
    EXPECT_EQ(rel.lhs_value, 0.0);
    EXPECT_TRUE(rel.conjectured);
    ASSERT_FALSE(rel.notes.empty());
    EXPECT_NE(rel.notes[0].find("no interaction"), std::string::npos);
}

TEST(General, DistinctDirectionsDoNotInteract) {
    const auto cfg = modes({{2, 1, 1.0, 0.0, Chirality::Right}, {3, 2, 0.5, 0.0, Chirality::Left}});
    EXPECT_EQ(spectrum_general(cfg), 0.0);
}

TEST(General, ReducesToTwoParallel) {
    const auto cfg = modes({{2, 2, 0.7, 0.1, Chirality::Right}, {2, 3, 1.9, 0.4, Chirality::Left}});
    EXPECT_NEAR(spectrum_general(cfg), spectrum_two_parallel(2, 3, 0.7, 1.9), 1e-14 * spectrum_two_parallel(2, 3, 0.7, 1.9));
}

TEST(General, ReducesToFourModes) {
    const auto cfg = modes({{2, 2, 0.7, 0.0, Chirality::Right},
                            {2, 3, 1.9, 0.0, Chirality::Left},
                            {3, 2, 0.4, 0.0, Chirality::Right},
                            {3, 3, 0.2, 0.0, Chirality::Left}});
    const double x = spectrum_four_modes(2, 3, 0.7, 1.9, 0.4, 0.2);
    EXPECT_NEAR(spectrum_general(cfg), x, 1e-14 * std::abs(x));
}

TEST(General, EmptyConfigurationRejected) {
    EXPECT_THROW(spectrum_general(StringConfiguration{}), DegenerateSpectrumError);
}

TEST(Invert, RoundTrip) {
    for (Branch b : {Branch::TildeGreater, Branch::TildeSmaller})
        for (long n = -8; n <= 8; ++n) {
            if (n == 0) continue;
            const double rt = invert_two_parallel(2, 3, 0.8, n, b);
            EXPECT_NEAR(spectrum_two_parallel(2, 3, 0.8, rt), static_cast<double>(n), 1e-12 * 8) << n;
        }
}

TEST(Invert, BranchProduct) {
    for (long n = 1; n <= 8; ++n) {
        const double g = invert_two_parallel(2, 3, 0.8, n, Branch::TildeGreater);
        const double s = invert_two_parallel(2, 3, 0.8, n, Branch::TildeSmaller);
        EXPECT_NEAR(g * s, 2.0 / 3.0 * 0.8 * 0.8, 1e-14);
        EXPECT_GT(std::sqrt(3.0) * g, std::sqrt(2.0) * 0.8);
        EXPECT_LT(std::sqrt(3.0) * s, std::sqrt(2.0) * 0.8);
    }
}

TEST(Invert, LargeNLimit) {
    const double rt = invert_two_parallel(2, 3, 0.8, 2000, Branch::TildeGreater);
    EXPECT_NEAR(rt, 0.8 * std::sqrt(2.0 / 3.0), 1e-6);
}

TEST(Invert, InvalidInputs) {
    EXPECT_THROW(invert_two_parallel(1, 1, 1.0, 0, Branch::TildeGreater), DegenerateSpectrumError);
    EXPECT_THROW(invert_two_parallel(1, 1, 0.0, 1, Branch::TildeGreater), std::invalid_argument);
}

TEST(Surface, RowsRoundTrip) {
    const std::vector<long> ns{1, 2, 3, 0};
    const std::vector<double> rs{0.5, 1.0, 1.5};
    const auto s = spectrum_surface(1, 1, ns, rs);
    EXPECT_EQ(s.rows.size(), 3u * 3u * 2u);
    EXPECT_EQ(s.notes.size(), 1u);
    for (const auto& row : s.rows)
        EXPECT_NEAR(spectrum_two_parallel(1, 1, row.r_k, row.r_tilde_l), static_cast<double>(row.n), 1e-10);
}

TEST(Surface, EmptyNSet) { EXPECT_TRUE(spectrum_surface(1, 1, {}, {1.0}).rows.empty()); }
