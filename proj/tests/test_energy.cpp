#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "wse/energy.hpp"

using namespace wse;

namespace {

StringConfiguration inverted_configuration(double wk, double wl, double r, double h0, long n, Branch b) {
    StringConfiguration cfg;
    cfg.zero_modes[2] = std::sqrt(h0);
    cfg.modes.push_back({2, static_cast<int>(wk), r, 0.0, Chirality::Right});
    cfg.modes.push_back({2, static_cast<int>(wl), std::abs(invert_two_parallel(wk, wl, r, n, b)), 0.0, Chirality::Left});
    return cfg;
}

} // namespace

TEST(Hamiltonian, NoModesZero) { EXPECT_EQ(hamiltonian(StringConfiguration{}), 0.0); }

TEST(Hamiltonian, UnitParallelModes) {
    StringConfiguration cfg;
    cfg.zero_modes[2] = 1.0;
    cfg.modes.push_back({2, 1, 1.0, 0.0, Chirality::Right});
    cfg.modes.push_back({2, 1, 1.0, 0.0, Chirality::Left});
    EXPECT_EQ(hamiltonian(cfg), 3.0);
}

TEST(Hamiltonian, DensityQuadratureAgrees) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> amp(0.1, 2.0);
    std::uniform_real_distribution<double> ph(0.0, two_pi);
    std::uniform_int_distribution<int> k(1, 4);
    for (int c = 0; c < 5; ++c) {
        StringConfiguration cfg;
        cfg.dimension = 5;
        cfg.alpha_prime = 0.5 + 0.2 * c;
        cfg.zero_modes[2] = amp(rng);
        cfg.zero_modes[4] = amp(rng);
        cfg.modes.push_back({2, k(rng), amp(rng), ph(rng), Chirality::Right});
        cfg.modes.push_back({3, k(rng), amp(rng), ph(rng), Chirality::Left});
        cfg.modes.push_back({2, 5, amp(rng), ph(rng), Chirality::Left});
        const double h = hamiltonian(cfg);
        EXPECT_NEAR(hamiltonian_density_quadrature(cfg, ph(rng)), h, 1e-8 * h);
    }
}

TEST(Discrete, MatchesInvertedConfiguration) {
    for (Branch b : {Branch::TildeGreater, Branch::TildeSmaller})
        for (long n : {-5L, -1L, 1L, 2L, 7L}) {
            const double hn = hamiltonian_discrete(2, 3, 0.8, 1.5, n, b);
            const double h = hamiltonian(inverted_configuration(2, 3, 0.8, 1.5, n, b));
            EXPECT_NEAR(hn, h, 1e-10 * h);
        }
}

TEST(Discrete, MixedFormIdentity) {
    for (long n : {1L, 3L, -2L}) {
        const double rt = invert_two_parallel(1, 2, 1.2, n, Branch::TildeGreater);
        const double hd = hamiltonian_discrete(1, 2, 1.2, 0.7, n, Branch::TildeGreater);
        EXPECT_NEAR(hamiltonian_mixed(1, 2, 1.2, rt, 0.7, n), hd, 1e-10 * hd);
    }
}

TEST(Discrete, TendsToAsymptote) {
    const double hinf = hamiltonian_asymptote(1, 1, 1);
    EXPECT_EQ(hinf, 3.0);
    EXPECT_LT(std::abs(hamiltonian_discrete(1, 1, 1, 1, 50, Branch::TildeGreater) - hinf), 1e-6);
    EXPECT_LT(std::abs(hamiltonian_discrete(1, 1, 1, 1, 50, Branch::TildeSmaller) - hinf), 1e-6);
    EXPECT_THROW(hamiltonian_discrete(1, 1, 1, 1, 0, Branch::TildeGreater), DegenerateSpectrumError);
}

TEST(EnergyTable, MonotoneApproachOnGreaterBranch) {
    std::vector<long> ns;
    for (long n = 1; n <= 20; ++n) ns.push_back(n);
    const auto t = energy_table(1, 1, 1, 1, ns, Branch::TildeGreater);
    ASSERT_EQ(t.entries.size(), 20u);
    for (std::size_t i = 0; i + 1 < t.entries.size(); ++i) EXPECT_GT(t.entries[i].h, t.entries[i + 1].h);
    for (std::size_t i = 0; i + 2 < t.entries.size(); ++i)
        EXPECT_GT(t.entries[i].h - t.entries[i + 1].h, t.entries[i + 1].h - t.entries[i + 2].h);
    for (const auto& e : t.entries) EXPECT_GT(e.h, 3.0);
}

TEST(EnergyTable, BranchesBracketAsymptote) {
    const std::vector<long> ns{1, 2, 5, 10};
    const auto g = energy_table(1, 1, 1, 1, ns, Branch::TildeGreater);
    const auto s = energy_table(1, 1, 1, 1, ns, Branch::TildeSmaller);
    for (std::size_t i = 0; i < ns.size(); ++i) {
        EXPECT_GT(g.entries[i].h, g.h_inf);
        EXPECT_LT(s.entries[i].h, s.h_inf);
    }
}

TEST(EnergyTable, EmptyRange) {
    const auto t = energy_table(1, 1, 1, 1, {}, Branch::TildeGreater);
    EXPECT_TRUE(t.entries.empty());
    EXPECT_EQ(t.h0, 1.0);
    EXPECT_EQ(t.h_inf, 3.0);
    std::ostringstream os;
    write_energy_csv(os, {t});
    const std::string csv = os.str();
    EXPECT_NE(csv.find("# H0 = 1"), std::string::npos);
    EXPECT_NE(csv.find("# H_inf = 3"), std::string::npos);
    EXPECT_EQ(csv.substr(csv.rfind("n,H_n")), "n,H_n,branch\n");
}

TEST(EnergyTable, ZeroMarkedUndefined) {
    const auto t = energy_table(1, 1, 1, 1, {1, 0, -1, 1}, Branch::TildeGreater);
    EXPECT_EQ(t.entries.size(), 2u);
    ASSERT_EQ(t.undefined.size(), 1u);
    std::ostringstream os;
    write_energy_csv(os, {t});
    EXPECT_NE(os.str().find("0,undefined (degenerate spectrum),greater"), std::string::npos);
}

TEST(EnergyTable, GnuplotBlocks) {
    const auto g = energy_table(1, 1, 1, 1, {1, 2}, Branch::TildeGreater);
    const auto s = energy_table(1, 1, 1, 1, {1, 2}, Branch::TildeSmaller);
    std::ostringstream os;
    write_energy_csv(os, {g, s}, true);
    const std::string out = os.str();
    EXPECT_NE(out.find("# branch greater"), std::string::npos);
    EXPECT_NE(out.find("\n\n\n# branch smaller"), std::string::npos);
    EXPECT_EQ(out.find(','), std::string::npos);
}
