#include <gtest/gtest.h>

#include <cmath>

#include "cgmc/lattice.hpp"
#include "cgmc/rng.hpp"

using namespace cgmc;

TEST(Lattice, MinimalImageDistance) {
    const MicroLattice lat(8);
    EXPECT_EQ(lat.distance(0, 1), 1);
    EXPECT_EQ(lat.distance(0, 7), 1);
    EXPECT_EQ(lat.distance(1, 5), 4);
    EXPECT_EQ(lat.wrap(-1), 7);
    EXPECT_EQ(lat.wrap(17), 1);
    EXPECT_THROW(MicroLattice(1), std::invalid_argument);
}

TEST(SpinConfig, RejectsNonSpinEntries) {
    EXPECT_THROW(SpinConfig(std::vector<Spin>{1, 0, -1}), std::invalid_argument);
    const SpinConfig s = SpinConfig::from_bits(0b101, 3);
    EXPECT_EQ(s[0], 1);
    EXPECT_EQ(s[1], -1);
    EXPECT_EQ(s.total(), 1);
    EXPECT_EQ(s.flipped().total(), -1);
}

TEST(Kernel, ConstantProfile) {
    const Kernel k = constant_kernel(1.0, 8);
    ASSERT_EQ(k.range(), 8);
    for (int r = 1; r <= 8; ++r) EXPECT_DOUBLE_EQ(k(r), 1.0 / 16);
    EXPECT_EQ(k(9), 0.0);
    EXPECT_EQ(k(-3), k(3));
    EXPECT_NEAR(k.norm(), 1.0, 1e-12);
}

TEST(Kernel, NearestNeighbour) {
    const Kernel k = constant_kernel(1.0, 1);
    ASSERT_EQ(k.range(), 1);
    EXPECT_DOUBLE_EQ(k(1), 0.5);
}

TEST(Kernel, ZeroProfileAndBadRange) {
    const Kernel k = kernel_from_profile([](double) { return 0.0; }, 4);
    EXPECT_EQ(k.norm(), 0.0);
    EXPECT_THROW(kernel_from_profile([](double) { return 1.0; }, 0), std::invalid_argument);
}

TEST(Kernel, NormMatchesRecomputation) {
    const Kernel k({0.3, -0.2, 0.05});
    EXPECT_NEAR(k.norm(), 2 * (0.3 + 0.2 + 0.05), 1e-12);
}

TEST(TruncateKernel, GeometricTail) {
    std::vector<double> v;
    for (int r = 1; r <= 30; ++r) v.push_back(std::ldexp(1.0, -r));
    const TruncatedKernel t = truncate_kernel(v, std::ldexp(1.0, -8));
    EXPECT_EQ(t.effective_range, 9);
    EXPECT_LE(t.tail_mass, std::ldexp(1.0, -8));
    EXPECT_NEAR(t.tail_mass, 2 * (std::ldexp(1.0, -9) - std::ldexp(1.0, -30)), 1e-15);
}

TEST(TruncateKernel, FullAndNoTruncation) {
    const std::vector<double> v{0.25, 0.125};
    EXPECT_EQ(truncate_kernel(v, 1.0).effective_range, 0);
    const TruncatedKernel t = truncate_kernel(v, 1e-12);
    EXPECT_EQ(t.effective_range, 2);
    EXPECT_EQ(t.kernel(1), 0.25);
    EXPECT_THROW(truncate_kernel(v, 0.0), std::invalid_argument);
}

TEST(MicroEnergy, TwoSiteRing) {
    const Kernel k = constant_kernel(1.0, 1);
    const SpinConfig up(2, 1);
    EXPECT_DOUBLE_EQ(micro_energy(up, k, FieldSpec::uniform(0.0)), -0.5);
    EXPECT_DOUBLE_EQ(micro_energy_delta_flip(up, 0, k, FieldSpec::uniform(0.0)), 1.0);
}

TEST(MicroEnergy, FieldOnly) {
    const SpinConfig up(6, 1);
    EXPECT_DOUBLE_EQ(micro_energy(up, Kernel(), FieldSpec::uniform(0.7)), 6 * 0.7);
    EXPECT_DOUBLE_EQ(micro_energy_delta_flip(up, 2, Kernel(), FieldSpec::uniform(0.7)), -2 * 0.7);
}

TEST(MicroEnergy, GlobalFlipSymmetry) {
    Rng rng = make_stream(3, 0);
    const Kernel k({0.4, 0.1, -0.2});
    for (int t = 0; t < 20; ++t) {
        const SpinConfig s = SpinConfig::from_bits(rng(), 12);
        EXPECT_NEAR(micro_energy(s, k, FieldSpec::uniform(0.0)), micro_energy(s.flipped(), k, FieldSpec::uniform(0.0)),
                    1e-12);
    }
}

TEST(MicroEnergy, DeltaMatchesRecomputation) {
    Rng rng = make_stream(4, 0);
    const Kernel k({0.4, 0.1, -0.2, 0.05});
    std::vector<double> h(16);
    for (auto& v : h) v = uniform01(rng) - 0.5;
    const FieldSpec field = FieldSpec::per_site(h);
    for (int t = 0; t < 100; ++t) {
        const SpinConfig s = SpinConfig::from_bits(rng(), 16);
        const int x = static_cast<int>(uniform_index(rng, 16));
        SpinConfig f = s;
        f.flip(x);
        EXPECT_NEAR(micro_energy_delta_flip(s, x, k, field), micro_energy(f, k, field) - micro_energy(s, k, field), 1e-10);
    }
}

TEST(MicroEnergy, Errors) {
    const SpinConfig s(4, 1);
    EXPECT_THROW(micro_energy_delta_flip(s, 4, Kernel(), FieldSpec()), std::out_of_range);
    EXPECT_THROW(micro_energy(s, Kernel(), FieldSpec::per_site({1.0, 2.0})), std::invalid_argument);
}

TEST(MicroEnergy, CountsTableReads) {
    OpCounter c;
    micro_energy(SpinConfig(64, 1), constant_kernel(1.0, 8), FieldSpec(), &c);
    EXPECT_EQ(c.table_reads, 64u * 8u);
}
