#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>

#include <gtest/gtest.h>

#include "hir/error.hpp"
#include "hir/kernels.hpp"

using namespace hir;

namespace {

// Brute-force pixel integral on an s x s midpoint lattice.
cplx brute_entry(const RadialFamily& f, BasisOrder o, const LocalFrame& frame, int i, int j, int s) {
    cplx acc{};
    for (int a = 0; a < s; ++a) {
        for (int b = 0; b < s; ++b) {
            const double x = i - 0.5 + (a + 0.5) / s, y = j - 0.5 + (b + 0.5) / s;
            acc += std::conj(basis_value(f, o, frame, x, y));
        }
    }
    return acc / (static_cast<double>(s) * s * frame.w * frame.w);
}

}  // namespace

TEST(Kernel, SideLength) {
    EXPECT_EQ(build_kernel(RadialFamily::cosine(), {0, 0}, 3.0).values.rows(), 7u);
    const KernelTable k = build_kernel(RadialFamily::cosine(), {1, 2}, 3.5);
    EXPECT_EQ(k.values.rows(), 9u);
    EXPECT_EQ(k.values.cols(), 9u);
    EXPECT_EQ(k.half_rows(), 4u);
    EXPECT_EQ(k.rule_label, "gauss2x2");
    EXPECT_THROW(build_kernel(RadialFamily::cosine(), {0, 0}, 0.5), DomainError);
}

TEST(Kernel, ConstantOrderInsideDisk) {
    const double w = 6.0;
    const double expect = 1.0 / std::sqrt(std::numbers::pi) / (w * w);
    for (const auto& rule : {QuadratureRule::midpoint(), QuadratureRule::tensor_gauss(2)}) {
        const KernelTable k = build_kernel(RadialFamily::cosine(), {0, 0}, w, {}, rule);
        EXPECT_NEAR(k.values(6, 6).real(), expect, 1e-15);
        EXPECT_NEAR(k.values(8, 5).real(), expect, 1e-15);
        EXPECT_EQ(k.values(0, 0), cplx(0.0, 0.0));
        EXPECT_EQ(k.values(12, 12), cplx(0.0, 0.0));
    }
}

TEST(Kernel, AngularOrdersCancelOverTheSquareLattice) {
    for (int m : {1, 2, 3}) {
        const KernelTable k = build_kernel(RadialFamily::cosine(), {1, m}, 7.3);
        cplx sum{};
        for (const auto& z : k.values.values()) sum += z;
        EXPECT_LT(std::abs(sum), 1e-15) << "m=" << m;
    }
    const KernelTable k = build_kernel(RadialFamily::cosine(), {0, 0}, 10.0);
    cplx sum{};
    for (const auto& z : k.values.values()) sum += z;
    // integral of V_00 over the unit disk, w^2 cancelled: pi / sqrt(pi)
    EXPECT_NEAR(sum.real(), std::sqrt(std::numbers::pi), 0.02);
}

TEST(Kernel, EntryMatchesBruteForceIntegral) {
    const LocalFrame frame(0.0, 0.0, 5.0);
    const auto gauss8 = QuadratureRule::tensor_gauss(8);
    for (const auto& f : {RadialFamily::cosine(), RadialFamily::harmonic(2.0), RadialFamily::jacobi(2.0, 3.0, 1.0)}) {
        for (auto [i, j] : {std::pair{1, 2}, std::pair{-3, 1}, std::pair{2, -2}}) {
            const cplx a = kernel_entry(f, {2, 1}, frame, i, j, {}, gauss8);
            const cplx b = brute_entry(f, {2, 1}, frame, i, j, 400);
            EXPECT_LT(std::abs(a - b), 1e-7 * std::max(1.0, std::abs(b) * 25.0)) << i << "," << j;
        }
    }
}

TEST(Kernel, ConjugatesTheBasis) {
    const LocalFrame frame(0.0, 0.0, 4.0);
    const auto f = RadialFamily::harmonic(2.0);
    const cplx e = kernel_entry(f, {1, 1}, frame, 1, 2, {}, QuadratureRule::midpoint());
    EXPECT_NEAR(std::abs(e - std::conj(basis_value(f, {1, 1}, frame, 1, 2)) / 16.0), 0.0, 1e-15);
}

TEST(Kernel, PixelGridScalesEntries) {
    const KernelTable k = build_kernel(RadialFamily::cosine(), {0, 0}, 4.0, PixelGrid(2.0, 1.0));
    EXPECT_EQ(k.values.rows(), 5u);
    EXPECT_EQ(k.values.cols(), 9u);
    EXPECT_NEAR(k.values(2, 4).real(), 2.0 / std::sqrt(std::numbers::pi) / 16.0, 1e-15);
    EXPECT_THROW(PixelGrid(0.0, 1.0), DomainError);
}

TEST(KernelCache, MemoisesAndSnapshots) {
    KernelCache cache;
    const auto rule = default_rule();
    const auto a = cache.get(RadialFamily::cosine(), {1, 1}, 5.0, {}, rule);
    const auto b = cache.get(RadialFamily::cosine(), {1, 1}, 5.0, {}, rule);
    EXPECT_EQ(a.get(), b.get());
    cache.get(RadialFamily::cosine(), {1, 1}, 5.0, {}, QuadratureRule::midpoint());
    EXPECT_EQ(cache.size(), 2u);
    EXPECT_EQ(cache.snapshot().size(), 2u);

    const KernelKey key{RadialFamily::cosine(), {1, 1}, 5.0, {}, rule.label};
    cache.corrupt_entry(key, rule, 5, 6, cplx(1.0, 0.0));
    const auto c = cache.get(RadialFamily::cosine(), {1, 1}, 5.0, {}, rule);
    EXPECT_NE(c.get(), a.get());
    EXPECT_NEAR((c->values(5, 6) - a->values(5, 6)).real(), 1.0, 1e-15);
    EXPECT_THROW(cache.corrupt_entry(key, rule, 99, 0, 1.0), DomainError);
    cache.clear();
    EXPECT_EQ(cache.size(), 0u);
}

TEST(KernelDump, WritesRowsAndDescriptor) {
    const auto dir = std::filesystem::temp_directory_path() / "hir_kernel_dump";
    std::filesystem::create_directories(dir);
    const auto csv = dir / "k.csv";
    write_kernel_dump(build_kernel(RadialFamily::cosine(), {0, 1}, 2.0), csv);
    std::ifstream in(csv);
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) ++lines;
    EXPECT_EQ(lines, 1 + 25);
    EXPECT_TRUE(std::filesystem::exists(dir / "k.csv.json"));
    std::filesystem::remove_all(dir);
}
