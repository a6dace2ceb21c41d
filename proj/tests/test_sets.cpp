#include <gtest/gtest.h>

#include <complex>

#include "bbr/conv.hpp"
#include "bbr/dense_set.hpp"
#include "bbr/fourier.hpp"

using namespace bbr;

namespace {

// Quadruple-loop oracle for a1+a2-a3-a4 = x counts, no convolution involved.
std::vector<long> diff_quad_oracle(const DenseSet& a) {
    const FieldParams& f = a.ambient();
    std::vector<long> cnt(f.size(), 0);
    auto mem = a.members();
    for (uint64_t a1 : mem)
        for (uint64_t a2 : mem)
            for (uint64_t a3 : mem)
                for (uint64_t a4 : mem) cnt[f.sub_idx(f.add_idx(a1, a2), f.add_idx(a3, a4))]++;
    return cnt;
}

DenseSet from_indices(const FieldParams& f, std::initializer_list<uint64_t> idx) {
    DenseSet s(f);
    for (uint64_t i : idx) s.add(i);
    return s;
}

}  // namespace

TEST(DenseSet, DensityExamples) {
    FieldParams f(3, 4);
    EXPECT_EQ(DenseSet::full(f).density(), mpq_class(1));
    EXPECT_EQ(DenseSet(f).density(), mpq_class(0));
    auto h = Subspace::span(f, {{1, 0, 0, 0}}).annihilator();
    EXPECT_EQ(DenseSet::of_subspace(h).density(), mpq_class(1, 3));
}

TEST(DenseSet, NegateAndOps) {
    FieldParams f(5, 1);
    auto s = from_indices(f, {1, 2});
    auto n = s.negate();
    EXPECT_TRUE(n.test(uint64_t(4)) && n.test(uint64_t(3)));
    EXPECT_EQ(n.size(), 2u);
    EXPECT_EQ((s & n).size(), 0u);
    EXPECT_EQ((s | n).size(), 4u);
}

TEST(Convolve, DeltaIsIdentity) {
    FieldParams f(3, 2);
    Rng rng(0xabc1);
    auto a = DenseSet::random(f, 0.5, rng);
    RepTable delta(f);
    delta.v[0] = 1;
    auto out = convolve_counts(RepTable::indicator(a), delta);
    for (uint64_t i = 0; i < f.size(); ++i) EXPECT_EQ(out.v[i], a.test(i) ? 1 : 0);
}

TEST(Convolve, SelfAtZeroCountsPairs) {
    FieldParams f(2, 4);
    Rng rng(0xabc2);
    auto a = DenseSet::random(f, 0.4, rng);
    // (1_A * 1_{-A})(0) = |A|
    auto out = convolve_counts(RepTable::indicator(a), RepTable::indicator(a.negate()));
    EXPECT_EQ(out.v[0], mpz_class(a.size()));
}

TEST(DiffRepCounts, FullSpaceIsConstant) {
    FieldParams f(2, 3);
    auto t = diff_rep_counts(DenseSet::full(f));
    for (const auto& c : t.v) EXPECT_EQ(c, mpz_class(512));  // |A|^4 / p^n = 4096/8
}

TEST(DiffRepCounts, SubspaceIsCubeOnMembers) {
    FieldParams f(2, 4);
    auto v = Subspace::span(f, {{1, 0, 0, 0}, {0, 1, 1, 0}});
    auto s = DenseSet::of_subspace(v);
    auto t = diff_rep_counts(s);
    for (uint64_t i = 0; i < f.size(); ++i) {
        if (v.contains(f.decode(i)))
            EXPECT_EQ(t.v[i], mpz_class(4 * 4 * 4));
        else
            EXPECT_EQ(t.v[i], 0);
    }
}

TEST(DiffRepCounts, PairInFFiveFrozenValue) {
    FieldParams f(5, 1);
    auto a = from_indices(f, {0, 1});
    auto oracle = diff_quad_oracle(a);
    ASSERT_EQ(oracle[0], 6);  // frozen: quadruples of {0,1} with a1+a2-a3-a4=0
    auto t = diff_rep_counts(a);
    for (uint64_t i = 0; i < f.size(); ++i) EXPECT_EQ(t.v[i], oracle[i]);
}

TEST(DiffRepCounts, MatchesQuadrupleOracleOnRandomSets) {
    Rng rng(0xabc3);
    for (uint32_t p : {2u, 3u}) {
        FieldParams f(p, p == 2 ? 4 : 2);
        for (int trial = 0; trial < 5; ++trial) {
            auto a = DenseSet::random(f, 0.45, rng);
            auto oracle = diff_quad_oracle(a);
            auto t = diff_rep_counts(a);
            for (uint64_t i = 0; i < f.size(); ++i) EXPECT_EQ(t.v[i], oracle[i]);
        }
    }
}

TEST(Fourier, FullSpaceIsDelta) {
    FieldParams f(2, 4);
    auto ft = fourier(DenseSet::full(f));
    EXPECT_EQ(ft.walsh[0], 16);
    for (uint64_t xi = 1; xi < 16; ++xi) EXPECT_EQ(ft.walsh[xi], 0);
}

TEST(Fourier, HyperplaneHasTwoCoefficients) {
    FieldParams f(2, 4);
    auto h = DenseSet::of_subspace(Subspace::span(f, {{1, 0, 0, 0}}).annihilator());
    auto ft = fourier(h);
    // Coefficients 1/2 at 0 and at the defining character e1, zero elsewhere.
    for (uint64_t xi = 0; xi < 16; ++xi) {
        int64_t want = (xi == 0 || xi == 1) ? 8 : 0;
        EXPECT_EQ(ft.walsh[xi], want) << "xi=" << xi;
    }
}

TEST(Fourier, MatchesDirectCharacterSumOracle) {
    Rng rng(0xabc4);
    FieldParams f(2, 5);
    auto a = DenseSet::random(f, 0.5, rng);
    auto ft = fourier(a);
    for (uint64_t xi = 0; xi < f.size(); ++xi) {
        int64_t direct = 0;
        for (uint64_t x = 0; x < f.size(); ++x)
            if (a.test(x)) direct += (f.dot_idx(xi, x) == 0) ? 1 : -1;
        EXPECT_EQ(ft.walsh[xi], direct);
    }
}

TEST(Fourier, OddPMatchesDirectCharacterSumOracle) {
    Rng rng(0xabc5);
    FieldParams f(3, 3);
    auto a = DenseSet::random(f, 0.5, rng);
    auto ft = fourier(a);
    for (uint64_t xi = 0; xi < f.size(); ++xi) {
        std::complex<double> direct = 0;
        for (uint64_t x = 0; x < f.size(); ++x)
            if (a.test(x)) {
                double ang = 2.0 * M_PI * double(f.dot_idx(xi, x)) / 3.0;
                direct += std::complex<double>(std::cos(ang), std::sin(ang));
            }
        EXPECT_NEAR(std::abs(direct - ft.coeff[xi]), 0.0, 1e-9);
    }
}

TEST(Fourier, ParsevalExactOverF2) {
    Rng rng(0xabc6);
    FieldParams f(2, 6);
    for (int trial = 0; trial < 10; ++trial) {
        auto a = DenseSet::random(f, 0.3 + 0.05 * trial, rng);
        auto ft = fourier(a);
        // sum_xi T(xi)^2 = p^n |A|
        mpz_class lhs = 0;
        for (int64_t t : ft.walsh) lhs += mpz_class(t) * t;
        EXPECT_EQ(lhs, mpz_class(f.size()) * mpz_class(a.size()));
    }
}

TEST(Fourier, ParsevalFloatOverF3) {
    Rng rng(0xabc7);
    FieldParams f(3, 3);
    auto a = DenseSet::random(f, 0.4, rng);
    auto ft = fourier(a);
    double lhs = 0;
    for (const auto& c : ft.coeff) lhs += std::norm(c);
    EXPECT_NEAR(lhs, double(f.size()) * double(a.size()), 1e-9);
}

TEST(Spectrum, SizeObeysParsevalBound) {
    Rng rng(0xabc8);
    FieldParams f(2, 8);
    mpq_class rho_sq(1, 4);  // rho = 1/2
    for (int trial = 0; trial < 100; ++trial) {
        auto a = DenseSet::random(f, 0.15 + 0.007 * trial, rng);
        if (a.empty()) continue;
        auto ft = fourier(a);
        auto spec = spectrum(ft, a.size(), rho_sq);
        // |Spec_rho| <= 1/(rho^2 alpha)
        mpq_class alpha = a.density();
        mpq_class bound = 1 / (rho_sq * alpha);
        EXPECT_LE(mpq_class(spec.size()), bound);
    }
}

TEST(Spectrum, SubspaceIndicatorSpectrumIsAnnihilator) {
    FieldParams f(2, 5);
    auto v = Subspace::span(f, {{1, 1, 0, 0, 0}, {0, 0, 1, 0, 0}});
    auto a = DenseSet::of_subspace(v);
    auto ft = fourier(a);
    auto spec = spectrum(ft, a.size(), mpq_class(1, 2));
    auto ann = v.annihilator();
    // Nonzero coefficients of a subspace indicator sit exactly on the
    // annihilator, all with magnitude alpha >= rho * alpha.
    EXPECT_EQ(spec.size(), ann.count() - 1);
    for (uint64_t xi : spec) EXPECT_TRUE(ann.contains(f.decode(xi)));
}

TEST(Energy, SubspaceCube) {
    FieldParams f(2, 4);
    auto v = Subspace::span(f, {{1, 0, 0, 0}, {0, 1, 0, 0}});
    auto s = DenseSet::of_subspace(v);
    EXPECT_EQ(additive_energy(s, s), mpz_class(4 * 4 * 4));
    FieldParams f1(2, 1);
    auto zero = from_indices(f1, {0});
    EXPECT_EQ(additive_energy(zero, zero), 1);
}

TEST(Energy, MatchesQuadrupleOracle) {
    Rng rng(0xabc9);
    FieldParams f(2, 4);
    for (int trial = 0; trial < 5; ++trial) {
        auto a = DenseSet::random(f, 0.4, rng);
        auto b = DenseSet::random(f, 0.4, rng);
        long oracle = 0;
        for (uint64_t x : a.members())
            for (uint64_t y : b.members())
                for (uint64_t z : a.members())
                    for (uint64_t w : b.members())
                        if (f.sub_idx(x, y) == f.sub_idx(z, w)) ++oracle;
        EXPECT_EQ(additive_energy(a, b), oracle);
    }
}

TEST(Energy, CauchySchwarzFloor) {
    Rng rng(0xabca);
    FieldParams f(2, 5);
    for (int trial = 0; trial < 10; ++trial) {
        auto a = DenseSet::random(f, 0.3, rng);
        if (a.empty()) continue;
        // E(A,A) >= |A|^4 / p^n
        mpz_class e = additive_energy(a, a);
        mpz_class sz(a.size());
        EXPECT_GE(e * mpz_class(f.size()), sz * sz * sz * sz);
    }
}
