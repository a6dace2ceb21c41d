#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <vector>

#include "bbr/pipeline.hpp"

using namespace bbr;

namespace {

GridSet product_set(const FieldParams& f, const Subspace& v, const Subspace& w) {
    GridSet a(f, f);
    for (const auto& yv : w.elements())
        for (const auto& xv : v.elements()) a.add(f.encode(xv), f.encode(yv));
    return a;
}

GridSet form_set(const FieldParams& f, const Mat& m) {
    GridSet a(f, f);
    for (uint64_t y = 0; y < f.size(); ++y) {
        Vec my = mat_apply(m, f.decode(y), f.p);
        for (uint64_t x = 0; x < f.size(); ++x) {
            Vec xv = f.decode(x);
            uint32_t dot = 0;
            for (uint32_t i = 0; i < f.n; ++i) dot += xv[i] * my[i];
            if (dot % f.p == 0) a.add(x, y);
        }
    }
    return a;
}

mpq_class pow2_inv(unsigned long e) {
    mpz_class d;
    mpz_ui_pow_ui(d.get_mpz_t(), 2, e);
    return mpq_class(1, d);
}

}  // namespace

TEST(Variety, MembershipMatchesBruteForce) {
    FieldParams f(2, 3);
    Subspace v = Subspace::span(f, {{1, 0, 0}, {0, 1, 0}});
    Subspace w = Subspace::span(f, {{1, 0, 0}, {0, 0, 1}});
    Mat m(3, 3);
    m.at(0, 0) = 1;
    m.at(1, 2) = 1;
    BilinearVariety bv(f, f, v, w, {m});
    EXPECT_EQ(bv.r1(), 1u);
    EXPECT_EQ(bv.r2(), 1u);
    EXPECT_EQ(bv.r3(), 1u);
    EXPECT_EQ(bv.r(), 3u);

    std::vector<std::pair<uint64_t, uint64_t>> brute;
    for (uint64_t y = 0; y < 8; ++y)
        for (uint64_t x = 0; x < 8; ++x) {
            Vec xv = f.decode(x), yv = f.decode(y);
            if (!v.contains(xv) || !w.contains(yv)) continue;
            Vec my = mat_apply(m, yv, 2);
            uint32_t dot = 0;
            for (int i = 0; i < 3; ++i) dot += xv[i] * my[i];
            if (dot % 2) continue;
            brute.emplace_back(x, y);
            EXPECT_TRUE(bv.member(xv, yv));
        }
    EXPECT_EQ(bv.member_count(), mpz_class(brute.size()));
    auto listed = bv.members(1 << 10);
    std::sort(listed.begin(), listed.end(), [](auto a, auto b) { return std::tie(a.second, a.first) < std::tie(b.second, b.first); });
    std::sort(brute.begin(), brute.end(), [](auto a, auto b) { return std::tie(a.second, a.first) < std::tie(b.second, b.first); });
    EXPECT_EQ(listed, brute);
    uint64_t total = 0;
    for (uint64_t y = 0; y < 8; ++y)
        for (uint64_t x = 0; x < 8; ++x) total += bv.member(f.decode(x), f.decode(y));
    EXPECT_EQ(total, brute.size());
}

TEST(Variety, SlicesMatchMemberScan) {
    FieldParams f(2, 3);
    Subspace v = Subspace::span(f, {{1, 0, 0}, {0, 1, 0}});
    Subspace w = Subspace::full(f);
    Mat m(3, 3);
    m.at(0, 1) = 1;
    m.at(2, 0) = 1;
    BilinearVariety bv(f, f, v, w, {m});
    for (const auto& yv : w.elements()) {
        Subspace sx = bv.slice_x(yv);
        for (uint64_t x = 0; x < 8; ++x)
            EXPECT_EQ(sx.contains(f.decode(x)), bv.member(f.decode(x), yv));
        EXPECT_LE(sx.codim(), bv.r1() + bv.r3());
    }
    for (const auto& xv : v.elements()) {
        Subspace sy = bv.slice_y(xv);
        for (uint64_t y = 0; y < 8; ++y)
            EXPECT_EQ(sy.contains(f.decode(y)), bv.member(xv, f.decode(y)));
    }
    Vec outside = {0, 0, 1};  // not in v for this fixture
    ASSERT_FALSE(v.contains(outside));
    EXPECT_THROW(bv.slice_y(outside), std::invalid_argument);
}

TEST(Variety, OriginAlwaysMember) {
    FieldParams f(3, 2);
    Subspace v = Subspace::span(f, {{1, 0}});
    Mat m(2, 2);
    m.at(0, 0) = 2;
    BilinearVariety bv(f, f, v, v, {m});
    EXPECT_TRUE(bv.member(f.zero(), f.zero()));
}

TEST(Variety, MembersCapThrows) {
    FieldParams f(2, 3);
    BilinearVariety bv(f, f, Subspace::full(f), Subspace::full(f), {});
    EXPECT_THROW(bv.members(10), std::length_error);
    EXPECT_EQ(bv.members(64).size(), 64u);
}

TEST(Variety, RejectsMalformedForm) {
    FieldParams fx(2, 3), fy(2, 4);
    Mat bad(2, 2);
    EXPECT_THROW(BilinearVariety(fx, fy, Subspace::full(fx), Subspace::full(fy), {bad}), std::invalid_argument);
    Mat good(3, 4);
    EXPECT_NO_THROW(BilinearVariety(fx, fy, Subspace::full(fx), Subspace::full(fy), {good}));
}

TEST(DiffEta, EqualHyperplanes) {
    for (uint32_t p : {2u, 3u}) {
        FieldParams f(p, 3);
        std::vector<Vec> gens;
        for (uint32_t i = 0; i + 1 < f.n; ++i) gens.push_back(f.unit(i));
        Subspace h = Subspace::span(f, gens);
        auto [diff, eta] = subspace_diff_eta(h, h);
        EXPECT_EQ(eta, mpq_class(1, p));
        EXPECT_EQ(diff.dim(), h.dim());
    }
}

TEST(DiffEta, TrivialIntersection) {
    FieldParams f(2, 4);
    Subspace a = Subspace::span(f, {{1, 0, 0, 0}, {0, 1, 0, 0}});
    Subspace b = Subspace::span(f, {{0, 0, 1, 0}, {0, 0, 0, 1}});
    auto [diff, eta] = subspace_diff_eta(a, b);
    EXPECT_EQ(eta, mpq_class(1, 16));
    EXPECT_EQ(diff.dim(), 4u);
}

TEST(DiffEta, PopularityByExactRepresentationCount) {
    FieldParams f(2, 6);
    Rng rng(0xd1ff);
    for (int trial = 0; trial < 4; ++trial) {
        std::vector<Vec> ga, gb;
        for (int i = 0; i < 4; ++i) {
            ga.push_back(f.decode(rng.below(64)));
            gb.push_back(f.decode(rng.below(64)));
        }
        Subspace a = Subspace::span(f, ga), b = Subspace::span(f, gb);
        auto [diff, eta] = subspace_diff_eta(a, b);
        mpz_class inter;
        mpz_ui_pow_ui(inter.get_mpz_t(), 2, a.intersect(b).dim());
        mpq_class want(inter, mpz_class(64));
        want.canonicalize();
        EXPECT_EQ(eta, want);
        // every element of the difference set has exactly |A cap B| representations
        for (const auto& z : diff.elements()) {
            uint64_t reps = 0;
            for (const auto& u : a.elements())
                if (b.contains(f.sub(u, z))) ++reps;
            EXPECT_EQ(mpz_class(reps), inter);
        }
    }
}

TEST(DiffEta, AmbientMismatchThrows) {
    Subspace a = Subspace::full(FieldParams(2, 3));
    Subspace b = Subspace::full(FieldParams(2, 4));
    EXPECT_THROW(subspace_diff_eta(a, b), std::invalid_argument);
}

TEST(Step1, FullGridKeepsEverything) {
    FieldParams f(2, 3);
    GridSet a(f, f);
    for (uint64_t g = 0; g < 64; ++g) a.add(g % 8, g / 8);
    PipelineState st = pipeline_init(a, {});
    step1(st);
    EXPECT_EQ(st.s_set.size(), 8u);
    EXPECT_EQ(st.d1, 0u);
    for (uint64_t y = 0; y < 8; ++y) {
        ASSERT_TRUE(st.fiber_res[y].has_value());
        EXPECT_EQ(st.fiber_res[y]->v.dim(), 3u);
    }
    EXPECT_EQ(st.b1.size(), 64u);
}

TEST(Step1, ProductFiberStructure) {
    FieldParams f(2, 4);
    Subspace v = Subspace::span(f, {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}});
    Subspace w = Subspace::span(f, {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}});
    PipelineState st = pipeline_init(product_set(f, v, w), {});
    step1(st);
    EXPECT_EQ(st.d1, 1u);
    for (uint64_t y = 0; y < 16; ++y) {
        bool in_w = w.contains(f.decode(y));
        EXPECT_EQ(st.s_set.test(y), in_w);
        if (!in_w) continue;
        ASSERT_TRUE(st.fiber_res[y].has_value());
        EXPECT_EQ(st.fiber_res[y]->v.basis(), v.basis());
    }
}

TEST(Step1, SparseFiberFallsBelowThreshold) {
    FieldParams f(2, 3);
    Subspace v = Subspace::span(f, {{1, 0, 0}, {0, 1, 0}});
    GridSet a(f, f);
    for (uint64_t y = 0; y < 7; ++y)
        for (const auto& xv : v.elements()) a.add(f.encode(xv), y);
    a.add(0, 7);  // lone point: density 1/8 < alpha/2 = 29/128
    PipelineState st = pipeline_init(a, {});
    step1(st);
    for (uint64_t y = 0; y < 7; ++y) EXPECT_TRUE(st.s_set.test(y));
    EXPECT_FALSE(st.s_set.test(7));
}

TEST(Step2, ProductRecoversRowSupportSubspace) {
    FieldParams f(2, 4);
    Subspace v = Subspace::span(f, {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}});
    Subspace w = Subspace::span(f, {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}});
    PipelineState st = pipeline_init(product_set(f, v, w), {});
    step1(st);
    step2(st);
    EXPECT_EQ(st.wprime.basis(), w.basis());
    EXPECT_EQ(st.r2, 1u);
    EXPECT_EQ(st.d, 1u);
    EXPECT_EQ(st.yred.n, 3u);
    for (uint64_t yr = 0; yr < st.yred.size(); ++yr) EXPECT_EQ(st.fiber[yr].basis(), v.basis());
}

TEST(Step2, IntersectionsLandInTwofoldVerticalSupport) {
    FieldParams f(2, 3);
    Rng g(0x51ee);
    GridSet a = GridSet::random(f, f, 0.6, g);
    PipelineState st = pipeline_init(a, {});
    step1(st);
    step2(st);
    CountTable ct = count_table(st.b1, Word("vv"), CountMode::Exact);
    for (uint64_t yr = 0; yr < st.yred.size(); ++yr) {
        uint64_t yi = f.encode(st.wprime.from_coords(st.yred.decode(yr)));
        for (const auto& xv : st.fiber[yr].elements())
            EXPECT_GT(ct.exact[ct.index(f.encode(xv), yi)], 0) << "yr=" << yr;
    }
}

TEST(Step2, WitnessesSumCorrectly) {
    FieldParams f(2, 4);
    Rng h(0x717);
    GridSet a = GridSet::random(f, f, 0.55, h);
    PipelineState st = pipeline_init(a, {});
    step1(st);
    step2(st);
    for (uint64_t yr = 0; yr < st.yred.size(); ++yr) {
        uint64_t yi = f.encode(st.wprime.from_coords(st.yred.decode(yr)));
        auto [s1, s2, s3, s4] = st.reps[yr];
        EXPECT_TRUE(st.s_set.test(s1));
        EXPECT_TRUE(st.s_set.test(s2));
        EXPECT_TRUE(st.s_set.test(s3));
        EXPECT_TRUE(st.s_set.test(s4));
        EXPECT_EQ(f.sub_idx(f.add_idx(s1, s2), f.add_idx(s3, s4)), yi);
    }
}

TEST(Step34, NoOpWhenAllFibersFull) {
    FieldParams f(2, 3);
    GridSet a(f, f);
    for (uint64_t g = 0; g < 64; ++g) a.add(g % 8, g / 8);
    PipelineState st = pipeline_init(a, {});
    step1(st);
    step2(st);
    step34(st);
    EXPECT_EQ(st.d, 0u);
    EXPECT_TRUE(st.chosen.empty());
    EXPECT_EQ(st.qspan.dim(), 0u);
    EXPECT_EQ(st.t_set.size(), st.yred.size());
    EXPECT_EQ(st.r3, 0u);
    EXPECT_TRUE(st.lin.empty());
}

TEST(Step34, ConstantFiberNeedsOneRound) {
    FieldParams f(2, 3);
    Subspace v0 = Subspace::span(f, {{1, 0, 0}, {0, 1, 0}});
    GridSet a(f, f);
    for (uint64_t y = 0; y < 8; ++y)
        for (const auto& xv : v0.elements()) a.add(f.encode(xv), y);
    for (uint64_t seed = 0; seed < 4; ++seed) {
        PipelineConfig cfg;
        cfg.seed = seed;
        PipelineState st = pipeline_init(a, cfg);
        step1(st);
        step2(st);
        step34(st);
        EXPECT_FALSE(st.stalled);
        EXPECT_EQ(st.fam.maps.size(), 1u) << "seed " << seed;
        EXPECT_GE(st.t_set.density(), mpq_class(1, 2)) << "seed " << seed;
        // the single map's flagged values span the common annihilator direction
        Subspace u0 = v0.annihilator();
        for (uint64_t yr = 0; yr < st.yred.size(); ++yr)
            if (!st.fam.flagged[yr].empty()) EXPECT_TRUE(u0.contains(st.fam.maps[0].apply(st.yred.decode(yr))));
    }
}

TEST(Step34, PlantedLinearFamilyIsRecoverable) {
    // exact fibers handed to the discovery loop: U_y = span{My} for the
    // identity M forces the family to contain M itself
    FieldParams f(2, 3);
    FiberedSubspaces u(f, f);
    for (uint64_t y = 0; y < 8; ++y) u.sub[y] = Subspace::span(f, {f.decode(y)});
    FamilyState st(f, f);
    Rng r(0);
    uint32_t round = 0;
    for (; round < 16; ++round) {
        bool all = true;
        for (uint64_t y = 0; y < 8; ++y)
            if (!st.covered(y, u.at(y))) all = false;
        if (all) break;
        auto out = intersect_search(u, st, r.child(round));
        ASSERT_TRUE(out.has_value());
        uint32_t idx = uint32_t(st.maps.size());
        st.maps.push_back(out->map);
        for (uint64_t x : out->fresh.members()) st.flagged[x].push_back(idx);
        st.rounds++;
    }
    for (uint64_t y = 0; y < 8; ++y) EXPECT_TRUE(st.covered(y, u.at(y)));
    MapFamily mf(f, f);
    for (const auto& m : st.maps) {
        AffineMap am(f, f);
        am.matrix = m.matrix;
        mf.push(std::move(am));
    }
    EXPECT_TRUE(mf.matrix_span().contains(mat_flatten(mat_identity(3))));
    EXPECT_EQ(st.maps.size(), 1u);
}

TEST(Step34, PlantedFormKeepsDenseGoodSet) {
    FieldParams f(2, 3);
    Mat m = mat_identity(3);
    GridSet a = form_set(f, m);
    for (uint64_t seed = 0; seed < 4; ++seed) {
        PipelineConfig cfg;
        cfg.seed = seed;
        PipelineState st = pipeline_init(a, cfg);
        step1(st);
        step2(st);
        step34(st);
        EXPECT_FALSE(st.stalled) << "seed " << seed;
        EXPECT_GE(st.t_set.density(), mpq_class(1, 2)) << "seed " << seed;
        EXPECT_LE(st.r3, 4 * st.d) << "seed " << seed;
    }
}

TEST(Step5, SubspaceGoodSetGivesItself) {
    FieldParams f(2, 4);
    Subspace v = Subspace::span(f, {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}});
    Subspace w = Subspace::span(f, {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}});
    PipelineState st = pipeline_init(product_set(f, v, w), {});
    step1(st);
    step2(st);
    step34(st);
    step5(st);
    if (st.t_set.size() == st.yred.size()) {
        EXPECT_EQ(st.wsub.dim(), st.yred.n);
        EXPECT_EQ(st.delta_t, 1);
    }
    EXPECT_GT(st.delta_t, 0);
}

TEST(Step5, SamplerYieldsValidTranslates) {
    FieldParams f(2, 3);
    GridSet a(f, f);
    for (uint64_t g = 0; g < 64; ++g) a.add(g % 8, g / 8);
    PipelineState st = pipeline_init(a, {});
    step1(st);
    step2(st);
    step34(st);
    step5(st);
    Rng r(0x5a);
    for (const auto& yv : st.wsub.elements()) {
        uint64_t y = st.yred.encode(yv);
        auto t = sample_t_triple(st, y, r);
        ASSERT_TRUE(t.has_value());
        auto [a1, a2, a3] = *t;
        uint64_t a4 = st.yred.sub_idx(st.yred.sub_idx(st.yred.add_idx(a1, a2), a3), y);
        EXPECT_TRUE(st.t_set.test(a1));
        EXPECT_TRUE(st.t_set.test(a2));
        EXPECT_TRUE(st.t_set.test(a3));
        EXPECT_TRUE(st.t_set.test(a4));
    }
}

TEST(Pipeline, FullGridReturnsFullVariety) {
    FieldParams f(2, 3);
    GridSet a(f, f);
    for (uint64_t g = 0; g < 64; ++g) a.add(g % 8, g / 8);
    auto res = run_pipeline(a);
    EXPECT_EQ(res.variety.r(), 0u);
    EXPECT_TRUE(res.cert.pass);
    EXPECT_TRUE(res.cert.exhaustive);
    EXPECT_EQ(res.variety.member_count(), mpz_class(64));
    EXPECT_TRUE(res.state.degraded.empty());
}

TEST(Pipeline, ProductSetCertifies) {
    FieldParams f(2, 4);
    Subspace v = Subspace::span(f, {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}});
    Subspace w = Subspace::span(f, {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}});
    GridSet a = product_set(f, v, w);
    PipelineConfig cfg;
    cfg.seed = 7;
    auto res = run_pipeline(a, cfg);
    EXPECT_TRUE(res.cert.pass);
    EXPECT_TRUE(res.cert.exhaustive);
    EXPECT_GT(res.cert.min_normalized, 0);
    EXPECT_TRUE(res.variety.member(f.zero(), f.zero()));
    EXPECT_EQ(mpz_class(res.cert.checked), res.variety.member_count());
    // every variety point stays inside the planted product
    for (auto [x, y] : res.variety.members(1 << 10)) EXPECT_TRUE(a.test(x, y));
}

TEST(Pipeline, LedgerMatchesVariety) {
    FieldParams f(2, 4);
    Mat m(4, 4);
    m.at(0, 0) = 1;
    GridSet a = form_set(f, m);
    for (uint64_t seed : {1ull, 2ull, 3ull}) {
        PipelineConfig cfg;
        cfg.seed = seed;
        auto res = run_pipeline(a, cfg);
        EXPECT_EQ(res.variety.r1(), res.state.r1);
        EXPECT_EQ(res.variety.r2(), res.state.r2);
        EXPECT_EQ(res.variety.r3(), res.state.r3);
        EXPECT_TRUE(res.cert.pass);
    }
}

TEST(Pipeline, RandomDenseInstancesCertify) {
    FieldParams f(2, 4);
    for (uint64_t seed : {3ull, 4ull, 5ull}) {
        Rng g(seed);
        GridSet a = GridSet::random(f, f, 0.5, g);
        PipelineConfig cfg;
        cfg.seed = seed;
        auto res = run_pipeline(a, cfg);
        EXPECT_TRUE(res.cert.pass) << "seed " << seed;
        EXPECT_TRUE(res.variety.member(f.zero(), f.zero()));
        if (res.variety.v.dim() + res.variety.w.dim() >= 1) EXPECT_GE(res.variety.member_count(), mpz_class(2));
    }
}

TEST(Pipeline, RerunsAreBitIdentical) {
    FieldParams f(2, 4);
    Rng g1(99), g2(99);
    GridSet a1 = GridSet::random(f, f, 0.45, g1);
    GridSet a2 = GridSet::random(f, f, 0.45, g2);
    PipelineConfig cfg;
    cfg.seed = 13;
    auto r1 = run_pipeline(a1, cfg);
    auto r2 = run_pipeline(a2, cfg);
    EXPECT_EQ(r1.variety.v.basis(), r2.variety.v.basis());
    EXPECT_EQ(r1.variety.w.basis(), r2.variety.w.basis());
    ASSERT_EQ(r1.variety.forms.size(), r2.variety.forms.size());
    for (size_t i = 0; i < r1.variety.forms.size(); ++i) EXPECT_EQ(r1.variety.forms[i].a, r2.variety.forms[i].a);
    EXPECT_EQ(r1.cert.min_normalized, r2.cert.min_normalized);
    EXPECT_EQ(r1.cert.epsilon, r2.cert.epsilon);
    EXPECT_EQ(r1.cert.checked, r2.cert.checked);
    EXPECT_EQ(r1.state.degraded, r2.state.degraded);
    EXPECT_EQ(r1.state.timings, r2.state.timings);
}

TEST(Pipeline, EmptyInputThrows) {
    FieldParams f(2, 3);
    GridSet a(f, f);
    EXPECT_THROW(pipeline_init(a, {}), std::invalid_argument);
}

TEST(Pipeline, TimingsStayZeroUnlessRequested) {
    FieldParams f(2, 3);
    GridSet a(f, f);
    for (uint64_t g = 0; g < 64; ++g) a.add(g % 8, g / 8);
    auto quiet = run_pipeline(a);
    for (const auto& [k, v] : quiet.state.timings) EXPECT_EQ(v, 0.0) << k;
    PipelineConfig cfg;
    cfg.timings = true;
    auto timed = run_pipeline(a, cfg);
    EXPECT_GT(timed.state.timings.at("total"), 0.0);
}

TEST(PipelineRobust, ProductSetExactConstants) {
    FieldParams f(2, 4);
    Subspace v = Subspace::span(f, {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}});
    Subspace w = Subspace::span(f, {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}});
    GridSet a = product_set(f, v, w);
    PipelineConfig cfg;
    cfg.seed = 5;
    auto res = run_pipeline_robust(a, cfg);
    EXPECT_TRUE(res.cert.pass);
    EXPECT_TRUE(res.cert.exhaustive);
    // subgroup counts are uniform, so every floor is a clean power of two
    EXPECT_EQ(res.state.eps1, mpq_class(1, 8));
    EXPECT_EQ(res.state.eps2, mpq_class(1, 8));
    EXPECT_EQ(res.state.eps6, pow2_inv(31));
    EXPECT_EQ(res.cert.min_normalized, pow2_inv(511));
    EXPECT_GT(res.state.theta, 0);
    EXPECT_LE(res.state.theta, 1);
}

TEST(PipelineRobust, ComposedFloorNeverExceedsTrueMinimum) {
    FieldParams f(2, 3);
    for (uint64_t seed : {11ull, 12ull, 13ull}) {
        Rng g(seed);
        GridSet a = GridSet::random(f, f, 0.55, g);
        PipelineConfig cfg;
        cfg.seed = seed;
        auto res = run_pipeline_robust(a, cfg);
        EXPECT_GT(res.state.eps_composed, 0) << "seed " << seed;
        EXPECT_LE(res.state.eps_composed, res.cert.min_normalized) << "seed " << seed;
        EXPECT_TRUE(res.cert.pass) << "seed " << seed;
    }
}

TEST(PipelineRobust, DeltaScalesWithGoodPairFraction) {
    FieldParams f(2, 4);
    Mat m(4, 4);
    m.at(0, 0) = 1;
    GridSet a = form_set(f, m);
    PipelineConfig cfg;
    cfg.seed = 2;
    auto res = run_pipeline_robust(a, cfg);
    EXPECT_TRUE(res.cert.pass);
    mpq_class expect = res.state.delta_t * res.state.theta * res.state.theta * res.state.theta * res.state.theta;
    expect.canonicalize();
    if (expect > 0) EXPECT_EQ(res.state.delta_used, expect);
}

TEST(MatKernel, AnnihilatesAndComplementsRank) {
    Rng rng(0x6e7);
    for (uint32_t p : {2u, 3u, 5u}) {
        for (int trial = 0; trial < 8; ++trial) {
            uint32_t rows = 1 + uint32_t(rng.below(4)), cols = 1 + uint32_t(rng.below(4));
            Mat m(rows, cols);
            for (auto& e : m.a) e = uint8_t(rng.below(p));
            Subspace k = mat_kernel(m, p);
            EXPECT_EQ(k.dim() + mat_rank(m, p), cols);
            for (const auto& b : k.basis()) {
                Vec out = mat_apply(m, b, p);
                for (auto d : out) EXPECT_EQ(d, 0);
            }
        }
    }
    EXPECT_EQ(mat_kernel(mat_identity(3), 2).dim(), 0u);
    Mat z(2, 3);
    EXPECT_EQ(mat_kernel(z, 3).dim(), 3u);
}
