#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "bbr/approx_hom.hpp"
#include "bbr/bogolyubov.hpp"
#include "bbr/conv.hpp"
#include "bbr/dense_set.hpp"
#include "bbr/field.hpp"
#include "bbr/grid.hpp"
#include "bbr/map_subspace.hpp"
#include "bbr/maps.hpp"
#include "bbr/phi.hpp"
#include "bbr/rng.hpp"
#include "bbr/subspace.hpp"
#include "bbr/variety.hpp"

namespace bbr {

struct PipelineConfig {
    Word word = Word::standard();
    bool robust = false;
    CountMode arithmetic = CountMode::Exact;
    uint32_t triple_samples = 512;   // sampling budget when triple space is too big to enumerate
    uint32_t t_max = 64;             // discovery rounds
    uint32_t search_attempts = 32;
    uint64_t seed = 0;
    uint64_t enumeration_cap = uint64_t(1) << 16;
    uint32_t verify_samples = 256;
    std::optional<mpq_class> rho_sq;
    bool timings = false;
};

struct VarietyCertificate {
    std::string word;
    bool robust = false;
    uint64_t checked = 0;
    bool exhaustive = true;
    mpq_class epsilon = 0;         // robust threshold; for plain runs the strongest passing one
    mpq_class min_normalized = 0;  // min normalized count over checked points
    bool pass = false;
};

struct PipelineState {
    GridSet a;
    PipelineConfig cfg;
    mpq_class alpha;
    Rng root{0};

    // fiberwise difference subspaces
    DenseSet s_set;
    std::vector<std::optional<SpectralResult>> fiber_res;
    uint32_t d1 = 0;
    GridSet b1;
    mpq_class eps1 = 1;

    // y-side subspace and reindexing
    std::optional<SpectralResult> wprime_res;
    Subspace wprime;
    FieldParams yred;
    std::vector<Subspace> fiber;                 // V_y in F^m, indexed by reduced y
    std::vector<std::array<uint64_t, 4>> reps;   // witnesses y = s1+s2-s3-s4
    uint32_t d = 0;
    GridSet b2;
    mpq_class eps2 = 1;

    // map discovery and x-side reindexing
    FamilyState fam;
    bool stalled = false;
    std::vector<AffineMap> chosen;
    uint64_t z_pick = 0, w_pick = 0;
    Subspace qspan;
    Subspace rsub;
    FieldParams xred;
    std::vector<Mat> lin;           // reduced-codomain linear maps, xred.n x yred.n
    std::vector<Mat> forms;         // matching bilinear forms in original coordinates
    std::vector<Subspace> fiber_red;
    DenseSet t_set;
    mpq_class theta = 1;

    // y-side subspace of the good set
    std::optional<SpectralResult> w_res;
    Subspace wsub;
    mpq_class delta_t = 0;

    // final x-side subspace
    Subspace zsub, vsub;
    PeelStats peel;
    mpq_class delta_used = 0;
    mpq_class eps6 = 1, eps_composed = 1;

    uint32_t r1 = 0, r2 = 0, r3 = 0;
    std::vector<std::string> degraded;
    std::map<std::string, double> timings;
};

namespace detail {

inline mpq_class mpq_pow(const mpq_class& q, uint64_t e) {
    mpq_class out;
    mpz_pow_ui(out.get_num().get_mpz_t(), q.get_num().get_mpz_t(), static_cast<unsigned long>(e));
    mpz_pow_ui(out.get_den().get_mpz_t(), q.get_den().get_mpz_t(), static_cast<unsigned long>(e));
    return out;  // powers of a canonical rational stay canonical
}

inline Subspace affine_values_span(const std::vector<AffineMap>& maps, const Vec& at, const FieldParams& cod) {
    std::vector<Vec> gens;
    gens.reserve(maps.size());
    for (const auto& l : maps) gens.push_back(l.apply(at));
    return Subspace::span(cod, std::move(gens));
}

// span of the embedded basis: rows of bt are the target-ambient images of the
// reduced unit vectors.
inline Subspace embed_subspace(const Subspace& s, const Mat& emb, const FieldParams& big, uint32_t p) {
    std::vector<Vec> gens;
    gens.reserve(s.dim());
    for (const auto& b : s.basis()) gens.push_back(mat_apply(emb, b, p));
    return Subspace::span(big, std::move(gens));
}

inline Mat basis_matrix(const Subspace& s) {
    Mat m(s.dim(), s.ambient().n);
    for (uint32_t r = 0; r < s.dim(); ++r)
        for (uint32_t c = 0; c < s.ambient().n; ++c) m.at(r, c) = s.basis()[r][c];
    return m;
}

}  // namespace detail

// P - Q together with the exact popularity floor: every element of P - Q has
// at least |P cap Q| representations p - q, one per shift by the intersection.
struct DiffEta {
    Subspace diff;
    mpq_class eta;
};

inline DiffEta subspace_diff_eta(const Subspace& p_sub, const Subspace& q_sub) {
    if (p_sub.ambient() != q_sub.ambient()) throw std::invalid_argument("subspace_diff_eta: ambient mismatch");
    const FieldParams& f = p_sub.ambient();
    Subspace diff = p_sub.sum(q_sub);  // subspaces are symmetric, so P - Q = P + Q
    Subspace meet = p_sub.intersect(q_sub);
    mpz_class num, den;
    mpz_ui_pow_ui(num.get_mpz_t(), f.p, meet.dim());
    mpz_ui_pow_ui(den.get_mpz_t(), f.p, f.n);
    mpq_class eta(num, den);
    eta.canonicalize();
    return {std::move(diff), std::move(eta)};
}

inline PipelineState pipeline_init(const GridSet& a, PipelineConfig cfg) {
    if (a.empty()) throw std::invalid_argument("pipeline: input set is empty");
    PipelineState st;
    st.a = a;
    st.cfg = std::move(cfg);
    st.alpha = a.density();
    st.root = Rng(st.cfg.seed);
    st.s_set = DenseSet(a.yside());
    st.fiber_res.resize(a.ysize());
    st.b1 = GridSet(a.xside(), a.yside());
    st.b2 = GridSet(a.xside(), a.yside());
    for (const char* k : {"step1", "step2", "step34", "step5", "step6", "certify", "total"}) st.timings[k] = 0.0;
    return st;
}

// Fiberwise difference subspaces on the dense rows.
inline void step1(PipelineState& st) {
    const FieldParams& yf = st.a.yside();
    mpq_class half = st.alpha / 2;
    for (uint64_t y = 0; y < yf.size(); ++y) {
        DenseSet ay = st.a.fiber_x(y);
        if (ay.empty()) continue;
        if (ay.density() < half) continue;
        st.s_set.add(y);
        RepTable rep = diff_rep_counts(ay);
        SpectralResult res = bogolyubov_subspace(ay, st.cfg.rho_sq, &rep);
        if (!res.cert.sound) throw std::logic_error("step1: fiber subspace escapes its difference support");
        st.d1 = std::max(st.d1, res.v.codim());
        for (const auto& xv : res.v.elements()) st.b1.add(st.a.xside().encode(xv), y);
        st.fiber_res[y] = std::move(res);
    }
    if (st.s_set.empty()) throw std::logic_error("step1: no dense rows");
    if (st.cfg.robust) {
        // floor of the two-step horizontal table over the fiber grid; this is
        // the constant that survives word composition later
        CountTable ct = count_table(st.a, Word("hh"), CountMode::Exact);
        bool first = true;
        for (uint64_t g = 0; g < st.b1.grid_size(); ++g) {
            if (!st.b1.test_raw(g)) continue;
            mpq_class c = ct.normalized(g % st.b1.xsize(), g / st.b1.xsize());
            if (first || c < st.eps1) st.eps1 = c;
            first = false;
        }
        if (st.eps1 == 0) throw std::logic_error("step1: a fiber subspace point has no twofold realizations");
    }
}

// y-side subspace of the dense-row set, quadruple fiber intersections,
// reindex y to the subspace's coordinates.
inline void step2(PipelineState& st) {
    const FieldParams& xf = st.a.xside();
    const FieldParams& yf = st.a.yside();
    RepTable rep = diff_rep_counts(st.s_set);
    st.wprime_res = bogolyubov_subspace(st.s_set, st.cfg.rho_sq, &rep);
    if (!st.wprime_res->cert.sound) throw std::logic_error("step2: subspace escapes the difference support");
    st.wprime = st.wprime_res->v;
    st.r2 += st.wprime.codim();
    st.yred = FieldParams(yf.p, st.wprime.dim());
    st.fiber.assign(st.yred.size(), Subspace::zero(xf));
    st.reps.assign(st.yred.size(), {});
    Rng rrng = st.root.child(0x20);
    for (uint64_t yr = 0; yr < st.yred.size(); ++yr) {
        Vec y = st.wprime.from_coords(st.yred.decode(yr));
        uint64_t yi = yf.encode(y);
        auto witness = find_representation(yi, st.s_set, rrng.child(yr));
        if (!witness) throw std::logic_error("step2: no fourfold representation found");
        Subspace vy = st.fiber_res[(*witness)[0]]->v;
        for (int i = 1; i < 4; ++i) vy = vy.intersect(st.fiber_res[(*witness)[i]]->v);
        if (vy.codim() > 4 * st.d1) throw std::logic_error("step2: intersection codim exceeds 4d");
        st.d = std::max(st.d, vy.codim());
        for (const auto& xv : vy.elements()) st.b2.add(xf.encode(xv), yi);
        st.fiber[yr] = std::move(vy);
        st.reps[yr] = *witness;
    }
    if (st.cfg.robust) {
        CountTable ct = count_table(st.b1, Word("vv"), CountMode::Exact);
        bool first = true;
        for (uint64_t yr = 0; yr < st.yred.size(); ++yr) {
            uint64_t yi = yf.encode(st.wprime.from_coords(st.yred.decode(yr)));
            for (const auto& xv : st.fiber[yr].elements()) {
                mpq_class c = ct.normalized(xf.encode(xv), yi);
                if (first || c < st.eps2) st.eps2 = c;
                first = false;
            }
        }
        if (st.eps2 == 0) throw std::logic_error("step2: a point of the intersection grid has no realizations");
    }
}

namespace detail {

// (U_z + U_{y+z}) cap (U_w + U_{y+w})
inline Subspace pair_intersection(const FiberedSubspaces& u, const FieldParams& yred, uint64_t y, uint64_t z,
                                  uint64_t w) {
    Subspace left = u.at(z).sum(u.at(yred.add_idx(y, z)));
    Subspace right = u.at(w).sum(u.at(yred.add_idx(y, w)));
    return left.intersect(right);
}

inline Subspace family_span4(const FamilyState& fam, const FieldParams& yred, uint64_t y, uint64_t z, uint64_t w) {
    return fam.span_at(z)
        .sum(fam.span_at(yred.add_idx(y, z)))
        .sum(fam.span_at(w))
        .sum(fam.span_at(yred.add_idx(y, w)));
}

}  // namespace detail

// Map discovery over the fiber annihilators, popular-quadruple selection,
// linearization, x-side reindex to the offset-free subspace.
inline void step34(PipelineState& st) {
    const FieldParams& xf = st.a.xside();
    const uint32_t p = xf.p;
    st.fam = FamilyState(st.yred, xf);
    if (st.d == 0) {
        st.qspan = Subspace::zero(xf);
        st.rsub = Subspace::full(xf);
        st.xred = xf;
        st.fiber_red = st.fiber;
        st.t_set = DenseSet::full(st.yred);
        st.theta = 1;
        return;
    }
    FiberedSubspaces u(st.yred, xf);
    for (uint64_t yr = 0; yr < st.yred.size(); ++yr) u.sub[yr] = st.fiber[yr].annihilator();

    uint64_t ysz = st.yred.size();
    bool enumerate_triples = ysz * ysz * ysz <= (uint64_t(1) << 16);
    auto event_rate_half = [&](uint32_t round) {
        // exact when the triple space is small, else a seeded sample
        uint64_t good = 0, total = 0;
        if (enumerate_triples) {
            for (uint64_t y = 0; y < ysz; ++y)
                for (uint64_t z = 0; z < ysz; ++z)
                    for (uint64_t w = 0; w < ysz; ++w) {
                        Subspace lhs = detail::pair_intersection(u, st.yred, y, z, w);
                        if (detail::family_span4(st.fam, st.yred, y, z, w).contains(lhs)) ++good;
                        ++total;
                    }
        } else {
            Rng srng = st.root.child(0x35).child(round);
            for (uint32_t i = 0; i < st.cfg.triple_samples; ++i) {
                uint64_t y = srng.below(ysz), z = srng.below(ysz), w = srng.below(ysz);
                Subspace lhs = detail::pair_intersection(u, st.yred, y, z, w);
                if (detail::family_span4(st.fam, st.yred, y, z, w).contains(lhs)) ++good;
                ++total;
            }
        }
        return 2 * good >= total;
    };

    Rng drng = st.root.child(0x34);
    uint32_t round = 0;
    for (; round < st.cfg.t_max; ++round) {
        if (event_rate_half(round)) break;
        auto out = intersect_search(u, st.fam, drng.child(round), st.cfg.triple_samples, st.cfg.search_attempts);
        if (!out) {
            st.stalled = true;
            st.degraded.push_back("discovery_stall");
            break;
        }
        uint32_t idx = uint32_t(st.fam.maps.size());
        st.fam.maps.push_back(out->map);
        for (uint64_t x : out->fresh.members()) st.fam.flagged[x].push_back(idx);
        st.fam.rounds++;
    }
    if (round == st.cfg.t_max && !event_rate_half(round)) {
        st.stalled = true;
        st.degraded.push_back("discovery_stall");
    }

    // most popular quadruple of per-point subfamilies, then the best (z, w)
    using Key = std::array<std::vector<uint32_t>, 4>;
    std::map<Key, uint64_t> tally;
    std::map<Key, std::map<std::pair<uint64_t, uint64_t>, uint64_t>> zw_tally;
    auto consider = [&](uint64_t y, uint64_t z, uint64_t w) {
        Subspace lhs = detail::pair_intersection(u, st.yred, y, z, w);
        if (!detail::family_span4(st.fam, st.yred, y, z, w).contains(lhs)) return;
        Key k{st.fam.flagged[z], st.fam.flagged[st.yred.add_idx(y, z)], st.fam.flagged[w],
              st.fam.flagged[st.yred.add_idx(y, w)]};
        tally[k]++;
        zw_tally[k][{z, w}]++;
    };
    if (enumerate_triples) {
        for (uint64_t y = 0; y < ysz; ++y)
            for (uint64_t z = 0; z < ysz; ++z)
                for (uint64_t w = 0; w < ysz; ++w) consider(y, z, w);
    } else {
        Rng qrng = st.root.child(0x40);
        for (uint32_t i = 0; i < st.cfg.triple_samples; ++i)
            consider(qrng.below(ysz), qrng.below(ysz), qrng.below(ysz));
    }
    if (tally.empty()) {
        st.degraded.push_back("no_popular_quadruple");
    } else {
        const Key* best = nullptr;
        uint64_t best_count = 0;
        for (const auto& [k, c] : tally)
            if (c > best_count) {
                best = &k;
                best_count = c;
            }
        std::vector<uint32_t> merged;
        for (const auto& part : *best) merged.insert(merged.end(), part.begin(), part.end());
        std::sort(merged.begin(), merged.end());
        merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
        for (uint32_t i : merged) st.chosen.push_back(st.fam.maps[i]);
        uint64_t zw_best = 0;
        std::pair<uint64_t, uint64_t> zw{0, 0};
        for (const auto& [pr, c] : zw_tally[*best])
            if (c > zw_best) {
                zw = pr;
                zw_best = c;
            }
        st.z_pick = zw.first;
        st.w_pick = zw.second;
    }

    // offsets and the fixed-point values span Q; x restricts to its annihilator
    Vec zv = st.yred.decode(st.z_pick), wv = st.yred.decode(st.w_pick);
    std::vector<Vec> qgens;
    for (const auto& l : st.chosen) {
        qgens.push_back(l.apply(zv));
        qgens.push_back(l.apply(wv));
        qgens.push_back(l.offset);
    }
    if (st.cfg.robust) {
        // no (z, w) gets fixed; only the offsets need to vanish
        qgens.clear();
        for (const auto& l : st.chosen) qgens.push_back(l.offset);
    }
    st.qspan = Subspace::span(xf, std::move(qgens));
    st.rsub = st.qspan.annihilator();
    st.r1 += st.qspan.dim();
    st.xred = FieldParams(p, st.rsub.dim());

    Mat br = detail::basis_matrix(st.rsub);  // xred.n x m
    Mat pmat(st.yred.n, st.a.yside().n);     // pivot extraction for the y-side reindex
    for (uint32_t r = 0; r < st.yred.n; ++r) pmat.at(r, st.wprime.pivots()[r]) = 1;
    for (const auto& l : st.chosen) {
        Mat red = mat_mul(br, l.matrix, p);
        if (red.is_zero()) continue;
        st.lin.push_back(red);
        st.forms.push_back(mat_mul(l.matrix, pmat, p));
    }
    st.r3 = uint32_t(st.lin.size());

    // fibers in the reduced x-coordinates: preimages under the embedding
    Mat emb = mat_transpose(br);
    st.fiber_red.assign(st.yred.size(), Subspace::zero(st.xred));
    for (uint64_t yr = 0; yr < st.yred.size(); ++yr) {
        Mat k(xf.n, st.xred.n);
        for (uint32_t j = 0; j < st.xred.n; ++j) {
            Vec col = st.fiber[yr].reduce(mat_apply(emb, st.xred.unit(j), p));
            for (uint32_t r = 0; r < xf.n; ++r) k.at(r, j) = col[r];
        }
        st.fiber_red[yr] = mat_kernel(k, p);
    }

    st.t_set = DenseSet(st.yred);
    if (st.cfg.robust) {
        // good pairs per point, exact enumeration
        mpz_class pairs_total = mpz_class(ysz) * ysz;
        bool first = true;
        for (uint64_t y = 0; y < ysz; ++y) {
            uint64_t good = 0;
            for (uint64_t z = 0; z < ysz; ++z)
                for (uint64_t w = 0; w < ysz; ++w) {
                    std::vector<Vec> gens;
                    Vec yv = st.yred.decode(y), zv2 = st.yred.decode(z), wv2 = st.yred.decode(w);
                    for (const auto& m : st.lin) {
                        gens.push_back(mat_apply(m, yv, p));
                        gens.push_back(mat_apply(m, zv2, p));
                        gens.push_back(mat_apply(m, wv2, p));
                    }
                    Subspace lhs = Subspace::span(st.xred, std::move(gens)).annihilator();
                    Subspace rhs = st.fiber_red[z]
                                       .intersect(st.fiber_red[st.yred.add_idx(y, z)])
                                       .sum(st.fiber_red[w].intersect(st.fiber_red[st.yred.add_idx(y, w)]));
                    if (rhs.contains(lhs)) ++good;
                }
            if (good == 0) continue;
            st.t_set.add(y);
            mpq_class frac(good, pairs_total);
            frac.canonicalize();
            if (first || frac < st.theta) st.theta = frac;
            first = false;
        }
        if (st.t_set.empty()) {
            st.theta = 0;
            st.degraded.push_back("empty_t");
        }
    } else {
        // exact membership at the fixed (z, w)
        for (uint64_t y = 0; y < ysz; ++y) {
            Subspace lhs = detail::pair_intersection(u, st.yred, y, st.z_pick, st.w_pick);
            Subspace rhs = detail::affine_values_span(st.chosen, zv, xf)
                               .sum(detail::affine_values_span(st.chosen, st.yred.decode(st.yred.add_idx(y, st.z_pick)), xf))
                               .sum(detail::affine_values_span(st.chosen, wv, xf))
                               .sum(detail::affine_values_span(st.chosen, st.yred.decode(st.yred.add_idx(y, st.w_pick)), xf));
            if (rhs.contains(lhs)) st.t_set.add(y);
        }
        if (st.t_set.empty()) st.degraded.push_back("empty_t");
    }
}

// y-side subspace of the good set, with its exact fourfold floor.
inline void step5(PipelineState& st) {
    if (st.t_set.empty()) {
        st.wsub = Subspace::zero(st.yred);
        st.delta_t = 0;
        st.r2 += st.yred.n;
        return;
    }
    RepTable rep = diff_rep_counts(st.t_set);
    st.w_res = bogolyubov_subspace(st.t_set, st.cfg.rho_sq, &rep);
    if (!st.w_res->cert.sound) throw std::logic_error("step5: subspace escapes the difference support");
    st.wsub = st.w_res->v;
    st.r2 += st.wsub.codim();
    st.delta_t = st.w_res->cert.min_normalized;
}

// Uniform triple with all four translates inside the good set.
inline std::optional<std::array<uint64_t, 3>> sample_t_triple(const PipelineState& st, uint64_t y, Rng& rng,
                                                              uint32_t budget = 4096) {
    uint64_t n = st.yred.size();
    for (uint32_t i = 0; i < budget; ++i) {
        uint64_t a = rng.below(n), b = rng.below(n), c = rng.below(n);
        uint64_t dd = st.yred.sub_idx(st.yred.sub_idx(st.yred.add_idx(a, b), c), y);
        if (st.t_set.test(a) && st.t_set.test(b) && st.t_set.test(c) && st.t_set.test(dd)) return {{a, b, c}};
    }
    return std::nullopt;
}

// Lifted low-rank peeling on the reduced maps, final assembly in the
// original coordinates.
inline BilinearVariety step6(PipelineState& st) {
    const FieldParams& xf = st.a.xside();
    const FieldParams& yf = st.a.yside();
    const uint32_t p = xf.p;
    uint32_t slots = st.cfg.robust ? 11 : 3;
    st.delta_used = st.cfg.robust ? mpq_class(st.delta_t * detail::mpq_pow(st.theta, 4)) : st.delta_t;
    st.delta_used.canonicalize();
    if (st.delta_used <= 0) {
        st.delta_used = 1;
        st.degraded.push_back("trivial_delta");
    }
    st.zsub = map_subspace_lifted(st.lin, slots, st.delta_used, p, st.xred.n, uint64_t(1) << 12, st.root.child(0x66),
                                  &st.peel);
    if (!st.peel.exhaustive) st.degraded.push_back("min_rank_sampled");
    {
        // runtime check of the dimension bound, with the ceiling of log_p(1/delta)
        std::vector<Mat> basis = detail::span_basis_mats(st.lin, p);
        uint64_t k = uint64_t(basis.size()) * slots;
        mpq_class inv = 1 / st.delta_used;
        uint64_t t = 0;
        mpq_class pw = 1;
        while (pw < inv) {
            pw *= p;
            ++t;
        }
        if (k > 0 && uint64_t(st.zsub.dim()) > k * (2 * k + t + 3))
            throw std::logic_error("step6: peel output exceeds its dimension bound");
    }
    st.vsub = st.zsub.annihilator();
    st.r1 += st.zsub.dim();

    Mat embx = mat_transpose(detail::basis_matrix(st.rsub));
    Mat emby = mat_transpose(detail::basis_matrix(st.wprime));
    Subspace v_orig = detail::embed_subspace(st.vsub, embx, xf, p);
    Subspace w_orig = detail::embed_subspace(st.wsub, emby, yf, p);
    BilinearVariety bv(xf, yf, v_orig, w_orig, st.forms);
    if (bv.r1() != st.r1 || bv.r2() != st.r2 || bv.r3() != st.r3)
        throw std::logic_error("step6: codimension ledger mismatch");
    return bv;
}

namespace detail {

inline mpq_class table_normalized(const CountTable& ct, uint64_t x, uint64_t y) {
    if (ct.mode == CountMode::Exact) return ct.normalized(x, y);
    mpq_class q(ct.approx[ct.index(x, y)]);
    q.canonicalize();
    return q;
}

}  // namespace detail

// Check the variety against the realization counts of the word on A.
inline VarietyCertificate certify_variety(PipelineState& st, const BilinearVariety& bv) {
    const FieldParams& xf = st.a.xside();
    const FieldParams& yf = st.a.yside();
    VarietyCertificate cert;
    cert.word = st.cfg.word.letters;
    cert.robust = st.cfg.robust;
    CountTable ct = count_table(st.a, st.cfg.word, st.cfg.arithmetic);
    std::optional<CountTable> ct6;
    if (st.cfg.robust) ct6 = count_table(st.b2, Word("hvvhv"), st.cfg.arithmetic);

    std::vector<std::pair<uint64_t, uint64_t>> points;
    mpz_class total = bv.member_count();
    cert.exhaustive = total <= mpz_class(st.cfg.enumeration_cap);
    if (cert.exhaustive) {
        points = bv.members(st.cfg.enumeration_cap);
    } else {
        st.degraded.push_back("verification_sampled");
        points.emplace_back(0, 0);
        for (const auto& b : bv.v.basis()) points.emplace_back(xf.encode(b), 0);
        for (const auto& b : bv.w.basis()) points.emplace_back(0, yf.encode(b));
        Rng vrng = st.root.child(0x77);
        FieldParams wc(yf.p, bv.w.dim());
        for (uint32_t i = 0; i < st.cfg.verify_samples; ++i) {
            Vec y = bv.w.from_coords(wc.decode(vrng.below(wc.size())));
            Subspace sl = bv.slice_x(y);
            FieldParams sc(xf.p, sl.dim());
            Vec x = sl.from_coords(sc.decode(vrng.below(sc.size())));
            points.emplace_back(xf.encode(x), yf.encode(y));
        }
    }

    bool all_positive = true;
    bool first = true;
    mpq_class min6 = 1;
    bool first6 = true;
    for (const auto& [xi, yi] : points) {
        mpq_class c = detail::table_normalized(ct, xi, yi);
        if (first || c < cert.min_normalized) cert.min_normalized = c;
        first = false;
        if (c == 0) all_positive = false;
        if (ct6) {
            mpq_class c6 = detail::table_normalized(*ct6, xi, yi);
            if (first6 || c6 < min6) min6 = c6;
            first6 = false;
        }
    }
    cert.checked = points.size();
    if (st.cfg.robust) {
        st.eps6 = first6 ? mpq_class(0) : min6;
        st.eps_composed = detail::mpq_pow(st.eps1, 128) * detail::mpq_pow(st.eps2, 32) * st.eps6;
        st.eps_composed.canonicalize();
        cert.epsilon = cert.exhaustive ? cert.min_normalized : st.eps_composed;
        cert.pass = cert.min_normalized > 0 && cert.min_normalized >= cert.epsilon;
    } else {
        cert.epsilon = cert.min_normalized;
        cert.pass = all_positive && !first;
    }
    return cert;
}

struct PipelineResult {
    BilinearVariety variety;
    VarietyCertificate cert;
    PipelineState state;
};

inline PipelineResult run_pipeline(const GridSet& a, PipelineConfig cfg = {}) {
    PipelineState st = pipeline_init(a, std::move(cfg));
    auto now = [] { return std::chrono::steady_clock::now(); };
    auto ms = [](auto a_, auto b_) { return std::chrono::duration<double, std::milli>(b_ - a_).count(); };
    auto t0 = now();
    auto mark = [&](const char* key, auto from) {
        if (st.cfg.timings) st.timings[key] = ms(from, std::chrono::steady_clock::now());
    };
    auto t = now();
    step1(st);
    mark("step1", t);
    t = now();
    step2(st);
    mark("step2", t);
    t = now();
    step34(st);
    mark("step34", t);
    t = now();
    step5(st);
    mark("step5", t);
    t = now();
    BilinearVariety bv = step6(st);
    mark("step6", t);
    t = now();
    VarietyCertificate cert = certify_variety(st, bv);
    mark("certify", t);
    mark("total", t0);
    return {std::move(bv), std::move(cert), std::move(st)};
}

inline PipelineResult run_pipeline_robust(const GridSet& a, PipelineConfig cfg = {}) {
    cfg.robust = true;
    return run_pipeline(a, std::move(cfg));
}

}  // namespace bbr
