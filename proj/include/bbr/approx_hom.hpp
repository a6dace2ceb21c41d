#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include <gmpxx.h>

#include "bbr/dense_set.hpp"
#include "bbr/field.hpp"
#include "bbr/maps.hpp"
#include "bbr/rng.hpp"
#include "bbr/subspace.hpp"

namespace bbr {

// Tabulated function F_p^n -> F_p^m, values stored as codomain indices.  An
// optional restriction limits which domain points count as meaningful.
struct FunctionTable {
    FieldParams dom, cod;
    std::vector<uint64_t> val;
    std::optional<DenseSet> restriction;

    FunctionTable() = default;
    FunctionTable(const FieldParams& d, const FieldParams& c) : dom(d), cod(c), val(d.size(), 0) {}

    std::vector<uint64_t> live_points() const {
        if (!restriction) {
            std::vector<uint64_t> all(dom.size());
            for (uint64_t i = 0; i < dom.size(); ++i) all[i] = i;
            return all;
        }
        return restriction->members();
    }

    uint64_t live_count() const { return restriction ? restriction->size() : dom.size(); }
};

struct FitResult {
    AffineMap map;
    mpq_class agreement;   // on the live points
    bool exhaustive = false;
};

inline mpq_class map_agreement(const FunctionTable& f, const AffineMap& m) {
    auto live = f.live_points();
    if (live.empty()) return mpq_class(0);
    uint64_t hit = 0;
    for (uint64_t x : live)
        if (f.cod.encode(m.apply(f.dom.decode(x))) == f.val[x]) ++hit;
    mpq_class q(hit, live.size());
    q.canonicalize();
    return q;
}

// Scan of every affine map, maximizing agreement on the live points.  For a
// fixed matrix the best offset is the mode of the residuals f(z) - Mz, so
// the inner loop is a histogram.  Ties resolve to the smallest (matrix,
// offset) index pair, making the optimum canonical.
inline FitResult affine_fit_exhaustive(const FunctionTable& f) {
    uint32_t p = f.dom.p, n = f.dom.n, m = f.cod.n;
    long double work = 1;
    for (uint32_t i = 0; i < m * (n + 1) + n; ++i) {
        work *= p;
        if (work > (long double)(uint64_t(1) << 26)) throw std::invalid_argument("affine_fit_exhaustive: too large");
    }
    auto live = f.live_points();
    uint64_t mat_total = pow_u64(p, m * n);
    uint64_t off_total = pow_u64(p, m);
    std::vector<uint64_t> hist(off_total);
    uint64_t best_hits = 0, best_mat = 0, best_off = 0;
    bool first = true;
    for (uint64_t mi = 0; mi < mat_total; ++mi) {
        Mat mat(m, n);
        uint64_t t = mi;
        for (uint32_t e = 0; e < m * n; ++e) {
            mat.a[e] = uint8_t(t % p);
            t /= p;
        }
        std::fill(hist.begin(), hist.end(), 0);
        for (uint64_t z : live) {
            uint64_t mz = f.cod.encode(mat_apply(mat, f.dom.decode(z), p));
            hist[f.cod.sub_idx(f.val[z], mz)]++;
        }
        for (uint64_t off = 0; off < off_total; ++off) {
            if (first || hist[off] > best_hits) {
                best_hits = hist[off];
                best_mat = mi;
                best_off = off;
                first = false;
            }
        }
    }
    FitResult r;
    r.map = AffineMap(f.dom, f.cod);
    uint64_t t = best_mat;
    for (uint32_t e = 0; e < m * n; ++e) {
        r.map.matrix.a[e] = uint8_t(t % p);
        t /= p;
    }
    r.map.offset = f.cod.decode(best_off);
    r.agreement = live.empty() ? mpq_class(0) : mpq_class(best_hits, live.size());
    r.agreement.canonicalize();
    r.exhaustive = true;
    return r;
}

// Majority-vote fit: column i of the matrix is the most common difference
// f(z + e_i) - f(z) over live pairs, the offset the most common residual.
// Later trials revote on random half subsets and the best measured map
// wins; everything is seeded, so the answer is reproducible.
inline FitResult affine_fit_heuristic(const FunctionTable& f, Rng rng, uint32_t trials = 8) {
    uint32_t p = f.dom.p, n = f.dom.n;
    auto live = f.live_points();
    FitResult best;
    best.map = AffineMap(f.dom, f.cod);
    best.agreement = -1;
    std::vector<char> in_live(f.dom.size(), 0);
    for (uint64_t z : live) in_live[z] = 1;
    for (uint32_t tr = 0; tr < trials; ++tr) {
        Rng trng = rng.child(tr);
        std::vector<char> keep(f.dom.size(), 1);
        if (tr > 0)
            for (uint64_t z : live) keep[z] = trng.coin() ? 1 : 0;
        AffineMap cand(f.dom, f.cod);
        for (uint32_t i = 0; i < n; ++i) {
            std::map<uint64_t, uint64_t> votes;
            for (uint64_t z : live) {
                if (!keep[z]) continue;
                uint64_t zi = f.dom.add_idx(z, f.dom.encode(f.dom.unit(i)));
                if (!in_live[zi] || !keep[zi]) continue;
                votes[f.cod.sub_idx(f.val[zi], f.val[z])]++;
            }
            uint64_t col = 0, cnt = 0;
            for (const auto& [v, c] : votes)
                if (c > cnt) {
                    cnt = c;
                    col = v;
                }
            Vec cv = f.cod.decode(col);
            for (uint32_t r = 0; r < f.cod.n; ++r) cand.matrix.at(r, i) = cv[r];
        }
        std::map<uint64_t, uint64_t> votes;
        for (uint64_t z : live) {
            if (!keep[z]) continue;
            uint64_t mz = f.cod.encode(mat_apply(cand.matrix, f.dom.decode(z), p));
            votes[f.cod.sub_idx(f.val[z], mz)]++;
        }
        uint64_t off = 0, cnt = 0;
        for (const auto& [v, c] : votes)
            if (c > cnt) {
                cnt = c;
                off = v;
            }
        cand.offset = f.cod.decode(off);
        mpq_class agr = map_agreement(f, cand);
        if (agr > best.agreement) {
            best.map = cand;
            best.agreement = agr;
        }
    }
    best.exhaustive = false;
    return best;
}

inline bool exhaustive_fit_feasible(const FieldParams& dom, const FieldParams& cod) {
    long double work = 1;
    for (uint32_t i = 0; i < cod.n * (dom.n + 1) + dom.n; ++i) {
        work *= dom.p;
        if (work > (long double)(uint64_t(1) << 26)) return false;
    }
    return true;
}

struct RestrictedFit {
    AffineMap map;
    mpq_class agreement;   // on the restriction
    bool exhaustive = false;
    bool enlarged = false;
};

// Fit on a restriction via the enlarged-codomain reduction: extend f off Z
// with seeded random values in two extra coordinates, fit without any
// restriction, truncate the result back to m rows, and measure honestly on
// Z.  The random fill spreads junk votes thin, so a map correct on Z still
// dominates.
inline RestrictedFit fr_on_restriction(const FunctionTable& f, Rng rng) {
    bool full = !f.restriction || f.restriction->size() == f.dom.size();
    if (full) {
        FunctionTable g = f;
        g.restriction.reset();
        FitResult r = exhaustive_fit_feasible(g.dom, g.cod) ? affine_fit_exhaustive(g)
                                                            : affine_fit_heuristic(g, rng.child(1));
        return RestrictedFit{r.map, r.agreement, r.exhaustive, false};
    }
    FieldParams big(f.cod.p, f.cod.n + 2);
    FunctionTable g(f.dom, big);
    for (uint64_t x = 0; x < f.dom.size(); ++x)
        g.val[x] = f.restriction->test(x) ? f.val[x] : rng.below(big.size());
    FitResult r = exhaustive_fit_feasible(g.dom, g.cod) ? affine_fit_exhaustive(g)
                                                        : affine_fit_heuristic(g, rng.child(1));
    AffineMap cut(f.dom, f.cod);
    for (uint32_t row = 0; row < f.cod.n; ++row)
        for (uint32_t c = 0; c < f.dom.n; ++c) cut.matrix.at(row, c) = r.map.matrix.at(row, c);
    for (uint32_t row = 0; row < f.cod.n; ++row) cut.offset[row] = r.map.offset[row];
    RestrictedFit out;
    out.map = std::move(cut);
    out.agreement = map_agreement(f, out.map);
    out.exhaustive = r.exhaustive;
    out.enlarged = true;
    return out;
}

// One subspace of the codomain per domain point.
struct FiberedSubspaces {
    FieldParams dom, cod;
    std::vector<Subspace> sub;

    FiberedSubspaces() = default;
    FiberedSubspaces(const FieldParams& d, const FieldParams& c) : dom(d), cod(c), sub(d.size(), Subspace::zero(c)) {}

    const Subspace& at(uint64_t t) const { return sub[t]; }
    uint32_t max_dim() const {
        uint32_t d = 0;
        for (const auto& s : sub) d = std::max(d, s.dim());
        return d;
    }
};

// Global list of discovered maps plus per-point flags saying which maps are
// counted toward a point's span.
struct FamilyState {
    FieldParams dom, cod;
    std::vector<AffineMap> maps;
    std::vector<std::vector<uint32_t>> flagged;
    uint32_t rounds = 0;

    FamilyState() = default;
    FamilyState(const FieldParams& d, const FieldParams& c) : dom(d), cod(c), flagged(d.size()) {}

    Subspace span_at(uint64_t x) const {
        std::vector<Vec> gens;
        Vec xv = dom.decode(x);
        for (uint32_t i : flagged[x]) gens.push_back(maps[i].apply(xv));
        return Subspace::span(cod, std::move(gens));
    }

    bool covered(uint64_t x, const Subspace& ux) const { return span_at(x).contains(ux); }
};

struct IntersectOutcome {
    AffineMap map;
    DenseSet fresh;              // points where the map lands in U_x outside the flagged span
    mpq_class fresh_density;
    mpq_class fit_agreement;
    bool fit_exhaustive = false;
    std::array<uint64_t, 4> branch_counts{};  // witness case split over sampled triples
    uint32_t branch = 0;
    uint32_t attempts = 0;
};

namespace detail {

// For a sampled triple with a containment failure, pick the first witness
// x in (U_z + U_{y+z}) ^ (U_w + U_{y+w}) outside the flagged spans and
// decompose it as a - b = c - d along the two sums; the four possible
// fresh positions give the case split.
inline void count_branches(const FiberedSubspaces& u, const FamilyState& st, uint64_t y, uint64_t z, uint64_t w,
                           std::array<uint64_t, 4>& cnt) {
    const FieldParams& dom = u.dom;
    const FieldParams& cod = u.cod;
    uint64_t yz = dom.add_idx(y, z), yw = dom.add_idx(y, w);
    Subspace lhs = u.at(z).sum(u.at(yz)).intersect(u.at(w).sum(u.at(yw)));
    Subspace rhs = st.span_at(z).sum(st.span_at(yz)).sum(st.span_at(w)).sum(st.span_at(yw));
    if (rhs.contains(lhs)) return;
    Vec witness;
    bool found = false;
    for (const auto& x : lhs.elements()) {
        if (cod.is_zero(x)) continue;
        if (!rhs.contains(x)) {
            witness = x;
            found = true;
            break;
        }
    }
    if (!found) return;
    auto decompose = [&](const Subspace& from, const Subspace& to, Vec& hi, Vec& lo) {
        for (const auto& b : from.elements()) {
            Vec a = cod.add(witness, b);
            if (to.contains(a)) {
                hi = a;
                lo = b;
                return true;
            }
        }
        return false;
    };
    Vec a, b, c, d;
    if (!decompose(u.at(z), u.at(yz), a, b)) return;
    if (!decompose(u.at(w), u.at(yw), c, d)) return;
    bool a_fresh = !st.span_at(yz).contains(a);
    bool b_fresh = !st.span_at(z).contains(b);
    bool c_fresh = !st.span_at(yw).contains(c);
    bool d_fresh = !st.span_at(w).contains(d);
    // x outside both flagged sums forces one fresh value on each side.
    if (a_fresh && c_fresh) cnt[0]++;
    if (a_fresh && d_fresh) cnt[1]++;
    if (b_fresh && c_fresh) cnt[2]++;
    if (b_fresh && d_fresh) cnt[3]++;
}

}  // namespace detail

// Search for one affine map that lands inside U_x but outside the already
// flagged span on a positive fraction of points.  A uniformly sampled
// selection f(x) in U_x marks the honest points Z; the restricted fitter
// turns the selection into an affine map; the fresh set is then re-measured
// against the actual map.  Retries with fresh seeds until the fresh set is
// nonempty or the budget runs out.
inline std::optional<IntersectOutcome> intersect_search(const FiberedSubspaces& u, const FamilyState& st, Rng rng,
                                                        uint32_t triple_samples = 128, uint32_t max_attempts = 32) {
    const FieldParams& dom = u.dom;
    const FieldParams& cod = u.cod;
    std::array<uint64_t, 4> branches{};
    {
        Rng brng = rng.child(0xca5e);
        for (uint32_t s = 0; s < triple_samples; ++s) {
            uint64_t y = brng.below(dom.size());
            uint64_t z = brng.below(dom.size());
            uint64_t w = brng.below(dom.size());
            detail::count_branches(u, st, y, z, w, branches);
        }
    }
    for (uint32_t attempt = 0; attempt < max_attempts; ++attempt) {
        Rng arng = rng.child(attempt + 1);
        FunctionTable f(dom, cod);
        DenseSet z(dom);
        for (uint64_t x = 0; x < dom.size(); ++x) {
            const Subspace& ux = u.at(x);
            uint64_t pick = arng.below(pow_u64(dom.p, ux.dim()));
            FieldParams coeff(dom.p, ux.dim());
            Vec v = ux.from_coords(coeff.decode(pick));
            f.val[x] = cod.encode(v);
            if (!st.span_at(x).contains(v)) z.add(x);
        }
        if (z.empty()) continue;
        f.restriction = z;
        RestrictedFit fit = fr_on_restriction(f, arng.child(0xf17));
        DenseSet fresh(dom);
        for (uint64_t x = 0; x < dom.size(); ++x) {
            Vec lx = fit.map.apply(dom.decode(x));
            if (u.at(x).contains(lx) && !st.span_at(x).contains(lx)) fresh.add(x);
        }
        if (fresh.empty()) continue;
        IntersectOutcome out;
        out.map = fit.map;
        out.fresh = fresh;
        out.fresh_density = fresh.density();
        out.fit_agreement = fit.agreement;
        out.fit_exhaustive = fit.exhaustive;
        out.branch_counts = branches;
        uint32_t arg = 0;
        for (uint32_t i = 1; i < 4; ++i)
            if (branches[i] > branches[arg]) arg = i;
        out.branch = arg;
        out.attempts = attempt + 1;
        return out;
    }
    return std::nullopt;
}

}  // namespace bbr
