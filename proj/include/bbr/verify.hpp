#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "bbr/field.hpp"
#include "bbr/grid.hpp"
#include "bbr/rng.hpp"
#include "bbr/variety.hpp"

namespace bbr {

// Re-implementation of the realization counts, kept free of the table
// pipeline so the two paths can cross-check each other.

// Row-major sweep for whole-grid counts, shift loop outermost.
inline std::vector<std::vector<mpz_class>> realization_rows(const GridSet& g, const Word& w) {
    const uint64_t xs = g.xsize(), ys = g.ysize();
    std::vector<std::vector<mpz_class>> t(ys, std::vector<mpz_class>(xs, mpz_class(0)));
    for (uint64_t y = 0; y < ys; ++y)
        for (uint64_t x = 0; x < xs; ++x)
            if (g.test(x, y)) t[y][x] = 1;
    for (size_t pos = w.size(); pos-- > 0;) {
        std::vector<std::vector<mpz_class>> next(ys, std::vector<mpz_class>(xs, mpz_class(0)));
        if (w.at(pos) == 'h') {
            for (uint64_t y = 0; y < ys; ++y)
                for (uint64_t b = 0; b < xs; ++b) {
                    if (t[y][b] == 0) continue;
                    for (uint64_t x = 0; x < xs; ++x) next[y][x] += t[y][g.xside().add_idx(x, b)] * t[y][b];
                }
        } else {
            for (uint64_t b = 0; b < ys; ++b)
                for (uint64_t x = 0; x < xs; ++x) {
                    if (t[b][x] == 0) continue;
                    for (uint64_t y = 0; y < ys; ++y) next[y][x] += t[g.yside().add_idx(y, b)][x] * t[b][x];
                }
        }
        t = std::move(next);
    }
    return t;
}

// Normalizer in closed form: the letter at position i acts 2^i times.
inline mpz_class closed_form_normalizer(const GridSet& g, const Word& w) {
    mpz_class n = 1;
    for (size_t i = 0; i < w.size(); ++i) {
        mpz_class side(w.at(i) == 'h' ? g.xsize() : g.ysize());
        mpz_class pw;
        mpz_pow_ui(pw.get_mpz_t(), side.get_mpz_t(), uint64_t(1) << i);
        n *= pw;
    }
    return n;
}

struct VerifyOutcome {
    uint64_t checked = 0;
    bool exhaustive = true;
    mpq_class min_normalized = 0;
    bool pass = false;
    std::optional<std::pair<uint64_t, uint64_t>> first_fail;
};

// Re-validates a variety against a set: plain mode needs every checked point
// realized at least once, robust mode needs normalized counts >= eps.
inline VerifyOutcome verify_variety(const GridSet& g, const Word& w, const BilinearVariety& bv,
                                    const std::optional<mpq_class>& eps, uint64_t cap = uint64_t(1) << 16,
                                    uint64_t seed = 0, uint32_t samples = 256) {
    if (bv.xside != g.xside() || bv.yside != g.yside()) throw std::invalid_argument("verify: ambient mismatch");
    auto rows = realization_rows(g, w);
    mpz_class norm = closed_form_normalizer(g, w);
    VerifyOutcome out;
    std::vector<std::pair<uint64_t, uint64_t>> pts;
    if (bv.member_count() <= mpz_class(cap)) {
        pts = bv.members(cap);
    } else {
        out.exhaustive = false;
        pts.emplace_back(0, 0);
        for (const auto& b : bv.v.basis()) pts.emplace_back(g.xside().encode(b), 0);
        for (const auto& b : bv.w.basis()) pts.emplace_back(0, g.yside().encode(b));
        Rng rng(seed);
        FieldParams wc(g.yside().p, bv.w.dim());
        for (uint32_t i = 0; i < samples; ++i) {
            Vec y = bv.w.from_coords(wc.decode(rng.below(wc.size())));
            Subspace sl = bv.slice_x(y);
            FieldParams sc(g.xside().p, sl.dim());
            Vec x = sl.from_coords(sc.decode(rng.below(sc.size())));
            pts.emplace_back(g.xside().encode(x), g.yside().encode(y));
        }
    }
    out.pass = true;
    bool first = true;
    for (auto [x, y] : pts) {
        mpq_class q(rows[y][x], norm);
        q.canonicalize();
        if (first || q < out.min_normalized) out.min_normalized = q;
        first = false;
        bool ok = eps ? (q >= *eps && q > 0) : (q > 0);
        if (!ok && !out.first_fail) {
            out.first_fail = {x, y};
            out.pass = false;
        }
    }
    out.checked = pts.size();
    if (first) out.pass = false;
    return out;
}

}  // namespace bbr
