#pragma once

#include <cstdint>
#include <vector>

#include <gmpxx.h>

#include "bbr/dense_set.hpp"
#include "bbr/field.hpp"
#include "bbr/parallel.hpp"

namespace bbr {

// Exact integer-valued function on F_p^n, e.g. representation counts.
struct RepTable {
    FieldParams f;
    std::vector<mpz_class> v;

    RepTable() = default;
    explicit RepTable(const FieldParams& f_) : f(f_), v(f_.size(), mpz_class(0)) {}

    static RepTable indicator(const DenseSet& s) {
        RepTable t(s.ambient());
        for (uint64_t i = 0; i < t.f.size(); ++i)
            if (s.test(i)) t.v[i] = 1;
        return t;
    }

    mpz_class total() const {
        mpz_class s = 0;
        for (const auto& x : v) s += x;
        return s;
    }

    DenseSet support() const {
        DenseSet s(f);
        for (uint64_t i = 0; i < f.size(); ++i)
            if (v[i] != 0) s.add(i);
        return s;
    }
};

// (a * b)(x) = sum_y a(y) b(x - y), unnormalized.  Direct p^{2n} scan; exact
// and embarrassingly parallel over outputs.
inline RepTable convolve_counts(const RepTable& a, const RepTable& b) {
    if (a.f != b.f) throw std::invalid_argument("convolution ambient mismatch");
    const FieldParams& f = a.f;
    RepTable out(f);
    uint64_t sz = f.size();
    // Precompute digitwise difference via encode/decode once per pair is the
    // hot path; walk y and x - y together instead.
    parallel_for(sz, [&](uint64_t x) {
        mpz_class acc = 0;
        for (uint64_t y = 0; y < sz; ++y) {
            if (a.v[y] == 0) continue;
            uint64_t d = f.sub_idx(x, y);
            if (b.v[d] == 0) continue;
            acc += a.v[y] * b.v[d];
        }
        out.v[x] = std::move(acc);
    });
    return out;
}

// Number of quadruples (a1,a2,a3,a4) in A^4 with a1+a2-a3-a4 = x, for every
// x: the fourfold convolution 1_A * 1_A * 1_{-A} * 1_{-A}.
inline RepTable diff_rep_counts(const DenseSet& a) {
    RepTable t = RepTable::indicator(a);
    RepTable tm = RepTable::indicator(a.negate());
    RepTable t2 = convolve_counts(t, t);
    RepTable t3 = convolve_counts(t2, tm);
    return convolve_counts(t3, tm);
}

// Number of pairs (a,b) in A x B with a - b = x.
inline RepTable diff_pair_counts(const DenseSet& a, const DenseSet& b) {
    return convolve_counts(RepTable::indicator(a), RepTable::indicator(b.negate()));
}

// #{(a,b,c,d) in (A x B)^2 : a - b = c - d} = sum_x diff_pair_counts(x)^2.
inline mpz_class additive_energy(const DenseSet& a, const DenseSet& b) {
    RepTable d = diff_pair_counts(a, b);
    mpz_class e = 0;
    for (const auto& c : d.v) e += c * c;
    return e;
}

}  // namespace bbr
