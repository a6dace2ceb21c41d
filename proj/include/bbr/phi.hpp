#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include <gmpxx.h>

#include "bbr/grid.hpp"
#include "bbr/parallel.hpp"

namespace bbr {

// One difference step: 'h' replaces every x-fiber by its difference set,
// 'v' does the same on y-fibers.
inline GridSet phi_step(const GridSet& a, char letter) {
    GridSet out(a.xside(), a.yside());
    if (letter == 'h') {
        const FieldParams& fx = a.xside();
        for (uint64_t y = 0; y < a.ysize(); ++y) {
            std::vector<uint64_t> mem;
            for (uint64_t x = 0; x < a.xsize(); ++x)
                if (a.test(x, y)) mem.push_back(x);
            for (uint64_t x1 : mem)
                for (uint64_t x2 : mem) out.add(fx.sub_idx(x1, x2), y);
        }
    } else if (letter == 'v') {
        const FieldParams& fy = a.yside();
        for (uint64_t x = 0; x < a.xsize(); ++x) {
            std::vector<uint64_t> mem;
            for (uint64_t y = 0; y < a.ysize(); ++y)
                if (a.test(x, y)) mem.push_back(y);
            for (uint64_t y1 : mem)
                for (uint64_t y2 : mem) out.add(x, fy.sub_idx(y1, y2));
        }
    } else {
        throw std::invalid_argument("letter must be h or v");
    }
    return out;
}

inline GridSet phi_word(const GridSet& a, const Word& w) {
    GridSet cur = a;
    for (size_t i = w.size(); i-- > 0;) cur = phi_step(cur, w.at(i));
    return cur;
}

enum class CountMode { Exact, Float };

// Realization counts of phi_w: exact integers or normalized doubles.  The
// exact normalizer follows N <- side * N^2 per step, which for a square grid
// collapses to |F^n|^{2^k - 1}.
struct CountTable {
    FieldParams xside, yside;
    CountMode mode = CountMode::Exact;
    std::vector<mpz_class> exact;
    std::vector<double> approx;
    mpz_class normalizer = 1;

    uint64_t index(uint64_t x, uint64_t y) const { return y * xside.size() + x; }

    mpq_class normalized(uint64_t x, uint64_t y) const {
        if (mode != CountMode::Exact) throw std::logic_error("normalized() needs exact mode");
        mpq_class q(exact[index(x, y)], normalizer);
        q.canonicalize();
        return q;
    }

    GridSet support() const {
        GridSet s(xside, yside);
        for (uint64_t y = 0; y < yside.size(); ++y)
            for (uint64_t x = 0; x < xside.size(); ++x) {
                uint64_t g = index(x, y);
                bool in = mode == CountMode::Exact ? (exact[g] != 0) : (approx[g] != 0.0);
                if (in) s.add(x, y);
            }
        return s;
    }
};

namespace detail {

inline void count_step_exact(std::vector<mpz_class>& cur, char letter, const FieldParams& fx, const FieldParams& fy) {
    uint64_t X = fx.size(), Y = fy.size();
    std::vector<mpz_class> out(cur.size());
    if (letter == 'h') {
        parallel_for(Y, [&](uint64_t y) {
            const mpz_class* row = &cur[y * X];
            for (uint64_t x = 0; x < X; ++x) {
                mpz_class acc = 0;
                for (uint64_t x2 = 0; x2 < X; ++x2) {
                    if (row[x2] == 0) continue;
                    const mpz_class& other = row[fx.add_idx(x, x2)];
                    if (other == 0) continue;
                    acc += other * row[x2];
                }
                out[y * X + x] = std::move(acc);
            }
        });
    } else {
        parallel_for(X, [&](uint64_t x) {
            for (uint64_t y = 0; y < Y; ++y) {
                mpz_class acc = 0;
                for (uint64_t y2 = 0; y2 < Y; ++y2) {
                    const mpz_class& a = cur[fy.add_idx(y, y2) * X + x];
                    if (a == 0) continue;
                    const mpz_class& b = cur[y2 * X + x];
                    if (b == 0) continue;
                    acc += a * b;
                }
                out[y * X + x] = std::move(acc);
            }
        });
    }
    cur = std::move(out);
}

inline void count_step_float(std::vector<double>& cur, char letter, const FieldParams& fx, const FieldParams& fy) {
    uint64_t X = fx.size(), Y = fy.size();
    std::vector<double> out(cur.size(), 0.0);
    double side = letter == 'h' ? double(X) : double(Y);
    if (letter == 'h') {
        parallel_for(Y, [&](uint64_t y) {
            const double* row = &cur[y * X];
            for (uint64_t x = 0; x < X; ++x) {
                double acc = 0;
                for (uint64_t x2 = 0; x2 < X; ++x2) acc += row[fx.add_idx(x, x2)] * row[x2];
                out[y * X + x] = acc / side;
            }
        });
    } else {
        parallel_for(X, [&](uint64_t x) {
            for (uint64_t y = 0; y < Y; ++y) {
                double acc = 0;
                for (uint64_t y2 = 0; y2 < Y; ++y2) acc += cur[fy.add_idx(y, y2) * X + x] * cur[y2 * X + x];
                out[y * X + x] = acc / side;
            }
        });
    }
    cur = std::move(out);
}

}  // namespace detail

inline CountTable count_table(const GridSet& a, const Word& w, CountMode mode = CountMode::Exact) {
    CountTable t;
    t.xside = a.xside();
    t.yside = a.yside();
    t.mode = mode;
    uint64_t total = a.grid_size();
    if (mode == CountMode::Exact) {
        t.exact.assign(total, mpz_class(0));
        for (uint64_t g = 0; g < total; ++g)
            if (a.test_raw(g)) t.exact[g] = 1;
        for (size_t i = w.size(); i-- > 0;) {
            char l = w.at(i);
            detail::count_step_exact(t.exact, l, a.xside(), a.yside());
            mpz_class side(l == 'h' ? a.xsize() : a.ysize());
            t.normalizer = side * t.normalizer * t.normalizer;
        }
    } else {
        t.approx.assign(total, 0.0);
        for (uint64_t g = 0; g < total; ++g)
            if (a.test_raw(g)) t.approx[g] = 1.0;
        for (size_t i = w.size(); i-- > 0;) detail::count_step_float(t.approx, w.at(i), a.xside(), a.yside());
    }
    return t;
}

// phi_w^eps: points whose normalized realization count reaches eps.  Exact
// mode compares count * den(eps) >= num(eps) * normalizer in integers.
inline GridSet phi_robust(const GridSet& a, const Word& w, const mpq_class& eps, CountMode mode = CountMode::Exact) {
    CountTable t = count_table(a, w, mode);
    GridSet out(a.xside(), a.yside());
    uint64_t total = a.grid_size();
    if (mode == CountMode::Exact) {
        mpz_class num = eps.get_num(), den = eps.get_den();
        mpz_class rhs = num * t.normalizer;
        for (uint64_t g = 0; g < total; ++g)
            if (t.exact[g] * den >= rhs) out.add(g % a.xsize(), g / a.xsize());
    } else {
        double e = eps.get_d();
        for (uint64_t g = 0; g < total; ++g)
            if (t.approx[g] >= e) out.add(g % a.xsize(), g / a.xsize());
    }
    return out;
}

// Definitional counting: recursive descent over the word, no tables.  The
// count at (x, y) for word l.rest is sum_t count(x+t, y) * count(t, y) over
// the acted side, with indicator leaves.  Cost is (2 side)^k per point, so
// the grid budget p^{(m+n)(k+1)} is enforced up front.
namespace detail {

inline mpz_class brute_count(const GridSet& a, const Word& w, size_t pos, uint64_t x, uint64_t y) {
    if (pos == w.size()) return a.test(x, y) ? 1 : 0;
    mpz_class acc = 0;
    if (w.at(pos) == 'h') {
        const FieldParams& fx = a.xside();
        for (uint64_t t = 0; t < a.xsize(); ++t) {
            mpz_class lhs = brute_count(a, w, pos + 1, fx.add_idx(x, t), y);
            if (lhs == 0) continue;
            acc += lhs * brute_count(a, w, pos + 1, t, y);
        }
    } else {
        const FieldParams& fy = a.yside();
        for (uint64_t t = 0; t < a.ysize(); ++t) {
            mpz_class lhs = brute_count(a, w, pos + 1, x, fy.add_idx(y, t));
            if (lhs == 0) continue;
            acc += lhs * brute_count(a, w, pos + 1, x, t);
        }
    }
    return acc;
}

}  // namespace detail

inline CountTable phi_bruteforce(const GridSet& a, const Word& w, uint64_t budget = uint64_t(1) << 26) {
    // p^{(m+n)(k+1)} against the budget.
    long double cost = 1;
    uint64_t grid = a.grid_size();
    for (size_t i = 0; i < w.size() + 1; ++i) {
        cost *= (long double)grid;
        if (cost > (long double)budget) throw std::invalid_argument("bruteforce budget exceeded");
    }
    CountTable t;
    t.xside = a.xside();
    t.yside = a.yside();
    t.mode = CountMode::Exact;
    t.exact.assign(grid, mpz_class(0));
    parallel_for(grid, [&](uint64_t g) {
        t.exact[g] = detail::brute_count(a, w, 0, g % a.xsize(), g / a.xsize());
    });
    mpz_class n = 1;
    for (size_t i = w.size(); i-- > 0;) {
        mpz_class side(w.at(i) == 'h' ? a.xsize() : a.ysize());
        n = side * n * n;
    }
    t.normalizer = n;
    return t;
}

}  // namespace bbr
