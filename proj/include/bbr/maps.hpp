#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "bbr/rng.hpp"
#include "bbr/subspace.hpp"

namespace bbr {

// Row-major m x n matrix over F_p.
struct Mat {
    uint32_t rows = 0, cols = 0;
    std::vector<uint8_t> a;

    Mat() = default;
    Mat(uint32_t r, uint32_t c) : rows(r), cols(c), a(size_t(r) * c, 0) {}

    uint8_t& at(uint32_t r, uint32_t c) { return a[size_t(r) * cols + c]; }
    uint8_t at(uint32_t r, uint32_t c) const { return a[size_t(r) * cols + c]; }

    bool operator==(const Mat& o) const { return rows == o.rows && cols == o.cols && a == o.a; }
    bool operator!=(const Mat& o) const { return !(*this == o); }

    bool is_zero() const {
        for (uint8_t v : a)
            if (v) return false;
        return true;
    }
};

inline Vec mat_apply(const Mat& m, const Vec& x, uint32_t p) {
    Vec y(m.rows, 0);
    for (uint32_t r = 0; r < m.rows; ++r) {
        uint64_t s = 0;
        for (uint32_t c = 0; c < m.cols; ++c) s += uint64_t(m.at(r, c)) * x[c];
        y[r] = uint8_t(s % p);
    }
    return y;
}

inline Mat mat_mul(const Mat& a, const Mat& b, uint32_t p) {
    if (a.cols != b.rows) throw std::invalid_argument("matrix shape mismatch");
    Mat c(a.rows, b.cols);
    for (uint32_t i = 0; i < a.rows; ++i)
        for (uint32_t k = 0; k < a.cols; ++k) {
            uint8_t aik = a.at(i, k);
            if (!aik) continue;
            for (uint32_t j = 0; j < b.cols; ++j)
                c.at(i, j) = uint8_t((c.at(i, j) + uint32_t(aik) * b.at(k, j)) % p);
        }
    return c;
}

inline Mat mat_add(const Mat& a, const Mat& b, uint32_t p) {
    Mat c(a.rows, a.cols);
    for (size_t i = 0; i < a.a.size(); ++i) c.a[i] = uint8_t((a.a[i] + b.a[i]) % p);
    return c;
}

inline Mat mat_scale(uint32_t s, const Mat& a, uint32_t p) {
    Mat c(a.rows, a.cols);
    for (size_t i = 0; i < a.a.size(); ++i) c.a[i] = uint8_t((uint64_t(s) * a.a[i]) % p);
    return c;
}

inline Mat mat_transpose(const Mat& a) {
    Mat t(a.cols, a.rows);
    for (uint32_t r = 0; r < a.rows; ++r)
        for (uint32_t c = 0; c < a.cols; ++c) t.at(c, r) = a.at(r, c);
    return t;
}

inline Mat mat_identity(uint32_t n) {
    Mat m(n, n);
    for (uint32_t i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

inline uint32_t mat_rank(const Mat& m, uint32_t p) {
    FieldParams row{};
    row.p = p;
    row.n = m.cols;
    std::vector<Vec> rows;
    rows.reserve(m.rows);
    for (uint32_t r = 0; r < m.rows; ++r) rows.emplace_back(m.a.begin() + size_t(r) * m.cols, m.a.begin() + size_t(r + 1) * m.cols);
    return uint32_t(detail::rref(rows, row).size());
}

// Null space {x : m x = 0} as a subspace of the domain.
inline Subspace mat_kernel(const Mat& m, uint32_t p) {
    FieldParams row{};
    row.p = p;
    row.n = m.cols;
    std::vector<Vec> rows;
    rows.reserve(m.rows);
    for (uint32_t r = 0; r < m.rows; ++r) rows.emplace_back(m.a.begin() + size_t(r) * m.cols, m.a.begin() + size_t(r + 1) * m.cols);
    std::vector<uint32_t> piv = detail::rref(rows, row);
    FieldParams dom(p, m.cols);
    std::vector<Vec> basis;
    uint32_t pr = 0;
    for (uint32_t c = 0; c < m.cols; ++c) {
        if (pr < piv.size() && piv[pr] == c) {
            ++pr;
            continue;
        }
        Vec v(m.cols, 0);
        v[c] = 1;
        for (uint32_t r = 0; r < piv.size(); ++r) v[piv[r]] = uint8_t((p - rows[r][c]) % p);
        basis.push_back(std::move(v));
    }
    return Subspace::span(dom, std::move(basis));
}

// Columns of m span its image.
inline Subspace mat_image(const Mat& m, uint32_t p) {
    FieldParams cod(p, m.rows);
    std::vector<Vec> cols;
    for (uint32_t c = 0; c < m.cols; ++c) {
        Vec v(m.rows);
        for (uint32_t r = 0; r < m.rows; ++r) v[r] = m.at(r, c);
        cols.push_back(std::move(v));
    }
    return Subspace::span(cod, std::move(cols));
}

// x -> M x + b from F_p^n to F_p^m.
struct AffineMap {
    FieldParams dom, cod;
    Mat matrix;
    Vec offset;

    AffineMap() = default;
    AffineMap(const FieldParams& d, const FieldParams& c) : dom(d), cod(c), matrix(c.n, d.n), offset(c.n, 0) {
        if (d.p != c.p) throw std::invalid_argument("field mismatch");
    }

    Vec apply(const Vec& x) const { return cod.add(mat_apply(matrix, x, dom.p), offset); }

    bool is_linear() const { return cod.is_zero(offset); }

    bool operator==(const AffineMap& o) const {
        return dom == o.dom && cod == o.cod && matrix == o.matrix && offset == o.offset;
    }
};

inline Vec mat_flatten(const Mat& m) { return Vec(m.a.begin(), m.a.end()); }

inline Mat mat_unflatten(const Vec& v, uint32_t rows, uint32_t cols) {
    Mat m(rows, cols);
    m.a.assign(v.begin(), v.end());
    return m;
}

// Family of maps F_p^n -> F_p^m sharing domain and codomain.  The span lives
// in the mn-dimensional matrix space; offsets are carried alongside but do
// not participate in spans or rank queries.
struct MapFamily {
    FieldParams dom, cod;
    std::vector<AffineMap> maps;

    MapFamily() = default;
    MapFamily(const FieldParams& d, const FieldParams& c) : dom(d), cod(c) {}

    void push(AffineMap m) {
        if (m.dom != dom || m.cod != cod) throw std::invalid_argument("family shape mismatch");
        maps.push_back(std::move(m));
    }

    FieldParams matrix_space() const {
        FieldParams f{};
        f.p = dom.p;
        f.n = dom.n * cod.n;
        return f;
    }

    Subspace matrix_span() const {
        FieldParams ms = matrix_space();
        std::vector<Vec> gens;
        gens.reserve(maps.size());
        for (const auto& m : maps) gens.push_back(mat_flatten(m.matrix));
        // span() wants a validated ambient only for lengths; build directly.
        return Subspace::span(ms, std::move(gens));
    }

    uint32_t span_dim() const { return matrix_span().dim(); }
};

struct MinRankResult {
    Mat matrix;           // a nonzero span element of minimum rank
    uint32_t rank = 0;
    bool exhaustive = true;
    uint64_t scanned = 0;
};

// Minimum-rank nonzero element of span{basis}.  Exhaustive scan of the
// p^k - 1 nonzero combinations when that fits under cap, otherwise seeded
// random sampling with the result flagged non-exhaustive.  Ties go to the
// first hit in coefficient enumeration order, which makes the answer
// deterministic.
inline MinRankResult min_rank_element(const std::vector<Mat>& basis, uint32_t p, uint64_t cap, Rng rng) {
    if (basis.empty()) throw std::invalid_argument("min_rank_element: empty basis");
    uint32_t k = uint32_t(basis.size());
    uint32_t rows = basis[0].rows, cols = basis[0].cols;
    uint64_t total = 1;
    bool overflow = false;
    for (uint32_t i = 0; i < k; ++i) {
        total *= p;
        if (total > cap) { overflow = true; break; }
    }
    MinRankResult best;
    best.rank = UINT32_MAX;
    auto consider = [&](const Vec& coeff) {
        Mat m(rows, cols);
        for (uint32_t i = 0; i < k; ++i) {
            if (!coeff[i]) continue;
            m = mat_add(m, mat_scale(coeff[i], basis[i], p), p);
        }
        if (m.is_zero()) return;
        uint32_t r = mat_rank(m, p);
        ++best.scanned;
        if (r < best.rank) {
            best.rank = r;
            best.matrix = std::move(m);
        }
    };
    if (!overflow) {
        Vec c(k, 0);
        for (uint64_t idx = 1; idx < total; ++idx) {
            uint32_t pos = 0;
            while (true) {
                c[pos] = uint8_t((c[pos] + 1) % p);
                if (c[pos]) break;
                ++pos;
            }
            consider(c);
        }
        best.exhaustive = true;
    } else {
        best.exhaustive = false;
        for (uint64_t t = 0; t < cap; ++t) {
            Vec c(k);
            bool nz = false;
            for (uint32_t i = 0; i < k; ++i) {
                c[i] = uint8_t(rng.below(p));
                nz |= (c[i] != 0);
            }
            if (!nz) continue;
            consider(c);
        }
        if (best.rank == UINT32_MAX) {
            // Fall back to the basis itself so the result is always valid.
            for (const auto& b : basis)
                if (!b.is_zero()) {
                    Vec c(k, 0);
                    c[&b - basis.data()] = 1;
                    consider(c);
                }
        }
    }
    if (best.rank == UINT32_MAX) throw std::runtime_error("min_rank_element: span is zero");
    return best;
}

struct Projection {
    AffineMap proj;   // linear idempotent map F_p^m -> F_p^m killing Im(L)
    Subspace image;   // Im(L)
    Subspace comp;    // complement Y = proj(F_p^m), spanned by non-pivot units
};

// Projection of the codomain along Im(L): reduce by the canonical basis of
// Im(L), which zeroes its pivot coordinates.  proj . L = 0, proj^2 = proj,
// and Y + Im(L) = F_p^m with trivial intersection.
inline Projection project_along(const Mat& L, uint32_t p) {
    Subspace im = mat_image(L, p);
    FieldParams cod(p, L.rows);
    AffineMap pr(cod, cod);
    for (uint32_t j = 0; j < cod.n; ++j) {
        Vec img = im.reduce(cod.unit(j));
        for (uint32_t r = 0; r < cod.n; ++r) pr.matrix.at(r, j) = img[r];
    }
    std::vector<Vec> comp_gens;
    {
        uint32_t r = 0;
        for (uint32_t j = 0; j < cod.n; ++j) {
            if (r < im.pivots().size() && im.pivots()[r] == j) {
                ++r;
                continue;
            }
            comp_gens.push_back(cod.unit(j));
        }
    }
    return Projection{std::move(pr), std::move(im), Subspace::span(cod, std::move(comp_gens))};
}

// x^T M y with x in F_p^m, y in F_p^n.
struct BilinearForm {
    FieldParams xside, yside;
    Mat matrix;  // m x n

    uint32_t eval(const Vec& x, const Vec& y) const {
        uint64_t s = 0;
        for (uint32_t r = 0; r < matrix.rows; ++r) {
            if (!x[r]) continue;
            uint64_t row = 0;
            for (uint32_t c = 0; c < matrix.cols; ++c) row += uint64_t(matrix.at(r, c)) * y[c];
            s += uint64_t(x[r]) * (row % xside.p);
        }
        return uint32_t(s % xside.p);
    }
};

}  // namespace bbr
