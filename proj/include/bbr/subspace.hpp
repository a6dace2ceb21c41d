#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "bbr/field.hpp"

namespace bbr {

namespace detail {

// In-place reduced row echelon form.  Returns the pivot column of each
// surviving row; rows are scaled to leading 1 and pivot columns are cleared
// above and below, so the basis it leaves behind is the canonical one.
inline std::vector<uint32_t> rref(std::vector<Vec>& rows, const FieldParams& f) {
    std::vector<uint32_t> pivots;
    uint32_t rank = 0;
    for (uint32_t col = 0; col < f.n && rank < rows.size(); ++col) {
        uint32_t sel = rank;
        while (sel < rows.size() && rows[sel][col] == 0) ++sel;
        if (sel == rows.size()) continue;
        std::swap(rows[rank], rows[sel]);
        uint32_t s = f.inv(rows[rank][col]);
        rows[rank] = f.scale(s, rows[rank]);
        for (uint32_t r = 0; r < rows.size(); ++r) {
            if (r == rank || rows[r][col] == 0) continue;
            rows[r] = f.sub(rows[r], f.scale(rows[r][col], rows[rank]));
        }
        pivots.push_back(col);
        ++rank;
    }
    rows.resize(rank);
    return pivots;
}

}  // namespace detail

// Linear subspace of F_p^n held as its canonical RREF basis.  Two Subspace
// objects are equal iff their bases are identical vectors.
class Subspace {
  public:
    Subspace() = default;

    static Subspace zero(const FieldParams& f) { return Subspace(f, {}, {}); }

    static Subspace full(const FieldParams& f) {
        std::vector<Vec> rows;
        std::vector<uint32_t> piv;
        for (uint32_t i = 0; i < f.n; ++i) {
            rows.push_back(f.unit(i));
            piv.push_back(i);
        }
        return Subspace(f, std::move(rows), std::move(piv));
    }

    static Subspace span(const FieldParams& f, std::vector<Vec> gens) {
        for (const auto& g : gens)
            if (g.size() != f.n) throw std::invalid_argument("generator has wrong length");
        auto piv = detail::rref(gens, f);
        return Subspace(f, std::move(gens), std::move(piv));
    }

    const FieldParams& ambient() const { return f_; }
    uint32_t dim() const { return uint32_t(basis_.size()); }
    uint32_t codim() const { return f_.n - dim(); }
    const std::vector<Vec>& basis() const { return basis_; }
    const std::vector<uint32_t>& pivots() const { return pivots_; }

    bool operator==(const Subspace& o) const { return f_ == o.f_ && basis_ == o.basis_; }
    bool operator!=(const Subspace& o) const { return !(*this == o); }

    // Residual of v after eliminating all pivot coordinates; zero iff v is a
    // member.
    Vec reduce(Vec v) const {
        for (uint32_t r = 0; r < basis_.size(); ++r) {
            uint8_t c = v[pivots_[r]];
            if (c) v = f_.sub(v, f_.scale(c, basis_[r]));
        }
        return v;
    }

    bool contains(const Vec& v) const { return f_.is_zero(reduce(v)); }

    bool contains(const Subspace& s) const {
        for (const auto& b : s.basis_)
            if (!contains(b)) return false;
        return true;
    }

    // Coefficients of a member in the canonical basis (the pivot coordinates).
    Vec coords(const Vec& v) const {
        Vec c(dim());
        for (uint32_t r = 0; r < basis_.size(); ++r) c[r] = v[pivots_[r]];
        return c;
    }

    Vec from_coords(const Vec& c) const {
        Vec v = f_.zero();
        for (uint32_t r = 0; r < basis_.size(); ++r)
            if (c[r]) v = f_.add(v, f_.scale(c[r], basis_[r]));
        return v;
    }

    uint64_t count() const { return pow_u64(f_.p, dim()); }

    // All p^dim members, enumerated in coefficient order.
    std::vector<Vec> elements() const {
        FieldParams coeff(f_.p, dim());
        std::vector<Vec> out;
        out.reserve(coeff.size());
        for (uint64_t i = 0; i < coeff.size(); ++i) out.push_back(from_coords(coeff.decode(i)));
        return out;
    }

    // {x : x . s = 0 for all s in S} under the coordinate dot product.
    Subspace annihilator() const {
        std::vector<Vec> gens;
        uint32_t r = 0;
        for (uint32_t col = 0; col < f_.n; ++col) {
            if (r < pivots_.size() && pivots_[r] == col) {
                ++r;
                continue;
            }
            Vec v = f_.zero();
            v[col] = 1;
            for (uint32_t i = 0; i < basis_.size(); ++i) v[pivots_[i]] = uint8_t((f_.p - basis_[i][col]) % f_.p);
            gens.push_back(std::move(v));
        }
        return span(f_, std::move(gens));
    }

    Subspace sum(const Subspace& o) const {
        check_same(o);
        std::vector<Vec> gens = basis_;
        gens.insert(gens.end(), o.basis_.begin(), o.basis_.end());
        return span(f_, std::move(gens));
    }

    // Zassenhaus: rref of [B1|B1; B2|0], rows with zero left block carry the
    // intersection in the right block.
    Subspace intersect(const Subspace& o) const {
        check_same(o);
        uint32_t n = f_.n;
        std::vector<Vec> rows;
        for (const auto& b : basis_) {
            Vec r(2 * n);
            for (uint32_t i = 0; i < n; ++i) r[i] = r[n + i] = b[i];
            rows.push_back(std::move(r));
        }
        for (const auto& b : o.basis_) {
            Vec r(2 * n, 0);
            for (uint32_t i = 0; i < n; ++i) r[i] = b[i];
            rows.push_back(std::move(r));
        }
        FieldParams wide = widened();
        detail::rref(rows, wide);
        std::vector<Vec> gens;
        for (const auto& r : rows) {
            bool left_zero = true;
            for (uint32_t i = 0; i < n && left_zero; ++i) left_zero = (r[i] == 0);
            if (!left_zero) continue;
            gens.emplace_back(r.begin() + n, r.end());
        }
        return span(f_, std::move(gens));
    }

  private:
    Subspace(const FieldParams& f, std::vector<Vec> basis, std::vector<uint32_t> piv)
        : f_(f), basis_(std::move(basis)), pivots_(std::move(piv)) {}

    void check_same(const Subspace& o) const {
        if (f_ != o.f_) throw std::invalid_argument("subspace ambient mismatch");
    }

    // FieldParams validates p^n against the cap; the doubled width used by
    // Zassenhaus is only a row length, so bypass the size computation.
    FieldParams widened() const {
        FieldParams w;
        w.p = f_.p;
        w.n = 2 * f_.n;
        return w;
    }

    FieldParams f_;
    std::vector<Vec> basis_;
    std::vector<uint32_t> pivots_;
};

}  // namespace bbr
