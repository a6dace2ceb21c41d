#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "bbr/field.hpp"
#include "bbr/maps.hpp"
#include "bbr/subspace.hpp"

namespace bbr {

// {(x, y) : x in V, y in W, x^T M_i y = 0 for all i}.  Codimension splits
// into r1 linear constraints on x, r2 on y, and r3 bilinear ones.
struct BilinearVariety {
    FieldParams xside, yside;
    Subspace v, w;
    std::vector<Mat> forms;  // each m x n

    BilinearVariety() = default;
    BilinearVariety(const FieldParams& xs, const FieldParams& ys, Subspace v_, Subspace w_, std::vector<Mat> f)
        : xside(xs), yside(ys), v(std::move(v_)), w(std::move(w_)), forms(std::move(f)) {
        if (xside.p != yside.p) throw std::invalid_argument("variety sides must share p");
        if (v.ambient() != xside || w.ambient() != yside) throw std::invalid_argument("subspace ambient mismatch");
        for (const auto& m : forms)
            if (m.rows != xside.n || m.cols != yside.n) throw std::invalid_argument("form shape mismatch");
    }

    uint32_t r1() const { return v.codim(); }
    uint32_t r2() const { return w.codim(); }
    uint32_t r3() const { return uint32_t(forms.size()); }
    uint32_t r() const { return r1() + r2() + r3(); }

    bool member(const Vec& x, const Vec& y) const {
        if (!v.contains(x) || !w.contains(y)) return false;
        for (const auto& m : forms)
            if (xside.dot(x, mat_apply(m, y, xside.p)) != 0) return false;
        return true;
    }

    // x-fiber at y: V cut by the r3 linear conditions x . (M_i y) = 0.
    // Only points of W have subspace slices; elsewhere the fiber is empty.
    Subspace slice_x(const Vec& y) const {
        if (!w.contains(y)) throw std::invalid_argument("slice_x: point outside the y-side subspace");
        std::vector<Vec> gens;
        gens.reserve(forms.size());
        for (const auto& m : forms) gens.push_back(mat_apply(m, y, xside.p));
        return v.intersect(Subspace::span(xside, std::move(gens)).annihilator());
    }

    Subspace slice_y(const Vec& x) const {
        if (!v.contains(x)) throw std::invalid_argument("slice_y: point outside the x-side subspace");
        std::vector<Vec> gens;
        gens.reserve(forms.size());
        for (const auto& m : forms) gens.push_back(mat_apply(mat_transpose(m), x, yside.p));
        return w.intersect(Subspace::span(yside, std::move(gens)).annihilator());
    }

    mpz_class member_count() const {
        mpz_class total = 0;
        for (const auto& y : w.elements()) {
            mpz_class fiber = 1;
            uint32_t dim = slice_x(y).dim();
            for (uint32_t i = 0; i < dim; ++i) fiber *= xside.p;
            total += fiber;
        }
        return total;
    }

    // All members as (x index, y index), y-major.  Throws past the cap.
    std::vector<std::pair<uint64_t, uint64_t>> members(uint64_t cap) const {
        std::vector<std::pair<uint64_t, uint64_t>> out;
        for (const auto& y : w.elements()) {
            uint64_t yi = yside.encode(y);
            for (const auto& x : slice_x(y).elements()) {
                if (out.size() >= cap) throw std::length_error("variety enumeration exceeds cap");
                out.emplace_back(xside.encode(x), yi);
            }
        }
        return out;
    }
};

}  // namespace bbr
