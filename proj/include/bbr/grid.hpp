#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "bbr/dense_set.hpp"
#include "bbr/field.hpp"

namespace bbr {

// Sequence of horizontal/vertical difference steps.  Letters are applied
// rightmost first, so "hv" means: vertical step, then horizontal step on the
// result.
struct Word {
    std::string letters;

    Word() = default;
    Word(std::string s) : letters(std::move(s)) { validate(); }
    Word(const char* s) : letters(s) { validate(); }

    void validate() const {
        if (letters.size() > 16) throw std::invalid_argument("word too long");
        for (char c : letters)
            if (c != 'h' && c != 'v') throw std::invalid_argument("word letters must be h or v");
    }

    size_t size() const { return letters.size(); }
    char at(size_t i) const { return letters[i]; }

    static Word standard() { return Word("hvvhvvvhh"); }
};

// Subset of F_p^m x F_p^n with bitmap membership.  Grid index is
// y * xsize + x.
class GridSet {
  public:
    GridSet() = default;
    GridSet(const FieldParams& xside, const FieldParams& yside)
        : x_(xside), y_(yside), bits_(check_size(xside, yside)) {}

    static GridSet full(const FieldParams& xs, const FieldParams& ys) {
        GridSet g(xs, ys);
        for (uint64_t i = 0; i < g.bits_.size(); ++i) g.bits_.set(i);
        g.count_ = g.bits_.size();
        return g;
    }

    static GridSet product(const DenseSet& a, const DenseSet& b) {
        GridSet g(a.ambient(), b.ambient());
        for (uint64_t y = 0; y < b.ambient().size(); ++y) {
            if (!b.test(y)) continue;
            for (uint64_t x = 0; x < a.ambient().size(); ++x)
                if (a.test(x)) g.add(x, y);
        }
        return g;
    }

    // {(x, y) : y in a0}, the full-x cylinder over a base set.
    static GridSet cylinder(const FieldParams& xs, const DenseSet& a0) {
        GridSet g(xs, a0.ambient());
        for (uint64_t y = 0; y < a0.ambient().size(); ++y) {
            if (!a0.test(y)) continue;
            for (uint64_t x = 0; x < xs.size(); ++x) g.add(x, y);
        }
        return g;
    }

    static GridSet random(const FieldParams& xs, const FieldParams& ys, double density, Rng& rng) {
        GridSet g(xs, ys);
        uint64_t total = xs.size() * ys.size();
        for (uint64_t i = 0; i < total; ++i)
            if (rng.unit_real() < density) {
                if (!g.bits_.test(i)) {
                    g.bits_.set(i);
                    ++g.count_;
                }
            }
        return g;
    }

    const FieldParams& xside() const { return x_; }
    const FieldParams& yside() const { return y_; }
    uint64_t xsize() const { return x_.size(); }
    uint64_t ysize() const { return y_.size(); }
    uint64_t grid_size() const { return x_.size() * y_.size(); }
    uint64_t size() const { return count_; }
    bool empty() const { return count_ == 0; }

    uint64_t index(uint64_t x, uint64_t y) const { return y * x_.size() + x; }
    bool test(uint64_t x, uint64_t y) const { return bits_.test(index(x, y)); }
    bool test_raw(uint64_t g) const { return bits_.test(g); }

    void add(uint64_t x, uint64_t y) {
        uint64_t i = index(x, y);
        if (!bits_.test(i)) {
            bits_.set(i);
            ++count_;
        }
    }

    void remove(uint64_t x, uint64_t y) {
        uint64_t i = index(x, y);
        if (bits_.test(i)) {
            bits_.set(i, false);
            --count_;
        }
    }

    mpq_class density() const {
        mpq_class d(count_, grid_size());
        d.canonicalize();
        return d;
    }

    DenseSet fiber_x(uint64_t y) const {
        DenseSet s(x_);
        for (uint64_t x = 0; x < x_.size(); ++x)
            if (test(x, y)) s.add(x);
        return s;
    }

    DenseSet fiber_y(uint64_t x) const {
        DenseSet s(y_);
        for (uint64_t y = 0; y < y_.size(); ++y)
            if (test(x, y)) s.add(y);
        return s;
    }

    // y values whose x-fiber is nonempty.
    DenseSet y_support() const {
        DenseSet s(y_);
        for (uint64_t y = 0; y < y_.size(); ++y)
            for (uint64_t x = 0; x < x_.size(); ++x)
                if (test(x, y)) {
                    s.add(y);
                    break;
                }
        return s;
    }

    bool subset_of(const GridSet& o) const {
        if (x_ != o.x_ || y_ != o.y_) throw std::invalid_argument("grid ambient mismatch");
        for (uint64_t i = 0; i < grid_size(); ++i)
            if (bits_.test(i) && !o.bits_.test(i)) return false;
        return true;
    }

    bool operator==(const GridSet& o) const { return x_ == o.x_ && y_ == o.y_ && bits_ == o.bits_; }

  private:
    static uint64_t check_size(const FieldParams& xs, const FieldParams& ys) {
        if (xs.p != ys.p) throw std::invalid_argument("grid sides must share p");
        uint64_t total = xs.size() * ys.size();
        if (total > (uint64_t(1) << 26)) throw std::invalid_argument("grid too large");
        return total;
    }

    FieldParams x_, y_;
    Bitmap bits_;
    uint64_t count_ = 0;
};

}  // namespace bbr
