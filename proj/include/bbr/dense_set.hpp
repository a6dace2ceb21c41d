#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include <gmpxx.h>

#include "bbr/field.hpp"
#include "bbr/rng.hpp"
#include "bbr/subspace.hpp"

namespace bbr {

// Word-packed membership bitmap.
class Bitmap {
  public:
    Bitmap() = default;
    explicit Bitmap(uint64_t bits) : bits_(bits), w_((bits + 63) / 64, 0) {}

    uint64_t size() const { return bits_; }

    bool test(uint64_t i) const { return (w_[i >> 6] >> (i & 63)) & 1; }

    void set(uint64_t i, bool v = true) {
        uint64_t mask = uint64_t(1) << (i & 63);
        if (v)
            w_[i >> 6] |= mask;
        else
            w_[i >> 6] &= ~mask;
    }

    uint64_t count() const {
        uint64_t c = 0;
        for (uint64_t w : w_) c += uint64_t(__builtin_popcountll(w));
        return c;
    }

    bool operator==(const Bitmap& o) const { return bits_ == o.bits_ && w_ == o.w_; }

    Bitmap operator&(const Bitmap& o) const { return zip(o, [](uint64_t a, uint64_t b) { return a & b; }); }
    Bitmap operator|(const Bitmap& o) const { return zip(o, [](uint64_t a, uint64_t b) { return a | b; }); }

    bool subset_of(const Bitmap& o) const {
        for (size_t i = 0; i < w_.size(); ++i)
            if (w_[i] & ~o.w_[i]) return false;
        return true;
    }

    bool any() const {
        for (uint64_t w : w_)
            if (w) return true;
        return false;
    }

  private:
    template <class F>
    Bitmap zip(const Bitmap& o, F f) const {
        if (bits_ != o.bits_) throw std::invalid_argument("bitmap size mismatch");
        Bitmap r(bits_);
        for (size_t i = 0; i < w_.size(); ++i) r.w_[i] = f(w_[i], o.w_[i]);
        return r;
    }

    uint64_t bits_ = 0;
    std::vector<uint64_t> w_;
};

// Subset of F_p^n with O(1) membership.
class DenseSet {
  public:
    DenseSet() = default;
    explicit DenseSet(const FieldParams& f) : f_(f), bits_(f.size()) {}

    static DenseSet full(const FieldParams& f) {
        DenseSet s(f);
        for (uint64_t i = 0; i < f.size(); ++i) s.bits_.set(i);
        s.count_ = f.size();
        return s;
    }

    static DenseSet of_subspace(const Subspace& v) {
        DenseSet s(v.ambient());
        for (const auto& e : v.elements()) s.add(v.ambient().encode(e));
        return s;
    }

    static DenseSet random(const FieldParams& f, double density, Rng& rng) {
        DenseSet s(f);
        for (uint64_t i = 0; i < f.size(); ++i)
            if (rng.unit_real() < density) s.add(i);
        return s;
    }

    const FieldParams& ambient() const { return f_; }
    uint64_t size() const { return count_; }
    bool empty() const { return count_ == 0; }
    bool test(uint64_t i) const { return bits_.test(i); }
    bool test(const Vec& v) const { return bits_.test(f_.encode(v)); }

    void add(uint64_t i) {
        if (!bits_.test(i)) {
            bits_.set(i);
            ++count_;
        }
    }

    void remove(uint64_t i) {
        if (bits_.test(i)) {
            bits_.set(i, false);
            --count_;
        }
    }

    mpq_class density() const {
        mpq_class d(count_, f_.size());
        d.canonicalize();
        return d;
    }

    std::vector<uint64_t> members() const {
        std::vector<uint64_t> m;
        m.reserve(count_);
        for (uint64_t i = 0; i < f_.size(); ++i)
            if (bits_.test(i)) m.push_back(i);
        return m;
    }

    DenseSet negate() const {
        DenseSet s(f_);
        for (uint64_t i = 0; i < f_.size(); ++i)
            if (bits_.test(i)) s.add(f_.neg_idx(i));
        return s;
    }

    DenseSet operator&(const DenseSet& o) const {
        check(o);
        DenseSet s(f_);
        s.bits_ = bits_ & o.bits_;
        s.count_ = s.bits_.count();
        return s;
    }

    DenseSet operator|(const DenseSet& o) const {
        check(o);
        DenseSet s(f_);
        s.bits_ = bits_ | o.bits_;
        s.count_ = s.bits_.count();
        return s;
    }

    bool subset_of(const DenseSet& o) const {
        check(o);
        return bits_.subset_of(o.bits_);
    }

    bool operator==(const DenseSet& o) const { return f_ == o.f_ && bits_ == o.bits_; }

  private:
    void check(const DenseSet& o) const {
        if (f_ != o.f_) throw std::invalid_argument("set ambient mismatch");
    }

    FieldParams f_;
    Bitmap bits_;
    uint64_t count_ = 0;
};

}  // namespace bbr
