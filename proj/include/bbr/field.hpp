#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bbr {

// Coordinate vector over F_p, one digit per coordinate.
using Vec = std::vector<uint8_t>;

inline bool is_small_prime(uint32_t p) {
    if (p < 2) return false;
    for (uint32_t d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

// Ambient space F_p^n.  Points are indexed 0..p^n-1, least significant
// coordinate first: index = sum_i v[i] * p^i.
struct FieldParams {
    uint32_t p = 2;
    uint32_t n = 0;

    static constexpr uint64_t kAmbientCap = uint64_t(1) << 22;

    FieldParams() = default;
    FieldParams(uint32_t p_, uint32_t n_) : p(p_), n(n_) {
        if (!is_small_prime(p)) throw std::invalid_argument("p must be prime, got " + std::to_string(p));
        uint64_t s = 1;
        for (uint32_t i = 0; i < n; ++i) {
            s *= p;
            if (s > kAmbientCap) throw std::invalid_argument("ambient size p^n exceeds cap");
        }
        size_ = s;
    }

    uint64_t size() const { return size_; }

    bool operator==(const FieldParams& o) const { return p == o.p && n == o.n; }
    bool operator!=(const FieldParams& o) const { return !(*this == o); }

    Vec decode(uint64_t idx) const {
        Vec v(n);
        for (uint32_t i = 0; i < n; ++i) {
            v[i] = uint8_t(idx % p);
            idx /= p;
        }
        return v;
    }

    uint64_t encode(const Vec& v) const {
        uint64_t idx = 0, mul = 1;
        for (uint32_t i = 0; i < n; ++i) {
            idx += uint64_t(v[i] % p) * mul;
            mul *= p;
        }
        return idx;
    }

    Vec zero() const { return Vec(n, 0); }

    Vec unit(uint32_t i) const {
        Vec v(n, 0);
        v[i] = 1;
        return v;
    }

    Vec add(const Vec& a, const Vec& b) const {
        Vec r(n);
        for (uint32_t i = 0; i < n; ++i) r[i] = uint8_t((a[i] + b[i]) % p);
        return r;
    }

    Vec sub(const Vec& a, const Vec& b) const {
        Vec r(n);
        for (uint32_t i = 0; i < n; ++i) r[i] = uint8_t((a[i] + p - b[i]) % p);
        return r;
    }

    Vec neg(const Vec& a) const {
        Vec r(n);
        for (uint32_t i = 0; i < n; ++i) r[i] = uint8_t((p - a[i]) % p);
        return r;
    }

    Vec scale(uint32_t c, const Vec& a) const {
        Vec r(n);
        for (uint32_t i = 0; i < n; ++i) r[i] = uint8_t((uint64_t(c) * a[i]) % p);
        return r;
    }

    uint32_t dot(const Vec& a, const Vec& b) const {
        uint64_t s = 0;
        for (uint32_t i = 0; i < n; ++i) s += uint64_t(a[i]) * b[i];
        return uint32_t(s % p);
    }

    bool is_zero(const Vec& a) const {
        for (uint32_t i = 0; i < n; ++i)
            if (a[i]) return false;
        return true;
    }

    // Index-level arithmetic, digitwise mod p.
    uint64_t add_idx(uint64_t a, uint64_t b) const {
        uint64_t r = 0, mul = 1;
        for (uint32_t i = 0; i < n; ++i) {
            r += ((a % p + b % p) % p) * mul;
            a /= p; b /= p; mul *= p;
        }
        return r;
    }

    uint64_t sub_idx(uint64_t a, uint64_t b) const {
        uint64_t r = 0, mul = 1;
        for (uint32_t i = 0; i < n; ++i) {
            r += ((a % p + p - b % p) % p) * mul;
            a /= p; b /= p; mul *= p;
        }
        return r;
    }

    uint64_t neg_idx(uint64_t a) const {
        uint64_t r = 0, mul = 1;
        for (uint32_t i = 0; i < n; ++i) {
            r += ((p - a % p) % p) * mul;
            a /= p; mul *= p;
        }
        return r;
    }

    uint32_t dot_idx(uint64_t a, uint64_t b) const {
        uint64_t s = 0;
        for (uint32_t i = 0; i < n; ++i) {
            s += (a % p) * (b % p);
            a /= p; b /= p;
        }
        return uint32_t(s % p);
    }

    uint32_t inv(uint32_t a) const {
        a %= p;
        if (a == 0) throw std::domain_error("inverse of zero");
        uint32_t r = 1;
        for (uint32_t e = p - 2; e; e >>= 1) {
            if (e & 1) r = uint32_t((uint64_t(r) * a) % p);
            a = uint32_t((uint64_t(a) * a) % p);
        }
        return r;
    }

  private:
    uint64_t size_ = 1;
};

inline uint64_t pow_u64(uint64_t base, uint32_t e) {
    uint64_t r = 1;
    while (e--) r *= base;
    return r;
}

}  // namespace bbr
