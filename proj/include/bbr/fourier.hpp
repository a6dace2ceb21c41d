#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include <gmpxx.h>

#include "bbr/dense_set.hpp"
#include "bbr/field.hpp"
#include "bbr/subspace.hpp"

namespace bbr {

// Character sums of an indicator.  Over F_2 the transform is integral and
// kept exact: walsh[xi] = sum_x 1_A(x) (-1)^{xi.x}.  For odd p the table
// holds complex sums against e^{2 pi i xi.x / p}; magnitude queries are then
// floating point.  Normalized coefficients divide by p^n.
struct FreqTable {
    FieldParams f;
    bool exact = false;
    std::vector<int64_t> walsh;                 // p == 2
    std::vector<std::complex<double>> coeff;    // odd p, unnormalized

    double norm_sq(uint64_t xi) const {
        double sz = double(f.size());
        if (exact) {
            double t = double(walsh[xi]);
            return (t * t) / (sz * sz);
        }
        double m = std::norm(coeff[xi]);
        return m / (sz * sz);
    }
};

inline FreqTable fourier(const DenseSet& a) {
    const FieldParams& f = a.ambient();
    FreqTable out;
    out.f = f;
    uint64_t sz = f.size();
    if (f.p == 2) {
        out.exact = true;
        out.walsh.assign(sz, 0);
        for (uint64_t i = 0; i < sz; ++i) out.walsh[i] = a.test(i) ? 1 : 0;
        // In-place butterfly.
        for (uint64_t h = 1; h < sz; h <<= 1)
            for (uint64_t base = 0; base < sz; base += h << 1)
                for (uint64_t j = base; j < base + h; ++j) {
                    int64_t x = out.walsh[j], y = out.walsh[j + h];
                    out.walsh[j] = x + y;
                    out.walsh[j + h] = x - y;
                }
    } else {
        out.exact = false;
        std::vector<std::complex<double>> cur(sz);
        for (uint64_t i = 0; i < sz; ++i) cur[i] = a.test(i) ? 1.0 : 0.0;
        std::vector<std::complex<double>> root(f.p);
        for (uint32_t r = 0; r < f.p; ++r) {
            double ang = 2.0 * M_PI * double(r) / double(f.p);
            root[r] = {std::cos(ang), std::sin(ang)};
        }
        // One radix-p pass per coordinate.
        uint64_t stride = 1;
        std::vector<std::complex<double>> next(sz);
        for (uint32_t coord = 0; coord < f.n; ++coord) {
            uint64_t block = stride * f.p;
            for (uint64_t base = 0; base < sz; base += block)
                for (uint64_t off = 0; off < stride; ++off) {
                    for (uint32_t k = 0; k < f.p; ++k) {
                        std::complex<double> acc = 0;
                        for (uint32_t t = 0; t < f.p; ++t)
                            acc += cur[base + off + stride * t] * root[(k * t) % f.p];
                        next[base + off + stride * k] = acc;
                    }
                }
            std::swap(cur, next);
            stride = block;
        }
        out.coeff = std::move(cur);
    }
    return out;
}

// Nonzero characters xi with |hat 1_A(xi)| >= rho * alpha, i.e. |T(xi)| >=
// rho |A|.  The threshold enters as rho^2 so the F_2 comparison
// T(xi)^2 * den >= num * |A|^2 is exact integer arithmetic.
inline std::vector<uint64_t> spectrum(const FreqTable& ft, uint64_t set_size, const mpq_class& rho_sq) {
    std::vector<uint64_t> out;
    uint64_t sz = ft.f.size();
    if (ft.exact) {
        mpz_class a2 = mpz_class(set_size) * mpz_class(set_size);
        mpz_class num = rho_sq.get_num(), den = rho_sq.get_den();
        for (uint64_t xi = 1; xi < sz; ++xi) {
            mpz_class t2 = mpz_class(ft.walsh[xi]) * mpz_class(ft.walsh[xi]);
            if (t2 * den >= num * a2) out.push_back(xi);
        }
    } else {
        double thr = rho_sq.get_d() * double(set_size) * double(set_size);
        for (uint64_t xi = 1; xi < sz; ++xi)
            if (std::norm(ft.coeff[xi]) >= thr) out.push_back(xi);
    }
    return out;
}

inline Subspace spectrum_span(const FieldParams& f, const std::vector<uint64_t>& spec) {
    std::vector<Vec> gens;
    gens.reserve(spec.size());
    for (uint64_t xi : spec) gens.push_back(f.decode(xi));
    return Subspace::span(f, std::move(gens));
}

}  // namespace bbr
