#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include <gmpxx.h>

#include "bbr/conv.hpp"
#include "bbr/dense_set.hpp"
#include "bbr/fourier.hpp"
#include "bbr/rng.hpp"
#include "bbr/subspace.hpp"

namespace bbr {

struct SpectralCertificate {
    mpq_class rho_sq;            // squared spectral threshold actually used
    bool default_rho = true;     // rho^2 = alpha/2
    uint32_t codim = 0;
    uint32_t codim_bound = 0;    // ceil(1 / (rho^2 alpha))
    mpz_class min_count = 0;     // min fourfold count over the subspace
    mpq_class min_normalized;    // min_count / p^{3n}
    mpq_class robust_floor;      // alpha^4 / 2, guaranteed at the default rho
    bool sound = false;          // every member has a positive count
};

struct SpectralResult {
    Subspace v;
    SpectralCertificate cert;
};

inline uint32_t ceil_to_u32(const mpq_class& q) {
    mpz_class c;
    mpz_cdiv_q(c.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
    if (c < 0) return 0;
    return uint32_t(c.get_ui());
}

// Subspace on which every point is a fourfold plus/minus combination of A,
// built from the large spectrum: V annihilates span(Spec_rho(A)).  At the
// default rho^2 = alpha/2 every normalized count on V exceeds alpha^4/2;
// the certificate records the exact minimum, computed from the counting
// table rather than trusted from the Fourier argument.
inline SpectralResult bogolyubov_subspace(const DenseSet& a, std::optional<mpq_class> rho_sq_opt = std::nullopt,
                                          const RepTable* precomputed = nullptr) {
    if (a.empty()) throw std::invalid_argument("bogolyubov_subspace: empty set");
    const FieldParams& f = a.ambient();
    mpq_class alpha = a.density();
    SpectralCertificate cert;
    cert.default_rho = !rho_sq_opt.has_value();
    cert.rho_sq = rho_sq_opt.value_or(alpha / 2);
    if (cert.rho_sq <= 0) throw std::invalid_argument("rho must be positive");
    cert.robust_floor = alpha * alpha * alpha * alpha / 2;
    cert.codim_bound = ceil_to_u32(1 / (cert.rho_sq * alpha));

    auto ft = fourier(a);
    auto spec = spectrum(ft, a.size(), cert.rho_sq);
    Subspace span = spectrum_span(f, spec);
    Subspace v = span.annihilator();
    cert.codim = v.codim();

    RepTable local;
    const RepTable* counts = precomputed;
    if (!counts) {
        local = diff_rep_counts(a);
        counts = &local;
    }
    cert.sound = true;
    bool first = true;
    for (const auto& e : v.elements()) {
        const mpz_class& c = counts->v[f.encode(e)];
        if (c == 0) cert.sound = false;
        if (first || c < cert.min_count) {
            cert.min_count = c;
            first = false;
        }
    }
    mpz_class vol = 1;
    for (uint32_t i = 0; i < 3 * f.n; ++i) vol *= f.p;
    cert.min_normalized = mpq_class(cert.min_count, vol);
    cert.min_normalized.canonicalize();
    return SpectralResult{std::move(v), std::move(cert)};
}

// Exact lower bound on fourfold counts over a given subspace; throws if any
// member has no representation at all.
inline mpq_class robust_certificate(const DenseSet& a, const Subspace& v, const RepTable* precomputed = nullptr) {
    const FieldParams& f = a.ambient();
    RepTable local;
    const RepTable* counts = precomputed;
    if (!counts) {
        local = diff_rep_counts(a);
        counts = &local;
    }
    mpz_class best;
    bool first = true;
    for (const auto& e : v.elements()) {
        const mpz_class& c = counts->v[f.encode(e)];
        if (c == 0) throw std::runtime_error("robust_certificate: subspace leaves the fourfold support");
        if (first || c < best) {
            best = c;
            first = false;
        }
    }
    mpz_class vol = 1;
    for (uint32_t i = 0; i < 3 * f.n; ++i) vol *= f.p;
    mpq_class q(best, vol);
    q.canonicalize();
    return q;
}

namespace detail {

// Recursive enumeration of RREF bases with the partial span constrained to
// stay inside D.  Rows are built with pivot columns increasing; free entries
// count up in base p.  First full basis found at the target dimension wins,
// which fixes the canonical tie-break.
inline bool grow_basis(const DenseSet& d, uint32_t target, uint32_t next_col, std::vector<Vec>& rows,
                       std::vector<uint64_t>& span_ids, Subspace* out) {
    const FieldParams& f = d.ambient();
    if (rows.size() == target) {
        *out = Subspace::span(f, rows);
        return true;
    }
    uint32_t remaining = target - uint32_t(rows.size());
    for (uint32_t col = next_col; col + remaining <= f.n; ++col) {
        // Candidate new row: pivot at col, zeros before it, free digits after.
        uint32_t free_cnt = f.n - col - 1;
        uint64_t free_total = pow_u64(f.p, free_cnt);
        for (uint64_t fv = 0; fv < free_total; ++fv) {
            Vec row(f.n, 0);
            row[col] = 1;
            uint64_t t = fv;
            for (uint32_t j = col + 1; j < f.n; ++j) {
                row[j] = uint8_t(t % f.p);
                t /= f.p;
            }
            // New span elements: c * row + s for existing span s, c != 0.
            uint64_t row_id = f.encode(row);
            bool ok = true;
            std::vector<uint64_t> added;
            for (uint32_t c = 1; c < f.p && ok; ++c) {
                uint64_t cr = f.encode(f.scale(c, row));
                for (uint64_t s : span_ids) {
                    uint64_t e = f.add_idx(cr, s);
                    if (!d.test(e)) {
                        ok = false;
                        break;
                    }
                    added.push_back(e);
                }
            }
            (void)row_id;
            if (!ok) continue;
            rows.push_back(row);
            size_t keep = span_ids.size();
            span_ids.insert(span_ids.end(), added.begin(), added.end());
            if (grow_basis(d, target, col + 1, rows, span_ids, out)) return true;
            rows.pop_back();
            span_ids.resize(keep);
        }
    }
    return false;
}

}  // namespace detail

// Largest subspace wholly inside D, by exhaustive search over canonical
// bases in decreasing dimension.  Requires 0 in D and a small ambient.
inline Subspace max_subspace_bruteforce(const DenseSet& d) {
    const FieldParams& f = d.ambient();
    if (f.size() > 256) throw std::invalid_argument("max_subspace_bruteforce: ambient too large");
    if (!d.test(uint64_t(0))) throw std::invalid_argument("max_subspace_bruteforce: needs 0 in D");
    for (uint32_t target = f.n;; --target) {
        if (target == 0) return Subspace::zero(f);
        std::vector<Vec> rows;
        std::vector<uint64_t> span_ids{0};
        Subspace out;
        if (detail::grow_basis(d, target, 0, rows, span_ids, &out)) return out;
    }
}

// A quadruple (s1, s2, s3, s4) in S^4 with s1+s2-s3-s4 = y.  Seeded sampling
// first, exhaustive pair scan as fallback; nullopt only when y genuinely has
// no representation.
inline std::optional<std::array<uint64_t, 4>> find_representation(uint64_t y, const DenseSet& s, Rng rng,
                                                                  uint64_t budget = 0) {
    if (s.empty()) return std::nullopt;
    const FieldParams& f = s.ambient();
    auto mem = s.members();
    if (y == 0) {
        uint64_t m0 = mem[0];
        return std::array<uint64_t, 4>{m0, m0, m0, m0};
    }
    if (budget == 0) {
        // 64 / alpha^3 draws, capped.
        mpq_class alpha = s.density();
        mpq_class b = 64 / (alpha * alpha * alpha);
        mpz_class c;
        mpz_cdiv_q(c.get_mpz_t(), b.get_num().get_mpz_t(), b.get_den().get_mpz_t());
        budget = c.fits_ulong_p() ? c.get_ui() : (uint64_t(1) << 22);
        budget = std::min<uint64_t>(budget, uint64_t(1) << 22);
    }
    for (uint64_t t = 0; t < budget; ++t) {
        uint64_t s1 = mem[rng.below(mem.size())];
        uint64_t s2 = mem[rng.below(mem.size())];
        uint64_t s3 = mem[rng.below(mem.size())];
        uint64_t s4 = f.sub_idx(f.add_idx(s1, s2), f.add_idx(s3, y));
        if (s.test(s4)) return std::array<uint64_t, 4>{s1, s2, s3, s4};
    }
    // Exhaustive: for each (s1, s2), scan s3.
    for (uint64_t s1 : mem)
        for (uint64_t s2 : mem) {
            uint64_t u = f.sub_idx(f.add_idx(s1, s2), y);
            for (uint64_t s3 : mem) {
                uint64_t s4 = f.sub_idx(u, s3);
                if (s.test(s4)) return std::array<uint64_t, 4>{s1, s2, s3, s4};
            }
        }
    return std::nullopt;
}

}  // namespace bbr
