#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <gmpxx.h>

#include "bbr/maps.hpp"
#include "bbr/rng.hpp"
#include "bbr/subspace.hpp"

namespace bbr {

// rank > 4k + log_p(1/delta) + 1, decided exactly as
// delta * p^{rank - 4k - 1} > 1 in rationals.
inline bool rank_exceeds_threshold(uint32_t rank, uint32_t k, const mpq_class& delta, uint32_t p) {
    int64_t e = int64_t(rank) - 4 * int64_t(k) - 1;
    if (e <= 0) return false;  // p^e <= 1, and delta <= 1
    mpz_class pe = 1;
    for (int64_t i = 0; i < e; ++i) pe *= p;
    return delta * pe > 1;
}

struct PeelStats {
    uint32_t levels = 0;
    bool exhaustive = true;      // every min-rank scan was exhaustive
    bool threshold_hit = false;  // recursion ended by the rank threshold
};

namespace detail {

inline std::vector<Mat> span_basis_mats(const std::vector<Mat>& fam, uint32_t p) {
    if (fam.empty()) return {};
    uint32_t rows = fam[0].rows, cols = fam[0].cols;
    FieldParams flat{};
    flat.p = p;
    flat.n = rows * cols;
    std::vector<Vec> gens;
    gens.reserve(fam.size());
    for (const auto& m : fam) gens.push_back(mat_flatten(m));
    auto piv = detail::rref(gens, flat);
    (void)piv;
    std::vector<Mat> out;
    out.reserve(gens.size());
    for (const auto& g : gens) out.push_back(mat_unflatten(g, rows, cols));
    return out;
}

inline Subspace peel(std::vector<Mat> fam, uint32_t slots, const mpq_class& delta, uint32_t p, uint32_t m,
                     uint64_t cap, Rng rng, PeelStats* stats) {
    FieldParams cod(p, m);
    std::vector<Mat> basis = span_basis_mats(fam, p);
    if (basis.empty()) return Subspace::zero(cod);
    uint32_t k = uint32_t(basis.size()) * slots;
    auto mr = min_rank_element(basis, p, cap, rng.child(basis.size()));
    if (stats) {
        stats->levels++;
        stats->exhaustive = stats->exhaustive && mr.exhaustive;
    }
    if (rank_exceeds_threshold(mr.rank, k, delta, p)) {
        if (stats) stats->threshold_hit = true;
        return Subspace::zero(cod);
    }
    auto pr = project_along(mr.matrix, p);
    std::vector<Mat> next;
    next.reserve(basis.size());
    for (const auto& b : basis) next.push_back(mat_mul(pr.proj.matrix, b, p));
    return pr.image.sum(peel(std::move(next), slots, delta, p, m, cap, rng.child(0x9e37), stats));
}

}  // namespace detail

// Subspace Z of the codomain such that low-rank structure in the span of
// the family is captured: repeatedly split off the image of a minimum-rank
// span element and recurse on the projected family, stopping once every
// nonzero span element has rank beyond 4k + log_p(1/delta) + 1.
inline Subspace map_subspace(const std::vector<Mat>& family, const mpq_class& delta, uint32_t p, uint32_t codim_n,
                             uint64_t cap = uint64_t(1) << 12, Rng rng = Rng(0), PeelStats* stats = nullptr) {
    if (delta <= 0 || delta > 1) throw std::invalid_argument("map_subspace: delta must be in (0, 1]");
    return detail::peel(family, 1, delta, p, codim_n, cap, rng, stats);
}

// Same recursion for the s-fold lifted family {(s_1..s_slots) -> sum_i
// M_i(s_i)}: block structure makes the lifted span's minimum rank equal the
// base span's, with the same witness image, so only the k entering the
// threshold changes (k = slots * dim span).
inline Subspace map_subspace_lifted(const std::vector<Mat>& base_family, uint32_t slots, const mpq_class& delta,
                                    uint32_t p, uint32_t codim_n, uint64_t cap = uint64_t(1) << 12, Rng rng = Rng(0),
                                    PeelStats* stats = nullptr) {
    if (slots == 0) throw std::invalid_argument("map_subspace_lifted: slots must be positive");
    if (delta <= 0 || delta > 1) throw std::invalid_argument("map_subspace_lifted: delta must be in (0, 1]");
    return detail::peel(base_family, slots, delta, p, codim_n, cap, rng, stats);
}

// Build the lifted family explicitly: each base matrix occupies one slot of
// the widened domain.  Used to cross-check the fast path.
inline std::vector<Mat> lift_family(const std::vector<Mat>& base, uint32_t slots) {
    std::vector<Mat> out;
    if (base.empty()) return out;
    uint32_t rows = base[0].rows, cols = base[0].cols;
    for (uint32_t s = 0; s < slots; ++s)
        for (const auto& b : base) {
            Mat m(rows, cols * slots);
            for (uint32_t r = 0; r < rows; ++r)
                for (uint32_t c = 0; c < cols; ++c) m.at(r, s * cols + c) = b.at(r, c);
            out.push_back(std::move(m));
        }
    return out;
}

// dim(Z) <= k (2k + log_p(1/delta) + 3); the log enters through bit sizes
// so the check stays safe for very small delta.
inline double peel_dim_bound(uint32_t k, const mpq_class& delta, uint32_t p) {
    mpq_class inv = 1 / delta;
    double log2inv = double(mpz_sizeinbase(inv.get_num().get_mpz_t(), 2)) -
                     double(mpz_sizeinbase(inv.get_den().get_mpz_t(), 2)) + 1.0;
    double logp = log2inv / std::log2(double(p));
    return double(k) * (2.0 * k + logp + 3.0);
}

}  // namespace bbr
