#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "bbr/dense_set.hpp"
#include "bbr/field.hpp"
#include "bbr/grid.hpp"
#include "bbr/io.hpp"
#include "bbr/maps.hpp"
#include "bbr/rng.hpp"
#include "bbr/subspace.hpp"
#include "bbr/variety.hpp"

namespace bbr {

inline Mat random_mat(uint32_t rows, uint32_t cols, uint32_t p, Rng& rng) {
    Mat m(rows, cols);
    for (auto& e : m.a) e = uint8_t(rng.below(p));
    return m;
}

// Random subspace of the given codimension: grow a random span to dimension
// codim and take its annihilator.
inline Subspace random_subspace_codim(const FieldParams& f, uint32_t codim, Rng& rng) {
    if (codim > f.n) throw std::invalid_argument("codim exceeds dimension");
    Subspace s = Subspace::zero(f);
    while (s.dim() < codim) {
        Vec v = f.decode(rng.below(f.size()));
        if (!s.contains(v)) s = s.sum(Subspace::span(f, {v}));
    }
    return s.annihilator();
}

// Exactly round(density * cells) members, sampled without replacement.
inline GridSet exact_density_random(const FieldParams& xs, const FieldParams& ys, double density, Rng& rng) {
    GridSet g(xs, ys);
    uint64_t total = g.grid_size();
    uint64_t target = uint64_t(std::llround(density * double(total)));
    if (target > total) target = total;
    std::vector<uint64_t> perm(total);
    std::iota(perm.begin(), perm.end(), 0);
    for (uint64_t i = 0; i < target; ++i) {
        uint64_t j = i + rng.below(total - i);
        std::swap(perm[i], perm[j]);
        g.add(perm[i] % xs.size(), perm[i] / xs.size());
    }
    return g;
}

inline BilinearVariety planted_variety(const FieldParams& xs, const FieldParams& ys,
                                       const std::vector<uint32_t>& codims, Rng& rng) {
    if (codims.size() != 3) throw std::invalid_argument("planted_variety wants three codims");
    Subspace v = random_subspace_codim(xs, codims[0], rng);
    Subspace w = random_subspace_codim(ys, codims[1], rng);
    std::vector<Mat> forms;
    while (forms.size() < codims[2]) {
        Mat m = random_mat(xs.n, ys.n, xs.p, rng);
        bool zero = true;
        for (auto e : m.a) zero = zero && e == 0;
        if (!zero) forms.push_back(std::move(m));
    }
    return BilinearVariety(xs, ys, std::move(v), std::move(w), std::move(forms));
}

inline GridSet variety_to_set(const BilinearVariety& bv, double deletion, Rng& rng,
                              uint64_t cap = uint64_t(1) << 20) {
    GridSet g(bv.xside, bv.yside);
    for (auto [x, y] : bv.members(cap)) {
        if (deletion > 0 && rng.unit_real() < deletion) continue;
        g.add(x, y);
    }
    return g;
}

struct GeneratorSpec {
    std::string kind = "random";  // random | product | planted_variety | graph | from_file
    uint32_t p = 2, m = 1, n = 1;
    bool linear = false;  // one-dimensional output (kinds random, product, from_file)
    double density = 0.5;
    std::vector<uint32_t> codims;
    double deletion = 0.0;
    std::string base_path;
    uint64_t seed = 0;
};

inline DenseSet generate_linear(const GeneratorSpec& spec) {
    Rng rng(spec.seed);
    FieldParams f(spec.p, spec.n);
    if (spec.kind == "random") {
        DenseSet s(f);
        uint64_t total = f.size();
        uint64_t target = uint64_t(std::llround(spec.density * double(total)));
        if (target > total) target = total;
        std::vector<uint64_t> perm(total);
        std::iota(perm.begin(), perm.end(), 0);
        for (uint64_t i = 0; i < target; ++i) {
            std::swap(perm[i], perm[i + rng.below(total - i)]);
            s.add(perm[i]);
        }
        return s;
    }
    if (spec.kind == "product") {
        if (spec.codims.size() != 1) throw std::invalid_argument("linear product wants one codim");
        return DenseSet::of_subspace(random_subspace_codim(f, spec.codims[0], rng));
    }
    if (spec.kind == "from_file") return read_dense_set(slurp(spec.base_path));
    throw std::invalid_argument("kind " + spec.kind + " makes grid sets only");
}

inline GridSet generate(const GeneratorSpec& spec) {
    Rng rng(spec.seed);
    FieldParams xs(spec.p, spec.m), ys(spec.p, spec.n);
    if (spec.kind == "random") return exact_density_random(xs, ys, spec.density, rng);
    if (spec.kind == "product") {
        if (spec.codims.size() != 2) throw std::invalid_argument("product wants two codims");
        Subspace v = random_subspace_codim(xs, spec.codims[0], rng);
        Subspace w = random_subspace_codim(ys, spec.codims[1], rng);
        return GridSet::product(DenseSet::of_subspace(v), DenseSet::of_subspace(w));
    }
    if (spec.kind == "planted_variety") {
        BilinearVariety bv = planted_variety(xs, ys, spec.codims, rng);
        return variety_to_set(bv, spec.deletion, rng);
    }
    if (spec.kind == "graph") {
        DenseSet a0 = read_dense_set(slurp(spec.base_path));
        if (a0.ambient().p != spec.p || a0.ambient().n != spec.n)
            throw std::invalid_argument("graph base set does not match the declared y side");
        return GridSet::cylinder(xs, a0);
    }
    if (spec.kind == "from_file") return read_grid_set(slurp(spec.base_path));
    throw std::invalid_argument("unknown generator kind: " + spec.kind);
}

}  // namespace bbr
