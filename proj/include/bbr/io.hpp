#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bbr/dense_set.hpp"
#include "bbr/field.hpp"
#include "bbr/grid.hpp"
#include "bbr/phi.hpp"
#include "bbr/variety.hpp"

namespace bbr {

// Text formats.  Line 1 of every file is `p=.. n=.. [m=..] kind=..`; lines
// starting with # are comments.  Vectors are written as base-p digit strings
// with the least significant coordinate first (digits 0-9 then a-g), so the
// vector (1,0,2) over F_3 reads "102".  `points:` bodies list one member per
// line, grid members as x digits, a space, y digits.  p=2 linear sets use a
// `mask:` body instead: lowercase hex rows of the membership bitmap in index
// order, 4 cells per digit with the first cell in the digit's low bit.

namespace iodetail {

constexpr size_t kMaskRow = 64;  // hex digits per mask row

inline std::string hex_mask(uint64_t bits, const std::function<bool(uint64_t)>& test) {
    static const char* digits = "0123456789abcdef";
    std::string s((bits + 3) / 4, '0');
    for (uint64_t i = 0; i < bits; ++i)
        if (test(i)) {
            size_t d = i / 4;
            s[d] = digits[(s[d] <= '9' ? s[d] - '0' : s[d] - 'a' + 10) | (1u << (i % 4))];
        }
    return s;
}

inline int hex_val(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
}

inline char digit_char(uint32_t d) { return "0123456789abcdefg"[d]; }

inline int digit_val(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'g') return c - 'a' + 10;
    return -1;
}

inline std::string digits_of(const FieldParams& f, uint64_t index) {
    std::string s(f.n, '0');
    for (uint32_t i = 0; i < f.n; ++i) {
        s[i] = digit_char(uint32_t(index % f.p));
        index /= f.p;
    }
    return s;
}

inline uint64_t index_of(const FieldParams& f, const std::string& s, const char* what) {
    if (s.size() != f.n)
        throw std::runtime_error(std::string(what) + " needs " + std::to_string(f.n) + " digits: " + s);
    uint64_t idx = 0, mul = 1;
    for (char c : s) {
        int d = digit_val(c);
        if (d < 0 || uint32_t(d) >= f.p) throw std::runtime_error(std::string("bad digit in ") + what + ": " + s);
        idx += uint64_t(d) * mul;
        mul *= f.p;
    }
    return idx;
}

struct Lines {
    std::vector<std::string> v;
    size_t pos = 0;

    explicit Lines(const std::string& text) {
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line[0] == '#') continue;
            v.push_back(line);
        }
    }

    const std::string& next(const char* what) {
        if (pos >= v.size()) throw std::runtime_error(std::string("unexpected end of file, wanted ") + what);
        return v[pos++];
    }

    const std::string& peek() const {
        if (pos >= v.size()) throw std::runtime_error("unexpected end of file");
        return v[pos];
    }

    bool done() const { return pos >= v.size(); }
};

inline uint64_t parse_u64(const std::string& s, const char* what) {
    size_t used = 0;
    uint64_t val = 0;
    try {
        val = std::stoull(s, &used);
    } catch (...) {
        throw std::runtime_error(std::string("bad number for ") + what + ": " + s);
    }
    if (used != s.size()) throw std::runtime_error(std::string("trailing junk in ") + what + ": " + s);
    return val;
}

// "key=value" fields separated by single spaces, fixed order enforced.
inline std::vector<uint64_t> parse_fields(const std::string& line, const std::vector<std::string>& keys,
                                          std::string* kind) {
    std::istringstream in(line);
    std::string tok;
    std::vector<uint64_t> out;
    for (const auto& key : keys) {
        if (!(in >> tok)) throw std::runtime_error("missing field " + key);
        auto eq = tok.find('=');
        if (eq == std::string::npos || tok.substr(0, eq) != key)
            throw std::runtime_error("expected field " + key + ", got " + tok);
        std::string val = tok.substr(eq + 1);
        if (key == "kind") {
            if (kind) *kind = val;
            out.push_back(0);
        } else {
            out.push_back(parse_u64(val, key.c_str()));
        }
    }
    if (in >> tok) throw std::runtime_error("trailing field " + tok);
    return out;
}

}  // namespace iodetail

inline std::string write_grid_set(const GridSet& g) {
    std::ostringstream out;
    out << "p=" << g.xside().p << " n=" << g.yside().n << " m=" << g.xside().n << " kind=grid\n";
    out << "# base-p digits, least significant coordinate first; x digits, space, y digits\n";
    out << "points:\n";
    for (uint64_t y = 0; y < g.ysize(); ++y)
        for (uint64_t x = 0; x < g.xsize(); ++x)
            if (g.test(x, y))
                out << iodetail::digits_of(g.xside(), x) << ' ' << iodetail::digits_of(g.yside(), y) << "\n";
    return out.str();
}

inline std::string write_dense_set(const DenseSet& s) {
    std::ostringstream out;
    const FieldParams& f = s.ambient();
    out << "p=" << f.p << " n=" << f.n << " kind=linear\n";
    if (f.p == 2) {
        out << "# hex rows, 4 cells per digit in index order, first cell in the low bit\n";
        out << "mask:\n";
        std::string hex = iodetail::hex_mask(f.size(), [&](uint64_t i) { return s.test(i); });
        for (size_t i = 0; i < hex.size(); i += iodetail::kMaskRow)
            out << hex.substr(i, iodetail::kMaskRow) << "\n";
    } else {
        out << "# base-p digits, least significant coordinate first\n";
        out << "points:\n";
        for (uint64_t i : s.members()) out << iodetail::digits_of(f, i) << "\n";
    }
    return out.str();
}

inline GridSet read_grid_set(const std::string& text) {
    iodetail::Lines ls(text);
    std::string kind;
    auto f = iodetail::parse_fields(ls.next("header"), {"p", "n", "m", "kind"}, &kind);
    if (kind != "grid") throw std::runtime_error("expected kind=grid, got kind=" + kind);
    GridSet g(FieldParams{uint32_t(f[0]), uint32_t(f[2])}, FieldParams{uint32_t(f[0]), uint32_t(f[1])});
    if (ls.next("body marker") != "points:") throw std::runtime_error("grid sets need a points: body");
    while (!ls.done()) {
        const std::string& line = ls.next("point");
        auto sp = line.find(' ');
        if (sp == std::string::npos || line.find(' ', sp + 1) != std::string::npos)
            throw std::runtime_error("grid point needs x digits, space, y digits: " + line);
        uint64_t x = iodetail::index_of(g.xside(), line.substr(0, sp), "x point");
        uint64_t y = iodetail::index_of(g.yside(), line.substr(sp + 1), "y point");
        if (g.test(x, y)) throw std::runtime_error("duplicate point: " + line);
        g.add(x, y);
    }
    return g;
}

inline DenseSet read_dense_set(const std::string& text) {
    iodetail::Lines ls(text);
    std::string kind;
    auto f = iodetail::parse_fields(ls.next("header"), {"p", "n", "kind"}, &kind);
    if (kind != "linear") throw std::runtime_error("expected kind=linear, got kind=" + kind);
    DenseSet s(FieldParams{uint32_t(f[0]), uint32_t(f[1])});
    uint64_t total = s.ambient().size();
    const std::string& marker = ls.next("body marker");
    if (marker == "mask:") {
        if (f[0] != 2) throw std::runtime_error("mask bodies apply to p=2 only");
        std::string hex;
        while (!ls.done()) hex += ls.next("mask row");
        if (hex.size() != (total + 3) / 4) throw std::runtime_error("mask length mismatch");
        for (uint64_t i = 0; i < 4 * uint64_t(hex.size()); ++i) {
            int v = iodetail::hex_val(hex[i / 4]);
            if (v < 0) throw std::runtime_error("bad mask digit");
            if ((v >> (i % 4)) & 1) {
                if (i >= total) throw std::runtime_error("mask sets a padding bit");
                s.add(i);
            }
        }
    } else if (marker == "points:") {
        while (!ls.done()) {
            uint64_t i = iodetail::index_of(s.ambient(), ls.next("point"), "point");
            if (s.test(i)) throw std::runtime_error("duplicate point");
            s.add(i);
        }
    } else {
        throw std::runtime_error("expected points: or mask:, got " + marker);
    }
    return s;
}

inline std::string write_variety(const BilinearVariety& bv) {
    std::ostringstream out;
    out << "p=" << bv.xside.p << " n=" << bv.yside.n << " m=" << bv.xside.n << " kind=variety\n";
    out << "# basis vectors and form columns M e_j as base-p digits, least significant first\n";
    out << "v:\n";
    for (const auto& b : bv.v.basis()) out << iodetail::digits_of(bv.xside, bv.xside.encode(b)) << "\n";
    out << "w:\n";
    for (const auto& b : bv.w.basis()) out << iodetail::digits_of(bv.yside, bv.yside.encode(b)) << "\n";
    out << "forms:\n";
    for (const auto& m : bv.forms) {
        for (uint32_t j = 0; j < m.cols; ++j) {
            Vec col(m.rows);
            for (uint32_t i = 0; i < m.rows; ++i) col[i] = m.at(i, j);
            out << (j ? " " : "") << iodetail::digits_of(bv.xside, bv.xside.encode(col));
        }
        out << "\n";
    }
    return out.str();
}

inline BilinearVariety read_variety(const std::string& text) {
    iodetail::Lines ls(text);
    std::string kind;
    auto f = iodetail::parse_fields(ls.next("header"), {"p", "n", "m", "kind"}, &kind);
    if (kind != "variety") throw std::runtime_error("expected kind=variety, got kind=" + kind);
    FieldParams xs{uint32_t(f[0]), uint32_t(f[2])}, ys{uint32_t(f[0]), uint32_t(f[1])};
    if (ls.next("v section") != "v:") throw std::runtime_error("variety needs a v: section");
    std::vector<Vec> vgens, wgens;
    std::vector<Mat> forms;
    while (!ls.done() && ls.peek() != "w:") vgens.push_back(xs.decode(iodetail::index_of(xs, ls.next("v row"), "v row")));
    if (ls.next("w section") != "w:") throw std::runtime_error("variety needs a w: section");
    while (!ls.done() && ls.peek() != "forms:")
        wgens.push_back(ys.decode(iodetail::index_of(ys, ls.next("w row"), "w row")));
    if (ls.next("forms section") != "forms:") throw std::runtime_error("variety needs a forms: section");
    while (!ls.done()) {
        std::istringstream in(ls.next("form"));
        Mat m(xs.n, ys.n);
        std::string tok;
        for (uint32_t j = 0; j < ys.n; ++j) {
            if (!(in >> tok)) throw std::runtime_error("form needs n columns");
            Vec col = xs.decode(iodetail::index_of(xs, tok, "form column"));
            for (uint32_t i = 0; i < xs.n; ++i) m.at(i, j) = col[i];
        }
        if (in >> tok) throw std::runtime_error("form has too many columns");
        forms.push_back(std::move(m));
    }
    return BilinearVariety(xs, ys, Subspace::span(xs, vgens), Subspace::span(ys, wgens), std::move(forms));
}

inline std::string write_count_csv(const CountTable& t) {
    std::ostringstream out;
    out << "x_index,y_index,count_or_density\n";
    uint64_t xs = t.xside.size(), total = xs * t.yside.size();
    for (uint64_t g = 0; g < total; ++g) {
        out << (g % xs) << "," << (g / xs) << ",";
        if (t.mode == CountMode::Exact) {
            out << t.exact[g].get_str();
        } else {
            char buf[64];
            snprintf(buf, sizeof buf, "%.17g", t.approx[g]);
            out << buf;
        }
        out << "\n";
    }
    return out.str();
}

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void spit(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

}  // namespace bbr
