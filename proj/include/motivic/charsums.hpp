#pragma once

// Character-sum multisets over extensions of an odd base field, matrix-product
// multisets of a rational 2x2 matrix function at roots of unity, and a
// multiset comparator. The two multisets are the objects one would compare
// when hunting for a matrix function that reproduces the character sums.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "motivic/ff.hpp"
#include "nlohmann/json.hpp"

namespace motivic::charsums {

using Cplx = std::complex<double>;

inline constexpr unsigned long long kCharSumBudget = 3000;  // cap on q^n; the full set costs ~q^{2n} work

// ---- configuration --------------------------------------------------------------

struct CharSumConfig {
    unsigned q = 0;  // base field size, odd prime power
    unsigned n = 1;  // level: sums run over F_{q^n}
    ff::FElem x = 0;     // base-field element outside {0, 1}
    ff::FieldPtr base;   // F_q
    ff::FieldPtr work;   // F_{q^n}
    ff::DlogTable dlog;  // over the work field
};

inline CharSumConfig make_charsum_config(unsigned q, unsigned n, ff::FElem x,
                                         unsigned generator_rank = 0,
                                         unsigned long long budget = kCharSumBudget) {
    if (q < 3 || q % 2 == 0)
        throw std::invalid_argument("charsum: base size must be odd and at least 3");
    if (n == 0) throw std::invalid_argument("charsum: level must be positive");
    if (x < 2 || x >= q) throw std::invalid_argument("charsum: x must avoid 0 and 1");
    unsigned p = 3;
    while (q % p != 0) p += 2;
    unsigned long long pw = 1;
    unsigned e = 0;
    while (pw < q) {
        pw *= p;
        ++e;
    }
    if (pw != q) throw std::invalid_argument("charsum: base size must be a prime power");
    unsigned long long qn = 1;
    for (unsigned i = 0; i < n; ++i) {
        qn *= q;
        if (qn > budget)
            throw BudgetError("charsum: q^n exceeds the budget of " + std::to_string(budget));
    }
    CharSumConfig cfg;
    cfg.q = q;
    cfg.n = n;
    cfg.x = x;
    cfg.base = ff::make_field(p, e);
    cfg.work = ff::extend_field(cfg.base, n);
    cfg.dlog = ff::build_dlog(cfg.work, generator_rank);
    return cfg;
}

// ---- character-sum multiset -----------------------------------------------------

// For each nontrivial multiplicative character chi_j of the work field
// (chi_j(g^a) = exp(2 pi i j a / (q^n - 1))), the sum of chi(y(1-xy)/(1-y))
// over y outside {0, 1, x}, with chi(0) = 0 dropping the zero-argument term.
// Returns the q^n - 2 values in character order j = 1 .. q^n - 2.
inline std::vector<Cplx> x_n_set(const CharSumConfig& cfg) {
    const ff::Field& F = *cfg.work;
    const std::size_t order = F.size - 1;
    const ff::FElem one = F.one();
    const ff::FElem xw = cfg.n == 1 ? cfg.x : cfg.work->embed_base(cfg.x);

    std::vector<std::uint32_t> logs;
    logs.reserve(F.size);
    for (std::size_t y = 0; y < F.size; ++y) {
        ff::FElem ye = (ff::FElem)y;
        if (ye == 0 || ye == one || ye == xw) continue;
        ff::FElem f = F.div(F.mul(ye, F.sub(one, F.mul(xw, ye))), F.sub(one, ye));
        if (f != 0) logs.push_back(cfg.dlog.log[f]);
    }

    std::vector<Cplx> root(order);
    const double tau = 2.0 * std::acos(-1.0);
    for (std::size_t k = 0; k < order; ++k) root[k] = std::polar(1.0, tau * (double)k / (double)order);

    std::vector<Cplx> out;
    out.reserve(order - 1);
    for (std::size_t j = 1; j < order; ++j) {
        Cplx s(0.0, 0.0);
        for (std::uint32_t a : logs) s += root[((std::uint64_t)j * a) % order];
        out.push_back(s);
    }
    return out;
}

// ---- rational 2x2 matrix functions ----------------------------------------------

struct RationalFn {
    std::vector<Cplx> num{Cplx(0.0, 0.0)};  // coefficients, constant term first
    std::vector<Cplx> den{Cplx(1.0, 0.0)};
};

struct MatrixFunction {
    RationalFn entry[2][2];  // row-major
};

inline constexpr double kPoleTolerance = 1e-12;

namespace detail {

inline Cplx horner(const std::vector<Cplx>& coeffs, Cplx z) {
    Cplx r(0.0, 0.0);
    for (std::size_t i = coeffs.size(); i-- > 0;) r = r * z + coeffs[i];
    return r;
}

inline std::string cplx_str(Cplx z) {
    std::ostringstream os;
    os << "(" << z.real() << ", " << z.imag() << ")";
    return os.str();
}

}  // namespace detail

inline Cplx eval_rational(const RationalFn& f, Cplx z) {
    Cplx d = detail::horner(f.den, z);
    if (std::abs(d) < kPoleTolerance)
        throw std::domain_error("matrix function pole at z = " + detail::cplx_str(z));
    return detail::horner(f.num, z) / d;
}

inline MatrixFunction constant_matrix(Cplx a, Cplx b, Cplx c, Cplx d) {
    MatrixFunction m;
    m.entry[0][0].num = {a};
    m.entry[0][1].num = {b};
    m.entry[1][0].num = {c};
    m.entry[1][1].num = {d};
    return m;
}

// Trace(R(z) R(z^q) ... R(z^{q^{n-1}})) at every (q^n - 1)-st root of unity
// except 1. Exponents are reduced modulo q^n - 1 so every evaluation point
// is exactly a root of unity. Values in root order z = exp(2 pi i k / (q^n-1)),
// k = 1 .. q^n - 2.
inline std::vector<Cplx> xprime_n_set(const MatrixFunction& R, unsigned q, unsigned n,
                                      unsigned long long budget = kCharSumBudget) {
    if (q < 2) throw std::invalid_argument("xprime: base must be at least 2");
    if (n == 0) throw std::invalid_argument("xprime: level must be positive");
    unsigned long long qn = 1;
    for (unsigned i = 0; i < n; ++i) {
        qn *= q;
        if (qn > budget)
            throw BudgetError("xprime: q^n exceeds the budget of " + std::to_string(budget));
    }
    const std::size_t order = (std::size_t)qn - 1;
    std::vector<Cplx> root(order);
    const double tau = 2.0 * std::acos(-1.0);
    for (std::size_t k = 0; k < order; ++k) root[k] = std::polar(1.0, tau * (double)k / (double)order);

    std::vector<Cplx> out;
    out.reserve(order - 1);
    for (std::size_t k = 1; k < order; ++k) {
        Cplx prod[2][2] = {{1.0, 0.0}, {0.0, 1.0}};
        std::uint64_t ex = k;
        for (unsigned v = 0; v < n; ++v) {
            Cplx z = root[ex % order];
            Cplx m[2][2];
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) m[i][j] = eval_rational(R.entry[i][j], z);
            Cplx next[2][2];
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    next[i][j] = prod[i][0] * m[0][j] + prod[i][1] * m[1][j];
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) prod[i][j] = next[i][j];
            ex = ex * q % order;
        }
        out.push_back(prod[0][0] + prod[1][1]);
    }
    return out;
}

// ---- multiset comparison --------------------------------------------------------

struct MultisetReport {
    bool ok = true;
    double max_discrepancy = 0.0;
    std::size_t worst_index = 0;  // position in the sorted left multiset
    Cplx left{0.0, 0.0}, right{0.0, 0.0};
};

// Greedy nearest matching after sorting both sides; reports the worst pair.
inline MultisetReport compare_multisets(std::vector<Cplx> a, std::vector<Cplx> b, double tol) {
    if (a.size() != b.size())
        throw std::invalid_argument("compare_multisets: sizes differ (" +
                                    std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()) + ")");
    auto by_parts = [](Cplx u, Cplx v) {
        if (u.real() != v.real()) return u.real() < v.real();
        return u.imag() < v.imag();
    };
    std::sort(a.begin(), a.end(), by_parts);
    std::sort(b.begin(), b.end(), by_parts);
    MultisetReport r;
    std::vector<bool> used(b.size(), false);
    for (std::size_t i = 0; i < a.size(); ++i) {
        std::size_t best = b.size();
        double bd = 0.0;
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (used[j]) continue;
            double d = std::abs(a[i] - b[j]);
            if (best == b.size() || d < bd) {
                best = j;
                bd = d;
            }
        }
        used[best] = true;
        if (bd > r.max_discrepancy) {
            r.max_discrepancy = bd;
            r.worst_index = i;
            r.left = a[i];
            r.right = b[best];
        }
    }
    r.ok = r.max_discrepancy <= tol;
    return r;
}

// ---- JSON -----------------------------------------------------------------------

inline nlohmann::json multiset_to_json(std::vector<Cplx> vals) {
    std::sort(vals.begin(), vals.end(), [](Cplx u, Cplx v) {
        if (u.real() != v.real()) return u.real() < v.real();
        return u.imag() < v.imag();
    });
    nlohmann::json arr = nlohmann::json::array();
    for (Cplx v : vals) arr.push_back({v.real(), v.imag()});
    return arr;
}

inline nlohmann::json rational_fn_to_json(const RationalFn& f) {
    nlohmann::json num = nlohmann::json::array(), den = nlohmann::json::array();
    for (Cplx c : f.num) num.push_back({c.real(), c.imag()});
    for (Cplx c : f.den) den.push_back({c.real(), c.imag()});
    return {{"num", num}, {"den", den}};
}

inline RationalFn rational_fn_from_json(const nlohmann::json& j) {
    RationalFn f;
    f.num.clear();
    f.den.clear();
    for (const auto& c : j.at("num")) f.num.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
    for (const auto& c : j.at("den")) f.den.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
    if (f.num.empty() || f.den.empty())
        throw std::invalid_argument("matrix function: empty coefficient list");
    return f;
}

inline nlohmann::json matrix_function_to_json(const MatrixFunction& m) {
    nlohmann::json entries = nlohmann::json::array();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) entries.push_back(rational_fn_to_json(m.entry[i][j]));
    return {{"entries", entries}};
}

inline MatrixFunction matrix_function_from_json(const nlohmann::json& j) {
    const auto& entries = j.at("entries");
    if (!entries.is_array() || entries.size() != 4)
        throw std::invalid_argument("matrix function: need exactly 4 entries, row-major");
    MatrixFunction m;
    for (int i = 0; i < 2; ++i)
        for (int jx = 0; jx < 2; ++jx) m.entry[i][jx] = rational_fn_from_json(entries[i * 2 + jx]);
    return m;
}

}  // namespace motivic::charsums
