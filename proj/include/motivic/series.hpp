#pragma once

// Truncated power series over Q with exact coefficients, plus the zeta-style
// exponential and exact rational-function (Pade) reconstruction. A Pade fit
// must reproduce every available coefficient of the input, not just the ones
// that determine it; otherwise the answer is a definite "no fit".

#include <optional>
#include <stdexcept>
#include <vector>

#include "motivic/poly.hpp"
#include "motivic/rational.hpp"

namespace motivic {

// coeffs[k] is the t^k coefficient; the series is known through t^order.
struct PowerSeries {
    std::vector<Rat> c;

    explicit PowerSeries(std::size_t order = 0) : c(order + 1, Rat(0)) {}

    std::size_t order() const { return c.size() - 1; }

    static PowerSeries one(std::size_t order) {
        PowerSeries s(order);
        s.c[0] = 1;
        return s;
    }

    static PowerSeries from_coeffs(std::vector<Rat> coeffs) {
        if (coeffs.empty()) throw std::invalid_argument("series needs at least the constant term");
        PowerSeries s;
        s.c = std::move(coeffs);
        return s;
    }

    bool operator==(const PowerSeries& o) const { return c == o.c; }
};

inline PowerSeries series_add(const PowerSeries& a, const PowerSeries& b) {
    std::size_t n = std::min(a.order(), b.order());
    PowerSeries r(n);
    for (std::size_t i = 0; i <= n; ++i) r.c[i] = a.c[i] + b.c[i];
    return r;
}

inline PowerSeries series_sub(const PowerSeries& a, const PowerSeries& b) {
    std::size_t n = std::min(a.order(), b.order());
    PowerSeries r(n);
    for (std::size_t i = 0; i <= n; ++i) r.c[i] = a.c[i] - b.c[i];
    return r;
}

inline PowerSeries series_mul(const PowerSeries& a, const PowerSeries& b) {
    std::size_t n = std::min(a.order(), b.order());
    PowerSeries r(n);
    for (std::size_t i = 0; i <= n; ++i)
        for (std::size_t j = 0; i + j <= n; ++j) r.c[i + j] += a.c[i] * b.c[j];
    return r;
}

// exp(a) for a with zero constant term: b' = a' b term by term.
inline PowerSeries series_exp(const PowerSeries& a) {
    if (a.c[0] != 0) throw std::domain_error("series_exp needs zero constant term");
    std::size_t n = a.order();
    PowerSeries b(n);
    b.c[0] = 1;
    for (std::size_t k = 1; k <= n; ++k) {
        Rat s(0);
        for (std::size_t j = 1; j <= k; ++j) s += Rat((unsigned long)j) * a.c[j] * b.c[k - j];
        b.c[k] = s / Rat((unsigned long)k);
    }
    return b;
}

// log(a) for a with constant term 1.
inline PowerSeries series_log(const PowerSeries& a) {
    if (a.c[0] != 1) throw std::domain_error("series_log needs constant term 1");
    std::size_t n = a.order();
    PowerSeries b(n);
    for (std::size_t k = 1; k <= n; ++k) {
        Rat s = a.c[k] * Rat((unsigned long)k);
        for (std::size_t j = 1; j < k; ++j) s -= Rat((unsigned long)j) * b.c[j] * a.c[k - j];
        b.c[k] = s / Rat((unsigned long)k);
    }
    return b;
}

inline PowerSeries series_inverse(const PowerSeries& a) {
    if (a.c[0] == 0) throw std::domain_error("series_inverse needs a unit");
    std::size_t n = a.order();
    PowerSeries b(n);
    b.c[0] = 1 / a.c[0];
    for (std::size_t k = 1; k <= n; ++k) {
        Rat s(0);
        for (std::size_t j = 1; j <= k; ++j) s += a.c[j] * b.c[k - j];
        b.c[k] = -s / a.c[0];
    }
    return b;
}

inline PowerSeries series_from_poly(const RPoly& p, std::size_t order) {
    PowerSeries s(order);
    for (std::size_t i = 0; i < p.size() && i <= order; ++i) s.c[i] = p[i];
    return s;
}

// exp(-sum_{n>=1} a_n t^n / n) from traces a_1..a_N.
inline PowerSeries zeta_from_traces(const std::vector<Rat>& traces) {
    std::size_t n = traces.size();
    PowerSeries s(n);
    for (std::size_t k = 1; k <= n; ++k) s.c[k] = -traces[k - 1] / Rat((unsigned long)k);
    return series_exp(s);
}

struct PadeFit {
    RPoly num;  // degree <= requested numerator degree
    RPoly den;  // den[0] == 1
};

// Rational reconstruction with numerator degree <= dn and denominator degree
// <= dm. The fit must match the series through its full truncation order;
// the alternative outcome is a definite "no fit" for those degree bounds.
inline std::optional<PadeFit> pade(const PowerSeries& s, std::size_t dn, std::size_t dm) {
    const std::size_t order = s.order();
    if (dn + dm > order) throw std::invalid_argument("pade: series too short for requested degrees");
    // Solve for q (denominator, dm+1 unknowns): sum_j q_j c_{k-j} = 0 for
    // k = dn+1 .. dn+dm, then extend the check to every available k > dn.
    RatMatrix m(dm, dm + 1);
    for (std::size_t r = 0; r < dm; ++r) {
        std::size_t k = dn + 1 + r;
        for (std::size_t j = 0; j <= dm; ++j) m(r, j) = (k >= j) ? s.c[k - j] : Rat(0);
    }
    // Kernel via Gauss-Jordan with column pivots.
    std::size_t nc = dm + 1;
    std::vector<std::size_t> pivot_col;
    std::size_t rr = 0;
    for (std::size_t col = 0; col < nc && rr < dm; ++col) {
        std::size_t piv = rr;
        while (piv < dm && m(piv, col) == 0) ++piv;
        if (piv == dm) continue;
        if (piv != rr)
            for (std::size_t j = 0; j < nc; ++j) std::swap(m(rr, j), m(piv, j));
        Rat pv = m(rr, col);
        for (std::size_t j = 0; j < nc; ++j) m(rr, j) /= pv;
        for (std::size_t i = 0; i < dm; ++i) {
            if (i == rr || m(i, col) == 0) continue;
            Rat f = m(i, col);
            for (std::size_t j = 0; j < nc; ++j) m(i, j) -= f * m(rr, j);
        }
        pivot_col.push_back(col);
        ++rr;
    }
    // Free columns parameterize the kernel; pick a kernel vector with q_0 != 0
    // if one exists (q_0 = 0 would put a pole at t = 0, impossible for a
    // power series).
    std::vector<bool> is_pivot(nc, false);
    for (std::size_t c : pivot_col) is_pivot[c] = true;
    std::optional<RPoly> qbest;
    for (std::size_t fc = 0; fc < nc; ++fc) {
        if (is_pivot[fc]) continue;
        RPoly q(nc, Rat(0));
        q[fc] = 1;
        for (std::size_t r2 = 0; r2 < pivot_col.size(); ++r2) q[pivot_col[r2]] = -m(r2, fc);
        if (q[0] != 0) {
            qbest = q;
            break;
        }
        if (!qbest) qbest = q;  // fallback, will fail the q_0 check below
    }
    if (!qbest || (*qbest)[0] == 0) return std::nullopt;
    RPoly q = *qbest;
    Rat q0 = q[0];
    for (Rat& v : q) v /= q0;
    // p = (s * q) truncated to degree dn; then (s*q - p) must vanish through
    // the full available order.
    RPoly p(dn + 1, Rat(0));
    for (std::size_t k = 0; k <= order; ++k) {
        Rat conv(0);
        for (std::size_t j = 0; j <= dm && j <= k; ++j) conv += q[j] * s.c[k - j];
        if (k <= dn)
            p[k] = conv;
        else if (conv != 0)
            return std::nullopt;
    }
    rpoly_normalize(p);
    rpoly_normalize(q);
    PadeFit fit;
    fit.num = p;
    fit.den = q;
    return fit;
}

}  // namespace motivic
