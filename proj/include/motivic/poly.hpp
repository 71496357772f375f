#pragma once

// Exact polynomial layer: integer/rational coefficient vectors (ascending
// degree), a division-free characteristic polynomial, primitive-PRS gcd with
// Yun square-free splitting, and a simultaneous-iteration complex root finder
// whose multiplicities come from the exact square-free structure rather than
// from numeric clustering.

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "motivic/matrix.hpp"
#include "motivic/rational.hpp"

namespace motivic {

using IPoly = std::vector<Int>;  // coeff[i] multiplies x^i; empty = zero
using RPoly = std::vector<Rat>;

inline void ipoly_normalize(IPoly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

inline int ipoly_deg(const IPoly& p) { return (int)p.size() - 1; }

inline IPoly ipoly_add(const IPoly& a, const IPoly& b) {
    IPoly r(std::max(a.size(), b.size()), Int(0));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    ipoly_normalize(r);
    return r;
}

inline IPoly ipoly_neg(const IPoly& a) {
    IPoly r = a;
    for (Int& c : r) c = -c;
    return r;
}

inline IPoly ipoly_sub(const IPoly& a, const IPoly& b) { return ipoly_add(a, ipoly_neg(b)); }

inline IPoly ipoly_mul(const IPoly& a, const IPoly& b) {
    if (a.empty() || b.empty()) return {};
    IPoly r(a.size() + b.size() - 1, Int(0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j)
            if (b[j] != 0) r[i + j] += a[i] * b[j];
    }
    ipoly_normalize(r);
    return r;
}

inline IPoly ipoly_scale(const IPoly& a, const Int& s) {
    if (s == 0) return {};
    IPoly r = a;
    for (Int& c : r) c *= s;
    return r;
}

inline IPoly ipoly_derivative(const IPoly& a) {
    if (a.size() <= 1) return {};
    IPoly r(a.size() - 1);
    for (std::size_t i = 1; i < a.size(); ++i) r[i - 1] = a[i] * Int((unsigned long)i);
    ipoly_normalize(r);
    return r;
}

inline Int ipoly_eval(const IPoly& p, const Int& x) {
    Int r(0);
    for (std::size_t i = p.size(); i-- > 0;) r = r * x + p[i];
    return r;
}

inline Rat ipoly_eval(const IPoly& p, const Rat& x) {
    Rat r(0);
    for (std::size_t i = p.size(); i-- > 0;) r = r * x + Rat(p[i]);
    return r;
}

inline IPoly ipoly_compose(const IPoly& p, const IPoly& inner) {
    IPoly r;
    for (std::size_t i = p.size(); i-- > 0;) {
        r = ipoly_mul(r, inner);
        if (p[i] != 0) r = ipoly_add(r, IPoly{p[i]});
    }
    return r;
}

inline Int ipoly_content(const IPoly& p) {
    Int g(0);
    for (const Int& c : p) g = gcd(g, c);
    return g;
}

inline IPoly ipoly_primitive(IPoly p) {
    ipoly_normalize(p);
    if (p.empty()) return p;
    Int g = ipoly_content(p);
    if (p.back() < 0) g = -g;
    for (Int& c : p) mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), g.get_mpz_t());
    return p;
}

// r = lc(b)^k * a mod b for the minimal k that keeps all steps integral.
inline IPoly ipoly_pseudo_rem(IPoly a, const IPoly& b) {
    ipoly_normalize(a);
    if (b.empty()) throw std::domain_error("pseudo_rem by zero");
    const Int& lb = b.back();
    const int db = ipoly_deg(b);
    while (ipoly_deg(a) >= db) {
        const int da = ipoly_deg(a);
        Int la = a.back();
        for (Int& c : a) c *= lb;
        for (int j = 0; j <= db; ++j) a[da - db + j] -= la * b[j];
        ipoly_normalize(a);
    }
    return a;
}

inline IPoly ipoly_gcd(IPoly a, IPoly b) {
    a = ipoly_primitive(std::move(a));
    b = ipoly_primitive(std::move(b));
    if (a.empty()) return b;
    if (b.empty()) return a;
    if (ipoly_deg(a) < ipoly_deg(b)) std::swap(a, b);
    while (!b.empty()) {
        IPoly r = ipoly_pseudo_rem(a, b);
        a = std::move(b);
        b = ipoly_primitive(std::move(r));
    }
    return a;
}

// Exact division over Q; throws when the division is not exact.
inline RPoly rpoly_divexact(const RPoly& a, const RPoly& b);

inline RPoly to_rpoly(const IPoly& p) {
    RPoly r(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) r[i] = Rat(p[i]);
    return r;
}

inline void rpoly_normalize(RPoly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

inline std::pair<RPoly, RPoly> rpoly_divmod(RPoly a, const RPoly& b) {
    rpoly_normalize(a);
    if (b.empty()) throw std::domain_error("rpoly division by zero");
    const int db = (int)b.size() - 1;
    if ((int)a.size() - 1 < db) return {{}, a};
    RPoly q((int)a.size() - db, Rat(0));
    while ((int)a.size() - 1 >= db && !a.empty()) {
        int da = (int)a.size() - 1;
        Rat f = a.back() / b.back();
        q[da - db] = f;
        for (int j = 0; j <= db; ++j) a[da - db + j] -= f * b[j];
        rpoly_normalize(a);
        if ((int)a.size() - 1 == da) throw std::logic_error("rpoly_divmod: no progress");
    }
    rpoly_normalize(q);
    return {q, a};
}

inline RPoly rpoly_divexact(const RPoly& a, const RPoly& b) {
    auto [q, r] = rpoly_divmod(a, b);
    if (!r.empty()) throw std::domain_error("rpoly_divexact: remainder nonzero");
    return q;
}

inline IPoly rpoly_clear_denominators(const RPoly& p) {
    Int D(1);
    for (const Rat& c : p) {
        Int den = c.get_den();
        Int g = gcd(D, den);
        D *= den / g;
    }
    IPoly r(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        Rat s = p[i] * Rat(D);
        r[i] = s.get_num();
    }
    ipoly_normalize(r);
    return r;
}

// Yun: f = prod f_i^i with each f_i square-free; input need not be primitive.
inline std::vector<std::pair<IPoly, unsigned>> squarefree_decomposition(IPoly f) {
    f = ipoly_primitive(std::move(f));
    std::vector<std::pair<IPoly, unsigned>> out;
    if (ipoly_deg(f) <= 0) return out;
    IPoly fp = ipoly_derivative(f);
    IPoly g = ipoly_gcd(f, fp);
    if (ipoly_deg(g) == 0) {
        out.push_back({f, 1});
        return out;
    }
    RPoly c = rpoly_divexact(to_rpoly(f), to_rpoly(g));
    RPoly d = rpoly_divexact(to_rpoly(fp), to_rpoly(g));
    // d -= c'
    {
        RPoly cp(c.size() > 1 ? c.size() - 1 : 0);
        for (std::size_t i = 1; i < c.size(); ++i) cp[i - 1] = c[i] * Rat((unsigned long)i);
        d.resize(std::max(d.size(), cp.size()), Rat(0));
        for (std::size_t i = 0; i < cp.size(); ++i) d[i] -= cp[i];
        rpoly_normalize(d);
    }
    unsigned i = 1;
    while ((int)c.size() - 1 > 0) {
        IPoly fi = ipoly_gcd(rpoly_clear_denominators(c), rpoly_clear_denominators(d));
        if (ipoly_deg(fi) > 0) out.push_back({fi, i});
        RPoly fir = to_rpoly(fi);
        c = rpoly_divexact(c, fir);
        RPoly dq = rpoly_divexact(d, fir);
        RPoly cp(c.size() > 1 ? c.size() - 1 : 0);
        for (std::size_t k = 1; k < c.size(); ++k) cp[k - 1] = c[k] * Rat((unsigned long)k);
        d = dq;
        d.resize(std::max(d.size(), cp.size()), Rat(0));
        for (std::size_t k = 0; k < cp.size(); ++k) d[k] -= cp[k];
        rpoly_normalize(d);
        ++i;
    }
    return out;
}

// Characteristic polynomial det(xI - A), division-free (Berkowitz), exact.
inline IPoly charpoly(const IntMatrix& a) {
    a.require_square();
    const std::size_t n = a.rows();
    if (n == 0) return IPoly{Int(1)};
    // p holds coefficients in descending order for the leading k x k block.
    std::vector<Int> p{Int(1), -a(0, 0)};
    std::vector<Int> t, v, w, np;
    for (std::size_t k = 2; k <= n; ++k) {
        // Toeplitz column: 1, -a_kk, -(R C), -(R M C), ..., -(R M^{k-2} C)
        t.assign(k + 1, Int(0));
        t[0] = 1;
        t[1] = -a(k - 1, k - 1);
        v.assign(k - 1, Int(0));
        for (std::size_t i = 0; i < k - 1; ++i) v[i] = a(i, k - 1);  // C
        for (std::size_t j = 2; j <= k; ++j) {
            Int dot(0);
            for (std::size_t i = 0; i < k - 1; ++i)
                if (v[i] != 0) dot += a(k - 1, i) * v[i];  // R . v
            t[j] = -dot;
            if (j == k) break;
            w.assign(k - 1, Int(0));
            for (std::size_t r = 0; r < k - 1; ++r) {
                Int s(0);
                for (std::size_t c = 0; c < k - 1; ++c)
                    if (v[c] != 0) s += a(r, c) * v[c];
                w[r] = s;
            }
            v.swap(w);
        }
        np.assign(k + 1, Int(0));
        for (std::size_t i = 0; i <= k; ++i) {
            Int s(0);
            const std::size_t jlo = i >= p.size() ? i - p.size() + 1 : 0;
            for (std::size_t j = jlo; j <= i && j < t.size(); ++j)
                if (t[j] != 0) s += t[j] * p[i - j];
            np[i] = s;
        }
        p.swap(np);
    }
    IPoly out(p.rbegin(), p.rend());
    ipoly_normalize(out);
    return out;
}

// Sylvester-matrix resultant, exact.
inline Int resultant(IPoly a, IPoly b) {
    ipoly_normalize(a);
    ipoly_normalize(b);
    if (a.empty() || b.empty()) return Int(0);
    const int da = ipoly_deg(a), db = ipoly_deg(b);
    if (da == 0) return ipow(a[0], (unsigned long)db);
    if (db == 0) return ipow(b[0], (unsigned long)da);
    IntMatrix s(da + db, da + db);
    for (int r = 0; r < db; ++r)
        for (int j = 0; j <= da; ++j) s(r, r + da - j) = a[j];
    for (int r = 0; r < da; ++r)
        for (int j = 0; j <= db; ++j) s(db + r, r + db - j) = b[j];
    return bareiss_det(s);
}

// ---- numeric roots --------------------------------------------------------

struct RootReport {
    std::vector<std::complex<double>> roots;  // multiplicities expanded
    double max_residual = 0.0;                // backward error, scale-invariant
    bool converged = true;
};

namespace detail {

using CLD = std::complex<long double>;

inline CLD horner(const std::vector<CLD>& c, CLD x) {
    CLD r(0);
    for (std::size_t i = c.size(); i-- > 0;) r = r * x + c[i];
    return r;
}

inline long double backward_error(const std::vector<CLD>& c, CLD x) {
    CLD r(0);
    long double scale = 0, ax = std::abs(x), xp = 1;
    for (std::size_t i = 0; i < c.size(); ++i) {
        scale += std::abs(c[i]) * xp;
        xp *= ax;
    }
    for (std::size_t i = c.size(); i-- > 0;) r = r * x + c[i];
    if (scale == 0) return 0;
    return std::abs(r) / scale;
}

// Aberth-Ehrlich simultaneous iteration on a square-free polynomial.
inline std::vector<CLD> aberth(const std::vector<CLD>& c) {
    const int d = (int)c.size() - 1;
    std::vector<CLD> z(d);
    if (d == 1) {
        z[0] = -c[0] / c[1];
        return z;
    }
    std::vector<CLD> dc(d);
    for (int i = 1; i <= d; ++i) dc[i - 1] = c[i] * (long double)i;
    long double r0;
    if (std::abs(c[0]) > 0)
        r0 = std::pow((long double)std::abs(c[0] / c[d]), (long double)1.0L / d);
    else
        r0 = 0.5L;
    long double cauchy = 0;
    for (int i = 0; i < d; ++i) cauchy = std::max(cauchy, (long double)std::abs(c[i] / c[d]));
    cauchy += 1;
    r0 = std::min(std::max(r0, (long double)1e-3L), cauchy);
    const long double pi = 3.14159265358979323846264338327950288L;
    for (int j = 0; j < d; ++j) {
        long double th = 2 * pi * j / d + 0.7L / d + 0.25L;
        z[j] = CLD(r0 * std::cos(th), r0 * std::sin(th));
    }
    for (int iter = 0; iter < 600; ++iter) {
        long double worst = 0;
        for (int j = 0; j < d; ++j) {
            CLD pv = horner(c, z[j]);
            if (std::abs(pv) == 0) continue;
            CLD dv = horner(dc, z[j]);
            CLD nj = (std::abs(dv) == 0) ? CLD(0) : pv / dv;
            CLD s(0);
            for (int k = 0; k < d; ++k)
                if (k != j) s += CLD(1) / (z[j] - z[k]);
            CLD denom = CLD(1) - nj * s;
            CLD w = (std::abs(denom) == 0) ? nj : nj / denom;
            z[j] -= w;
            worst = std::max(worst, std::abs(w) / (1 + std::abs(z[j])));
        }
        if (worst < 1e-19L) break;
    }
    return z;
}

}  // namespace detail

// All complex roots with multiplicity. Multiplicities come from the exact
// square-free decomposition; each square-free factor is solved by
// simultaneous iteration. Roots with |Im| below tol are snapped to the real
// axis. max_residual is the worst backward error across factor roots.
inline RootReport numeric_roots(IPoly p, double tol = 1e-12) {
    ipoly_normalize(p);
    if (p.empty()) throw std::domain_error("numeric_roots of zero polynomial");
    RootReport rep;
    std::size_t z0 = 0;
    while (z0 < p.size() && p[z0] == 0) ++z0;
    for (std::size_t i = 0; i < z0; ++i) rep.roots.push_back({0.0, 0.0});
    p.erase(p.begin(), p.begin() + z0);
    if (ipoly_deg(p) <= 0) return rep;
    auto factors = squarefree_decomposition(p);
    for (auto& [f, mult] : factors) {
        // keep coefficient magnitudes inside double range; a uniform shift
        // leaves the roots unchanged
        IPoly g = f;
        std::size_t maxbits = 0;
        for (const Int& c : g) maxbits = std::max(maxbits, mpz_sizeinbase(c.get_mpz_t(), 2));
        if (maxbits > 900) {
            unsigned long sh = maxbits - 900;
            for (Int& c : g) c >>= sh;
        }
        std::vector<detail::CLD> c(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) c[i] = detail::CLD(g[i].get_d(), 0.0L);
        long double lead = std::abs(c.back());
        for (auto& v : c) v /= lead;
        auto zs = detail::aberth(c);
        for (auto& z : zs) {
            long double be = detail::backward_error(c, z);
            rep.max_residual = std::max(rep.max_residual, (double)be);
            if (be > tol) rep.converged = false;
            std::complex<double> zd((double)z.real(), (double)z.imag());
            if (std::abs(zd.imag()) <= tol) zd = {zd.real(), 0.0};
            for (unsigned m = 0; m < mult; ++m) rep.roots.push_back(zd);
        }
    }
    return rep;
}

inline RootReport numeric_roots(const RPoly& p, double tol = 1e-12) {
    return numeric_roots(rpoly_clear_denominators(p), tol);
}

}  // namespace motivic
