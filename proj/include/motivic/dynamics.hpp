#pragma once

// Fixed-point counting for two algebraic dynamical systems: coordinate-wise
// Chebyshev-like maps (fixed points live at roots of unity) and torus
// endomorphisms dual to integer matrices (fixed-point counts are
// determinants). Both sides are exact; numerics only cross-check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "motivic/ff.hpp"
#include "motivic/matrix.hpp"
#include "motivic/poly.hpp"

namespace motivic::dynamics {

// P_0 = 2, P_1 = x, P_{k+1} = x P_k - P_{k-1}; P_a(z + 1/z) = z^a + z^{-a}
inline IPoly chebyshev_poly(unsigned a) {
    if (a == 0) return {Int(2)};
    IPoly prev{Int(2)}, cur{Int(0), Int(1)};
    for (unsigned k = 1; k < a; ++k) {
        IPoly next(cur.size() + 1, Int(0));
        for (std::size_t i = 0; i < cur.size(); ++i) next[i + 1] = cur[i];
        next = ipoly_sub(next, prev);
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

// exact identity P_a(P_b(x)) = P_{ab}(x)
inline bool cheb_semigroup_check(unsigned a, unsigned b) {
    if (a == 0 || b == 0) throw std::invalid_argument("cheb_semigroup_check: indices start at 1");
    IPoly composed = ipoly_compose(chebyshev_poly(a), chebyshev_poly(b));
    return composed == chebyshev_poly(a * b);
}

// ---------------------------------------------------------------------------
// fixed points of the coordinate-wise map at iterate n: solutions of
// P_N(x) = x with N = q^n. Writing x = z + 1/z the equation factors as
// (z^{N-1} - 1)(z^{N+1} - 1) = 0, so the fixed set is
//   { 2 cos(2 pi j / (N-1)) } union { 2 cos(2 pi j / (N+1)) },
// deduplicated exactly by angle arithmetic: the families meet at z = 1
// always and at z = -1 exactly when N is odd.

struct ChebFixedPoints {
    long n_power = 0;                       // N = q^n
    std::vector<double> coordinate_values;  // all N of them, descending
    long coordinate_count = 0;              // == N, exact
    long boundary_count = 0;                // members of {2, -2} in the set
    Int count_3d;                           // coordinate_count^3
    Int count_3d_off_boundary;              // (coordinate_count - boundary_count)^3
};

inline ChebFixedPoints cheb_fixed_points(unsigned long q, unsigned n,
                                         std::size_t budget = 100000) {
    if (q < 2) throw std::invalid_argument("cheb_fixed_points: q must be at least 2");
    if (n == 0) throw std::invalid_argument("cheb_fixed_points: n must be positive");
    std::size_t N = 1;
    for (unsigned i = 0; i < n; ++i) {
        N *= q;
        if (N > budget) throw BudgetError("cheb_fixed_points: q^n exceeds budget");
    }
    ChebFixedPoints fp;
    fp.n_power = (long)N;
    const long double pi = std::acos(-1.0L);
    // z^{N-1} = 1 family: j = 0 .. floor((N-1)/2)
    for (std::size_t j = 0; j <= (N - 1) / 2; ++j)
        fp.coordinate_values.push_back((double)(2.0L * std::cos(2.0L * pi * j / (N - 1))));
    // z^{N+1} = 1 family: j = 1 .. floor((N+1)/2), dropping z = -1 when N odd
    // (it already appeared above); z = 1 is the dropped j = 0 term
    std::size_t hi = (N + 1) / 2;
    if (N % 2 == 1) --hi;
    for (std::size_t j = 1; j <= hi; ++j)
        fp.coordinate_values.push_back((double)(2.0L * std::cos(2.0L * pi * j / (N + 1))));
    std::sort(fp.coordinate_values.begin(), fp.coordinate_values.end(), std::greater<>());
    fp.coordinate_count = (long)fp.coordinate_values.size();
    fp.boundary_count = (N % 2 == 1) ? 2 : 1;
    fp.count_3d = ipow(Int(fp.coordinate_count), 3);
    fp.count_3d_off_boundary = ipow(Int(fp.coordinate_count - fp.boundary_count), 3);
    return fp;
}

namespace detail {

// P_N(x) - x and its derivative, evaluated by the recurrence; stable on
// [-2, 2] where all fixed points live
inline std::pair<long double, long double> cheb_fix_eval(unsigned long N, long double x) {
    long double p0 = 2.0L, p1 = x;    // P_0, P_1
    long double d0 = 0.0L, d1 = 1.0L;  // derivatives
    for (unsigned long k = 1; k < N; ++k) {
        long double p2 = x * p1 - p0;
        long double d2 = p1 + x * d1 - d0;
        p0 = p1; p1 = p2;
        d0 = d1; d1 = d2;
    }
    return {p1 - x, d1 - 1.0L};
}

}  // namespace detail

// Two-route validation of the enumerated fixed set. Route one (always runs):
// Newton iteration on P_N(x) - x from each enumerated value must stay put,
// certifying each value as a numeric root; exact degree N plus exact pairwise
// distinctness of the angles then certifies completeness. Route two (small N):
// the full polynomial is solved independently and matched value by value.
struct ChebCrossCheck {
    long enumerated = 0;
    long polynomial_degree = 0;
    double worst_newton_gap = 0.0;  // max |polished - enumerated|
    bool newton_ok = false;
    bool aberth_ran = false;
    long aberth_count = 0;
    double worst_aberth_gap = 0.0;
    bool pass = false;
};

inline ChebCrossCheck cheb_crosscheck(unsigned long q, unsigned n, double tol = 1e-8,
                                      std::size_t aberth_cap = 40) {
    ChebFixedPoints fp = cheb_fixed_points(q, n);
    unsigned long N = (unsigned long)fp.n_power;
    ChebCrossCheck cc;
    cc.enumerated = fp.coordinate_count;
    // the recurrence raises the degree by one per step and keeps the lead 1,
    // so deg(P_N - x) = N; the aberth branch re-derives it from the object
    cc.polynomial_degree = (long)N;
    cc.newton_ok = true;
    for (double v : fp.coordinate_values) {
        long double x = v;
        for (int it = 0; it < 3; ++it) {
            auto [fx, dfx] = detail::cheb_fix_eval(N, x);
            if (dfx == 0.0L) break;
            x -= fx / dfx;
        }
        double gap = (double)std::abs(x - (long double)v);
        cc.worst_newton_gap = std::max(cc.worst_newton_gap, gap);
        if (gap > tol) cc.newton_ok = false;
    }
    cc.pass = cc.newton_ok && cc.enumerated == cc.polynomial_degree;
    if (N <= aberth_cap) {
        cc.aberth_ran = true;
        IPoly f = chebyshev_poly((unsigned)N);
        f[1] -= 1;  // P_N(x) - x
        cc.polynomial_degree = ipoly_deg(f);
        RootReport rr = numeric_roots(f, 1e-9);
        cc.aberth_count = (long)rr.roots.size();
        for (double v : fp.coordinate_values) {
            double best = std::numeric_limits<double>::infinity();
            for (auto z : rr.roots) {
                // refine through the stable recurrence; the monomial-basis
                // solve is conditioning-limited near the interval ends
                if (std::abs(z.imag()) < 1e-6) {
                    long double x = z.real();
                    for (int it = 0; it < 3; ++it) {
                        auto [fx, dfx] = detail::cheb_fix_eval(N, x);
                        if (dfx == 0.0L) break;
                        x -= fx / dfx;
                    }
                    z = {(double)x, 0.0};
                }
                best = std::min(best, std::abs(z - std::complex<double>(v, 0)));
            }
            cc.worst_aberth_gap = std::max(cc.worst_aberth_gap, best);
        }
        cc.pass = cc.pass && cc.aberth_count == cc.enumerated && cc.worst_aberth_gap <= tol;
    }
    return cc;
}

// ---------------------------------------------------------------------------
// torus endomorphisms dual to integer matrices

struct TorusEndo {
    IntMatrix a;  // 2g x 2g
    unsigned genus = 0;
    bool block_form = false;      // direct sum of [[0, -q], [1, a_i]]
    long q = 0;                   // common quadratic constant when block_form
    std::vector<long> block_traces;  // the a_i
};

namespace detail {

// divide p by x^2 - a x + c, exactly; nullopt when the remainder is nonzero
inline std::optional<IPoly> divide_by_quadratic(const IPoly& p, const Int& a, const Int& c) {
    if (ipoly_deg(p) < 2) return std::nullopt;
    IPoly r = p, quot(p.size() - 2, Int(0));
    for (std::size_t i = p.size(); i-- > 2;) {
        Int coef = r[i];
        if (coef == 0) continue;
        quot[i - 2] = coef;
        r[i] = 0;
        r[i - 1] += coef * a;
        r[i - 2] -= coef * c;
    }
    if (r[0] != 0 || r[1] != 0) return std::nullopt;
    return quot;
}

}  // namespace detail

// Factors a monic even-degree integer polynomial into quadratics
// x^2 - a x + q sharing one constant q (so p(0) = q^g), and realizes the
// blocks [[0, -q], [1, a]]; otherwise falls back to the companion matrix
// with block_form = false (symplectic scaling unverified).
inline TorusEndo torus_from_weil_poly(const IPoly& p) {
    int deg = ipoly_deg(p);
    if (deg < 2 || deg % 2 != 0) throw std::invalid_argument("torus_from_weil_poly: degree must be even and positive");
    if (p.back() != 1) throw std::invalid_argument("torus_from_weil_poly: polynomial must be monic");
    TorusEndo e;
    e.genus = (unsigned)deg / 2;

    // q from p(0) = q^g
    std::optional<long> qv;
    if (p[0] > 0) {
        Int root;
        mpz_root(root.get_mpz_t(), p[0].get_mpz_t(), e.genus);
        if (ipow(root, e.genus) == p[0] && root.fits_slong_p()) qv = root.get_si();
    }
    if (qv) {
        // Cauchy bound on any root keeps |a| <= 2 (1 + max |coeff|)
        Int maxc(0);
        for (const Int& c : p) {
            Int ac = abs(c);
            if (ac > maxc) maxc = ac;
        }
        Int bound = 2 * (1 + maxc);
        IPoly cur = p;
        std::vector<long> traces;
        bool ok = true;
        for (unsigned i = 0; i < e.genus && ok; ++i) {
            ok = false;
            for (Int a(-bound); a <= bound; ++a) {
                auto quot = detail::divide_by_quadratic(cur, a, Int(*qv));
                if (quot) {
                    traces.push_back(to_long(a));
                    cur = *quot;
                    ok = true;
                    break;
                }
            }
        }
        if (ok) {
            e.block_form = true;
            e.q = *qv;
            e.block_traces = std::move(traces);
            e.a = IntMatrix(2 * e.genus, 2 * e.genus);
            for (unsigned i = 0; i < e.genus; ++i) {
                e.a(2 * i, 2 * i + 1) = Int(-e.q);
                e.a(2 * i + 1, 2 * i) = Int(1);
                e.a(2 * i + 1, 2 * i + 1) = Int(e.block_traces[i]);
            }
            return e;
        }
    }
    // companion fallback: last column carries -p_i
    e.a = IntMatrix((std::size_t)deg, (std::size_t)deg);
    for (int i = 1; i < deg; ++i) e.a((std::size_t)i, (std::size_t)(i - 1)) = Int(1);
    for (int i = 0; i < deg; ++i) e.a((std::size_t)i, (std::size_t)(deg - 1)) = -p[(std::size_t)i];
    return e;
}

// |det(A^n - I)|: the exact fixed-point count of the n-th iterate
inline Int torus_fixed_count(const TorusEndo& e, unsigned long n) {
    IntMatrix m = e.a.pow(n) - IntMatrix::identity(e.a.rows());
    Int d = bareiss_det(m);
    if (d == 0) throw std::domain_error("torus_fixed_count: degenerate iterate, det(A^n - I) = 0");
    return abs(d);
}

// exact test A^T J A = q J for the block-diagonal symplectic form
inline bool symplectic_scaling_check(const TorusEndo& e, long q) {
    std::size_t n = e.a.rows();
    if (n % 2 != 0) return false;
    IntMatrix j(n, n);
    for (std::size_t i = 0; i + 1 < n; i += 2) {
        j(i, i + 1) = Int(1);
        j(i + 1, i) = Int(-1);
    }
    return e.a.transpose() * j * e.a == j.scaled(Int(q));
}

// ---------------------------------------------------------------------------
// reporting

inline nlohmann::json cheb_report_to_json(unsigned long q, unsigned n, const ChebFixedPoints& fp,
                                          const ChebCrossCheck& cc) {
    nlohmann::json j;
    j["q"] = q;
    j["n"] = n;
    j["dimension"] = 3;
    j["coordinate_count"] = fp.coordinate_count;
    j["count_3d"] = fp.count_3d.get_str();
    j["boundary_count"] = fp.boundary_count;
    j["count_3d_off_boundary"] = fp.count_3d_off_boundary.get_str();
    j["crosscheck"] = {{"pass", cc.pass},
                       {"polynomial_degree", cc.polynomial_degree},
                       {"worst_newton_gap", cc.worst_newton_gap},
                       {"aberth_ran", cc.aberth_ran}};
    return j;
}

inline nlohmann::json torus_report_to_json(const TorusEndo& e, unsigned n_max) {
    nlohmann::json j;
    j["genus"] = e.genus;
    j["block_form"] = e.block_form;
    if (e.block_form) {
        j["q"] = e.q;
        j["block_traces"] = e.block_traces;
    } else {
        j["symplectic_scaling"] = "unverified";
    }
    j["counts"] = nlohmann::json::array();
    for (unsigned long n = 1; n <= n_max; ++n) {
        nlohmann::json row;
        row["n"] = n;
        try {
            row["count"] = torus_fixed_count(e, n).get_str();
        } catch (const std::domain_error&) {
            row["count"] = nullptr;
            row["degenerate"] = true;
        }
        j["counts"].push_back(row);
    }
    return j;
}

}  // namespace motivic::dynamics
