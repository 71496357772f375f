#pragma once

// Family of integer operators T_x on the coordinate space of a finite field,
// driven by square-root counts of a symmetric quartic with boundary
// corrections at the three marked points {0, 1, t}. Also the tangent
// operator built from the family, its resolvent, and checkers for the
// family's structural properties. The checkers report; they do not assume.

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "motivic/ff.hpp"
#include "motivic/matrix.hpp"
#include "motivic/poly.hpp"

namespace motivic::hecke {

struct HeckeParams {
    ff::FieldPtr base;       // F_q, odd characteristic
    ff::FElem t = 0;         // marked point, not 0 or 1
    unsigned level = 1;      // work over F_{q^level}
    std::size_t budget = 400;  // cap on q^level (dense s x s matrices, s of them)
};

inline void validate(const HeckeParams& p) {
    if (!p.base) throw std::invalid_argument("hecke: missing base field");
    if (p.base->p == 2) throw std::invalid_argument("hecke: characteristic 2 not supported");
    if (p.t == 0 || p.t == 1) throw std::invalid_argument("hecke: t must avoid 0 and 1");
    if ((std::size_t)p.t >= p.base->size) throw std::invalid_argument("hecke: t outside the base field");
    if (p.level == 0) throw std::invalid_argument("hecke: level must be positive");
}

// (xy + yz + zx - t)^2 + 4xyz(1 + t - (x+y+z)), symmetric in x, y, z
inline ff::FElem f_t_eval(const ff::FieldPtr& F, ff::FElem t, ff::FElem x, ff::FElem y,
                          ff::FElem z) {
    ff::FElem xy = F->mul(x, y), yz = F->mul(y, z), zx = F->mul(z, x);
    ff::FElem a = F->sub(F->add(F->add(xy, yz), zx), t);
    ff::FElem xyz = F->mul(xy, z);
    ff::FElem b = F->sub(F->add(F->one(), t), F->add(F->add(x, y), z));
    return F->add(F->mul(a, a), F->mul(F->mul(F->from_int(4), xyz), b));
}

// Working-field view of the parameters: embedded t, the marked points, and
// the field size that replaces q in every correction term.
struct Level {
    ff::FieldPtr work;
    ff::FElem t;  // embedded into work
    long q_n;

    bool is_marked(ff::FElem x) const { return x == work->zero() || x == work->one() || x == t; }

    // for x outside the marked points: the three (y, z) pairs that receive
    // the +q_n correction; their z components 0, 1, t are pairwise distinct
    std::array<std::pair<ff::FElem, ff::FElem>, 3> plus_pairs(ff::FElem x) const {
        const auto& F = work;
        ff::FElem one = F->one();
        return {std::pair<ff::FElem, ff::FElem>{F->div(t, x), F->zero()},
                {F->div(F->sub(t, x), F->sub(one, x)), one},
                {F->div(F->mul(t, F->sub(one, x)), F->sub(t, x)), t}};
    }
};

inline Level make_level(const HeckeParams& p) {
    validate(p);
    std::size_t sz = 1;
    for (unsigned i = 0; i < p.level; ++i) {
        sz *= p.base->size;
        if (sz > p.budget) {
            std::ostringstream os;
            os << "hecke: field size " << sz << " exceeds budget " << p.budget;
            throw BudgetError(os.str());
        }
    }
    Level l;
    l.work = (p.level == 1) ? p.base : ff::extend_field(p.base, p.level);
    l.t = (p.level == 1) ? p.t : l.work->embed_base(p.t);
    l.q_n = (long)l.work->size;
    return l;
}

// The x = y correction: -(q+1) for marked x, -1 otherwise, constant along the
// row; +q at the three boundary pairs for unmarked x. The family identities
// (sum to identity, marked involutions, closure) do NOT hold under this
// correction; verify_properties measures the defects and the tests pin them.
inline long hecke_entry(const Level& l, ff::FElem x, ff::FElem y, ff::FElem z) {
    long e = 2 - l.work->sqrt_count(f_t_eval(l.work, l.t, x, y, z));
    if (x == y) e -= l.is_marked(x) ? (l.q_n + 1) : 1;
    if (!l.is_marked(x)) {
        for (const auto& [py, pz] : l.plus_pairs(x))
            if (y == py && z == pz) {
                e += l.q_n;
                break;
            }
    }
    return e;
}

inline I64Matrix hecke_matrix(const Level& l, ff::FElem x) {
    const auto& F = l.work;
    std::size_t s = F->size;
    I64Matrix m(s, s);
    bool marked = l.is_marked(x);
    std::array<std::pair<ff::FElem, ff::FElem>, 3> pp{};
    if (!marked) pp = l.plus_pairs(x);
    for (std::size_t y = 0; y < s; ++y) {
        ff::FElem fy = (ff::FElem)y;
        ff::FElem xy = F->mul(x, fy);
        ff::FElem xpy = F->add(x, fy);
        long diag_corr = (x == fy) ? (marked ? -(l.q_n + 1) : -1) : 0;
        for (std::size_t z = 0; z < s; ++z) {
            ff::FElem fz = (ff::FElem)z;
            // f = (xy + z(x+y) - t)^2 + 4 xy z (1 + t - (x+y) - z)
            ff::FElem a = F->sub(F->add(xy, F->mul(fz, xpy)), l.t);
            ff::FElem b = F->sub(F->add(F->one(), l.t), F->add(xpy, fz));
            ff::FElem f = F->add(F->mul(a, a), F->mul(F->mul(F->from_int(4), F->mul(xy, fz)), b));
            long e = 2 - F->sqrt_count(f) + diag_corr;
            if (!marked)
                for (const auto& [py, pz] : pp)
                    if (fy == py && fz == pz) {
                        e += l.q_n;
                        break;
                    }
            m(y, z) = e;
        }
    }
    return m;
}

struct HeckeFamily {
    HeckeParams params;
    Level level;
    std::vector<I64Matrix> ops;  // indexed by x in field enumeration order

    const I64Matrix& op(ff::FElem x) const { return ops[x]; }
};

inline HeckeFamily hecke_family(const HeckeParams& p) {
    HeckeFamily fam;
    fam.params = p;
    fam.level = make_level(p);
    std::size_t s = fam.level.work->size;
    fam.ops.reserve(s);
    for (std::size_t x = 0; x < s; ++x) fam.ops.push_back(hecke_matrix(fam.level, (ff::FElem)x));
    return fam;
}

// ---------------------------------------------------------------------------
// property checks

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string witness;  // empty when passing
};

struct VerifyReport {
    std::vector<CheckResult> checks;
    nlohmann::json extra;  // spectra summaries, degeneracy histograms

    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

struct VerifyOptions {
    bool check_commuting = true;    // property 1
    bool check_sum = true;          // property 2
    bool check_involutions = true;  // property 3
    bool check_spectra = true;      // property 4
    bool check_closure = true;      // property 6
    std::vector<unsigned> lift_levels;  // property 5, one entry per extension level
    double tol_real = 1e-9;
    double tol_bound = 1e-9;
    double tol_lift = 1e-6;
};

namespace detail {

inline std::string elem_label(std::size_t x) { return "x=" + std::to_string(x); }

// real eigenvalues of an integer matrix, with exact multiplicity structure;
// also reports the worst imaginary part seen
struct Spectrum {
    std::vector<double> values;  // with multiplicity
    double worst_imag = 0.0;
    std::vector<std::pair<unsigned, int>> degeneracy;  // (multiplicity, count of roots)
};

inline Spectrum spectrum_of(const I64Matrix& m, double tol) {
    Spectrum s;
    IPoly cp = charpoly(to_int_matrix(m));
    auto parts = squarefree_decomposition(cp);
    for (const auto& [g, mult] : parts) {
        auto rep = numeric_roots(g, tol);
        int cnt = 0;
        for (auto z : rep.roots) {
            s.worst_imag = std::max(s.worst_imag, std::abs(z.imag()));
            for (unsigned k = 0; k < mult; ++k) s.values.push_back(z.real());
            ++cnt;
        }
        s.degeneracy.emplace_back(mult, cnt);
    }
    return s;
}

}  // namespace detail

inline VerifyReport verify_properties(const HeckeFamily& fam, const VerifyOptions& opt = {}) {
    VerifyReport rep;
    const auto& ops = fam.ops;
    std::size_t s = ops.size();
    const Level& lv = fam.level;

    if (opt.check_sum) {
        I64Matrix sum(s, s);
        for (const auto& m : ops) sum = sum + m;
        bool ok = sum == I64Matrix::identity(s);
        rep.checks.push_back({"family_sums_to_identity", ok, ok ? "" : "sum differs from identity"});
    }

    if (opt.check_commuting) {
        CheckResult c{"family_commutes", true, ""};
        for (std::size_t a = 0; a < s && c.pass; ++a)
            for (std::size_t b = a + 1; b < s && c.pass; ++b)
                if (!(ops[a] * ops[b] == ops[b] * ops[a])) {
                    c.pass = false;
                    c.witness = detail::elem_label(a) + " vs " + detail::elem_label(b);
                }
        rep.checks.push_back(std::move(c));
    }

    if (opt.check_involutions) {
        CheckResult c{"marked_operators_form_klein_group", true, ""};
        I64Matrix id = I64Matrix::identity(s);
        ff::FElem m0 = lv.work->zero(), m1 = lv.work->one(), mt = lv.t;
        auto expect = [&](const I64Matrix& got, const I64Matrix& want, const std::string& what) {
            if (c.pass && !(got == want)) {
                c.pass = false;
                c.witness = what;
            }
        };
        expect(ops[m0] * ops[m0], id, "T_0^2 != 1");
        expect(ops[m1] * ops[m1], id, "T_1^2 != 1");
        expect(ops[mt] * ops[mt], id, "T_t^2 != 1");
        expect(ops[m0] * ops[m1], ops[mt], "T_0 T_1 != T_t");
        expect(ops[m1] * ops[mt], ops[m0], "T_1 T_t != T_0");
        expect(ops[m0] * ops[mt], ops[m1], "T_0 T_t != T_1");
        expect(ops[m1] * ops[m0], ops[mt], "T_1 T_0 != T_t");
        rep.checks.push_back(std::move(c));
    }

    if (opt.check_closure) {
        // T_x T_y = sum_z (T_x)_{yz} T_z, the structure constants of the family
        CheckResult c{"products_close_with_entry_coefficients", true, ""};
        for (std::size_t x = 0; x < s && c.pass; ++x)
            for (std::size_t y = 0; y < s && c.pass; ++y) {
                I64Matrix lhs = ops[x] * ops[y];
                I64Matrix rhs(s, s);
                for (std::size_t z = 0; z < s; ++z) {
                    long coef = ops[x]((std::size_t)y, z);
                    if (coef != 0) rhs = rhs + ops[z].scaled(coef);
                }
                if (!(lhs == rhs)) {
                    c.pass = false;
                    c.witness = detail::elem_label(x) + ", " + detail::elem_label(y);
                }
            }
        rep.checks.push_back(std::move(c));
    }

    if (opt.check_spectra) {
        CheckResult c{"spectra_real_within_weil_bound", true, ""};
        double bound = 2.0 * std::sqrt((double)lv.q_n);
        double worst_imag = 0.0, worst_excess = 0.0;
        for (std::size_t x = 0; x < s; ++x) {
            if (lv.is_marked((ff::FElem)x)) continue;
            auto spec = detail::spectrum_of(ops[x], opt.tol_real);
            worst_imag = std::max(worst_imag, spec.worst_imag);
            for (double v : spec.values)
                worst_excess = std::max(worst_excess, std::abs(v) - bound);
            if (spec.worst_imag > opt.tol_real || worst_excess > opt.tol_bound) {
                c.pass = false;
                c.witness = detail::elem_label(x);
                break;
            }
        }
        rep.extra["worst_imaginary_part"] = worst_imag;
        rep.extra["worst_bound_excess"] = worst_excess;
        rep.checks.push_back(std::move(c));
    }

    for (unsigned n : opt.lift_levels) {
        HeckeParams ext = fam.params;
        ext.level = fam.params.level * n;
        CheckResult c{"spectrum_lifts_to_level_" + std::to_string(n), true, ""};
        HeckeFamily big = hecke_family(ext);
        double q = (double)lv.q_n;
        double worst = 0.0;
        nlohmann::json degeneracies = nlohmann::json::array();
        for (std::size_t x = 0; x < s; ++x) {
            if (lv.is_marked((ff::FElem)x)) continue;
            auto base_spec = detail::spectrum_of(ops[x], 1e-11);
            // same x viewed in the bigger field: embedding preserves the index
            auto ext_spec = detail::spectrum_of(big.ops[x], 1e-11);
            for (double xi : base_spec.values) {
                // s_0 = 2, s_1 = xi, s_{k+1} = xi s_k - q s_{k-1}
                long double s0 = 2.0L, s1 = xi;
                for (unsigned k = 1; k < n; ++k) {
                    long double s2 = (long double)xi * s1 - (long double)q * s0;
                    s0 = s1;
                    s1 = s2;
                }
                double target = (double)(n == 0 ? 2.0L : s1);
                double best = std::numeric_limits<double>::infinity();
                for (double v : ext_spec.values) best = std::min(best, std::abs(v - target));
                worst = std::max(worst, best);
                if (best > opt.tol_lift && c.pass) {
                    c.pass = false;
                    c.witness = detail::elem_label(x) + " eigenvalue " + std::to_string(xi);
                }
            }
            nlohmann::json d;
            d["x"] = x;
            for (auto& [mult, cnt] : ext_spec.degeneracy)
                d["multiplicities"].push_back({{"multiplicity", mult}, {"roots", cnt}});
            degeneracies.push_back(d);
        }
        rep.extra["lift_level_" + std::to_string(n)] = {
            {"worst_distance", worst}, {"extension_degeneracy", degeneracies}};
        rep.checks.push_back(std::move(c));
    }

    return rep;
}

// ---------------------------------------------------------------------------
// tangent operator and its resolvent

// -(1/Q) sum_x T_x^2 + (Q - 3 - 1/Q) id, with Q the working field size
inline RatMatrix t_tan(const HeckeFamily& fam) {
    std::size_t s = fam.ops.size();
    long Q = fam.level.q_n;
    I64Matrix acc(s, s);
    for (const auto& m : fam.ops) acc = acc + m * m;
    RatMatrix r(s, s);
    Rat inv_q = make_rat(1, Q);
    Rat diag = Rat(Q - 3) - inv_q;
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; j < s; ++j) {
            r(i, j) = -inv_q * Rat(acc(i, j));
            if (i == j) r(i, j) += diag;
        }
    return r;
}

// Q * t_tan has integer entries; this is that matrix
inline I64Matrix t_tan_scaled(const HeckeFamily& fam) {
    std::size_t s = fam.ops.size();
    long Q = fam.level.q_n;
    I64Matrix acc(s, s);
    for (const auto& m : fam.ops) acc = acc + m * m;
    I64Matrix r(s, s);
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; j < s; ++j) r(i, j) = -acc(i, j) + (i == j ? Q * Q - 3 * Q - 1 : 0);
    return r;
}

// (Q + 1 - t_tan)^{-1}, exact
inline RatMatrix d_operator(const RatMatrix& ttan, long q_n) {
    std::size_t s = ttan.rows();
    RatMatrix m(s, s);
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; j < s; ++j) m(i, j) = (i == j ? Rat(q_n + 1) : Rat(0)) - ttan(i, j);
    auto inv = rat_inverse(m);
    if (!inv) throw std::domain_error("d_operator: Q + 1 is an eigenvalue of the tangent operator");
    return *inv;
}

// Streaming construction of the integer core of the resolvent:
//   Q + 1 - t_tan = (1/Q) (S + (4Q+1) I)  with  S = sum_x T_x^2,
// so D = Q (S + (4Q+1) I)^{-1}. Builds S one T_x at a time and keeps only
// the requested operators, so level-n families never sit in memory whole.
struct ResolventCore {
    long q_n = 0;
    IntMatrix a;                    // S + (4Q+1) I
    std::vector<ff::FElem> kept_x;  // work-field labels of retained operators
    std::vector<I64Matrix> kept;    // the retained T_x
};

inline ResolventCore resolvent_core(const HeckeParams& p, const std::vector<ff::FElem>& keep_x) {
    Level lv = make_level(p);
    std::size_t s = lv.work->size;
    long Q = lv.q_n;
    I64Matrix acc(s, s);
    ResolventCore core;
    core.q_n = Q;
    core.kept_x = keep_x;
    core.kept.resize(keep_x.size());
    for (std::size_t x = 0; x < s; ++x) {
        I64Matrix tx = hecke_matrix(lv, (ff::FElem)x);
        acc = acc + tx * tx;
        for (std::size_t i = 0; i < keep_x.size(); ++i)
            if (keep_x[i] == (ff::FElem)x) core.kept[i] = std::move(tx);
    }
    core.a = IntMatrix(s, s);
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; j < s; ++j)
            core.a(i, j) = Int(acc(i, j)) + (i == j ? Int(4 * Q + 1) : Int(0));
    return core;
}

struct ResolventTraces {
    Rat trace_d;
    std::vector<Rat> trace_tx_d;  // aligned with kept_x
};

inline ResolventTraces resolvent_traces(const ResolventCore& core) {
    std::vector<IntMatrix> bs;
    bs.reserve(core.kept.size());
    for (const auto& m : core.kept) bs.push_back(to_int_matrix(m));
    std::vector<const IntMatrix*> ptrs;
    for (const auto& b : bs) ptrs.push_back(&b);
    auto r = crt_adjugate_traces(core.a, ptrs);
    if (!r) throw std::domain_error("resolvent_traces: core matrix is singular");
    ResolventTraces out;
    Rat det(r->det);
    out.trace_d = Rat(core.q_n) * Rat(r->trace_adj) / det;
    for (const auto& tr : r->traces) out.trace_tx_d.push_back(Rat(core.q_n) * Rat(tr) / det);
    return out;
}

// ---------------------------------------------------------------------------
// reporting

inline nlohmann::json params_to_json(const HeckeParams& p) {
    nlohmann::json j;
    j["field"] = ff::field_to_json(p.base);
    j["t"] = p.t;
    j["level"] = p.level;
    j["budget"] = p.budget;
    return j;
}

inline nlohmann::json report_to_json(const HeckeParams& p, const VerifyReport& rep) {
    nlohmann::json j;
    j["params"] = params_to_json(p);
    j["checks"] = nlohmann::json::array();
    for (const auto& c : rep.checks) {
        nlohmann::json e;
        e["name"] = c.name;
        e["status"] = c.pass ? "pass" : "fail";
        if (!c.witness.empty()) e["witness"] = c.witness;
        j["checks"].push_back(e);
    }
    if (!rep.extra.is_null()) j["traces"] = rep.extra;
    return j;
}

}  // namespace motivic::hecke
