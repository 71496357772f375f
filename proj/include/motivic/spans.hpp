#pragma once

// Constructible sets as explicit polynomial systems over a finite field,
// weighted spans between them, and the point-count functors that turn a
// span into an integer matrix at every field level n. On top of that:
// trace tables in two indices with row/column recurrences, cyclic fibered
// counts as an independent oracle, Frobenius-twisted lattice traces,
// rationality along rays of sublattices, the projective plane incidence
// identity, algebra axioms for structure tensors, and the curve-count
// regrouping check. Tuple enumeration is the only counting oracle; every
// enumeration has an explicit candidate budget.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "motivic/ff.hpp"
#include "motivic/matrix.hpp"
#include "motivic/rational.hpp"
#include "motivic/recurrence.hpp"

namespace motivic::spans {

inline constexpr std::size_t kPointBudget = 10'000'000;  // candidate tuples per enumeration

// ---- multivariate polynomials ----------------------------------------------

// Coefficients are element indices of a fixed base field; variables are
// positional. Terms are kept sorted by exponent vector with like terms
// merged, so equal polynomials have equal representations.
struct MultiPoly {
    struct Term {
        ff::FElem coeff = 0;
        std::vector<unsigned> exps;  // length nvars

        bool operator==(const Term& o) const { return coeff == o.coeff && exps == o.exps; }
    };

    std::size_t nvars = 0;
    std::vector<Term> terms;

    bool operator==(const MultiPoly& o) const { return nvars == o.nvars && terms == o.terms; }
};

inline void mp_normalize(const ff::FieldPtr& F, MultiPoly& p) {
    std::sort(p.terms.begin(), p.terms.end(),
              [](const MultiPoly::Term& a, const MultiPoly::Term& b) { return a.exps < b.exps; });
    std::vector<MultiPoly::Term> out;
    for (const auto& t : p.terms) {
        if (!out.empty() && out.back().exps == t.exps)
            out.back().coeff = F->add(out.back().coeff, t.coeff);
        else
            out.push_back(t);
    }
    out.erase(std::remove_if(out.begin(), out.end(),
                             [](const MultiPoly::Term& t) { return t.coeff == 0; }),
              out.end());
    p.terms = std::move(out);
}

inline MultiPoly mp_zero(std::size_t nvars) { return MultiPoly{nvars, {}}; }

inline MultiPoly mp_const(std::size_t nvars, ff::FElem c) {
    MultiPoly p{nvars, {}};
    if (c != 0) p.terms.push_back({c, std::vector<unsigned>(nvars, 0)});
    return p;
}

inline MultiPoly mp_var(const ff::FieldPtr& F, std::size_t nvars, std::size_t i) {
    if (i >= nvars) throw std::invalid_argument("mp_var: index out of range");
    MultiPoly p{nvars, {}};
    std::vector<unsigned> e(nvars, 0);
    e[i] = 1;
    p.terms.push_back({F->one(), std::move(e)});
    return p;
}

// integer-coefficient term list, reduced into the field
inline MultiPoly mp_from_terms(const ff::FieldPtr& F, std::size_t nvars,
                               const std::vector<std::pair<long, std::vector<unsigned>>>& terms) {
    MultiPoly p{nvars, {}};
    for (const auto& [c, e] : terms) {
        if (e.size() != nvars) throw std::invalid_argument("mp_from_terms: exponent arity mismatch");
        p.terms.push_back({F->from_int(c), e});
    }
    mp_normalize(F, p);
    return p;
}

inline MultiPoly mp_add(const ff::FieldPtr& F, const MultiPoly& a, const MultiPoly& b) {
    if (a.nvars != b.nvars) throw std::invalid_argument("mp_add: arity mismatch");
    MultiPoly r{a.nvars, a.terms};
    r.terms.insert(r.terms.end(), b.terms.begin(), b.terms.end());
    mp_normalize(F, r);
    return r;
}

inline MultiPoly mp_neg(const ff::FieldPtr& F, const MultiPoly& a) {
    MultiPoly r = a;
    for (auto& t : r.terms) t.coeff = F->neg(t.coeff);
    return r;
}

inline MultiPoly mp_sub(const ff::FieldPtr& F, const MultiPoly& a, const MultiPoly& b) {
    return mp_add(F, a, mp_neg(F, b));
}

inline MultiPoly mp_mul(const ff::FieldPtr& F, const MultiPoly& a, const MultiPoly& b) {
    if (a.nvars != b.nvars) throw std::invalid_argument("mp_mul: arity mismatch");
    MultiPoly r{a.nvars, {}};
    for (const auto& ta : a.terms)
        for (const auto& tb : b.terms) {
            MultiPoly::Term t;
            t.coeff = F->mul(ta.coeff, tb.coeff);
            t.exps.resize(a.nvars);
            for (std::size_t i = 0; i < a.nvars; ++i) t.exps[i] = ta.exps[i] + tb.exps[i];
            r.terms.push_back(std::move(t));
        }
    mp_normalize(F, r);
    return r;
}

inline MultiPoly mp_pow(const ff::FieldPtr& F, MultiPoly a, unsigned long e) {
    MultiPoly r = mp_const(a.nvars, F->one());
    while (e) {
        if (e & 1) r = mp_mul(F, r, a);
        a = mp_mul(F, a, a);
        e >>= 1;
    }
    return r;
}

// reindex into a wider variable list, original variables shifted by `offset`
inline MultiPoly mp_shift(const MultiPoly& p, std::size_t offset, std::size_t new_nvars) {
    if (offset + p.nvars > new_nvars) throw std::invalid_argument("mp_shift: target arity too small");
    MultiPoly r{new_nvars, {}};
    r.terms.reserve(p.terms.size());
    for (const auto& t : p.terms) {
        MultiPoly::Term nt;
        nt.coeff = t.coeff;
        nt.exps.assign(new_nvars, 0);
        for (std::size_t i = 0; i < p.nvars; ++i) nt.exps[offset + i] = t.exps[i];
        r.terms.push_back(std::move(nt));
    }
    std::sort(r.terms.begin(), r.terms.end(),
              [](const MultiPoly::Term& a, const MultiPoly::Term& b) { return a.exps < b.exps; });
    return r;
}

namespace detail {

inline ff::FElem embed_coeff(const ff::FieldPtr& work, const ff::FieldPtr& coeff_field,
                             ff::FElem c) {
    if (work.get() == coeff_field.get()) return c;
    if (work->base.get() == coeff_field.get()) return work->embed_base(c);
    throw std::logic_error("evaluation field is not an extension of the coefficient field");
}

}  // namespace detail

inline ff::FElem mp_eval(const MultiPoly& p, const ff::FieldPtr& coeff_field,
                         const ff::FieldPtr& work, const ff::FElem* pt) {
    ff::FElem s = work->zero();
    for (const auto& t : p.terms) {
        ff::FElem acc = detail::embed_coeff(work, coeff_field, t.coeff);
        for (std::size_t i = 0; i < p.nvars; ++i)
            if (t.exps[i] != 0) acc = work->mul(acc, work->pow_u64(pt[i], t.exps[i]));
        s = work->add(s, acc);
    }
    return s;
}

// ---- constructible sets -----------------------------------------------------

struct ConstructibleSet {
    ff::FieldPtr field;              // coefficient field F_q
    std::vector<std::string> vars;   // ordered; names are labels only
    std::vector<MultiPoly> equations;    // required zero
    std::vector<MultiPoly> inequations;  // required nonzero
};

inline void validate_set(const ConstructibleSet& s) {
    if (!s.field) throw std::invalid_argument("constructible set: missing field");
    for (const auto& p : s.equations)
        if (p.nvars != s.vars.size()) throw std::invalid_argument("constructible set: equation arity mismatch");
    for (const auto& p : s.inequations)
        if (p.nvars != s.vars.size()) throw std::invalid_argument("constructible set: inequation arity mismatch");
}

inline ConstructibleSet affine_space(const ff::FieldPtr& F, std::size_t k,
                                     const std::string& prefix = "x") {
    ConstructibleSet s;
    s.field = F;
    for (std::size_t i = 0; i < k; ++i) s.vars.push_back(prefix + std::to_string(i));
    return s;
}

inline ConstructibleSet with_equation(ConstructibleSet s, MultiPoly p) {
    if (p.nvars != s.vars.size()) throw std::invalid_argument("with_equation: arity mismatch");
    s.equations.push_back(std::move(p));
    return s;
}

inline ConstructibleSet with_inequation(ConstructibleSet s, MultiPoly p) {
    if (p.nvars != s.vars.size()) throw std::invalid_argument("with_inequation: arity mismatch");
    s.inequations.push_back(std::move(p));
    return s;
}

inline bool fields_equal(const ff::FieldPtr& a, const ff::FieldPtr& b) {
    if (a.get() == b.get()) return true;
    if (!a || !b) return false;
    if (a->p != b->p || a->abs_deg != b->abs_deg || a->rel_deg != b->rel_deg) return false;
    if (a->is_prime_field()) return b->is_prime_field();
    return !b->is_prime_field() && a->rel_modulus == b->rel_modulus && fields_equal(a->base, b->base);
}

// structural equality; variable names are labels and do not participate
inline bool sets_equal(const ConstructibleSet& a, const ConstructibleSet& b) {
    return fields_equal(a.field, b.field) && a.vars.size() == b.vars.size() &&
           a.equations == b.equations && a.inequations == b.inequations;
}

// variables of `a` first, then `b`; constraints imported unchanged
inline ConstructibleSet product_set(const ConstructibleSet& a, const ConstructibleSet& b) {
    if (!fields_equal(a.field, b.field)) throw std::invalid_argument("product_set: field mismatch");
    ConstructibleSet s;
    s.field = a.field;
    s.vars = a.vars;
    for (const auto& v : b.vars) {
        std::string name = v;
        while (std::find(s.vars.begin(), s.vars.end(), name) != s.vars.end()) name += "'";
        s.vars.push_back(name);
    }
    std::size_t nv = a.vars.size() + b.vars.size();
    for (const auto& p : a.equations) s.equations.push_back(mp_shift(p, 0, nv));
    for (const auto& p : b.equations) s.equations.push_back(mp_shift(p, a.vars.size(), nv));
    for (const auto& p : a.inequations) s.inequations.push_back(mp_shift(p, 0, nv));
    for (const auto& p : b.inequations) s.inequations.push_back(mp_shift(p, a.vars.size(), nv));
    return s;
}

struct PointList {
    ff::FieldPtr work;                           // F_{q^n}
    std::vector<std::vector<ff::FElem>> pts;     // tuples, last coordinate fastest
};

// Enumerates all tuples over `work` in odometer order (final coordinate
// fastest, so product sets list points in row-major pair order) and keeps
// those satisfying every equation and inequation.
inline PointList points_over(const ConstructibleSet& s, const ff::FieldPtr& work,
                             std::size_t budget = kPointBudget) {
    validate_set(s);
    if (work.get() != s.field.get() && work->base.get() != s.field.get())
        throw std::invalid_argument("points_over: work field must be the coefficient field or one extension of it");
    const std::size_t k = s.vars.size();
    const std::size_t qn = work->size;
    unsigned long long total = 1;
    for (std::size_t i = 0; i < k; ++i) {
        total *= qn;
        if (total > budget) {
            std::ostringstream os;
            os << "point enumeration over " << work->describe() << " needs " << qn << "^" << k
               << " candidates, budget " << budget;
            throw BudgetError(os.str());
        }
    }

    PointList out;
    out.work = work;
    std::vector<ff::FElem> tup(k, 0);
    for (unsigned long long c = 0; c < total; ++c) {
        bool keep = true;
        for (const auto& p : s.equations)
            if (mp_eval(p, s.field, work, tup.data()) != 0) {
                keep = false;
                break;
            }
        if (keep)
            for (const auto& p : s.inequations)
                if (mp_eval(p, s.field, work, tup.data()) == 0) {
                    keep = false;
                    break;
                }
        if (keep) out.pts.push_back(tup);
        for (std::size_t i = k; i-- > 0;) {
            if (++tup[i] < qn) break;
            tup[i] = 0;
        }
    }
    return out;
}

inline PointList points(const ConstructibleSet& s, unsigned n, std::size_t budget = kPointBudget) {
    if (n == 0) throw std::invalid_argument("points: level must be positive");
    return points_over(s, ff::extend_field(s.field, n), budget);
}

// ---- spans and correspondences ----------------------------------------------

struct Span {
    ConstructibleSet source, target, apex;
    std::vector<MultiPoly> to_source, to_target;  // coordinate maps in apex variables
    long weight = 1;
};

inline Span make_span(ConstructibleSet source, ConstructibleSet target, ConstructibleSet apex,
                      std::vector<MultiPoly> to_source, std::vector<MultiPoly> to_target,
                      long weight = 1) {
    validate_set(source);
    validate_set(target);
    validate_set(apex);
    if (!fields_equal(source.field, target.field) || !fields_equal(source.field, apex.field))
        throw std::invalid_argument("span: source, target and apex must share the field");
    if (to_source.size() != source.vars.size() || to_target.size() != target.vars.size())
        throw std::invalid_argument("span: projection coordinate count mismatch");
    for (const auto& p : to_source)
        if (p.nvars != apex.vars.size()) throw std::invalid_argument("span: projection arity mismatch");
    for (const auto& p : to_target)
        if (p.nvars != apex.vars.size()) throw std::invalid_argument("span: projection arity mismatch");
    // one canonical field pointer end to end
    target.field = source.field;
    apex.field = source.field;
    return Span{std::move(source), std::move(target), std::move(apex), std::move(to_source),
                std::move(to_target), weight};
}

struct Correspondence {
    ConstructibleSet source, target;
    std::vector<Span> spans;
};

inline Correspondence make_correspondence(ConstructibleSet source, ConstructibleSet target,
                                          std::vector<Span> spans) {
    validate_set(source);
    validate_set(target);
    for (auto& s : spans) {
        if (!sets_equal(s.source, source) || !sets_equal(s.target, target))
            throw std::invalid_argument("correspondence: span signature mismatch");
        s.source.field = source.field;
        s.target.field = source.field;
        s.apex.field = source.field;
    }
    target.field = source.field;
    return Correspondence{std::move(source), std::move(target), std::move(spans)};
}

inline Correspondence single(Span s) {
    ConstructibleSet src = s.source, tgt = s.target;
    return make_correspondence(std::move(src), std::move(tgt), {std::move(s)});
}

// graph of the polynomial map X -> Y given by `coords` in X's variables
inline Correspondence graph_correspondence(const ConstructibleSet& X, const ConstructibleSet& Y,
                                           std::vector<MultiPoly> coords, long weight = 1) {
    std::vector<MultiPoly> id;
    for (std::size_t i = 0; i < X.vars.size(); ++i) id.push_back(mp_var(X.field, X.vars.size(), i));
    return single(make_span(X, Y, X, std::move(id), std::move(coords), weight));
}

inline Correspondence identity_correspondence(const ConstructibleSet& X) {
    std::vector<MultiPoly> coords;
    for (std::size_t i = 0; i < X.vars.size(); ++i)
        coords.push_back(mp_var(X.field, X.vars.size(), i));
    return graph_correspondence(X, X, std::move(coords));
}

// graph of the coordinate-wise q-th power, q the coefficient field size
inline Correspondence frobenius_graph(const ConstructibleSet& X) {
    std::vector<MultiPoly> coords;
    for (std::size_t i = 0; i < X.vars.size(); ++i)
        coords.push_back(mp_pow(X.field, mp_var(X.field, X.vars.size(), i), X.field->size));
    return graph_correspondence(X, X, std::move(coords));
}

// Matrix of the correspondence on F_{q^n} points: rows indexed by source
// points, columns by target points, entry = sum over spans of
// weight * #{apex points over (row, column)}. Composition of correspondences
// goes to the matrix product contracting the middle index.
inline IntMatrix phi_n(const Correspondence& c, unsigned n, std::size_t budget = kPointBudget) {
    if (n == 0) throw std::invalid_argument("phi_n: level must be positive");
    ff::FieldPtr work = ff::extend_field(c.source.field, n);
    PointList src = points_over(c.source, work, budget);
    PointList tgt = points_over(c.target, work, budget);
    std::map<std::vector<ff::FElem>, std::size_t> src_ix, tgt_ix;
    for (std::size_t i = 0; i < src.pts.size(); ++i) src_ix[src.pts[i]] = i;
    for (std::size_t i = 0; i < tgt.pts.size(); ++i) tgt_ix[tgt.pts[i]] = i;

    IntMatrix m(src.pts.size(), tgt.pts.size());
    for (const Span& s : c.spans) {
        PointList apex = points_over(s.apex, work, budget);
        std::vector<ff::FElem> sx(s.to_source.size()), tx(s.to_target.size());
        for (const auto& a : apex.pts) {
            for (std::size_t i = 0; i < s.to_source.size(); ++i)
                sx[i] = mp_eval(s.to_source[i], s.apex.field, work, a.data());
            for (std::size_t i = 0; i < s.to_target.size(); ++i)
                tx[i] = mp_eval(s.to_target[i], s.apex.field, work, a.data());
            auto si = src_ix.find(sx);
            auto ti = tgt_ix.find(tx);
            if (si == src_ix.end() || ti == tgt_ix.end())
                throw std::domain_error("phi_n: span projection leaves the source/target point set");
            m(si->second, ti->second) += s.weight;
        }
    }
    return m;
}

// Fibered product over the shared middle: the joined apex carries both
// original apexes' constraints plus equations identifying the two middle
// projections. phi_n of the result is the matrix product of the factors.
inline Correspondence compose(const Correspondence& c1, const Correspondence& c2) {
    if (!sets_equal(c1.target, c2.source))
        throw std::invalid_argument("compose: middle signature mismatch");
    const ff::FieldPtr& F = c1.source.field;
    std::vector<Span> spans;
    for (const Span& a : c1.spans)
        for (const Span& b : c2.spans) {
            ConstructibleSet apex = product_set(a.apex, b.apex);
            const std::size_t n1 = a.apex.vars.size();
            const std::size_t nv = apex.vars.size();
            for (std::size_t i = 0; i < c1.target.vars.size(); ++i)
                apex.equations.push_back(
                    mp_sub(F, mp_shift(a.to_target[i], 0, nv), mp_shift(b.to_source[i], n1, nv)));
            std::vector<MultiPoly> to_source, to_target;
            for (const auto& p : a.to_source) to_source.push_back(mp_shift(p, 0, nv));
            for (const auto& p : b.to_target) to_target.push_back(mp_shift(p, n1, nv));
            spans.push_back(make_span(c1.source, c2.target, std::move(apex), std::move(to_source),
                                      std::move(to_target), a.weight * b.weight));
        }
    return make_correspondence(c1.source, c2.target, std::move(spans));
}

// ---- two-index trace tables -------------------------------------------------

struct TraceTable {
    unsigned n_max = 0, m_max = 0;
    std::vector<Int> z;  // row-major, z[(n-1)*m_max + (m-1)]

    const Int& at(unsigned n, unsigned m) const {
        if (n < 1 || n > n_max || m < 1 || m > m_max)
            throw std::out_of_range("trace table index");
        return z[(std::size_t)(n - 1) * m_max + (m - 1)];
    }
};

inline TraceTable z_table(const Correspondence& M, unsigned n_max, unsigned m_max,
                          std::size_t budget = kPointBudget) {
    if (!sets_equal(M.source, M.target))
        throw std::invalid_argument("z_table: endomorphism required");
    TraceTable t;
    t.n_max = n_max;
    t.m_max = m_max;
    t.z.reserve((std::size_t)n_max * m_max);
    for (unsigned n = 1; n <= n_max; ++n) {
        IntMatrix A = phi_n(M, n, budget);
        IntMatrix P = A;
        for (unsigned m = 1; m <= m_max; ++m) {
            t.z.push_back(P.trace());
            if (m < m_max) P = P * A;
        }
    }
    return t;
}

struct SequenceFit {
    std::vector<Int> seq;
    std::optional<Recurrence> recurrence;  // minimal fit on the full sequence
    bool predicted_ok = false;             // refit on the prefix predicts the withheld last term
};

inline SequenceFit fit_sequence(std::vector<Int> seq) {
    SequenceFit f;
    f.seq = std::move(seq);
    std::vector<Rat> rs;
    for (const Int& v : f.seq) rs.emplace_back(v);
    f.recurrence = berlekamp_massey(rs);
    if (rs.size() >= 2) {
        std::vector<Rat> prefix(rs.begin(), rs.end() - 1);
        if (auto pre = berlekamp_massey(prefix))
            f.predicted_ok = pre->order() <= prefix.size() && recurrence_predict(*pre, prefix) == rs.back();
    }
    return f;
}

struct ZTableReport {
    TraceTable table;
    std::vector<SequenceFit> rows;  // fixed n, m varying
    std::vector<SequenceFit> cols;  // fixed m, n varying
};

inline ZTableReport z_table_report(const Correspondence& M, unsigned n_max, unsigned m_max,
                                   std::size_t budget = kPointBudget) {
    ZTableReport r;
    r.table = z_table(M, n_max, m_max, budget);
    for (unsigned n = 1; n <= n_max; ++n) {
        std::vector<Int> row;
        for (unsigned m = 1; m <= m_max; ++m) row.push_back(r.table.at(n, m));
        r.rows.push_back(fit_sequence(std::move(row)));
    }
    for (unsigned m = 1; m <= m_max; ++m) {
        std::vector<Int> col;
        for (unsigned n = 1; n <= n_max; ++n) col.push_back(r.table.at(n, m));
        r.cols.push_back(fit_sequence(std::move(col)));
    }
    return r;
}

// Independent route to Trace(phi_n(M)^m) for a single-span M: enumerate the
// cyclic fibered power of the apex directly (m shifted copies, consecutive
// target/source projections identified, last closing onto the first) and
// scale by weight^m.
inline Int z_fibered_oracle(const Correspondence& M, unsigned n, unsigned m,
                            std::size_t budget = kPointBudget) {
    if (!sets_equal(M.source, M.target))
        throw std::invalid_argument("z_fibered_oracle: endomorphism required");
    if (M.spans.size() != 1)
        throw std::invalid_argument("z_fibered_oracle: single-span correspondence required");
    if (m == 0) throw std::invalid_argument("z_fibered_oracle: m must be positive");
    const Span& s = M.spans[0];
    const ff::FieldPtr& F = s.apex.field;
    const std::size_t k = s.apex.vars.size();
    const std::size_t nv = (std::size_t)m * k;

    ConstructibleSet chain;
    chain.field = F;
    for (unsigned j = 0; j < m; ++j)
        for (const auto& v : s.apex.vars) chain.vars.push_back(v + "_" + std::to_string(j));
    for (unsigned j = 0; j < m; ++j) {
        for (const auto& p : s.apex.equations) chain.equations.push_back(mp_shift(p, j * k, nv));
        for (const auto& p : s.apex.inequations) chain.inequations.push_back(mp_shift(p, j * k, nv));
    }
    for (unsigned j = 0; j < m; ++j) {
        std::size_t jn = ((std::size_t)j + 1) % m * k;
        for (std::size_t i = 0; i < s.to_target.size(); ++i)
            chain.equations.push_back(mp_sub(F, mp_shift(s.to_target[i], (std::size_t)j * k, nv),
                                             mp_shift(s.to_source[i], jn, nv)));
    }
    Int count = (long)points(chain, n, budget).pts.size();
    Int w = 1;
    for (unsigned j = 0; j < m; ++j) w *= s.weight;
    return w * count;
}

// ---- sublattices and twisted traces ------------------------------------------

// Z(n,0) + Z(k,m) inside Z^2; index n*m
struct Sublattice2 {
    long n = 1, m = 1, k = 0;
};

inline void validate(const Sublattice2& l) {
    if (l.n < 1 || l.m < 1 || l.k < 0 || l.k >= l.n)
        throw std::invalid_argument("sublattice: need n >= 1, m >= 1, 0 <= k < n");
}

inline long lattice_index(const Sublattice2& l) { return l.n * l.m; }

// integer column operations bring the generator pair to (n,0), (k,m)
inline Sublattice2 lattice_normal_form(std::pair<long, long> g1, std::pair<long, long> g2) {
    long m00 = g1.first, m01 = g2.first;
    long m10 = g1.second, m11 = g2.second;
    if (m00 * m11 - m01 * m10 == 0)
        throw std::invalid_argument("lattice_normal_form: generators are linearly dependent");
    while (m10 != 0) {
        long q = m11 / m10;
        m01 -= q * m00;
        m11 -= q * m10;
        std::swap(m00, m01);
        std::swap(m10, m11);
    }
    if (m11 < 0) {
        m01 = -m01;
        m11 = -m11;
    }
    if (m00 < 0) m00 = -m00;
    long k = m01 % m00;
    if (k < 0) k += m00;
    return Sublattice2{m00, m11, k};
}

// Trace(phi_n(M)^m (phi_n Fr)^k); Fr is the Frobenius graph of M's source
inline Int z_lattice(const Correspondence& M, const Sublattice2& l,
                     std::size_t budget = kPointBudget) {
    if (!sets_equal(M.source, M.target))
        throw std::invalid_argument("z_lattice: endomorphism required");
    validate(l);
    IntMatrix A = phi_n(M, (unsigned)l.n, budget);
    IntMatrix P = A.pow((unsigned long)l.m);
    if (l.k > 0) {
        IntMatrix F = phi_n(frobenius_graph(M.source), (unsigned)l.n, budget);
        P = P * F.pow((unsigned long)l.k);
    }
    return P.trace();
}

struct RayReport {
    std::pair<long, long> g1, g2;
    std::vector<Sublattice2> lattices;  // normal form of Z g1 + Z (n g2)
    SequenceFit fit;                    // values along the ray, n = 1..n_max
    std::optional<ExpSum> expsum;
    bool ok = false;  // recurrence found and the withheld term predicted
};

inline RayReport ray_rationality(const Correspondence& M, std::pair<long, long> g1,
                                 std::pair<long, long> g2, unsigned n_max,
                                 std::size_t budget = kPointBudget) {
    if (g1.first * g2.second - g1.second * g2.first == 0)
        throw std::invalid_argument("ray_rationality: rays must be linearly independent");
    RayReport r;
    r.g1 = g1;
    r.g2 = g2;
    std::vector<Int> seq;
    for (unsigned n = 1; n <= n_max; ++n) {
        Sublattice2 l = lattice_normal_form(g1, {g2.first * (long)n, g2.second * (long)n});
        r.lattices.push_back(l);
        seq.push_back(z_lattice(M, l, budget));
    }
    r.fit = fit_sequence(std::move(seq));
    if (r.fit.recurrence) {
        std::vector<Rat> rs;
        for (const Int& v : r.fit.seq) rs.emplace_back(v);
        r.expsum = exp_sum_decompose(rs, *r.fit.recurrence);
    }
    r.ok = r.fit.recurrence.has_value() && r.fit.predicted_ok;
    return r;
}

// ---- projective plane incidence ----------------------------------------------

struct RadonReport {
    unsigned q = 0;
    std::size_t n_points = 0;
    long line_coeff = 0;   // multiple of the identity in M M^T
    long point_coeff = 1;  // multiple of the all-ones matrix
    bool identity_holds = false;
    std::string witness;
};

// Point-line incidence of the projective plane over F_q, points and lines as
// triples normalized to last nonzero coordinate 1. Checks M M^T = q I + J.
inline RadonReport radon_check(unsigned q) {
    if (q < 2 || q > 9) throw std::invalid_argument("radon_check: q must be a prime power <= 9");
    unsigned p = 0;
    for (unsigned d = 2; d <= q; ++d)
        if (q % d == 0) {
            p = d;
            break;
        }
    unsigned e = 0, v = q;
    while (v > 1 && v % p == 0) {
        v /= p;
        ++e;
    }
    if (v != 1) throw std::invalid_argument("radon_check: q must be a prime power <= 9");
    ff::FieldPtr F = ff::make_field(p, e);

    std::vector<std::array<ff::FElem, 3>> reps;
    for (std::size_t a = 0; a < q; ++a)
        for (std::size_t b = 0; b < q; ++b)
            for (std::size_t c = 0; c < q; ++c) {
                ff::FElem fa = (ff::FElem)a, fb = (ff::FElem)b, fc = (ff::FElem)c;
                ff::FElem last = fc != 0 ? fc : (fb != 0 ? fb : fa);
                if (last == F->one()) reps.push_back({fa, fb, fc});
            }
    RadonReport r;
    r.q = q;
    r.n_points = reps.size();
    if (reps.size() != (std::size_t)q * q + q + 1)
        throw std::logic_error("radon_check: projective point count is off");

    const std::size_t N = reps.size();
    I64Matrix M(N, N);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) {
            ff::FElem dot = F->add(F->add(F->mul(reps[i][0], reps[j][0]), F->mul(reps[i][1], reps[j][1])),
                                   F->mul(reps[i][2], reps[j][2]));
            M(i, j) = dot == 0 ? 1 : 0;
        }
    r.line_coeff = (long)q;
    r.identity_holds = true;
    for (std::size_t i = 0; i < N && r.identity_holds; ++i)
        for (std::size_t j = 0; j < N; ++j) {
            long got = 0;
            for (std::size_t l = 0; l < N; ++l) got += M(i, l) * M(j, l);
            long want = (i == j ? (long)q : 0) + 1;
            if (got != want) {
                r.identity_holds = false;
                std::ostringstream os;
                os << "entry (" << i << "," << j << "): " << got << " != " << want;
                r.witness = os.str();
                break;
            }
        }
    return r;
}

// ---- algebra axioms for structure tensors -------------------------------------

// c[(x*s + y)*s + z] is the coefficient of basis element z in the product of
// basis elements x and y.
struct StructureTensor {
    std::size_t s = 0;
    std::vector<long> c;

    long at(std::size_t x, std::size_t y, std::size_t z) const { return c[(x * s + y) * s + z]; }
    long& at(std::size_t x, std::size_t y, std::size_t z) { return c[(x * s + y) * s + z]; }
};

inline StructureTensor make_tensor(std::size_t s) {
    if (s > 300) throw BudgetError("structure tensor: index set larger than 300");
    StructureTensor t;
    t.s = s;
    t.c.assign(s * s * s, 0);
    return t;
}

// Tensor of a multiplication correspondence X x X -> X at level n. The
// product points must list as row-major pairs of the factor points; this is
// verified, not assumed.
inline StructureTensor structure_tensor(const Correspondence& mult, unsigned n,
                                        std::size_t budget = kPointBudget) {
    PointList tgt = points(mult.target, n, budget);
    PointList src = points(mult.source, n, budget);
    const std::size_t s = tgt.pts.size();
    if (src.pts.size() != s * s)
        throw std::invalid_argument("structure_tensor: source must be the square of the target");
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; j < s; ++j) {
            std::vector<ff::FElem> pair = tgt.pts[i];
            pair.insert(pair.end(), tgt.pts[j].begin(), tgt.pts[j].end());
            if (src.pts[i * s + j] != pair)
                throw std::invalid_argument("structure_tensor: source points are not row-major pairs");
        }
    IntMatrix m = phi_n(mult, n, budget);
    StructureTensor t = make_tensor(s);
    for (std::size_t x = 0; x < s; ++x)
        for (std::size_t y = 0; y < s; ++y)
            for (std::size_t z = 0; z < s; ++z) t.at(x, y, z) = (long)m(x * s + y, z).get_si();
    return t;
}

struct AxiomCheck {
    std::string name;
    bool pass = false;
    std::string witness;  // empty when the axiom holds
};

struct AlgebraReport {
    std::vector<AxiomCheck> checks;
    bool ok = false;
};

// Exact checks on the structure tensor: inputs commute, the two bracketings
// contract equally, and the optional unit vector acts as identity on both
// sides. The bracketing comparison is quintic in the index set size.
inline AlgebraReport algebra_axiom_check(const StructureTensor& t,
                                         const std::vector<Rat>& unit = {}) {
    const std::size_t s = t.s;
    if (s > 300) throw BudgetError("algebra_axiom_check: index set larger than 300");
    if (t.c.size() != s * s * s) throw std::invalid_argument("algebra_axiom_check: tensor size mismatch");
    if (!unit.empty() && unit.size() != s)
        throw std::invalid_argument("algebra_axiom_check: unit vector size mismatch");
    AlgebraReport r;

    AxiomCheck comm{"commutative", true, ""};
    for (std::size_t x = 0; x < s && comm.pass; ++x)
        for (std::size_t y = x + 1; y < s && comm.pass; ++y)
            for (std::size_t z = 0; z < s; ++z)
                if (t.at(x, y, z) != t.at(y, x, z)) {
                    std::ostringstream os;
                    os << "c(" << x << "," << y << "," << z << ") = " << t.at(x, y, z) << " but c("
                       << y << "," << x << "," << z << ") = " << t.at(y, x, z);
                    comm = {"commutative", false, os.str()};
                    break;
                }
    r.checks.push_back(comm);

    // L[x](u, y) = c(x, y, u); both bracketings of (x y) z, as matrices over (u, z)
    std::vector<I64Matrix> L(s, I64Matrix(s, s));
    for (std::size_t x = 0; x < s; ++x)
        for (std::size_t y = 0; y < s; ++y)
            for (std::size_t u = 0; u < s; ++u) L[x](u, y) = t.at(x, y, u);
    AxiomCheck assoc{"associative", true, ""};
    for (std::size_t x = 0; x < s && assoc.pass; ++x)
        for (std::size_t y = 0; y < s && assoc.pass; ++y) {
            I64Matrix rhs = L[x] * L[y];
            I64Matrix lhs(s, s);
            for (std::size_t w = 0; w < s; ++w) {
                long cw = t.at(x, y, w);
                if (cw == 0) continue;
                for (std::size_t u = 0; u < s; ++u)
                    for (std::size_t z = 0; z < s; ++z) lhs(u, z) += cw * L[w](u, z);
            }
            if (!(lhs == rhs))
                for (std::size_t u = 0; u < s && assoc.pass; ++u)
                    for (std::size_t z = 0; z < s; ++z)
                        if (lhs(u, z) != rhs(u, z)) {
                            std::ostringstream os;
                            os << "x=" << x << " y=" << y << " z=" << z << " u=" << u
                               << ": (xy)z coefficient " << lhs(u, z) << ", x(yz) coefficient "
                               << rhs(u, z);
                            assoc = {"associative", false, os.str()};
                            break;
                        }
        }
    r.checks.push_back(assoc);

    if (!unit.empty()) {
        AxiomCheck un{"unit_acts_as_identity", true, ""};
        for (std::size_t x = 0; x < s && un.pass; ++x)
            for (std::size_t z = 0; z < s; ++z) {
                Rat left(0), right(0);
                for (std::size_t y = 0; y < s; ++y) {
                    left += unit[y] * Rat(t.at(y, x, z));
                    right += unit[y] * Rat(t.at(x, y, z));
                }
                Rat want = x == z ? Rat(1) : Rat(0);
                if (left != want || right != want) {
                    std::ostringstream os;
                    os << "x=" << x << " z=" << z << ": left " << rat_str(left) << ", right "
                       << rat_str(right) << ", expected " << rat_str(want);
                    un = {"unit_acts_as_identity", false, os.str()};
                    break;
                }
            }
        r.checks.push_back(un);
    }

    r.ok = true;
    for (const auto& c : r.checks) r.ok = r.ok && c.pass;
    return r;
}

// ---- curve-count regrouping ----------------------------------------------------

// (x y + y z + z x - t)^2 + 4 x y z (1 + t - (x + y + z)) as a quadratic in
// its last argument: lead (a-b)^2, middle 2(ab-t)(a+b) + 4ab(1+t-a-b),
// constant (ab-t)^2.
inline std::array<ff::FElem, 3> quartic_quadratic_coeffs(const ff::FieldPtr& F, ff::FElem t,
                                                         ff::FElem a, ff::FElem b) {
    ff::FElem ab = F->mul(a, b), s = F->add(a, b), d = F->sub(a, b);
    ff::FElem alpha = F->mul(d, d);
    ff::FElem beta = F->add(F->mul(F->from_int(2), F->mul(F->sub(ab, t), s)),
                            F->mul(F->from_int(4), F->mul(ab, F->sub(F->add(F->one(), t), s))));
    ff::FElem gamma = F->mul(F->sub(ab, t), F->sub(ab, t));
    return {alpha, beta, gamma};
}

struct CurveRegroupReport {
    bool degenerate = false;
    std::string degenerate_reason;
    Int direct_level1 = 0, regrouped_level1 = 0;
    Int direct_level2 = 0, regrouped_level2 = 0;
    bool equal_level1 = false, equal_level2 = false;
    bool ok = false;  // non-degenerate and equal at both levels
};

namespace detail {

// w^2 = Q1(y), v^2 = Q2(y) in variables (y, w, v)
inline ConstructibleSet double_cover_pair(const ff::FieldPtr& F, const std::array<ff::FElem, 3>& q1,
                                          const std::array<ff::FElem, 3>& q2) {
    ConstructibleSet s;
    s.field = F;
    s.vars = {"y", "w", "v"};
    MultiPoly e1{3, {}}, e2{3, {}};
    e1.terms = {{F->one(), {0, 2, 0}},
                {F->neg(q1[0]), {2, 0, 0}},
                {F->neg(q1[1]), {1, 0, 0}},
                {F->neg(q1[2]), {0, 0, 0}}};
    e2.terms = {{F->one(), {0, 0, 2}},
                {F->neg(q2[0]), {2, 0, 0}},
                {F->neg(q2[1]), {1, 0, 0}},
                {F->neg(q2[2]), {0, 0, 0}}};
    mp_normalize(F, e1);
    mp_normalize(F, e2);
    s.equations = {e1, e2};
    return s;
}

// smoothness of w^2 = Q1, v^2 = Q2: both quadratics honest (nonzero lead),
// squarefree, and with no common root
inline std::string quadratic_pair_defect(const ff::FieldPtr& F, const std::array<ff::FElem, 3>& q1,
                                         const std::array<ff::FElem, 3>& q2, const char* label) {
    auto disc = [&](const std::array<ff::FElem, 3>& q) {
        return F->sub(F->mul(q[1], q[1]), F->mul(F->from_int(4), F->mul(q[0], q[2])));
    };
    if (q1[0] == 0) return std::string(label) + ": first quadratic degenerates (equal pair entries)";
    if (q2[0] == 0) return std::string(label) + ": second quadratic degenerates (equal pair entries)";
    if (disc(q1) == 0) return std::string(label) + ": first quadratic has a double root";
    if (disc(q2) == 0) return std::string(label) + ": second quadratic has a double root";
    // resultant of two quadratics: (a f - c d)^2 - (a e - b d)(b f - c e)
    ff::FElem af_cd = F->sub(F->mul(q1[0], q2[2]), F->mul(q1[2], q2[0]));
    ff::FElem ae_bd = F->sub(F->mul(q1[0], q2[1]), F->mul(q1[1], q2[0]));
    ff::FElem bf_ce = F->sub(F->mul(q1[1], q2[2]), F->mul(q1[2], q2[1]));
    if (F->sub(F->mul(af_cd, af_cd), F->mul(ae_bd, bf_ce)) == 0)
        return std::string(label) + ": the quadratics share a root";
    return "";
}

}  // namespace detail

// Counts solutions of w12^2 = f(x1,x2,y), w34^2 = f(y,x3,x4) against the
// regrouped system w13^2 = f(x1,x3,y), w24^2 = f(y,x2,x4) over F_q and
// F_{q^2}. Counts are always reported; equality is asserted (ok) only for
// non-degenerate parameters.
inline CurveRegroupReport curve_regroup_check(const ff::FieldPtr& F, ff::FElem t,
                                              std::array<ff::FElem, 4> x,
                                              std::size_t budget = kPointBudget) {
    if (!F) throw std::invalid_argument("curve_regroup_check: missing field");
    if (t == 0 || t == F->one()) throw std::invalid_argument("curve_regroup_check: t must avoid 0 and 1");
    CurveRegroupReport r;
    auto q12 = quartic_quadratic_coeffs(F, t, x[0], x[1]);
    auto q34 = quartic_quadratic_coeffs(F, t, x[2], x[3]);
    auto q13 = quartic_quadratic_coeffs(F, t, x[0], x[2]);
    auto q24 = quartic_quadratic_coeffs(F, t, x[1], x[3]);

    std::string defect = detail::quadratic_pair_defect(F, q12, q34, "direct grouping");
    if (defect.empty()) defect = detail::quadratic_pair_defect(F, q13, q24, "regrouped");
    if (!defect.empty()) {
        r.degenerate = true;
        r.degenerate_reason = defect;
    }

    ConstructibleSet direct = detail::double_cover_pair(F, q12, q34);
    ConstructibleSet regrouped = detail::double_cover_pair(F, q13, q24);
    r.direct_level1 = (long)points(direct, 1, budget).pts.size();
    r.regrouped_level1 = (long)points(regrouped, 1, budget).pts.size();
    r.direct_level2 = (long)points(direct, 2, budget).pts.size();
    r.regrouped_level2 = (long)points(regrouped, 2, budget).pts.size();
    r.equal_level1 = r.direct_level1 == r.regrouped_level1;
    r.equal_level2 = r.direct_level2 == r.regrouped_level2;
    r.ok = !r.degenerate && r.equal_level1 && r.equal_level2;
    return r;
}

// ---- JSON -------------------------------------------------------------------

inline nlohmann::json multipoly_to_json(const MultiPoly& p) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : p.terms) terms.push_back({{"coeff", t.coeff}, {"exps", t.exps}});
    return {{"nvars", p.nvars}, {"terms", terms}};
}

inline MultiPoly multipoly_from_json(const ff::FieldPtr& F, const nlohmann::json& j) {
    MultiPoly p;
    p.nvars = j.at("nvars").get<std::size_t>();
    for (const auto& tj : j.at("terms")) {
        MultiPoly::Term t;
        t.coeff = tj.at("coeff").get<ff::FElem>();
        if (t.coeff >= F->size) throw std::invalid_argument("polynomial json: coefficient outside the field");
        t.exps = tj.at("exps").get<std::vector<unsigned>>();
        if (t.exps.size() != p.nvars) throw std::invalid_argument("polynomial json: exponent arity mismatch");
        p.terms.push_back(std::move(t));
    }
    mp_normalize(F, p);
    return p;
}

inline nlohmann::json set_to_json(const ConstructibleSet& s) {
    nlohmann::json eq = nlohmann::json::array(), ineq = nlohmann::json::array();
    for (const auto& p : s.equations) eq.push_back(multipoly_to_json(p));
    for (const auto& p : s.inequations) ineq.push_back(multipoly_to_json(p));
    return {{"field", ff::field_to_json(s.field)},
            {"vars", s.vars},
            {"equations", eq},
            {"inequations", ineq}};
}

inline ConstructibleSet set_from_json(const nlohmann::json& j, ff::FieldPtr field = nullptr) {
    ConstructibleSet s;
    s.field = field ? std::move(field) : ff::field_from_json(j.at("field"));
    s.vars = j.at("vars").get<std::vector<std::string>>();
    for (const auto& pj : j.at("equations")) s.equations.push_back(multipoly_from_json(s.field, pj));
    for (const auto& pj : j.at("inequations")) s.inequations.push_back(multipoly_from_json(s.field, pj));
    validate_set(s);
    return s;
}

inline nlohmann::json span_to_json(const Span& s) {
    nlohmann::json ts = nlohmann::json::array(), tt = nlohmann::json::array();
    for (const auto& p : s.to_source) ts.push_back(multipoly_to_json(p));
    for (const auto& p : s.to_target) tt.push_back(multipoly_to_json(p));
    return {{"apex", set_to_json(s.apex)}, {"to_source", ts}, {"to_target", tt}, {"weight", s.weight}};
}

inline nlohmann::json correspondence_to_json(const Correspondence& c) {
    nlohmann::json spans = nlohmann::json::array();
    for (const auto& s : c.spans) spans.push_back(span_to_json(s));
    return {{"source", set_to_json(c.source)}, {"target", set_to_json(c.target)}, {"spans", spans}};
}

// all member sets are rebuilt over the source's field object, after checking
// the declared fields agree structurally
inline Correspondence correspondence_from_json(const nlohmann::json& j) {
    ConstructibleSet source = set_from_json(j.at("source"));
    const ff::FieldPtr& F = source.field;
    ff::FieldPtr declared_target = ff::field_from_json(j.at("target").at("field"));
    if (!fields_equal(F, declared_target))
        throw std::invalid_argument("correspondence json: field mismatch between source and target");
    ConstructibleSet target = set_from_json(j.at("target"), F);
    std::vector<Span> spans;
    for (const auto& sj : j.at("spans")) {
        ff::FieldPtr declared_apex = ff::field_from_json(sj.at("apex").at("field"));
        if (!fields_equal(F, declared_apex))
            throw std::invalid_argument("correspondence json: field mismatch at a span apex");
        ConstructibleSet apex = set_from_json(sj.at("apex"), F);
        std::vector<MultiPoly> ts, tt;
        for (const auto& pj : sj.at("to_source")) ts.push_back(multipoly_from_json(F, pj));
        for (const auto& pj : sj.at("to_target")) tt.push_back(multipoly_from_json(F, pj));
        spans.push_back(make_span(source, target, std::move(apex), std::move(ts), std::move(tt),
                                  sj.at("weight").get<long>()));
    }
    return make_correspondence(std::move(source), std::move(target), std::move(spans));
}

inline nlohmann::json recurrence_to_json(const Recurrence& r) {
    nlohmann::json coeffs = nlohmann::json::array();
    for (const Rat& c : r.coeffs) coeffs.push_back(rat_str(c));
    return {{"order", r.order()}, {"coeffs", coeffs}};
}

inline nlohmann::json sequence_fit_to_json(const SequenceFit& f) {
    nlohmann::json seq = nlohmann::json::array();
    for (const Int& v : f.seq) seq.push_back(v.get_str());
    nlohmann::json j{{"sequence", seq}, {"predicted_ok", f.predicted_ok}};
    j["recurrence"] = f.recurrence ? recurrence_to_json(*f.recurrence) : nlohmann::json(nullptr);
    return j;
}

inline nlohmann::json z_table_report_to_json(const ZTableReport& r) {
    nlohmann::json table = nlohmann::json::array();
    for (unsigned n = 1; n <= r.table.n_max; ++n) {
        nlohmann::json row = nlohmann::json::array();
        for (unsigned m = 1; m <= r.table.m_max; ++m) row.push_back(r.table.at(n, m).get_str());
        table.push_back(row);
    }
    nlohmann::json rows = nlohmann::json::array(), cols = nlohmann::json::array();
    for (const auto& f : r.rows) rows.push_back(sequence_fit_to_json(f));
    for (const auto& f : r.cols) cols.push_back(sequence_fit_to_json(f));
    return {{"n_max", r.table.n_max}, {"m_max", r.table.m_max}, {"table", table},
            {"rows", rows},           {"cols", cols}};
}

inline nlohmann::json sublattice_to_json(const Sublattice2& l) {
    return {{"n", l.n}, {"m", l.m}, {"k", l.k}, {"index", lattice_index(l)}};
}

inline nlohmann::json expsum_to_json(const ExpSum& e) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : e.terms)
        terms.push_back({{"lambda_re", t.lambda.real()},
                         {"lambda_im", t.lambda.imag()},
                         {"multiplicity", t.multiplicity}});
    return {{"terms", terms},
            {"reconstruction_error", e.reconstruction_error},
            {"rounding_error", e.rounding_error},
            {"ok", e.ok}};
}

inline nlohmann::json ray_report_to_json(const RayReport& r) {
    nlohmann::json lats = nlohmann::json::array();
    for (const auto& l : r.lattices) lats.push_back(sublattice_to_json(l));
    nlohmann::json j{{"g1", {r.g1.first, r.g1.second}},
                     {"g2", {r.g2.first, r.g2.second}},
                     {"lattices", lats},
                     {"fit", sequence_fit_to_json(r.fit)},
                     {"ok", r.ok}};
    j["expsum"] = r.expsum ? expsum_to_json(*r.expsum) : nlohmann::json(nullptr);
    return j;
}

inline nlohmann::json radon_report_to_json(const RadonReport& r) {
    return {{"q", r.q},
            {"n_points", r.n_points},
            {"line_coeff", r.line_coeff},
            {"point_coeff", r.point_coeff},
            {"identity_holds", r.identity_holds},
            {"witness", r.witness}};
}

inline nlohmann::json algebra_report_to_json(const AlgebraReport& r) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : r.checks) {
        nlohmann::json cj{{"name", c.name}, {"pass", c.pass}};
        if (!c.witness.empty()) cj["witness"] = c.witness;
        checks.push_back(cj);
    }
    return {{"checks", checks}, {"ok", r.ok}};
}

inline nlohmann::json curve_regroup_report_to_json(const CurveRegroupReport& r) {
    nlohmann::json j{{"degenerate", r.degenerate}, {"ok", r.ok}};
    if (r.degenerate) j["reason"] = r.degenerate_reason;
    j["direct_level1"] = r.direct_level1.get_str();
    j["regrouped_level1"] = r.regrouped_level1.get_str();
    j["direct_level2"] = r.direct_level2.get_str();
    j["regrouped_level2"] = r.regrouped_level2.get_str();
    j["equal_level1"] = r.equal_level1;
    j["equal_level2"] = r.equal_level2;
    return j;
}

}  // namespace motivic::spans
