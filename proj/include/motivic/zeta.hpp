#pragma once

// Trace experiments around the resolvent: the closed-form correction term,
// the rationality experiment on corrected trace sequences, and the exact
// power-series identity behind the single-operator series. Level families
// are cached per level so repeated queries reuse them.

#include <complex>
#include <map>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "motivic/ff.hpp"
#include "motivic/hecke.hpp"
#include "motivic/matrix.hpp"
#include "motivic/recurrence.hpp"
#include "motivic/series.hpp"

namespace motivic::zeta {

// -(-1-q^n)^k / ((1-q^{-n})(1-q^{2n})), exact
inline Rat corr(unsigned n, unsigned k, unsigned long q) {
    if (n == 0) throw std::invalid_argument("corr: n must be positive");
    Int qn = ipow(Int(q), n);
    Int num(1);
    for (unsigned i = 0; i < k; ++i) num *= -(Int(1) + qn);
    Rat qinv = Rat(1) / Rat(qn);
    Rat den = (Rat(1) - qinv) * (Rat(1) - Rat(qn) * Rat(qn));
    return -Rat(num) / den;
}

struct Conj4Config {
    ff::FieldPtr base;
    ff::FElem t = 0;
    std::vector<ff::FElem> points;  // in the base field, outside {0, 1, t}
    unsigned n_max = 3;
    std::size_t budget = 300;  // cap on q^n
};

inline void validate(const Conj4Config& cfg) {
    hecke::HeckeParams hp{cfg.base, cfg.t, 1, cfg.budget};
    hecke::validate(hp);
    if (cfg.points.empty()) throw std::invalid_argument("conj4: needs at least one point");
    for (ff::FElem x : cfg.points) {
        if ((std::size_t)x >= cfg.base->size) throw std::invalid_argument("conj4: point outside the field");
        if (x == 0 || x == 1 || x == cfg.t) throw std::invalid_argument("conj4: point must avoid {0, 1, t}");
    }
    if (cfg.n_max == 0) throw std::invalid_argument("conj4: n_max must be positive");
    std::size_t sz = 1;
    for (unsigned i = 0; i < cfg.n_max; ++i) {
        sz *= cfg.base->size;
        if (sz > cfg.budget) throw BudgetError("conj4: q^n_max exceeds budget");
    }
}

// One level's worth of reusable data: the family and the integer core
// A = sum_x T_x^2 + (4Q+1) I, so that D = Q A^{-1}.
struct LevelData {
    hecke::Level lv;
    std::vector<I64Matrix> ops;
    IntMatrix a;
};

class Conj4Session {
public:
    Conj4Session(ff::FieldPtr base, ff::FElem t, std::size_t budget = 300)
        : base_(std::move(base)), t_(t), budget_(budget) {}

    const LevelData& level(unsigned n) {
        auto it = cache_.find(n);
        if (it != cache_.end()) return it->second;
        hecke::HeckeParams hp{base_, t_, n, budget_};
        LevelData ld;
        ld.lv = hecke::make_level(hp);
        std::size_t s = ld.lv.work->size;
        long Q = ld.lv.q_n;
        I64Matrix acc(s, s);
        ld.ops.reserve(s);
        for (std::size_t x = 0; x < s; ++x) {
            ld.ops.push_back(hecke::hecke_matrix(ld.lv, (ff::FElem)x));
            acc = acc + ld.ops.back() * ld.ops.back();
        }
        ld.a = IntMatrix(s, s);
        for (std::size_t i = 0; i < s; ++i)
            for (std::size_t j = 0; j < s; ++j)
                ld.a(i, j) = Int(acc(i, j)) + (i == j ? Int(4 * Q + 1) : Int(0));
        return cache_.emplace(n, std::move(ld)).first->second;
    }

    // Trace(T_{x_1} ... T_{x_k} D) at level n, exact; the x_i are base-field
    // points, embedded into the level-n field.
    Rat trace_product_d(const std::vector<ff::FElem>& points, unsigned n) {
        const LevelData& ld = level(n);
        IntMatrix prod = to_int_matrix(ld.ops[label(ld, points[0])]);
        for (std::size_t i = 1; i < points.size(); ++i)
            prod = prod * to_int_matrix(ld.ops[label(ld, points[i])]);
        return trace_against_core(ld, prod);
    }

    Rat trace_against_core(const LevelData& ld, const IntMatrix& prod) const {
        std::vector<const IntMatrix*> bs{&prod};
        auto r = crt_adjugate_traces(ld.a, bs);
        if (!r) throw std::domain_error("conj4: resolvent core is singular");
        return Rat(ld.lv.q_n) * Rat(r->traces[0]) / Rat(r->det);
    }

private:
    // level 1 works directly over the base field; higher levels embed
    std::size_t label(const LevelData& ld, ff::FElem x) const {
        return ld.lv.work == base_ ? x : ld.lv.work->embed_base(x);
    }

    ff::FieldPtr base_;
    ff::FElem t_;
    std::size_t budget_;
    std::map<unsigned, LevelData> cache_;
};

// a_n = Trace(T_{x_1}^{(n)} ... T_{x_k}^{(n)} D^{(n)}) + corr(n, k), exact
inline std::vector<Rat> conjecture4_sequence(const Conj4Config& cfg, Conj4Session& session) {
    validate(cfg);
    std::vector<Rat> seq;
    seq.reserve(cfg.n_max);
    for (unsigned n = 1; n <= cfg.n_max; ++n)
        seq.push_back(session.trace_product_d(cfg.points, n) +
                      corr(n, (unsigned)cfg.points.size(), cfg.base->size));
    return seq;
}

inline std::vector<Rat> conjecture4_sequence(const Conj4Config& cfg) {
    Conj4Session session(cfg.base, cfg.t, cfg.budget);
    return conjecture4_sequence(cfg, session);
}

// ---------------------------------------------------------------------------
// Weil-number signature: |lambda| should sit on the half-integer power ladder
// of q. Reported, never asserted.

struct WeilEntry {
    std::complex<double> lambda;
    int half_power = 0;       // nearest j with |lambda| = q^{j/2}
    double rel_deviation = 0.0;
};

struct WeilSignature {
    std::vector<WeilEntry> entries;
    bool all_on_ladder = true;
    double tol = 1e-4;
};

inline WeilSignature weil_signature(const std::vector<std::complex<double>>& lambdas,
                                    unsigned long q, double tol = 1e-4) {
    WeilSignature sig;
    sig.tol = tol;
    for (auto z : lambdas) {
        WeilEntry e;
        e.lambda = z;
        double a = std::abs(z);
        if (a <= 0.0) {
            e.rel_deviation = 1.0;
            sig.all_on_ladder = false;
        } else {
            double j = 2.0 * std::log(a) / std::log((double)q);
            e.half_power = (int)std::lround(j);
            double ladder = std::pow((double)q, e.half_power / 2.0);
            e.rel_deviation = std::abs(a - ladder) / ladder;
            if (e.rel_deviation > tol) sig.all_on_ladder = false;
        }
        sig.entries.push_back(e);
    }
    return sig;
}

// ---------------------------------------------------------------------------
// full experiment report

struct Conj4Report {
    std::vector<Rat> sequence;
    std::optional<Recurrence> recurrence;  // minimal LFSR over the sequence
    std::optional<ExpSum> expsum;
    std::optional<WeilSignature> weil;
};

inline Conj4Report conj4_run(const Conj4Config& cfg) {
    Conj4Report rep;
    rep.sequence = conjecture4_sequence(cfg);
    rep.recurrence = berlekamp_massey(rep.sequence);
    if (rep.recurrence && rep.recurrence->order() > 0) {
        rep.expsum = exp_sum_decompose(rep.sequence, *rep.recurrence);
        std::vector<std::complex<double>> ls;
        for (const auto& term : rep.expsum->terms) ls.push_back(term.lambda);
        rep.weil = weil_signature(ls, cfg.base->size);
    }
    return rep;
}

inline nlohmann::json conj4_report_to_json(const Conj4Config& cfg, const Conj4Report& rep) {
    nlohmann::json j;
    j["params"] = {{"field", ff::field_to_json(cfg.base)},
                   {"t", cfg.t},
                   {"points", cfg.points},
                   {"n_max", cfg.n_max}};
    j["sequence"] = nlohmann::json::array();
    for (const Rat& a : rep.sequence) j["sequence"].push_back(rat_str(a));
    if (rep.recurrence) {
        nlohmann::json r;
        r["order"] = rep.recurrence->order();
        r["coefficients"] = nlohmann::json::array();
        for (const Rat& c : rep.recurrence->coeffs) r["coefficients"].push_back(rat_str(c));
        j["recurrence"] = r;
    }
    if (rep.expsum) {
        nlohmann::json e;
        e["terms"] = nlohmann::json::array();
        for (const auto& term : rep.expsum->terms)
            e["terms"].push_back({{"lambda_re", term.lambda.real()},
                                  {"lambda_im", term.lambda.imag()},
                                  {"multiplicity", term.multiplicity}});
        e["reconstruction_error"] = rep.expsum->reconstruction_error;
        e["ok"] = rep.expsum->ok;
        j["expsum"] = e;
    }
    if (rep.weil) {
        nlohmann::json w;
        w["all_on_ladder"] = rep.weil->all_on_ladder;
        w["entries"] = nlohmann::json::array();
        for (const auto& e : rep.weil->entries)
            w["entries"].push_back({{"abs", std::abs(e.lambda)},
                                    {"half_power", e.half_power},
                                    {"rel_deviation", e.rel_deviation}});
        j["weil_signature"] = w;
    }
    return j;
}

// ---------------------------------------------------------------------------
// the exact product identity
//   exp(-sum_{n>=1} t^n/n * q^n/(q^n-1)^2) = prod_{m>=1} (1-q^{-m} t)^m
//
// Every factor of the product contributes to every t-coefficient, so a
// truncation in m alone is never coefficient-exact. The tail over m > M is
// summed in closed form per power of t: sum_{m>M} m u^m with u = q^{-n} is
// u^{M+1} ((M+1) - M u) / (1-u)^2.

struct ProductCheck {
    bool equal = true;
    int first_mismatch = -1;  // t-power of the first differing coefficient
    PowerSeries lhs{0};
    PowerSeries rhs{0};
};

inline ProductCheck product_formula_check(unsigned long q, std::size_t order) {
    ProductCheck out;
    PowerSeries expo(order);
    for (std::size_t n = 1; n <= order; ++n) {
        Int qn = ipow(Int(q), (unsigned long)n);
        Rat c = Rat(qn) / (Rat(qn - 1) * Rat(qn - 1));
        expo.c[n] = -c / Rat((unsigned long)n);
    }
    out.lhs = series_exp(expo);

    PowerSeries prod = PowerSeries::one(order);
    for (std::size_t m = 1; m <= order; ++m) {
        // (1 - q^{-m} t)^m expanded binomially up to the truncation order
        PowerSeries f(order);
        Rat u = Rat(1) / Rat(ipow(Int(q), (unsigned long)m));
        Rat coef(1);
        f.c[0] = 1;
        for (std::size_t jj = 1; jj <= std::min(m, order); ++jj) {
            coef *= -u * Rat((unsigned long)(m - jj + 1)) / Rat((unsigned long)jj);
            f.c[jj] = coef;
        }
        prod = series_mul(prod, f);
    }
    PowerSeries tail(order);
    const std::size_t M = order;
    for (std::size_t n = 1; n <= order; ++n) {
        Rat u = Rat(1) / Rat(ipow(Int(q), (unsigned long)n));
        Rat upm1 = Rat(1);
        for (std::size_t i = 0; i <= M; ++i) upm1 *= u;
        Rat one_minus = Rat(1) - u;
        Rat t_n = upm1 * (Rat((unsigned long)(M + 1)) - Rat((unsigned long)M) * u) /
                  (one_minus * one_minus);
        tail.c[n] = -t_n / Rat((unsigned long)n);
    }
    out.rhs = series_mul(prod, series_exp(tail));

    for (std::size_t i = 0; i <= order; ++i)
        if (out.lhs.c[i] != out.rhs.c[i]) {
            out.equal = false;
            out.first_mismatch = (int)i;
            break;
        }
    return out;
}

inline nlohmann::json product_check_to_json(unsigned long q, const ProductCheck& pc) {
    nlohmann::json j;
    j["q"] = q;
    j["order"] = pc.lhs.order();
    j["equal"] = pc.equal;
    if (!pc.equal) j["first_mismatch"] = pc.first_mismatch;
    j["coefficients"] = nlohmann::json::array();
    for (std::size_t i = 0; i <= pc.lhs.order(); ++i)
        j["coefficients"].push_back({{"n", i}, {"lhs", rat_str(pc.lhs.c[i])}, {"rhs", rat_str(pc.rhs.c[i])}});
    return j;
}

}  // namespace motivic::zeta
