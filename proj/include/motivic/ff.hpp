#pragma once

// Finite fields with explicit polynomial bases and deterministic choices:
// the modulus is the first irreducible in enumeration order, the generator
// the first element of full multiplicative order, and the element order is
// the positional index of the coefficient vector (zero first, embedded base
// field first). Extensions are built directly over their base field, so the
// base embeds by index identity.

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace motivic {

struct BudgetError : std::runtime_error {
    explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

namespace ff {

using FElem = std::uint32_t;

class Field;
using FieldPtr = std::shared_ptr<const Field>;

inline constexpr std::size_t kFieldBudget = 4u << 20;      // element count
inline constexpr std::size_t kDlogBudget = 200000;         // exp/log table size
inline constexpr std::size_t kAddTableMax = 512;           // full addition table

class Field : public std::enable_shared_from_this<Field> {
  public:
    unsigned p = 0;         // characteristic
    unsigned abs_deg = 1;   // degree over the prime field
    std::size_t size = 0;   // p^abs_deg
    FieldPtr base;          // null for the prime field
    unsigned rel_deg = 1;   // degree over base (1 for the prime field)
    std::vector<FElem> rel_modulus;  // monic, length rel_deg+1, over base

    static FieldPtr prime(unsigned p);
    static FieldPtr extension(FieldPtr base, unsigned n);
    static FieldPtr extension_with_modulus(FieldPtr base, std::vector<FElem> modulus);

    bool is_prime_field() const { return base == nullptr; }

    FElem zero() const { return 0; }
    FElem one() const { return one_; }

    FElem add(FElem a, FElem b) const {
        if (is_prime_field()) {
            std::uint64_t s = (std::uint64_t)a + b;
            return (FElem)(s >= p ? s - p : s);
        }
        if (!add_table_.empty()) return add_table_[(std::size_t)a * size + b];
        return add_structural(a, b);
    }

    FElem neg(FElem a) const {
        if (is_prime_field()) return a == 0 ? 0 : (FElem)(p - a);
        if (!neg_table_.empty()) return neg_table_[a];
        return neg_structural(a);
    }

    FElem sub(FElem a, FElem b) const { return add(a, neg(b)); }

    FElem mul(FElem a, FElem b) const {
        if (a == 0 || b == 0) return 0;
        if (!log_.empty()) {
            std::size_t e = (std::size_t)log_[a] + log_[b];
            if (e >= size - 1) e -= size - 1;
            return exp_[e];
        }
        return mul_structural(a, b);
    }

    FElem inv(FElem a) const {
        if (a == 0) throw std::domain_error("field inverse of zero");
        if (!log_.empty()) {
            std::size_t e = (size - 1 - log_[a]) % (size - 1);
            return exp_[e];
        }
        return pow_u64(a, size - 2);  // size fits u64, Fermat/Lagrange
    }

    FElem div(FElem a, FElem b) const { return mul(a, inv(b)); }

    FElem pow_u64(FElem a, std::uint64_t e) const {
        if (!log_.empty() && a != 0) {
            std::uint64_t r = (std::uint64_t)((unsigned __int128)log_[a] * (e % (size - 1)) % (size - 1));
            return exp_[r];
        }
        if (a == 0) return e == 0 ? one_ : 0;
        FElem r = one_, b = a;
        while (e) {
            if (e & 1) r = mul(r, b);
            b = mul(b, b);
            e >>= 1;
        }
        return r;
    }

    // q-power Frobenius over the base field (p-power for the prime field's
    // extensions), iterated j times.
    FElem frob(FElem a, unsigned j = 1) const {
        std::size_t q = base ? base->size : p;
        FElem r = a;
        for (unsigned i = 0; i < j; ++i) r = pow_u64(r, q);
        return r;
    }

    // #{w : w^2 = a}
    int sqrt_count(FElem a) const {
        if (p == 2) return 1;
        if (a == 0) return 1;
        if (!log_.empty()) return (log_[a] & 1) ? 0 : 2;
        return pow_u64(a, (size - 1) / 2) == one_ ? 2 : 0;
    }

    FElem from_int(long v) const {
        long r = v % (long)p;
        if (r < 0) r += p;
        return embed_prime((FElem)r);
    }

    // prime subfield element (index < p) into this field
    FElem embed_prime(FElem a) const {
        if (is_prime_field()) return a;
        return embed_base(base->embed_prime(a));
    }

    // base-field element into this field: index identity by construction
    FElem embed_base(FElem a) const {
        if (is_prime_field()) throw std::logic_error("prime field has no base");
        return a;
    }

    std::vector<FElem> digits(FElem a) const {
        std::size_t bs = base ? base->size : p;
        std::vector<FElem> d(rel_deg);
        std::uint64_t v = a;
        for (unsigned i = 0; i < rel_deg; ++i) {
            d[i] = (FElem)(v % bs);
            v /= bs;
        }
        return d;
    }

    FElem from_digits(const std::vector<FElem>& d) const {
        std::size_t bs = base ? base->size : p;
        std::uint64_t v = 0;
        for (std::size_t i = d.size(); i-- > 0;) v = v * bs + d[i];
        return (FElem)v;
    }

    bool dlog_available() const { return !log_.empty(); }

    std::uint32_t dlog(FElem a) const {
        if (log_.empty()) throw BudgetError("dlog table unavailable for field of size " + std::to_string(size));
        if (a == 0) throw std::domain_error("dlog of zero");
        return log_[a];
    }

    FElem generator() const {
        if (log_.empty()) throw BudgetError("no generator cached for field of size " + std::to_string(size));
        return generator_;
    }

    // generator of the requested rank: rank 0 is the first element of full
    // order in enumeration order, rank 1 the second, ...
    FElem find_generator(unsigned rank = 0) const;

    std::string describe() const {
        if (is_prime_field()) return "F_" + std::to_string(p);
        return "F_" + std::to_string(p) + "^" + std::to_string(abs_deg);
    }

  private:
    friend FieldPtr build_field_over(FieldPtr base, unsigned n, const std::vector<FElem>* forced);

    FElem one_ = 1;
    FElem generator_ = 0;
    std::vector<FElem> exp_, neg_table_, add_table_;
    std::vector<std::uint32_t> log_;
    // x^(rel_deg+j) mod rel_modulus, j = 0..rel_deg-2, as base-coeff rows
    std::vector<std::vector<FElem>> xpow_red_;

    FElem add_structural(FElem a, FElem b) const {
        std::size_t bs = base->size;
        std::uint64_t va = a, vb = b, out = 0, mul_acc = 1;
        for (unsigned i = 0; i < rel_deg; ++i) {
            FElem s = base->add((FElem)(va % bs), (FElem)(vb % bs));
            out += mul_acc * s;
            mul_acc *= bs;
            va /= bs;
            vb /= bs;
        }
        return (FElem)out;
    }

    FElem neg_structural(FElem a) const {
        std::size_t bs = base->size;
        std::uint64_t va = a, out = 0, mul_acc = 1;
        for (unsigned i = 0; i < rel_deg; ++i) {
            out += mul_acc * base->neg((FElem)(va % bs));
            mul_acc *= bs;
            va /= bs;
        }
        return (FElem)out;
    }

    FElem mul_structural(FElem a, FElem b) const {
        if (is_prime_field()) return (FElem)((std::uint64_t)a * b % p);
        const unsigned n = rel_deg;
        std::vector<FElem> da = digits(a), db = digits(b), prod(2 * n - 1, 0);
        for (unsigned i = 0; i < n; ++i) {
            if (da[i] == 0) continue;
            for (unsigned j = 0; j < n; ++j)
                if (db[j] != 0) prod[i + j] = base->add(prod[i + j], base->mul(da[i], db[j]));
        }
        for (unsigned k = 2 * n - 2; k >= n && k < 2 * n; --k) {
            FElem c = prod[k];
            if (c == 0) continue;
            prod[k] = 0;
            const std::vector<FElem>& red = xpow_red_[k - n];
            for (unsigned j = 0; j < n; ++j)
                if (red[j] != 0) prod[j] = base->add(prod[j], base->mul(c, red[j]));
        }
        prod.resize(n);
        return from_digits(prod);
    }

    void finalize_tables();
};

// ---- polynomial helpers over an arbitrary base field -----------------------

namespace fpoly {

using P = std::vector<FElem>;  // ascending coefficients

inline void norm(P& f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
}

inline P mul(const Field& k, const P& a, const P& b) {
    if (a.empty() || b.empty()) return {};
    P r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j)
            if (b[j] != 0) r[i + j] = k.add(r[i + j], k.mul(a[i], b[j]));
    }
    norm(r);
    return r;
}

inline P mod(const Field& k, P a, const P& f) {
    norm(a);
    const std::size_t df = f.size() - 1;
    FElem lead_inv = k.inv(f.back());
    while (a.size() > df) {
        FElem c = k.mul(a.back(), lead_inv);
        std::size_t shift = a.size() - 1 - df;
        for (std::size_t j = 0; j <= df; ++j)
            a[shift + j] = k.sub(a[shift + j], k.mul(c, f[j]));
        norm(a);  // top term cancels exactly, so this always shrinks
    }
    return a;
}

inline P mulmod(const Field& k, const P& a, const P& b, const P& f) { return mod(k, mul(k, a, b), f); }

inline P gcd(const Field& k, P a, P b) {
    norm(a);
    norm(b);
    while (!b.empty()) {
        P r = mod(k, a, b);
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty()) {
        FElem li = k.inv(a.back());
        for (FElem& c : a) c = k.mul(c, li);
    }
    return a;
}

// x^(q^j) mod f by repeated q-power, q given as a u64 chain base
inline P pow_qj(const Field& k, std::uint64_t q, unsigned j, const P& f) {
    P x{0, k.one()};
    P r = mod(k, x, f);
    for (unsigned step = 0; step < j; ++step) {
        // r = r^q mod f by square-and-multiply on the exponent q
        P acc{k.one()};
        P b = r;
        std::uint64_t e = q;
        while (e) {
            if (e & 1) acc = mulmod(k, acc, b, f);
            b = mulmod(k, b, b, f);
            e >>= 1;
        }
        r = acc;
    }
    return r;
}

inline bool irreducible(const Field& k, const P& f) {
    const std::size_t n = f.size() - 1;
    if (n == 0) return false;
    if (n == 1) return true;
    std::uint64_t q = k.size;
    // x^(q^n) == x mod f
    P xqn = pow_qj(k, q, (unsigned)n, f);
    P x{0, k.one()};
    P xm = mod(k, x, f);
    if (xqn != xm) return false;
    for (std::size_t r = 2; r <= n; ++r) {
        if (n % r != 0) continue;
        bool is_prime = true;
        for (std::size_t d = 2; d * d <= r; ++d)
            if (r % d == 0) is_prime = false;
        if (!is_prime) continue;
        P xq = pow_qj(k, q, (unsigned)(n / r), f);
        // gcd(x^(q^(n/r)) - x, f) must be 1
        P diff = xq;
        diff.resize(std::max<std::size_t>(diff.size(), 2), 0);
        diff[1] = k.sub(diff[1], k.one());
        norm(diff);
        P g = gcd(k, f, diff);
        if (g.size() > 1) return false;
    }
    return true;
}

}  // namespace fpoly

inline FieldPtr build_field_over(FieldPtr base, unsigned n, const std::vector<FElem>* forced) {
    if (n < 2) throw std::invalid_argument("extension degree must be >= 2");
    std::size_t sz = 1;
    for (unsigned i = 0; i < n; ++i) {
        sz *= base->size;
        if (sz > kFieldBudget)
            throw BudgetError("field size exceeds budget of " + std::to_string(kFieldBudget));
    }

    auto f = std::make_shared<Field>();
    f->p = base->p;
    f->abs_deg = base->abs_deg * n;
    f->base = base;
    f->rel_deg = n;
    f->size = sz;

    if (forced) {
        if (forced->size() != n + 1 || (*forced)[n] != base->one())
            throw std::invalid_argument("modulus must be monic of the stated degree");
        if (!fpoly::irreducible(*base, *forced)) throw std::invalid_argument("modulus is reducible");
        f->rel_modulus = *forced;
    } else {
        // first irreducible in enumeration order of the non-leading
        // coefficient vector
        std::vector<FElem> mod(n + 1, 0);
        mod[n] = base->one();
        bool found = false;
        for (std::uint64_t code = 0; code < sz; ++code) {
            std::uint64_t v = code;
            for (unsigned i = 0; i < n; ++i) {
                mod[i] = (FElem)(v % base->size);
                v /= base->size;
            }
            if (fpoly::irreducible(*base, mod)) {
                found = true;
                break;
            }
        }
        if (!found) throw std::logic_error("no irreducible modulus found");
        f->rel_modulus = mod;
    }
    f->finalize_tables();
    return f;
}

inline FieldPtr Field::prime(unsigned p) {
    if (p < 2) throw std::invalid_argument("characteristic must be >= 2");
    for (unsigned d = 2; d * d <= p; ++d)
        if (p % d == 0) throw std::invalid_argument("characteristic must be prime");
    auto f = std::make_shared<Field>();
    f->p = p;
    f->abs_deg = 1;
    f->size = p;
    f->rel_deg = 1;
    f->finalize_tables();
    return f;
}

inline FieldPtr Field::extension(FieldPtr base, unsigned n) {
    return build_field_over(std::move(base), n, nullptr);
}

inline FieldPtr Field::extension_with_modulus(FieldPtr base, std::vector<FElem> modulus) {
    return build_field_over(std::move(base), (unsigned)modulus.size() - 1, &modulus);
}

inline FElem Field::find_generator(unsigned rank) const {
    // prime factors of size-1
    std::vector<std::uint64_t> fac;
    std::uint64_t m = size - 1;
    for (std::uint64_t d = 2; d * d <= m; ++d)
        if (m % d == 0) {
            fac.push_back(d);
            while (m % d == 0) m /= d;
        }
    if (m > 1) fac.push_back(m);
    for (FElem g = 1; g < size; ++g) {
        bool full = true;
        for (std::uint64_t r : fac) {
            // structural pow to stay usable during table construction
            FElem acc = one_, b = g;
            std::uint64_t e = (size - 1) / r;
            while (e) {
                if (e & 1) acc = mul_structural(acc, b);
                b = mul_structural(b, b);
                e >>= 1;
            }
            if (acc == one_) {
                full = false;
                break;
            }
        }
        if (full) {
            if (rank == 0) return g;
            --rank;
        }
    }
    throw std::logic_error("no generator found");
}

inline void Field::finalize_tables() {
    if (!is_prime_field()) {
        // reductions of x^(rel_deg+j)
        xpow_red_.assign(rel_deg >= 2 ? rel_deg - 1 : 0, {});
        fpoly::P x_n(rel_modulus.begin(), rel_modulus.end() - 1);  // x^n = -(low part)
        for (FElem& c : x_n) c = base->neg(c);
        fpoly::P cur = x_n;  // coefficients of x^(n) reduced
        for (unsigned j = 0; j + 1 < rel_deg; ++j) {
            cur.resize(rel_deg, 0);
            xpow_red_[j] = cur;
            // multiply by x and reduce
            fpoly::P nxt(rel_deg, 0);
            FElem top = cur[rel_deg - 1];
            for (unsigned i = rel_deg - 1; i >= 1; --i) nxt[i] = cur[i - 1];
            nxt[0] = 0;
            if (top != 0)
                for (unsigned i = 0; i < rel_deg; ++i)
                    nxt[i] = base->add(nxt[i], base->mul(top, x_n.size() > i ? x_n[i] : 0));
            cur = nxt;
        }
        one_ = 1;  // digit vector (1,0,..): index 1 because base one has index 1
    }
    if (size <= kDlogBudget) {
        generator_ = find_generator(0);
        exp_.assign(size - 1, 0);
        log_.assign(size, 0);
        FElem cur = one_;
        for (std::size_t i = 0; i < size - 1; ++i) {
            exp_[i] = cur;
            log_[cur] = (std::uint32_t)i;
            cur = mul_structural(cur, generator_);
        }
        if (cur != one_) throw std::logic_error("generator order mismatch");
    }
    if (!is_prime_field()) {
        neg_table_.assign(size, 0);
        for (std::size_t a = 0; a < size; ++a) neg_table_[a] = neg_structural((FElem)a);
        if (size <= kAddTableMax) {
            add_table_.assign(size * size, 0);
            for (std::size_t a = 0; a < size; ++a)
                for (std::size_t b = 0; b < size; ++b)
                    add_table_[a * size + b] = add_structural((FElem)a, (FElem)b);
        }
    }
}

// Convenience constructors matching how fields are requested downstream.
inline FieldPtr make_field(unsigned p, unsigned e) {
    FieldPtr prime = Field::prime(p);
    if (e == 1) return prime;
    return Field::extension(prime, e);
}

inline FieldPtr extend_field(FieldPtr base, unsigned n) {
    if (n == 1) return base;
    return Field::extension(std::move(base), n);
}

struct DlogTable {
    FElem generator;
    std::vector<std::uint32_t> log;  // log[g^k] = k, defined on nonzero elements
};

inline DlogTable build_dlog(const FieldPtr& f, unsigned generator_rank = 0) {
    if (f->size > kDlogBudget)
        throw BudgetError("dlog budget exceeded for field of size " + std::to_string(f->size));
    DlogTable t;
    t.generator = f->find_generator(generator_rank);
    t.log.assign(f->size, 0);
    FElem cur = f->one();
    for (std::size_t i = 0; i < f->size - 1; ++i) {
        t.log[cur] = (std::uint32_t)i;
        cur = f->mul(cur, t.generator);
    }
    if (cur != f->one()) throw std::logic_error("generator order mismatch");
    return t;
}

// ---- JSON ------------------------------------------------------------------

inline nlohmann::json field_to_json(const FieldPtr& f) {
    nlohmann::json j;
    j["p"] = f->p;
    j["e"] = f->abs_deg;
    if (f->is_prime_field()) {
        j["modulus"] = nullptr;
        j["tower"] = nullptr;
        return j;
    }
    j["modulus"] = f->rel_modulus;  // element indices over the base
    if (f->base->is_prime_field())
        j["tower"] = nullptr;
    else
        j["tower"] = field_to_json(f->base);
    return j;
}

inline FieldPtr field_from_json(const nlohmann::json& j) {
    unsigned p = j.at("p").get<unsigned>();
    unsigned e = j.at("e").get<unsigned>();
    FieldPtr base;
    if (j.contains("tower") && !j.at("tower").is_null())
        base = field_from_json(j.at("tower"));
    else
        base = Field::prime(p);
    if (e == base->abs_deg) return base;
    if (e % base->abs_deg != 0) throw std::invalid_argument("field json: degree mismatch");
    unsigned n = e / base->abs_deg;
    if (j.contains("modulus") && !j.at("modulus").is_null()) {
        std::vector<FElem> mod = j.at("modulus").get<std::vector<FElem>>();
        if (mod.size() != n + 1) throw std::invalid_argument("field json: modulus degree mismatch");
        return Field::extension_with_modulus(base, std::move(mod));
    }
    return Field::extension(base, n);
}

}  // namespace ff
}  // namespace motivic
