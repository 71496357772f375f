#pragma once

// Dense matrices over exact scalars, plus the exact kernels used everywhere:
// fraction-free determinant, exact rational inverse, and a CRT-modular
// adjugate engine for sizes where schoolbook rational elimination is too slow.
// The modular path is an internal optimization only; results are identical to
// the rational path and both are cross-tested.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "motivic/rational.hpp"

namespace motivic {

template <typename T>
class Matrix {
  public:
    Matrix() : rows_(0), cols_(0) {}
    Matrix(std::size_t r, std::size_t c) : rows_(r), cols_(c), a_(r * c, T(0)) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    T& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    const std::vector<T>& data() const { return a_; }
    std::vector<T>& data() { return a_; }

    bool operator==(const Matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
    }

    Matrix operator+(const Matrix& o) const {
        check_same_shape(o);
        Matrix r(rows_, cols_);
        for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] + o.a_[i];
        return r;
    }

    Matrix operator-(const Matrix& o) const {
        check_same_shape(o);
        Matrix r(rows_, cols_);
        for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] - o.a_[i];
        return r;
    }

    Matrix operator*(const Matrix& o) const {
        if (cols_ != o.rows_) throw std::invalid_argument("matrix product shape mismatch");
        Matrix r(rows_, o.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                const T& aik = (*this)(i, k);
                if (aik == T(0)) continue;
                for (std::size_t j = 0; j < o.cols_; ++j) r(i, j) += aik * o(k, j);
            }
        return r;
    }

    Matrix scaled(const T& s) const {
        Matrix r(rows_, cols_);
        for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] * s;
        return r;
    }

    Matrix transpose() const {
        Matrix r(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
        return r;
    }

    T trace() const {
        require_square();
        T s(0);
        for (std::size_t i = 0; i < rows_; ++i) s += (*this)(i, i);
        return s;
    }

    bool is_zero() const {
        for (const T& v : a_)
            if (!(v == T(0))) return false;
        return true;
    }

    Matrix pow(unsigned long e) const {
        require_square();
        Matrix r = identity(rows_), b = *this;
        while (e) {
            if (e & 1) r = r * b;
            b = b * b;
            e >>= 1;
        }
        return r;
    }

    template <typename U>
    Matrix<U> cast() const {
        Matrix<U> r(rows_, cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) r(i, j) = U((*this)(i, j));
        return r;
    }

    void require_square() const {
        if (rows_ != cols_) throw std::invalid_argument("square matrix required");
    }

  private:
    void check_same_shape(const Matrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("matrix shape mismatch");
    }

    std::size_t rows_, cols_;
    std::vector<T> a_;
};

using IntMatrix = Matrix<Int>;
using RatMatrix = Matrix<Rat>;
using I64Matrix = Matrix<long>;  // 64-bit on this platform

inline IntMatrix to_int_matrix(const I64Matrix& m) { return m.cast<Int>(); }

inline RatMatrix to_rat_matrix(const IntMatrix& m) {
    RatMatrix r(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = Rat(m(i, j));
    return r;
}

inline Rat trace_product(const RatMatrix& a, const RatMatrix& b) {
    if (a.cols() != b.rows() || a.rows() != b.cols())
        throw std::invalid_argument("trace_product shape mismatch");
    Rat s(0);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * b(j, i);
    return s;
}

// Fraction-free elimination; exact determinant of an integer matrix.
inline Int bareiss_det(IntMatrix m) {
    m.require_square();
    const std::size_t n = m.rows();
    if (n == 0) return Int(1);
    Int prev(1);
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m(k, k) == 0) {
            std::size_t piv = k + 1;
            while (piv < n && m(piv, k) == 0) ++piv;
            if (piv == n) return Int(0);
            for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                Int t = m(i, j) * m(k, k) - m(i, k) * m(k, j);
                mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
                m(i, j) = t;
            }
            m(i, k) = 0;
        }
        prev = m(k, k);
    }
    return sign > 0 ? m(n - 1, n - 1) : Int(-m(n - 1, n - 1));
}

// ---- modular kernel ------------------------------------------------------

namespace detail {

inline std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    return (std::uint64_t)((unsigned __int128)a * b % p);
}

inline std::uint64_t powmod_u64(std::uint64_t a, std::uint64_t e, std::uint64_t p) {
    std::uint64_t r = 1 % p;
    while (e) {
        if (e & 1) r = mulmod_u64(r, a, p);
        a = mulmod_u64(a, a, p);
        e >>= 1;
    }
    return r;
}

inline std::uint64_t invmod_u64(std::uint64_t a, std::uint64_t p) { return powmod_u64(a, p - 2, p); }

// Shared pool of 62-bit primes, grown on demand.
inline const std::vector<std::uint64_t>& prime_pool(std::size_t count) {
    static std::vector<std::uint64_t> pool;
    static Int cursor = Int(1) << 62;
    while (pool.size() < count) {
        Int nxt;
        mpz_nextprime(nxt.get_mpz_t(), cursor.get_mpz_t());
        cursor = nxt;
        pool.push_back(nxt.get_ui());
    }
    return pool;
}

inline std::uint64_t mod_of(const Int& v, std::uint64_t p) {
    Int r = v % Int((unsigned long)p);
    if (r < 0) r += Int((unsigned long)p);
    return r.get_ui();
}

// det and inverse of a over Z/p by Gauss-Jordan; false when singular mod p.
inline bool gauss_jordan_mod(std::vector<std::uint64_t>& a, std::size_t n, std::uint64_t p,
                             std::uint64_t& det, std::vector<std::uint64_t>& inv) {
    inv.assign(n * n, 0);
    for (std::size_t i = 0; i < n; ++i) inv[i * n + i] = 1;
    det = 1;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        while (piv < n && a[piv * n + k] == 0) ++piv;
        if (piv == n) return false;
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(a[k * n + j], a[piv * n + j]);
                std::swap(inv[k * n + j], inv[piv * n + j]);
            }
            det = p - det;
            if (det == p) det = 0;
        }
        const std::uint64_t pv = a[k * n + k];
        det = mulmod_u64(det, pv, p);
        const std::uint64_t pinv = invmod_u64(pv, p);
        for (std::size_t j = 0; j < n; ++j) {
            a[k * n + j] = mulmod_u64(a[k * n + j], pinv, p);
            inv[k * n + j] = mulmod_u64(inv[k * n + j], pinv, p);
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k) continue;
            const std::uint64_t f = a[i * n + k];
            if (f == 0) continue;
            const std::uint64_t fneg = p - f;
            for (std::size_t j = 0; j < n; ++j) {
                a[i * n + j] = (a[i * n + j] + mulmod_u64(fneg, a[k * n + j], p)) % p;
                inv[i * n + j] = (inv[i * n + j] + mulmod_u64(fneg, inv[k * n + j], p)) % p;
            }
        }
    }
    return true;
}

// Hadamard bound on |det|, from actual row norms.
inline Int hadamard_bound(const IntMatrix& m) {
    const std::size_t n = m.rows();
    Int bound(1);
    for (std::size_t i = 0; i < n; ++i) {
        Int s(0);
        for (std::size_t j = 0; j < n; ++j) s += m(i, j) * m(i, j);
        // integer ceil(sqrt)
        Int r = sqrt(s);
        if (r * r < s) r += 1;
        if (r == 0) return Int(0);
        bound *= r;
    }
    return bound;
}

inline Int crt_pair(const Int& r1, const Int& m1, std::uint64_t r2, std::uint64_t p) {
    // x = r1 + m1 * ((r2 - r1) * m1^{-1} mod p)
    std::uint64_t r1p = mod_of(r1, p);
    std::uint64_t diff = (r2 + p - r1p) % p;
    std::uint64_t m1inv = invmod_u64(mod_of(m1, p), p);
    std::uint64_t k = mulmod_u64(diff, m1inv, p);
    return r1 + m1 * Int((unsigned long)k);
}

inline Int symmetric_lift(const Int& x, const Int& modulus) {
    Int h = modulus / 2;
    if (x > h) return x - modulus;
    return x;
}

}  // namespace detail

// det(A) plus Trace(B_i * adj(A)) for each B_i, all exact, via CRT over
// word-size primes with a Hadamard-type bound. Traces of products against the
// inverse follow as traces[i]/det without materializing the inverse.
struct AdjTraceResult {
    Int det;
    Int trace_adj;
    std::vector<Int> traces;  // Trace(B_i * adj(A))
};

inline std::optional<AdjTraceResult> crt_adjugate_traces(const IntMatrix& a,
                                                         const std::vector<const IntMatrix*>& bs) {
    a.require_square();
    const std::size_t n = a.rows();
    Int had = detail::hadamard_bound(a);
    if (had == 0) return std::nullopt;
    // Needed bits: det <= had; Trace(B adj) <= n^2 * max|B| * max-minor <= n^2 maxB had.
    Int maxb(1);
    for (const IntMatrix* b : bs)
        for (const Int& v : b->data()) {
            Int av = abs(v);
            if (av > maxb) maxb = av;
        }
    Int need = 2 * had * maxb * Int((unsigned long)(n * n + 1));
    std::vector<std::uint64_t> amod(n * n), inv;
    Int modulus(1), det_acc(0), tradj_acc(0);
    std::vector<Int> tr_acc(bs.size(), Int(0));
    Int skipped(1);
    std::size_t pi = 0;
    while (modulus <= need) {
        std::uint64_t p = detail::prime_pool(pi + 1)[pi];
        ++pi;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) amod[i * n + j] = detail::mod_of(a(i, j), p);
        std::uint64_t detp;
        if (!detail::gauss_jordan_mod(amod, n, p, detp, inv)) {
            skipped *= Int((unsigned long)p);
            if (skipped > 2 * had) return std::nullopt;  // that many prime divisors force det = 0
            continue;
        }
        // adj = det * inv mod p
        std::uint64_t tradj = 0;
        for (std::size_t i = 0; i < n; ++i) tradj = (tradj + inv[i * n + i]) % p;
        tradj = detail::mulmod_u64(tradj, detp, p);
        std::vector<std::uint64_t> trbs(bs.size(), 0);
        for (std::size_t bi = 0; bi < bs.size(); ++bi) {
            const IntMatrix& b = *bs[bi];
            std::uint64_t s = 0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    std::uint64_t bv = detail::mod_of(b(i, j), p);
                    if (bv) s = (s + detail::mulmod_u64(bv, inv[j * n + i], p)) % p;
                }
            trbs[bi] = detail::mulmod_u64(s, detp, p);
        }
        if (modulus == 1) {
            det_acc = Int((unsigned long)detp);
            tradj_acc = Int((unsigned long)tradj);
            for (std::size_t bi = 0; bi < bs.size(); ++bi) tr_acc[bi] = Int((unsigned long)trbs[bi]);
        } else {
            det_acc = detail::crt_pair(det_acc, modulus, detp, p);
            tradj_acc = detail::crt_pair(tradj_acc, modulus, tradj, p);
            for (std::size_t bi = 0; bi < bs.size(); ++bi)
                tr_acc[bi] = detail::crt_pair(tr_acc[bi], modulus, trbs[bi], p);
        }
        modulus *= Int((unsigned long)p);
    }
    AdjTraceResult r;
    r.det = detail::symmetric_lift(det_acc % modulus, modulus);
    if (r.det == 0) return std::nullopt;
    r.trace_adj = detail::symmetric_lift(tradj_acc % modulus, modulus);
    r.traces.reserve(bs.size());
    for (Int& t : tr_acc) r.traces.push_back(detail::symmetric_lift(t % modulus, modulus));
    return r;
}

// Full adjugate and determinant via the same modular kernel.
inline std::optional<std::pair<IntMatrix, Int>> crt_adjugate(const IntMatrix& a) {
    a.require_square();
    const std::size_t n = a.rows();
    Int had = detail::hadamard_bound(a);
    if (had == 0) return std::nullopt;
    Int need = 2 * had;  // adjugate entries are (n-1)-minors, bounded by the same product
    std::vector<std::uint64_t> amod(n * n), inv;
    Int modulus(1), det_acc(0);
    std::vector<Int> adj_acc(n * n, Int(0));
    Int skipped(1);
    std::size_t pi = 0;
    while (modulus <= need) {
        std::uint64_t p = detail::prime_pool(pi + 1)[pi];
        ++pi;
        for (std::size_t i = 0; i < n * n; ++i) amod[i] = detail::mod_of(a.data()[i], p);
        std::uint64_t detp;
        if (!detail::gauss_jordan_mod(amod, n, p, detp, inv)) {
            skipped *= Int((unsigned long)p);
            if (skipped > 2 * had) return std::nullopt;
            continue;
        }
        if (modulus == 1) {
            det_acc = Int((unsigned long)detp);
            for (std::size_t i = 0; i < n * n; ++i)
                adj_acc[i] = Int((unsigned long)detail::mulmod_u64(inv[i], detp, p));
        } else {
            det_acc = detail::crt_pair(det_acc, modulus, detp, p);
            for (std::size_t i = 0; i < n * n; ++i)
                adj_acc[i] = detail::crt_pair(adj_acc[i], modulus, detail::mulmod_u64(inv[i], detp, p), p);
        }
        modulus *= Int((unsigned long)p);
    }
    Int det = detail::symmetric_lift(det_acc % modulus, modulus);
    if (det == 0) return std::nullopt;
    IntMatrix adj(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            adj(i, j) = detail::symmetric_lift(adj_acc[i * n + j] % modulus, modulus);
    return std::make_pair(std::move(adj), std::move(det));
}

// Exact rational inverse. Small sizes run schoolbook Gauss-Jordan on mpq;
// larger ones scale to integers and use the modular adjugate. nullopt on a
// singular input.
inline std::optional<RatMatrix> rat_inverse(const RatMatrix& m) {
    m.require_square();
    const std::size_t n = m.rows();
    if (n == 0) return RatMatrix(0, 0);
    if (n <= 32) {
        RatMatrix a = m, inv = RatMatrix::identity(n);
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t piv = k;
            while (piv < n && a(piv, k) == 0) ++piv;
            if (piv == n) return std::nullopt;
            if (piv != k)
                for (std::size_t j = 0; j < n; ++j) {
                    std::swap(a(k, j), a(piv, j));
                    std::swap(inv(k, j), inv(piv, j));
                }
            Rat pv = a(k, k);
            for (std::size_t j = 0; j < n; ++j) {
                a(k, j) /= pv;
                inv(k, j) /= pv;
            }
            for (std::size_t i = 0; i < n; ++i) {
                if (i == k || a(i, k) == 0) continue;
                Rat f = a(i, k);
                for (std::size_t j = 0; j < n; ++j) {
                    a(i, j) -= f * a(k, j);
                    inv(i, j) -= f * inv(k, j);
                }
            }
        }
        return inv;
    }
    // common-denominator scaling, then adj/det
    Int D(1);
    for (const Rat& v : m.data()) {
        Int den = v.get_den();
        Int g = gcd(D, den);
        D *= den / g;
    }
    IntMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            Rat s = m(i, j) * Rat(D);
            a(i, j) = s.get_num();  // denominator is 1 by construction
        }
    auto adjdet = crt_adjugate(a);
    if (!adjdet) return std::nullopt;
    RatMatrix inv(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            Rat v(adjdet->first(i, j) * D, adjdet->second);
            v.canonicalize();
            inv(i, j) = v;
        }
    return inv;
}

}  // namespace motivic
