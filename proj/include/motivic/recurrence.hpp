#pragma once

// Exact minimal linear recurrences (Berlekamp-Massey over Q) and numeric
// exponential-sum decomposition of a sequence through the recurrence's
// characteristic roots. Weights are integer multiplicities by design; the
// reconstruction error is always reported, never hidden.

#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "motivic/poly.hpp"
#include "motivic/rational.hpp"

namespace motivic {

struct Recurrence {
    // a_{n} = sum_{i=1..order} coeffs[i-1] * a_{n-i}
    std::vector<Rat> coeffs;

    std::size_t order() const { return coeffs.size(); }
};

inline Rat recurrence_predict(const Recurrence& r, const std::vector<Rat>& seq) {
    if (seq.size() < r.order()) throw std::invalid_argument("recurrence_predict: sequence too short");
    Rat s(0);
    for (std::size_t i = 0; i < r.order(); ++i) s += r.coeffs[i] * seq[seq.size() - 1 - i];
    return s;
}

// Minimal-order recurrence fitting the whole sequence. The minimality
// certificate needs 2L <= len; when the minimal LFSR found is longer than
// floor(len/2) the result is a definite "none up to floor(len/2)".
inline std::optional<Recurrence> berlekamp_massey(const std::vector<Rat>& seq) {
    const std::size_t n = seq.size();
    std::vector<Rat> C{Rat(1)}, B{Rat(1)};
    std::size_t L = 0, m = 1;
    Rat b(1);
    for (std::size_t i = 0; i < n; ++i) {
        Rat d(0);
        for (std::size_t j = 0; j < C.size() && j <= i; ++j) d += C[j] * seq[i - j];
        if (d == 0) {
            ++m;
        } else if (2 * L <= i) {
            std::vector<Rat> T = C;
            Rat f = d / b;
            if (C.size() < B.size() + m) C.resize(B.size() + m, Rat(0));
            for (std::size_t j = 0; j < B.size(); ++j) C[j + m] -= f * B[j];
            L = i + 1 - L;
            B = T;
            b = d;
            m = 1;
        } else {
            Rat f = d / b;
            if (C.size() < B.size() + m) C.resize(B.size() + m, Rat(0));
            for (std::size_t j = 0; j < B.size(); ++j) C[j + m] -= f * B[j];
            ++m;
        }
    }
    if (2 * L > n) return std::nullopt;
    Recurrence r;
    r.coeffs.resize(L);
    for (std::size_t i = 1; i <= L; ++i) r.coeffs[i - 1] = -C[i];
    return r;
}

// x^L - c_1 x^{L-1} - ... - c_L
inline RPoly recurrence_charpoly(const Recurrence& r) {
    RPoly p(r.order() + 1, Rat(0));
    p[r.order()] = 1;
    for (std::size_t i = 1; i <= r.order(); ++i) p[r.order() - i] = -r.coeffs[i - 1];
    return p;
}

struct ExpSumTerm {
    std::complex<double> lambda;
    long multiplicity;  // signed integer weight
};

struct ExpSum {
    std::vector<ExpSumTerm> terms;
    double reconstruction_error = 0.0;  // worst deviation over the given prefix
    double rounding_error = 0.0;        // worst distance of a raw weight from its integer
    bool ok = true;
};

// Decompose a_n = sum_i m_i lambda_i^n (n starting at 1) through the roots of
// the recurrence's characteristic polynomial. Zero roots (transients) are
// dropped; weights are solved from a Vandermonde system and rounded to
// integers, with the rounding distance reported.
inline ExpSum exp_sum_decompose(const std::vector<Rat>& seq, const Recurrence& rec,
                                double tol = 1e-9) {
    ExpSum out;
    if (rec.order() == 0) {
        for (const Rat& v : seq)
            out.reconstruction_error = std::max(out.reconstruction_error, std::abs(to_double(v)));
        out.ok = out.reconstruction_error <= tol;
        return out;
    }
    IPoly cp = rpoly_clear_denominators(recurrence_charpoly(rec));
    RootReport rr = numeric_roots(cp, 1e-11);
    std::vector<std::complex<double>> lambdas;
    for (auto& z : rr.roots)
        if (std::abs(z) > 1e-9) lambdas.push_back(z);
    const std::size_t k = lambdas.size();
    if (k == 0 || seq.size() < k) {
        out.ok = false;
        return out;
    }
    // Vandermonde solve: rows n = 1..k, columns lambda_i^n.
    using CD = std::complex<double>;
    std::vector<std::vector<CD>> m(k, std::vector<CD>(k + 1));
    std::vector<CD> pw(k, CD(1, 0));
    for (std::size_t r = 0; r < k && r < seq.size(); ++r) {
        for (std::size_t i = 0; i < k; ++i) {
            pw[i] *= lambdas[i];
            m[r][i] = pw[i];
        }
        m[r][k] = CD(to_double(seq[r]), 0);
    }
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < k; ++r)
            if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
        std::swap(m[c], m[piv]);
        if (std::abs(m[c][c]) < 1e-300) {
            out.ok = false;
            return out;
        }
        for (std::size_t r = 0; r < k; ++r) {
            if (r == c) continue;
            CD f = m[r][c] / m[c][c];
            for (std::size_t j = c; j <= k; ++j) m[r][j] -= f * m[c][j];
        }
    }
    out.terms.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        CD w = m[i][k] / m[i][i];
        long mi = std::lround(w.real());
        double err = std::abs(w - CD((double)mi, 0));
        out.rounding_error = std::max(out.rounding_error, err);
        out.terms[i] = {lambdas[i], mi};
    }
    // reconstruction over the full prefix
    std::vector<CD> cur(k, CD(1, 0));
    for (std::size_t n = 0; n < seq.size(); ++n) {
        CD s(0, 0);
        for (std::size_t i = 0; i < k; ++i) {
            cur[i] *= out.terms[i].lambda;
            s += cur[i] * CD((double)out.terms[i].multiplicity, 0);
        }
        double dev = std::abs(s - CD(to_double(seq[n]), 0));
        out.reconstruction_error = std::max(out.reconstruction_error, dev);
    }
    double scale = 1.0;
    for (const Rat& v : seq) scale = std::max(scale, std::abs(to_double(v)));
    out.ok = out.rounding_error <= 1e-6 && out.reconstruction_error <= tol * scale;
    return out;
}

}  // namespace motivic
