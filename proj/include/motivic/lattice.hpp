#pragma once

// Translation-invariant lattice models: Boltzmann data in d dimensions,
// partition functions on colored graphs (finite sets with d permutations),
// transfer matrices, sheared sublattice evaluation, dimensional reduction,
// and parity-twisted transfer traces.
//
// Conventions fixed throughout:
//   - multi-indices flatten with the LAST component fastest;
//   - R is stored as a matrix with row = output multi-index, column = input;
//   - the color-c output of vertex v feeds the color-c input of tau_c(v);
//   - the cyclic seam in a transfer matrix sends copy v's traced output to
//     copy v+1 (mod n).
// The sheared-trace shift direction and the reduction construction are not
// forced by these conventions alone; both are validated against the direct
// graph contraction, never trusted bare.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "motivic/ff.hpp"
#include "motivic/matrix.hpp"
#include "motivic/rational.hpp"
#include "nlohmann/json.hpp"

namespace motivic::lattice {

inline constexpr unsigned long long kContractionBudget = 50'000'000;  // scalar multiplies
inline constexpr unsigned long long kStateBudget = 4'000'000;         // frontier entries

// ---- Boltzmann data -----------------------------------------------------------

struct SpaceDim {
    unsigned even = 0, odd = 0;  // basis vectors 0..even-1 are even, the rest odd

    unsigned total() const { return even + odd; }
    bool operator==(const SpaceDim&) const = default;
};

inline bool index_parity(const SpaceDim& s, unsigned i) { return i >= s.even; }

template <class T>
struct BoltzmannData {
    unsigned d = 0;
    std::vector<SpaceDim> dims;
    Matrix<T> R;  // (prod dims) x (prod dims), row = output, column = input

    std::size_t total_dim() const {
        std::size_t t = 1;
        for (const auto& s : dims) t *= s.total();
        return t;
    }
    bool is_plain() const {
        for (const auto& s : dims)
            if (s.odd != 0) return false;
        return true;
    }
};

using BoltzmannRat = BoltzmannData<Rat>;

template <class T>
inline void validate_boltzmann(const BoltzmannData<T>& b) {
    if (b.d < 1) throw std::invalid_argument("boltzmann: dimension must be at least 1");
    if (b.dims.size() != b.d) throw std::invalid_argument("boltzmann: one space per dimension");
    for (const auto& s : b.dims)
        if (s.total() == 0) throw std::invalid_argument("boltzmann: zero-dimensional factor space");
    std::size_t t = 1;
    for (const auto& s : b.dims) t *= s.total();
    if (b.R.rows() != t || b.R.cols() != t)
        throw std::invalid_argument("boltzmann: operator shape must match the product of the spaces");
}

template <class T>
inline BoltzmannData<T> make_boltzmann(std::vector<SpaceDim> dims, Matrix<T> R) {
    BoltzmannData<T> b;
    b.d = (unsigned)dims.size();
    b.dims = std::move(dims);
    b.R = std::move(R);
    validate_boltzmann(b);
    return b;
}

namespace detail {

inline std::size_t flatten(const std::vector<unsigned>& tuple, const std::vector<unsigned>& dims) {
    std::size_t ix = 0;
    for (std::size_t i = 0; i < dims.size(); ++i) ix = ix * dims[i] + tuple[i];
    return ix;
}

inline bool odometer(std::vector<unsigned>& tuple, const std::vector<unsigned>& dims) {
    for (std::size_t i = dims.size(); i-- > 0;) {
        if (++tuple[i] < dims[i]) return true;
        tuple[i] = 0;
    }
    return false;
}

inline long floor_div(long a, long b) {
    long q = a / b, r = a % b;
    return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}

}  // namespace detail

// ---- colored graphs -----------------------------------------------------------

struct ColoredGraph {
    std::size_t n_vertices = 0;
    std::vector<std::vector<std::size_t>> taus;  // one permutation per color
};

inline void validate_graph(const ColoredGraph& g) {
    for (const auto& tau : g.taus) {
        if (tau.size() != g.n_vertices)
            throw std::invalid_argument("colored graph: permutation size mismatch");
        std::vector<bool> seen(g.n_vertices, false);
        for (std::size_t v : tau) {
            if (v >= g.n_vertices || seen[v])
                throw std::invalid_argument("colored graph: not a permutation");
            seen[v] = true;
        }
    }
}

inline bool commuting_taus(const ColoredGraph& g) {
    for (std::size_t a = 0; a < g.taus.size(); ++a)
        for (std::size_t b = a + 1; b < g.taus.size(); ++b)
            for (std::size_t v = 0; v < g.n_vertices; ++v)
                if (g.taus[a][g.taus[b][v]] != g.taus[b][g.taus[a][v]]) return false;
    return true;
}

// ---- partition function on a colored graph ------------------------------------

// Contracts one copy of R per vertex by eliminating vertices in index order
// and carrying the open-edge assignments as a frontier map. Exact for exact
// scalar types; deterministic contraction order.
template <class T>
inline T partition_graph(const BoltzmannData<T>& b, const ColoredGraph& g,
                         unsigned long long budget = kStateBudget) {
    validate_boltzmann(b);
    validate_graph(g);
    if (!b.is_plain())
        throw std::invalid_argument(
            "partition_graph: graph contraction with odd parts has no fixed sign rule here");
    if (g.taus.size() != b.d)
        throw std::invalid_argument("partition_graph: one permutation per dimension required");
    const std::size_t N = g.n_vertices;
    if (N == 0) return T(1);

    std::vector<unsigned> dcard(b.d);
    for (unsigned c = 0; c < b.d; ++c) dcard[c] = b.dims[c].total();
    std::vector<unsigned> full_dims(b.d);
    for (unsigned c = 0; c < b.d; ++c) full_dims[c] = dcard[c];

    // inverse permutations: the color-c input of v is the edge (c, inv[c][v])
    std::vector<std::vector<std::size_t>> inv(b.d, std::vector<std::size_t>(N));
    for (unsigned c = 0; c < b.d; ++c)
        for (std::size_t v = 0; v < N; ++v) inv[c][g.taus[c][v]] = v;

    // edge id (c, tail v) = c * N + v; introduced at min(endpoint), consumed at max
    using Key = std::vector<std::pair<unsigned, unsigned>>;  // sorted (edge id, value)
    std::map<Key, T> frontier;
    frontier[{}] = T(1);

    std::vector<unsigned> out_val(b.d), in_val(b.d);
    for (std::size_t v = 0; v < N; ++v) {
        // slots at v: free edges are enumerated here, bound ones read from the key
        struct Slot {
            unsigned edge;
            unsigned color;
            bool is_out, is_in;  // a self-loop serves both roles
            bool free;
        };
        std::vector<Slot> slots;
        auto add_role = [&](unsigned edge, unsigned color, bool as_out) {
            for (auto& s : slots)
                if (s.edge == edge) {
                    (as_out ? s.is_out : s.is_in) = true;
                    return;
                }
            std::size_t tail = edge % N, head = g.taus[color][tail];
            bool intro_here = std::min(tail, head) == v;
            slots.push_back({edge, color, as_out, !as_out, intro_here});
        };
        for (unsigned c = 0; c < b.d; ++c) {
            add_role((unsigned)(c * N + v), c, true);
            add_role((unsigned)(c * N + inv[c][v]), c, false);
        }

        unsigned long long fan = 1;
        for (const auto& s : slots)
            if (s.free) fan *= dcard[s.color];
        if (frontier.size() > budget / std::max<unsigned long long>(fan, 1))
            throw BudgetError("partition_graph: frontier exceeds the contraction budget");

        std::map<Key, T> next;
        std::vector<unsigned> free_ix;
        for (std::size_t i = 0; i < slots.size(); ++i)
            if (slots[i].free) free_ix.push_back((unsigned)i);

        for (const auto& [key, amp] : frontier) {
            std::vector<unsigned> vals(slots.size(), 0);
            for (std::size_t i = 0; i < slots.size(); ++i)
                if (!slots[i].free) {
                    auto it = std::lower_bound(
                        key.begin(), key.end(), std::make_pair(slots[i].edge, 0u),
                        [](const auto& a, const auto& b) { return a.first < b.first; });
                    if (it == key.end() || it->first != slots[i].edge)
                        throw std::logic_error("partition_graph: consumed edge missing");
                    vals[i] = it->second;
                }
            // base key with this vertex's consumed edges removed
            Key base;
            base.reserve(key.size());
            for (const auto& kv : key) {
                bool used = false;
                for (const auto& s : slots)
                    if (s.edge == kv.first) used = true;
                if (!used) base.push_back(kv);
            }
            std::vector<unsigned> fdims(free_ix.size());
            for (std::size_t i = 0; i < free_ix.size(); ++i)
                fdims[i] = dcard[slots[free_ix[i]].color];
            std::vector<unsigned> ftup(free_ix.size(), 0);
            do {
                for (std::size_t i = 0; i < free_ix.size(); ++i) vals[free_ix[i]] = ftup[i];
                for (unsigned c = 0; c < b.d; ++c) out_val[c] = in_val[c] = 0;
                for (std::size_t i = 0; i < slots.size(); ++i) {
                    if (slots[i].is_out) out_val[slots[i].color] = vals[i];
                    if (slots[i].is_in) in_val[slots[i].color] = vals[i];
                }
                const T& w = b.R(detail::flatten(out_val, full_dims),
                                 detail::flatten(in_val, full_dims));
                Key nk = base;
                for (std::size_t i = 0; i < slots.size(); ++i) {
                    const auto& s = slots[i];
                    std::size_t tail = s.edge % N, head = g.taus[s.color][tail];
                    if (s.free && std::max(tail, head) > v)
                        nk.emplace_back(s.edge, vals[i]);
                }
                std::sort(nk.begin(), nk.end());
                next[nk] += amp * w;
                if (next.size() > budget)
                    throw BudgetError("partition_graph: frontier exceeds the contraction budget");
            } while (detail::odometer(ftup, fdims) && !free_ix.empty());
        }
        frontier = std::move(next);
    }
    T z(0);
    for (const auto& [key, amp] : frontier) {
        if (!key.empty()) throw std::logic_error("partition_graph: dangling edges after contraction");
        z += amp;
    }
    return z;
}

// ---- sublattices of Z^d --------------------------------------------------------

struct SublatticeD {
    std::vector<std::vector<long>> cols;  // cols[j][i] = i-th entry of generator j
};

// Column reduction to the upper-triangular normal form: positive diagonal,
// zeros below it, and entries right of the diagonal reduced into [0, diag).
inline SublatticeD lattice_normal_form_d(const SublatticeD& l) {
    const std::size_t d = l.cols.size();
    for (const auto& c : l.cols)
        if (c.size() != d) throw std::invalid_argument("sublattice: basis must be square");
    auto cols = l.cols;
    for (std::size_t r = d; r-- > 0;) {
        // clear row r left of column r
        for (std::size_t j = 0; j < r; ++j)
            while (cols[j][r] != 0) {
                long q = cols[r][r] == 0 ? 0 : detail::floor_div(cols[r][r], cols[j][r]);
                for (std::size_t i = 0; i < d; ++i) cols[r][i] -= q * cols[j][i];
                std::swap(cols[r], cols[j]);
            }
        if (cols[r][r] == 0)
            throw std::invalid_argument("sublattice: generators are linearly dependent");
        if (cols[r][r] < 0)
            for (std::size_t i = 0; i < d; ++i) cols[r][i] = -cols[r][i];
    }
    // reduce the entries right of each diagonal
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t j = r + 1; j < d; ++j) {
            long q = detail::floor_div(cols[j][r], cols[r][r]);
            if (q != 0)
                for (std::size_t i = 0; i < d; ++i) cols[j][i] -= q * cols[r][i];
        }
    return SublatticeD{cols};
}

inline long lattice_index_d(const SublatticeD& l) {
    auto h = lattice_normal_form_d(l);
    long ix = 1;
    for (std::size_t i = 0; i < h.cols.size(); ++i) ix *= h.cols[i][i];
    return ix;
}

// Quotient Z^d / Lambda as a colored graph: vertices are the canonical coset
// representatives out of the normal form, tau_c is translation by e_c.
inline ColoredGraph sublattice_graph(const SublatticeD& l,
                                     unsigned long long budget = kStateBudget) {
    auto h = lattice_normal_form_d(l);
    const std::size_t d = h.cols.size();
    std::vector<unsigned> diag(d);
    unsigned long long n = 1;
    for (std::size_t i = 0; i < d; ++i) {
        diag[i] = (unsigned)h.cols[i][i];
        n *= diag[i];
        if (n > budget) throw BudgetError("sublattice_graph: index exceeds the budget");
    }
    auto reduce = [&](std::vector<long> v) {
        for (std::size_t i = d; i-- > 0;) {
            long t = detail::floor_div(v[i], (long)diag[i]);
            if (t != 0)
                for (std::size_t r = 0; r <= i; ++r) v[r] -= t * h.cols[i][r];
        }
        std::vector<unsigned> out(d);
        for (std::size_t i = 0; i < d; ++i) out[i] = (unsigned)v[i];
        return out;
    };

    ColoredGraph g;
    g.n_vertices = (std::size_t)n;
    g.taus.assign(d, std::vector<std::size_t>(g.n_vertices));
    std::vector<unsigned> tup(d, 0);
    std::size_t v = 0;
    do {
        for (std::size_t c = 0; c < d; ++c) {
            std::vector<long> w(tup.begin(), tup.end());
            w[c] += 1;
            g.taus[c][v] = detail::flatten(reduce(std::move(w)), diag);
        }
        ++v;
    } while (detail::odometer(tup, diag));
    return g;
}

inline SublatticeD rectangular_lattice(const std::vector<long>& periods) {
    SublatticeD l;
    const std::size_t d = periods.size();
    l.cols.assign(d, std::vector<long>(d, 0));
    for (std::size_t i = 0; i < d; ++i) l.cols[i][i] = periods[i];
    return l;
}

inline SublatticeD sheared_lattice(long n, long m, long k) {
    return SublatticeD{{{n, 0}, {k, m}}};
}

// ---- transfer matrices (d = 2) -------------------------------------------------

// Partial trace of R^{(x) n} over the traced axis with the cyclic seam
// inserted; the result acts on the other axis' n-fold power. traced_axis 0
// gives the operator whose m-th power trace is Z on the lattice with
// horizontal period n.
template <class T>
inline Matrix<T> transfer_matrix(const BoltzmannData<T>& b, unsigned n, unsigned traced_axis = 0,
                                 unsigned long long budget = kContractionBudget) {
    validate_boltzmann(b);
    if (b.d != 2) throw std::invalid_argument("transfer_matrix: two-dimensional data required");
    if (!b.is_plain())
        throw std::invalid_argument("transfer_matrix: odd parts need the parity-twisted variant");
    if (n == 0) throw std::invalid_argument("transfer_matrix: period must be positive");
    if (traced_axis > 1) throw std::invalid_argument("transfer_matrix: axis is 0 or 1");
    const unsigned t = traced_axis, o = 1 - traced_axis;
    const unsigned Dt = b.dims[t].total(), Do = b.dims[o].total();

    unsigned long long size = 1, inner = 1;
    for (unsigned i = 0; i < n; ++i) {
        size *= Do;
        inner *= Dt;
        if (inner > budget || size * size > budget / std::max<unsigned long long>(inner, 1))
            throw BudgetError("transfer_matrix: contraction exceeds the budget");
    }
    const std::vector<unsigned> odims(n, Do), tdims(n, Dt);
    const std::vector<unsigned> full{b.dims[0].total(), b.dims[1].total()};

    Matrix<T> M((std::size_t)size, (std::size_t)size);
    std::vector<unsigned> bo(n, 0);
    do {
        std::vector<unsigned> bi(n, 0);
        do {
            T sum(0);
            std::vector<unsigned> a(n, 0);
            do {
                T prod(1);
                for (unsigned v = 0; v < n; ++v) {
                    unsigned a_out = a[(v + 1) % n];
                    std::vector<unsigned> outv(2), inv2(2);
                    outv[t] = a_out;
                    outv[o] = bo[v];
                    inv2[t] = a[v];
                    inv2[o] = bi[v];
                    prod = prod * b.R(detail::flatten(outv, full), detail::flatten(inv2, full));
                }
                sum += prod;
            } while (detail::odometer(a, tdims));
            M(detail::flatten(bo, odims), detail::flatten(bi, odims)) = sum;
        } while (detail::odometer(bi, odims));
    } while (detail::odometer(bo, odims));
    return M;
}

namespace detail {

// permutation matrix of the one-step rotation on n-fold tuples: basis vector
// (x_0,...,x_{n-1}) maps to (x_1,...,x_{n-1},x_0)
template <class T>
inline Matrix<T> rotation_matrix(unsigned D, unsigned n) {
    std::size_t size = 1;
    for (unsigned i = 0; i < n; ++i) size *= D;
    Matrix<T> C(size, size);
    std::vector<unsigned> dims(n, D), x(n, 0);
    do {
        std::vector<unsigned> y(n);
        for (unsigned i = 0; i < n; ++i) y[i] = x[(i + 1) % n];
        C(flatten(y, dims), flatten(x, dims)) = T(1);
    } while (odometer(x, dims));
    return C;
}

}  // namespace detail

// Z on the sheared lattice spanned by (n,0) and (k,m): the transfer power is
// corrected by k steps of the tuple rotation along the seam. The rotation
// direction is the one that matches partition_graph on the same lattice;
// that agreement is part of the test suite, not an assumption.
template <class T>
inline T partition_sheared(const BoltzmannData<T>& b, long n, long m, long k,
                           unsigned long long budget = kContractionBudget) {
    if (n < 1 || m < 1) throw std::invalid_argument("partition_sheared: periods must be positive");
    long kr = k % n;
    if (kr < 0) kr += n;
    Matrix<T> Tn = transfer_matrix(b, (unsigned)n, 0, budget);
    Matrix<T> P = Tn.pow((unsigned long)m);
    if (kr != 0) {
        Matrix<T> C = detail::rotation_matrix<T>(b.dims[1].total(), (unsigned)n);
        P = P * C.pow((unsigned long)kr);
    }
    return P.trace();
}

// ---- dimensional reduction -----------------------------------------------------

// Collapses the last axis with period n: the new spaces are the n-fold
// powers of the remaining ones and the new operator is the partial trace of
// the n-fold cyclic arrangement over the last axis. Satisfies
// Z_{reduced}(L) = Z(L + Z n e_d) for sublattices L of the remaining axes;
// the tests verify that identity against the direct graph contraction.
template <class T>
inline BoltzmannData<T> dimensional_reduction(const BoltzmannData<T>& b, unsigned n,
                                              unsigned long long budget = kContractionBudget) {
    validate_boltzmann(b);
    if (b.d < 2) throw std::invalid_argument("dimensional_reduction: need at least two dimensions");
    if (!b.is_plain())
        throw std::invalid_argument("dimensional_reduction: odd parts are not supported");
    if (n == 0) throw std::invalid_argument("dimensional_reduction: period must be positive");

    const unsigned dd = b.d - 1;
    const unsigned Dc = b.dims[dd].total();
    std::vector<unsigned> rest(dd);
    for (unsigned i = 0; i < dd; ++i) rest[i] = b.dims[i].total();

    unsigned long long size = 1, inner = 1;
    for (unsigned v = 0; v < n; ++v) {
        for (unsigned i = 0; i < dd; ++i) {
            size *= rest[i];
            if (size > (unsigned long long)1 << 31)
                throw BudgetError("dimensional_reduction: reduced space exceeds the budget");
        }
        inner *= Dc;
        if (inner > budget)
            throw BudgetError("dimensional_reduction: contraction exceeds the budget");
    }
    if (size * size > budget / std::max<unsigned long long>(inner, 1))
        throw BudgetError("dimensional_reduction: contraction exceeds the budget");

    BoltzmannData<T> r;
    r.d = dd;
    r.dims.resize(dd);
    for (unsigned i = 0; i < dd; ++i) {
        unsigned p = 1;
        for (unsigned v = 0; v < n; ++v) p *= rest[i];
        r.dims[i] = SpaceDim{p, 0};
    }
    r.R = Matrix<T>((std::size_t)size, (std::size_t)size);

    // row/column multi-index: for each remaining axis i, an n-tuple over V_i
    std::vector<unsigned> mixed;  // dims of (i, v) pairs, axis-major
    for (unsigned i = 0; i < dd; ++i)
        for (unsigned v = 0; v < n; ++v) mixed.push_back(rest[i]);
    const std::vector<unsigned> cdims(n, Dc);
    std::vector<unsigned> full(b.d);
    for (unsigned i = 0; i < b.d; ++i) full[i] = b.dims[i].total();

    std::vector<unsigned> J(mixed.size(), 0);
    do {
        std::vector<unsigned> I(mixed.size(), 0);
        do {
            T sum(0);
            std::vector<unsigned> c(n, 0);
            do {
                T prod(1);
                for (unsigned v = 0; v < n; ++v) {
                    std::vector<unsigned> outv(b.d), inv2(b.d);
                    for (unsigned i = 0; i < dd; ++i) {
                        outv[i] = J[i * n + v];
                        inv2[i] = I[i * n + v];
                    }
                    outv[dd] = c[(v + 1) % n];
                    inv2[dd] = c[v];
                    prod = prod * b.R(detail::flatten(outv, full), detail::flatten(inv2, full));
                }
                sum += prod;
            } while (detail::odometer(c, cdims));
            r.R(detail::flatten(J, mixed), detail::flatten(I, mixed)) = sum;
        } while (detail::odometer(I, mixed));
    } while (detail::odometer(J, mixed));
    return r;
}

// ---- parity-twisted transfer (d = 2) -------------------------------------------

template <class T>
struct SuperTransfer {
    Matrix<T> matrix;                 // on the n-fold power of the kept axis
    std::vector<std::uint8_t> parity;  // parity of each basis tuple of that power
};

// Transfer matrix with the traced axis closed by a parity-twisted seam: one
// parity sign rides on the seam slot, so a closed loop of length n
// contributes a supertrace. Purely even data reproduce transfer_matrix.
template <class T>
inline SuperTransfer<T> supertrace_transfer(const BoltzmannData<T>& b, unsigned n,
                                            unsigned long long budget = kContractionBudget) {
    validate_boltzmann(b);
    if (b.d != 2) throw std::invalid_argument("supertrace_transfer: two-dimensional data required");
    if (n == 0) throw std::invalid_argument("supertrace_transfer: period must be positive");
    const unsigned Dt = b.dims[0].total(), Do = b.dims[1].total();

    unsigned long long size = 1, inner = 1;
    for (unsigned i = 0; i < n; ++i) {
        size *= Do;
        inner *= Dt;
        if (inner > budget || size * size > budget / std::max<unsigned long long>(inner, 1))
            throw BudgetError("supertrace_transfer: contraction exceeds the budget");
    }
    const std::vector<unsigned> odims(n, Do), tdims(n, Dt);
    const std::vector<unsigned> full{Dt, Do};

    SuperTransfer<T> st;
    st.matrix = Matrix<T>((std::size_t)size, (std::size_t)size);
    st.parity.assign((std::size_t)size, 0);
    std::vector<unsigned> x(n, 0);
    do {
        unsigned p = 0;
        for (unsigned v = 0; v < n; ++v) p ^= index_parity(b.dims[1], x[v]) ? 1u : 0u;
        st.parity[detail::flatten(x, odims)] = (std::uint8_t)p;
    } while (detail::odometer(x, odims));

    std::vector<unsigned> bo(n, 0);
    do {
        std::vector<unsigned> bi(n, 0);
        do {
            T sum(0);
            std::vector<unsigned> a(n, 0);
            do {
                T prod(index_parity(b.dims[0], a[0]) ? T(-1) : T(1));
                for (unsigned v = 0; v < n; ++v)
                    prod = prod * b.R(detail::flatten({a[(v + 1) % n], bo[v]}, full),
                                      detail::flatten({a[v], bi[v]}, full));
                sum += prod;
            } while (detail::odometer(a, tdims));
            st.matrix(detail::flatten(bo, odims), detail::flatten(bi, odims)) = sum;
        } while (detail::odometer(bi, odims));
    } while (detail::odometer(bo, odims));
    return st;
}

// supertrace of the m-th power of the twisted transfer: one parity sign per
// closed column loop
template <class T>
inline T supertrace_power(const SuperTransfer<T>& st, unsigned long m) {
    Matrix<T> P = st.matrix.pow(m);
    T s(0);
    for (std::size_t i = 0; i < P.rows(); ++i)
        s += (st.parity[i] ? T(-1) : T(1)) * P(i, i);
    return s;
}

// ---- JSON ----------------------------------------------------------------------

inline nlohmann::json boltzmann_to_json(const BoltzmannRat& b) {
    nlohmann::json dims = nlohmann::json::array();
    for (const auto& s : b.dims) dims.push_back({s.even, s.odd});
    nlohmann::json entries = nlohmann::json::array();
    for (std::size_t i = 0; i < b.R.rows(); ++i)
        for (std::size_t j = 0; j < b.R.cols(); ++j) entries.push_back(rat_str(b.R(i, j)));
    return {{"d", b.d}, {"dims", dims}, {"entries", entries}};
}

inline BoltzmannRat boltzmann_from_json(const nlohmann::json& j) {
    BoltzmannRat b;
    b.d = j.at("d").get<unsigned>();
    for (const auto& dj : j.at("dims")) {
        if (!dj.is_array() || dj.size() != 2)
            throw std::invalid_argument("boltzmann json: each dims entry is [even, odd]");
        b.dims.push_back(SpaceDim{dj[0].get<unsigned>(), dj[1].get<unsigned>()});
    }
    std::size_t t = 1;
    for (const auto& s : b.dims) t *= s.total();
    const auto& entries = j.at("entries");
    if (entries.size() != t * t)
        throw std::invalid_argument("boltzmann json: entry count must be the squared dimension");
    b.R = Matrix<Rat>(t, t);
    std::size_t ix = 0;
    for (std::size_t i = 0; i < t; ++i)
        for (std::size_t jx = 0; jx < t; ++jx) b.R(i, jx) = rat_parse(entries[ix++].get<std::string>());
    validate_boltzmann(b);
    return b;
}

inline nlohmann::json sublattice_d_to_json(const SublatticeD& l) {
    nlohmann::json cols = nlohmann::json::array();
    for (const auto& c : l.cols) cols.push_back(c);
    return {{"cols", cols}, {"index", lattice_index_d(l)}};
}

}  // namespace motivic::lattice
