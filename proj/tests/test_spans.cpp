#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <numeric>

#include "motivic/hecke.hpp"
#include "motivic/spans.hpp"

using namespace motivic;
using namespace motivic::spans;

namespace {

MultiPoly poly(const ff::FieldPtr& F, std::size_t nvars,
               const std::vector<std::pair<long, std::vector<unsigned>>>& terms) {
    return mp_from_terms(F, nvars, terms);
}

Int pow2(long e) { return Int(1) << e; }

// Five structurally different endomorphism correspondences of the affine line:
// a squaring graph, a negatively weighted shift graph, a doubly weighted
// square-root span, the Frobenius graph, and an inequation-constrained span.
std::vector<Correspondence> line_endos(const ff::FieldPtr& F) {
    auto A1 = affine_space(F, 1);
    std::vector<Correspondence> out;
    out.push_back(graph_correspondence(A1, A1, {poly(F, 1, {{1, {2}}})}));
    out.push_back(graph_correspondence(A1, A1, {poly(F, 1, {{1, {1}}, {1, {0}}})}, -1));
    auto sqrt_apex =
        with_equation(affine_space(F, 2, "a"), poly(F, 2, {{1, {0, 2}}, {-1, {1, 0}}}));
    out.push_back(single(make_span(A1, A1, sqrt_apex, {mp_var(F, 2, 0)}, {mp_var(F, 2, 1)}, 2)));
    out.push_back(frobenius_graph(A1));
    auto generic_apex =
        with_inequation(affine_space(F, 2, "c"), poly(F, 2, {{1, {1, 0}}, {1, {0, 1}}}));
    out.push_back(
        single(make_span(A1, A1, generic_apex, {mp_var(F, 2, 0)}, {mp_var(F, 2, 1)}, 1)));
    return out;
}

ConstructibleSet point_set(const ff::FieldPtr& F) { return affine_space(F, 0, "p"); }

// span pt <- A -> pt whose matrix is the weighted point count of A
Correspondence class_of(const ConstructibleSet& A, long weight = 1) {
    auto pt = point_set(A.field);
    return single(make_span(pt, pt, A, {}, {}, weight));
}

}  // namespace

TEST_CASE("polynomial arithmetic normalizes and evaluates") {
    auto F = ff::make_field(5, 1);
    auto x = mp_var(F, 2, 0), y = mp_var(F, 2, 1);
    auto sum = mp_add(F, x, y);
    // (x + y)^2 expands with the cross term folded once
    auto sq = mp_mul(F, sum, sum);
    auto want = poly(F, 2, {{1, {2, 0}}, {2, {1, 1}}, {1, {0, 2}}});
    REQUIRE(sq == want);
    REQUIRE(mp_pow(F, sum, 2) == want);
    REQUIRE(mp_pow(F, sum, 0) == mp_const(2, F->one()));
    // cancellation drops terms entirely
    REQUIRE(mp_sub(F, sq, sq) == mp_zero(2));
    REQUIRE(mp_add(F, x, mp_neg(F, x)) == mp_zero(2));
    // 5x collapses to zero in characteristic 5
    REQUIRE(poly(F, 2, {{5, {1, 0}}}) == mp_zero(2));

    ff::FElem pt[2] = {F->from_int(2), F->from_int(4)};
    REQUIRE(mp_eval(sq, F, F, pt) == F->from_int(36 % 5));
    REQUIRE(mp_eval(mp_zero(2), F, F, pt) == 0);

    // shifting embeds the variables into a wider tuple
    auto shifted = mp_shift(x, 1, 3);
    ff::FElem pt3[3] = {F->from_int(3), F->from_int(2), F->from_int(1)};
    REQUIRE(mp_eval(shifted, F, F, pt3) == F->from_int(2));

    // evaluation over an extension embeds the coefficients
    auto F25 = ff::extend_field(F, 2);
    ff::FElem e2[2] = {F25->embed_base(F->from_int(2)), F25->embed_base(F->from_int(4))};
    REQUIRE(mp_eval(sq, F, F25, e2) == F25->embed_base(F->from_int(1)));

    REQUIRE_THROWS_AS(poly(F, 1, {{1, {0, 1}}}), std::invalid_argument);
    REQUIRE_THROWS_AS(mp_shift(x, 2, 3), std::invalid_argument);
}

TEST_CASE("point enumeration is ordered, filtered and budgeted") {
    auto F5 = ff::make_field(5, 1);
    auto A1 = affine_space(F5, 1);

    auto all = points(A1, 1);
    REQUIRE(all.pts == std::vector<std::vector<ff::FElem>>{{0}, {1}, {2}, {3}, {4}});

    // x^2 = 4 picks out the two square roots
    auto V = with_equation(A1, poly(F5, 1, {{1, {2}}, {-4, {0}}}));
    REQUIRE(points(V, 1).pts == std::vector<std::vector<ff::FElem>>{{2}, {3}});
    REQUIRE(points(V, 2).pts.size() == 2);

    // x != 0 drops one point per level
    auto Gm = with_inequation(A1, mp_var(F5, 1, 0));
    REQUIRE(points(Gm, 1).pts.size() == 4);
    REQUIRE(points(Gm, 2).pts.size() == 24);

    // zero variables: one empty tuple, or none under a false constraint
    REQUIRE(points(point_set(F5), 1).pts == std::vector<std::vector<ff::FElem>>{{}});
    auto empty = with_equation(point_set(F5), mp_const(0, F5->one()));
    REQUIRE(points(empty, 1).pts.empty());

    // product points list in row-major order of the factors
    auto F2 = ff::make_field(2, 1);
    auto B = affine_space(F2, 1);
    auto BB = product_set(B, B);
    REQUIRE(points(BB, 1).pts ==
            std::vector<std::vector<ff::FElem>>{{0, 0}, {0, 1}, {1, 0}, {1, 1}});

    REQUIRE(points(affine_space(F5, 2), 2).pts.size() == 625);
    REQUIRE_THROWS_AS(points(affine_space(F5, 3), 4), BudgetError);
    REQUIRE_THROWS_AS(points(A1, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(points_over(A1, ff::make_field(7, 1)), std::invalid_argument);
}

TEST_CASE("graph matrices tabulate the map") {
    auto F5 = ff::make_field(5, 1);
    auto A1 = affine_space(F5, 1);
    auto sq = graph_correspondence(A1, A1, {poly(F5, 1, {{1, {2}}})});

    auto M = phi_n(sq, 1);
    REQUIRE(M.rows() == 5);
    REQUIRE(M.cols() == 5);
    // x -> x^2 on F_5: 0,1,4,4,1
    std::vector<std::pair<std::size_t, std::size_t>> ones = {{0, 0}, {1, 1}, {2, 4}, {3, 4}, {4, 1}};
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) {
            bool hit = std::find(ones.begin(), ones.end(), std::make_pair(i, j)) != ones.end();
            REQUIRE(M(i, j) == (hit ? 1 : 0));
        }

    // the class of the affine line counts q^n points
    REQUIRE(phi_n(class_of(A1), 1)(0, 0) == 5);
    REQUIRE(phi_n(class_of(A1), 2)(0, 0) == 25);
    REQUIRE(phi_n(class_of(A1, -1), 1)(0, 0) == -5);

    // projections must land in the declared source/target sets
    auto Gm = with_inequation(A1, mp_var(F5, 1, 0));
    auto bad = single(make_span(A1, Gm, A1, {mp_var(F5, 1, 0)}, {mp_var(F5, 1, 0)}));
    REQUIRE_THROWS_AS(phi_n(bad, 1), std::domain_error);

    REQUIRE_THROWS_AS(phi_n(sq, 0), std::invalid_argument);
    auto F7 = ff::make_field(7, 1);
    REQUIRE_THROWS_AS(phi_n(identity_correspondence(affine_space(F7, 3)), 3), BudgetError);

    // arity mismatches are rejected at construction
    REQUIRE_THROWS_AS(make_span(A1, A1, A1, {}, {mp_var(F5, 1, 0)}), std::invalid_argument);
    REQUIRE_THROWS_AS(make_span(A1, A1, A1, {mp_var(F5, 2, 0)}, {mp_var(F5, 1, 0)}),
                      std::invalid_argument);
    auto F3 = ff::make_field(3, 1);
    REQUIRE_THROWS_AS(
        make_span(A1, affine_space(F3, 1), A1, {mp_var(F5, 1, 0)}, {mp_var(F5, 1, 0)}),
        std::invalid_argument);
}

TEST_CASE("composition multiplies matrices") {
    auto F7 = ff::make_field(7, 1);
    auto A1 = affine_space(F7, 1);
    auto f = graph_correspondence(A1, A1, {poly(F7, 1, {{1, {2}}})});           // x^2
    auto g = graph_correspondence(A1, A1, {poly(F7, 1, {{1, {1}}, {1, {0}}})});  // x + 1
    auto gof = graph_correspondence(A1, A1, {poly(F7, 1, {{1, {2}}, {1, {0}}})});  // x^2 + 1

    // graphs compose covariantly: first f, then g
    auto c = compose(f, g);
    REQUIRE(phi_n(c, 1) == phi_n(gof, 1));
    REQUIRE(phi_n(c, 1) == phi_n(f, 1) * phi_n(g, 1));
    REQUIRE(phi_n(c, 2) == phi_n(f, 2) * phi_n(g, 2));

    auto idc = identity_correspondence(A1);
    REQUIRE(phi_n(compose(idc, f), 1) == phi_n(f, 1));
    REQUIRE(phi_n(compose(f, idc), 1) == phi_n(f, 1));
    REQUIRE(phi_n(idc, 2) == IntMatrix::identity(49));

    // signature mismatch is rejected
    auto F3 = ff::make_field(3, 1);
    REQUIRE_THROWS_AS(compose(f, identity_correspondence(affine_space(F3, 1))),
                      std::invalid_argument);

    // all ordered pairs drawn from five distinct span shapes
    auto F = ff::make_field(3, 1);
    auto cs = line_endos(F);
    for (unsigned n = 1; n <= 2; ++n) {
        std::vector<IntMatrix> ms;
        for (const auto& ci : cs) ms.push_back(phi_n(ci, n));
        for (std::size_t i = 0; i < cs.size(); ++i)
            for (std::size_t j = 0; j < cs.size(); ++j)
                REQUIRE(phi_n(compose(cs[i], cs[j]), n) == ms[i] * ms[j]);
    }
    // a deeper level for two mixed pairs
    REQUIRE(phi_n(compose(cs[2], cs[4]), 3) == phi_n(cs[2], 3) * phi_n(cs[4], 3));
    REQUIRE(phi_n(compose(cs[0], cs[1]), 3) == phi_n(cs[0], 3) * phi_n(cs[1], 3));
}

TEST_CASE("frobenius graphs are permutations of finite order") {
    auto F2 = ff::make_field(2, 1);
    auto A1 = affine_space(F2, 1);
    auto fr = frobenius_graph(A1);

    // level 1: squaring fixes the prime field
    REQUIRE(phi_n(fr, 1) == IntMatrix::identity(2));

    // level 2: the embedded prime field is fixed, the two new elements swap
    auto M = phi_n(fr, 2);
    REQUIRE(M(0, 0) == 1);
    REQUIRE(M(1, 1) == 1);
    REQUIRE(M(2, 3) == 1);
    REQUIRE(M(3, 2) == 1);
    REQUIRE(M(2, 2) == 0);
    REQUIRE(M(3, 3) == 0);

    // order divides the level
    for (unsigned n = 1; n <= 4; ++n) {
        auto P = phi_n(fr, n);
        REQUIRE(P.pow(n) == IntMatrix::identity(1u << n));
    }
    auto F3 = ff::make_field(3, 1);
    auto fr3 = frobenius_graph(affine_space(F3, 1));
    for (unsigned n = 1; n <= 3; ++n) {
        auto P = phi_n(fr3, n);
        REQUIRE(P.pow(n) == IntMatrix::identity(points(affine_space(F3, 1), n).pts.size()));
    }

    // composing the graph with itself is the square of the matrix
    REQUIRE(phi_n(compose(fr, fr), 3) == phi_n(fr, 3).pow(2));
}

TEST_CASE("trace tables obey the gcd law") {
    auto F2 = ff::make_field(2, 1);
    auto fr = frobenius_graph(affine_space(F2, 1));
    auto t = z_table(fr, 4, 4);
    for (unsigned n = 1; n <= 4; ++n)
        for (unsigned m = 1; m <= 4; ++m)
            REQUIRE(t.at(n, m) == pow2(std::gcd(n, m)));
    REQUIRE_THROWS_AS(t.at(0, 1), std::out_of_range);
    REQUIRE_THROWS_AS(t.at(1, 5), std::out_of_range);

    // identity on a two-point set: every trace is the point count
    auto F5 = ff::make_field(5, 1);
    auto V = with_equation(affine_space(F5, 1), poly(F5, 1, {{1, {2}}, {-4, {0}}}));
    auto tv = z_table(identity_correspondence(V), 2, 3);
    for (unsigned n = 1; n <= 2; ++n)
        for (unsigned m = 1; m <= 3; ++m) REQUIRE(tv.at(n, m) == 2);

    // non-endomorphisms have no trace table
    auto A1 = affine_space(F5, 1);
    auto Gm = with_inequation(A1, mp_var(F5, 1, 0));
    auto j = single(make_span(Gm, A1, Gm, {mp_var(F5, 1, 0)}, {mp_var(F5, 1, 0)}));
    REQUIRE_THROWS_AS(z_table(j, 1, 1), std::invalid_argument);
}

TEST_CASE("trace table rows and columns fit linear recurrences") {
    auto F2 = ff::make_field(2, 1);
    auto fr = frobenius_graph(affine_space(F2, 1));
    auto r = z_table_report(fr, 7, 15);

    for (unsigned n = 1; n <= 7; ++n)
        for (unsigned m = 1; m <= 15; ++m)
            REQUIRE(r.table.at(n, m) == pow2(std::gcd(n, m)));

    // every row m -> 2^gcd(n,m) is periodic of period n: order-n recurrence,
    // certified and predictive on a window of 15 terms
    REQUIRE(r.rows.size() == 7);
    for (unsigned n = 1; n <= 7; ++n) {
        const auto& fit = r.rows[n - 1];
        REQUIRE(fit.recurrence.has_value());
        REQUIRE(fit.recurrence->order() == n);
        REQUIRE(fit.predicted_ok);
    }

    // columns only see 7 terms: short periods certify, long ones honestly
    // report no certified fit. m=9 fits order 3 because gcd(n,9) looks
    // 3-periodic until n reaches 9.
    std::vector<std::size_t> col_order = {1, 2, 3, 0, 0, 0, 0, 0, 3, 0, 1, 0, 1, 0, 3};
    REQUIRE(r.cols.size() == 15);
    for (unsigned m = 1; m <= 15; ++m) {
        const auto& fit = r.cols[m - 1];
        if (col_order[m - 1] == 0) {
            REQUIRE_FALSE(fit.recurrence.has_value());
            REQUIRE_FALSE(fit.predicted_ok);
        } else {
            REQUIRE(fit.recurrence.has_value());
            REQUIRE(fit.recurrence->order() == col_order[m - 1]);
            REQUIRE(fit.predicted_ok);
        }
    }
}

TEST_CASE("cyclic chain counts agree with matrix traces") {
    auto F5 = ff::make_field(5, 1);
    auto A1 = affine_space(F5, 1);
    auto sq = graph_correspondence(A1, A1, {poly(F5, 1, {{1, {2}}})});

    // fixed points of iterated squaring on F_5: x^2=x, x^4=x, x^8=x all give {0,1}
    REQUIRE(z_fibered_oracle(sq, 1, 1) == 2);
    REQUIRE(z_fibered_oracle(sq, 1, 2) == 2);
    REQUIRE(z_fibered_oracle(sq, 1, 3) == 2);
    auto ts = z_table(sq, 1, 3);
    for (unsigned m = 1; m <= 3; ++m) REQUIRE(z_fibered_oracle(sq, 1, m) == ts.at(1, m));

    auto F2 = ff::make_field(2, 1);
    auto fr = frobenius_graph(affine_space(F2, 1));
    auto tf = z_table(fr, 3, 3);
    for (unsigned n = 1; n <= 3; ++n)
        for (unsigned m = 1; m <= 3; ++m) REQUIRE(z_fibered_oracle(fr, n, m) == tf.at(n, m));

    // both routes agree across five span shapes, weights included
    auto F3 = ff::make_field(3, 1);
    for (const auto& c : line_endos(F3)) {
        auto t = z_table(c, 2, 3);
        for (unsigned n = 1; n <= 2; ++n)
            for (unsigned m = 1; m <= 3; ++m) REQUIRE(z_fibered_oracle(c, n, m) == t.at(n, m));
    }

    // single-span endomorphisms only, one step minimum
    auto two = make_correspondence(A1, A1, {sq.spans[0], sq.spans[0]});
    REQUIRE_THROWS_AS(z_fibered_oracle(two, 1, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(z_fibered_oracle(sq, 1, 0), std::invalid_argument);
    auto Gm = with_inequation(A1, mp_var(F5, 1, 0));
    auto j = single(make_span(Gm, A1, Gm, {mp_var(F5, 1, 0)}, {mp_var(F5, 1, 0)}));
    REQUIRE_THROWS_AS(z_fibered_oracle(j, 1, 1), std::invalid_argument);
}

TEST_CASE("twisted traces extend the table") {
    auto F2 = ff::make_field(2, 1);
    auto A1 = affine_space(F2, 1);
    auto idc = identity_correspondence(A1);

    // the identity twisted k times by Frobenius counts the fixed field
    for (long n = 1; n <= 4; ++n)
        for (long k = 0; k < n; ++k) {
            Int want = k == 0 ? pow2(n) : pow2(std::gcd(n, k));
            REQUIRE(z_lattice(idc, Sublattice2{n, 2, k}) == want);
        }

    // no twist reduces to the plain table
    auto F3 = ff::make_field(3, 1);
    auto sq3 = graph_correspondence(affine_space(F3, 1), affine_space(F3, 1),
                                    {poly(F3, 1, {{1, {2}}})});
    auto t = z_table(sq3, 2, 2);
    for (long n = 1; n <= 2; ++n)
        for (long m = 1; m <= 2; ++m)
            REQUIRE(z_lattice(sq3, Sublattice2{n, m, 0}) == t.at((unsigned)n, (unsigned)m));

    // the Frobenius factor has order n, so shifting k by n changes nothing
    auto fr = frobenius_graph(A1);
    auto shift = graph_correspondence(A1, A1, {poly(F2, 1, {{1, {1}}, {1, {0}}})});
    auto M = phi_n(shift, 3);
    auto Fm = phi_n(fr, 3);
    for (unsigned long k = 0; k <= 2; ++k)
        REQUIRE(M.pow(2) * Fm.pow(k) == M.pow(2) * Fm.pow(k + 3));

    REQUIRE_THROWS_AS(z_lattice(idc, Sublattice2{0, 1, 0}), std::invalid_argument);
    REQUIRE_THROWS_AS(z_lattice(idc, Sublattice2{1, 0, 0}), std::invalid_argument);
    REQUIRE_THROWS_AS(z_lattice(idc, Sublattice2{2, 1, -1}), std::invalid_argument);
    REQUIRE_THROWS_AS(z_lattice(idc, Sublattice2{2, 1, 2}), std::invalid_argument);
    auto F5 = ff::make_field(5, 1);
    auto A15 = affine_space(F5, 1);
    auto Gm = with_inequation(A15, mp_var(F5, 1, 0));
    auto j = single(make_span(Gm, A15, Gm, {mp_var(F5, 1, 0)}, {mp_var(F5, 1, 0)}));
    REQUIRE_THROWS_AS(z_lattice(j, Sublattice2{1, 1, 0}), std::invalid_argument);
}

TEST_CASE("sublattice normal forms") {
    auto nf = [](long a, long b, long c, long d) { return lattice_normal_form({a, b}, {c, d}); };

    auto full = nf(1, 0, 0, 1);
    REQUIRE(full.n == 1);
    REQUIRE(full.m == 1);
    REQUIRE(full.k == 0);
    auto swapped = nf(0, 1, 1, 0);
    REQUIRE(swapped.n == 1);
    REQUIRE(swapped.m == 1);
    REQUIRE(swapped.k == 0);

    auto l = nf(2, 1, 1, 3);
    REQUIRE(l.n == 5);
    REQUIRE(l.m == 1);
    REQUIRE(l.k == 2);
    REQUIRE(lattice_index(l) == 5);

    // the same lattice from different generators normalizes identically
    auto a = nf(2, 0, 1, 1);
    auto b = nf(1, 1, 2, 0);
    REQUIRE(a.n == 2);
    REQUIRE(a.m == 1);
    REQUIRE(a.k == 1);
    REQUIRE(b.n == a.n);
    REQUIRE(b.m == a.m);
    REQUIRE(b.k == a.k);
    auto c1 = nf(3, 0, 5, 2);
    REQUIRE(c1.n == 3);
    REQUIRE(c1.m == 2);
    REQUIRE(c1.k == 2);
    auto c2 = nf(5, 2, 3, 0);
    REQUIRE(c2.n == 3);
    REQUIRE(c2.m == 2);
    REQUIRE(c2.k == 2);

    // the index is the determinant up to sign
    for (long a0 = -3; a0 <= 3; ++a0)
        for (long b0 = -3; b0 <= 3; ++b0)
            for (long c0 = -3; c0 <= 3; ++c0)
                for (long d0 = -3; d0 <= 3; ++d0) {
                    long det = a0 * d0 - b0 * c0;
                    if (det == 0) {
                        REQUIRE_THROWS_AS(lattice_normal_form({a0, b0}, {c0, d0}),
                                          std::invalid_argument);
                    } else {
                        auto f = lattice_normal_form({a0, b0}, {c0, d0});
                        REQUIRE(lattice_index(f) == (det < 0 ? -det : det));
                        REQUIRE(f.k >= 0);
                        REQUIRE(f.k < f.n);
                    }
                }
}

TEST_CASE("rationality along rays") {
    auto F2 = ff::make_field(2, 1);
    auto fr = frobenius_graph(affine_space(F2, 1));

    // axis ray: the sequence is constant 2
    auto r1 = ray_rationality(fr, {1, 0}, {0, 1}, 6);
    REQUIRE(r1.fit.seq == std::vector<Int>{2, 2, 2, 2, 2, 2});
    REQUIRE(r1.ok);
    REQUIRE(r1.fit.recurrence->order() == 1);
    for (unsigned n = 1; n <= 6; ++n) {
        REQUIRE(r1.lattices[n - 1].n == 1);
        REQUIRE(r1.lattices[n - 1].m == (long)n);
        REQUIRE(r1.lattices[n - 1].k == 0);
    }

    // swapped axes reach the same constants through different lattices
    auto r2 = ray_rationality(fr, {0, 1}, {1, 0}, 5);
    REQUIRE(r2.fit.seq == std::vector<Int>{2, 2, 2, 2, 2});
    REQUIRE(r2.ok);
    for (unsigned n = 1; n <= 5; ++n) {
        REQUIRE(r2.lattices[n - 1].n == (long)n);
        REQUIRE(r2.lattices[n - 1].m == 1);
        REQUIRE(r2.lattices[n - 1].k == 0);
    }

    // diagonal ray: alternating 2,4 resolved as 3 * 1^n + 1 * (-1)^n
    auto r3 = ray_rationality(fr, {1, 1}, {1, 0}, 6);
    REQUIRE(r3.fit.seq == std::vector<Int>{2, 4, 2, 4, 2, 4});
    REQUIRE(r3.ok);
    REQUIRE(r3.fit.recurrence->order() == 2);
    REQUIRE(r3.lattices[0].n == 1);
    REQUIRE(r3.lattices[0].m == 1);
    REQUIRE(r3.lattices[0].k == 0);
    for (unsigned n = 2; n <= 6; ++n) {
        REQUIRE(r3.lattices[n - 1].n == (long)n);
        REQUIRE(r3.lattices[n - 1].m == 1);
        REQUIRE(r3.lattices[n - 1].k == 1);
    }
    REQUIRE(r3.expsum.has_value());
    REQUIRE(r3.expsum->ok);
    long mult_plus = 0, mult_minus = 0;
    for (const auto& term : r3.expsum->terms) {
        if (std::abs(term.lambda - std::complex<double>(1, 0)) < 1e-6)
            mult_plus = term.multiplicity;
        if (std::abs(term.lambda - std::complex<double>(-1, 0)) < 1e-6)
            mult_minus = term.multiplicity;
    }
    REQUIRE(mult_plus == 3);
    REQUIRE(mult_minus == 1);

    // every tested ray over F_3 predicts its withheld term as well
    auto F3 = ff::make_field(3, 1);
    auto fr3 = frobenius_graph(affine_space(F3, 1));
    for (auto g2 : std::vector<std::pair<long, long>>{{0, 1}, {1, 0}, {2, 1}}) {
        auto rr = ray_rationality(fr3, {1, 1}, g2, 5);
        REQUIRE(rr.ok);
    }
    REQUIRE_THROWS_AS(ray_rationality(fr3, {1, 1}, {2, 2}, 4), std::invalid_argument);
    REQUIRE_THROWS_AS(ray_rationality(fr3, {0, 0}, {1, 0}, 4), std::invalid_argument);
}

TEST_CASE("plane incidence identity") {
    std::vector<std::pair<unsigned, std::size_t>> cases = {
        {2, 7}, {3, 13}, {4, 21}, {5, 31}, {7, 57}, {8, 73}, {9, 91}};
    for (auto [q, np] : cases) {
        auto r = radon_check(q);
        REQUIRE(r.identity_holds);
        REQUIRE(r.n_points == np);
        REQUIRE(r.line_coeff == (long)q);
        REQUIRE(r.point_coeff == 1);
        REQUIRE(r.witness.empty());
    }
    REQUIRE_THROWS_AS(radon_check(6), std::invalid_argument);
    REQUIRE_THROWS_AS(radon_check(11), std::invalid_argument);
    REQUIRE_THROWS_AS(radon_check(1), std::invalid_argument);
}

TEST_CASE("group laws pass the algebra axioms") {
    auto F5 = ff::make_field(5, 1);
    auto A1 = affine_space(F5, 1);
    auto plus =
        graph_correspondence(product_set(A1, A1), A1, {poly(F5, 2, {{1, {1, 0}}, {1, {0, 1}}})});
    auto t = structure_tensor(plus, 1);
    REQUIRE(t.s == 5);
    REQUIRE(t.at(2, 3, 0) == 1);  // 2 + 3 = 0
    REQUIRE(t.at(2, 3, 1) == 0);
    REQUIRE(t.at(4, 4, 3) == 1);  // 4 + 4 = 3

    std::vector<Rat> unit5(5, Rat(0));
    unit5[0] = Rat(1);
    auto rep = algebra_axiom_check(t, unit5);
    REQUIRE(rep.ok);
    REQUIRE(rep.checks.size() == 3);
    for (const auto& chk : rep.checks) {
        REQUIRE(chk.pass);
        REQUIRE(chk.witness.empty());
    }

    // multiplicative group of F_7: points are 1..6, the unit sits first
    auto F7 = ff::make_field(7, 1);
    auto Gm = with_inequation(affine_space(F7, 1), mp_var(F7, 1, 0));
    auto times = graph_correspondence(product_set(Gm, Gm), Gm, {poly(F7, 2, {{1, {1, 1}}})});
    auto tg = structure_tensor(times, 1);
    REQUIRE(tg.s == 6);
    REQUIRE(points(Gm, 1).pts[0] == std::vector<ff::FElem>{F7->one()});
    REQUIRE(tg.at(1, 2, 5) == 1);  // 2 * 3 = 6
    std::vector<Rat> unit6(6, Rat(0));
    unit6[0] = Rat(1);
    auto repg = algebra_axiom_check(tg, unit6);
    REQUIRE(repg.ok);

    // an asymmetric tamper is caught with a witness
    auto bad = t;
    bad.at(0, 1, 0) += 1;
    auto repb = algebra_axiom_check(bad, unit5);
    REQUIRE_FALSE(repb.ok);
    REQUIRE_FALSE(repb.checks[0].pass);
    REQUIRE(repb.checks[0].witness.find("c(0,1,0)") != std::string::npos);

    // a wrong unit fails only the unit law
    std::vector<Rat> wrong(5, Rat(0));
    wrong[1] = Rat(1);
    auto repw = algebra_axiom_check(t, wrong);
    REQUIRE(repw.checks[0].pass);
    REQUIRE(repw.checks[1].pass);
    REQUIRE_FALSE(repw.checks[2].pass);

    // tensors from non-square sources are rejected, oversized ones refused
    REQUIRE_THROWS_AS(structure_tensor(identity_correspondence(A1), 1), std::invalid_argument);
    REQUIRE_THROWS_AS(make_tensor(301), BudgetError);
    StructureTensor huge;
    huge.s = 301;
    REQUIRE_THROWS_AS(algebra_axiom_check(huge), BudgetError);
    StructureTensor skewed;
    skewed.s = 2;
    skewed.c.assign(7, 0);
    REQUIRE_THROWS_AS(algebra_axiom_check(skewed), std::invalid_argument);
}

TEST_CASE("convolution family tensor commutes but does not associate") {
    hecke::HeckeParams hp;
    hp.base = ff::make_field(5, 1);
    hp.t = hp.base->from_int(2);
    hp.level = 1;
    auto fam = hecke::hecke_family(hp);
    auto t = make_tensor(fam.ops.size());
    for (std::size_t x = 0; x < t.s; ++x)
        for (std::size_t y = 0; y < t.s; ++y)
            for (std::size_t z = 0; z < t.s; ++z) t.at(x, y, z) = fam.ops[x]((unsigned)y, (unsigned)z);

    auto rep = algebra_axiom_check(t);
    REQUIRE(rep.checks.size() == 2);
    REQUIRE(rep.checks[0].name == "commutative");
    REQUIRE(rep.checks[0].pass);
    REQUIRE(rep.checks[1].name == "associative");
    REQUIRE_FALSE(rep.checks[1].pass);
    REQUIRE(rep.checks[1].witness ==
            "x=0 y=0 z=1 u=0: (xy)z coefficient 30, x(yz) coefficient 0");
    REQUIRE_FALSE(rep.ok);

    // the quadratic extension shows the same split
    hecke::HeckeParams hp2 = hp;
    hp2.level = 2;
    auto fam2 = hecke::hecke_family(hp2);
    auto t2 = make_tensor(fam2.ops.size());
    REQUIRE(t2.s == 25);
    for (std::size_t x = 0; x < t2.s; ++x)
        for (std::size_t y = 0; y < t2.s; ++y)
            for (std::size_t z = 0; z < t2.s; ++z)
                t2.at(x, y, z) = fam2.ops[x]((unsigned)y, (unsigned)z);
    auto rep2 = algebra_axiom_check(t2);
    REQUIRE(rep2.checks[0].pass);
    REQUIRE_FALSE(rep2.checks[1].pass);
}

TEST_CASE("curve counts match under regrouping") {
    auto F11 = ff::make_field(11, 1);
    auto good = curve_regroup_check(F11, F11->from_int(2), {3, 4, 5, 6});
    REQUIRE_FALSE(good.degenerate);
    REQUIRE(good.direct_level1 == 14);
    REQUIRE(good.regrouped_level1 == 14);
    REQUIRE(good.direct_level2 == 104);
    REQUIRE(good.regrouped_level2 == 104);
    REQUIRE(good.ok);

    for (auto tup : std::vector<std::array<ff::FElem, 4>>{
             {3, 5, 7, 9}, {4, 6, 8, 10}, {3, 4, 5, 7}}) {
        auto r = curve_regroup_check(F11, F11->from_int(2), tup);
        REQUIRE_FALSE(r.degenerate);
        REQUIRE(r.direct_level1 == 12);
        REQUIRE(r.regrouped_level1 == 12);
        REQUIRE(r.direct_level2 == 124);
        REQUIRE(r.regrouped_level2 == 124);
        REQUIRE(r.ok);
    }

    // over F_7 every distinct unmarked 4-tuple makes the two quadratics
    // proportional; the counts still agree but nothing is asserted
    auto F7 = ff::make_field(7, 1);
    auto deg = curve_regroup_check(F7, F7->from_int(3), {2, 4, 5, 6});
    REQUIRE(deg.degenerate);
    REQUIRE(deg.degenerate_reason.find("share a root") != std::string::npos);
    REQUIRE(deg.direct_level1 == 10);
    REQUIRE(deg.regrouped_level1 == 10);
    REQUIRE(deg.direct_level2 == 94);
    REQUIRE(deg.regrouped_level2 == 94);
    REQUIRE_FALSE(deg.ok);

    auto coll = curve_regroup_check(F11, F11->from_int(2), {0, 0, 5, 6});
    REQUIRE(coll.degenerate);
    REQUIRE(coll.degenerate_reason.find("equal pair entries") != std::string::npos);

    REQUIRE_THROWS_AS(curve_regroup_check(F11, 0, {3, 4, 5, 6}), std::invalid_argument);
    REQUIRE_THROWS_AS(curve_regroup_check(F11, F11->one(), {3, 4, 5, 6}), std::invalid_argument);

    // the quadratic-in-y regrouping of the symmetric quartic, checked
    // against direct evaluation everywhere over F_11
    for (ff::FElem a = 0; a < 11; ++a)
        for (ff::FElem b = 0; b < 11; ++b) {
            auto co = quartic_quadratic_coeffs(F11, F11->from_int(2), a, b);
            for (ff::FElem y = 0; y < 11; ++y) {
                ff::FElem quad = F11->add(
                    F11->mul(co[0], F11->mul(y, y)), F11->add(F11->mul(co[1], y), co[2]));
                REQUIRE(quad == hecke::f_t_eval(F11, F11->from_int(2), a, b, y));
            }
        }
}

TEST_CASE("point counts add along closed decompositions") {
    auto F5 = ff::make_field(5, 1);
    auto A1 = affine_space(F5, 1);
    auto cut = poly(F5, 1, {{1, {2}}, {-4, {0}}});
    auto V = with_equation(A1, cut);
    auto U = with_inequation(A1, cut);

    for (unsigned n = 1; n <= 2; ++n) {
        auto whole = phi_n(class_of(A1), n);
        auto parts = phi_n(class_of(V), n) + phi_n(class_of(U), n);
        REQUIRE(whole == parts);
    }
    REQUIRE(phi_n(class_of(V), 1)(0, 0) == 2);
    REQUIRE(phi_n(class_of(U), 1)(0, 0) == 3);

    // the two pieces as one two-span correspondence give the same class
    auto pt = point_set(F5);
    auto split = make_correspondence(
        pt, pt, {make_span(pt, pt, V, {}, {}), make_span(pt, pt, U, {}, {})});
    for (unsigned n = 1; n <= 2; ++n) REQUIRE(phi_n(split, n) == phi_n(class_of(A1), n));

    auto F3 = ff::make_field(3, 1);
    auto B = affine_space(F3, 1);
    auto zero = mp_var(F3, 1, 0);
    auto Z = with_equation(B, zero);
    auto W = with_inequation(B, zero);
    for (unsigned n = 1; n <= 3; ++n)
        REQUIRE(phi_n(class_of(B), n) == phi_n(class_of(Z), n) + phi_n(class_of(W), n));
}

TEST_CASE("diagonal duals compose to the identity") {
    auto check_snakes = [](const ConstructibleSet& X, unsigned n_max) {
        const auto& F = X.field;
        auto XX = product_set(X, X);
        auto X3 = product_set(XX, X);
        auto AP = product_set(X, X);  // apex for every leg below
        auto v0 = mp_var(F, 2, 0), v1 = mp_var(F, 2, 1);

        // x -> (x, d, d), then (e, e, y) -> y
        auto left1 = single(make_span(X, X3, AP, {v0}, {v0, v1, v1}));
        auto right1 = single(make_span(X3, X, AP, {v0, v0, v1}, {v1}));
        // x -> (d, d, x), then (y, e, e) -> y
        auto left2 = single(make_span(X, X3, AP, {v1}, {v0, v0, v1}));
        auto right2 = single(make_span(X3, X, AP, {v0, v1, v1}, {v0}));

        auto idm = identity_correspondence(X);
        for (unsigned n = 1; n <= n_max; ++n) {
            auto want = phi_n(idm, n);
            REQUIRE(phi_n(compose(left1, right1), n) == want);
            REQUIRE(phi_n(compose(left2, right2), n) == want);
        }
    };

    auto F5 = ff::make_field(5, 1);
    auto Gm5 = with_inequation(affine_space(F5, 1), mp_var(F5, 1, 0));
    check_snakes(Gm5, 2);
    auto F3 = ff::make_field(3, 1);
    check_snakes(affine_space(F3, 1), 2);
}

TEST_CASE("descriptions round-trip through json") {
    auto F3 = ff::make_field(3, 1);
    auto A1 = affine_space(F3, 1);
    auto sqrt_apex =
        with_equation(affine_space(F3, 2, "a"), poly(F3, 2, {{1, {0, 2}}, {-1, {1, 0}}}));
    auto generic_apex =
        with_inequation(affine_space(F3, 2, "c"), poly(F3, 2, {{1, {1, 0}}, {1, {0, 1}}}));
    auto c = make_correspondence(
        A1, A1,
        {make_span(A1, A1, sqrt_apex, {mp_var(F3, 2, 0)}, {mp_var(F3, 2, 1)}, 2),
         make_span(A1, A1, generic_apex, {mp_var(F3, 2, 0)}, {mp_var(F3, 2, 1)}, -1)});

    auto j = correspondence_to_json(c);
    auto back = correspondence_from_json(j);
    REQUIRE(back.spans.size() == 2);
    REQUIRE(back.spans[0].weight == 2);
    REQUIRE(back.spans[1].weight == -1);
    REQUIRE(sets_equal(back.source, c.source));
    REQUIRE(phi_n(back, 1) == phi_n(c, 1));
    REQUIRE(phi_n(back, 2) == phi_n(c, 2));

    // the parsed correspondence shares one field object end to end
    REQUIRE(back.source.field.get() == back.target.field.get());
    REQUIRE(back.source.field.get() == back.spans[1].apex.field.get());

    auto bad_field = j;
    bad_field["target"]["field"]["p"] = 5;
    REQUIRE_THROWS_AS(correspondence_from_json(bad_field), std::invalid_argument);
    auto bad_coeff = j;
    bad_coeff["spans"][0]["apex"]["equations"][0]["terms"][0]["coeff"] = 7;
    REQUIRE_THROWS_AS(correspondence_from_json(bad_coeff), std::invalid_argument);

    // report serializers expose their headline fields
    auto F2 = ff::make_field(2, 1);
    auto fr = frobenius_graph(affine_space(F2, 1));
    auto zr = z_table_report_to_json(z_table_report(fr, 2, 2));
    REQUIRE(zr["n_max"] == 2);
    REQUIRE(zr["table"].size() == 2);
    REQUIRE(zr["table"][0][0] == "2");
    REQUIRE(zr["rows"].size() == 2);
    REQUIRE(zr["cols"].size() == 2);

    // six terms: the withheld-term certificate needs the window, not four
    auto rj = ray_report_to_json(ray_rationality(fr, {1, 1}, {1, 0}, 6));
    REQUIRE(rj["ok"] == true);
    REQUIRE(rj["lattices"].size() == 6);
    REQUIRE(rj["lattices"][2]["index"] == 3);
    REQUIRE(rj["fit"]["sequence"].size() == 6);
    REQUIRE(rj.contains("expsum"));

    auto dj = radon_report_to_json(radon_check(2));
    REQUIRE(dj["q"] == 2);
    REQUIRE(dj["n_points"] == 7);
    REQUIRE(dj["identity_holds"] == true);

    auto t = make_tensor(1);
    t.at(0, 0, 0) = 1;
    auto aj = algebra_report_to_json(algebra_axiom_check(t, {Rat(1)}));
    REQUIRE(aj["ok"] == true);
    REQUIRE(aj["checks"].size() == 3);
    REQUIRE(aj["checks"][0]["name"] == "commutative");

    auto F11 = ff::make_field(11, 1);
    auto cj = curve_regroup_report_to_json(
        curve_regroup_check(F11, F11->from_int(2), {3, 4, 5, 6}));
    REQUIRE(cj["ok"] == true);
    REQUIRE(cj["degenerate"] == false);
    REQUIRE_FALSE(cj.contains("reason"));
    REQUIRE(cj["direct_level1"] == "14");
    REQUIRE(cj["equal_level2"] == true);
    auto F7 = ff::make_field(7, 1);
    auto cd = curve_regroup_report_to_json(
        curve_regroup_check(F7, F7->from_int(3), {2, 4, 5, 6}));
    REQUIRE(cd["degenerate"] == true);
    REQUIRE(cd.contains("reason"));

    auto sj = sublattice_to_json(Sublattice2{3, 2, 1});
    REQUIRE(sj["n"] == 3);
    REQUIRE(sj["index"] == 6);
}
