#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "motivic/ff.hpp"

using namespace motivic;
using namespace motivic::ff;

namespace {

// brute-force square counter used as the oracle for sqrt_count
int count_square_roots(const FieldPtr& f, FElem a) {
    int n = 0;
    for (std::size_t w = 0; w < f->size; ++w)
        if (f->mul((FElem)w, (FElem)w) == a) ++n;
    return n;
}

}  // namespace

TEST_CASE("prime field arithmetic") {
    auto f5 = make_field(5, 1);
    REQUIRE(f5->size == 5);
    REQUIRE(f5->add(3, 4) == 2);
    REQUIRE(f5->mul(3, 4) == 2);
    REQUIRE(f5->neg(2) == 3);
    REQUIRE(f5->inv(3) == 2);
    REQUIRE(f5->from_int(-3) == 2);
    auto f7 = make_field(7, 1);
    REQUIRE(f7->from_int(-3) == 4);
}

TEST_CASE("canonical modulus is the first irreducible in enumeration order") {
    auto f9 = make_field(3, 2);
    // oracle: degree-2 irreducible over F_3 means no root
    auto f3 = make_field(3, 1);
    std::vector<FElem> first_irreducible;
    for (std::uint32_t code = 0; code < 9 && first_irreducible.empty(); ++code) {
        std::vector<FElem> cand{(FElem)(code % 3), (FElem)(code / 3), 1};
        bool has_root = false;
        for (FElem x = 0; x < 3; ++x) {
            FElem v = f3->add(f3->add(f3->mul(x, x), f3->mul(cand[1], x)), cand[0]);
            if (v == 0) has_root = true;
        }
        if (!has_root) first_irreducible = cand;
    }
    REQUIRE(first_irreducible == std::vector<FElem>{1, 0, 1});  // x^2 + 1
    REQUIRE(f9->rel_modulus == first_irreducible);

    auto f25 = make_field(5, 2);
    REQUIRE(f25->rel_modulus == std::vector<FElem>{2, 0, 1});  // x^2 + 2
}

TEST_CASE("enumeration starts with zero and the embedded base field") {
    auto f5 = make_field(5, 1);
    auto f25 = extend_field(f5, 2);
    REQUIRE(f25->zero() == 0);
    REQUIRE(f25->one() == 1);
    for (FElem a = 0; a < 5; ++a) {
        REQUIRE(f25->embed_base(a) == a);
        for (FElem b = 0; b < 5; ++b) {
            REQUIRE(f25->mul(a, b) == f25->embed_base(f5->mul(a, b)));
            REQUIRE(f25->add(a, b) == f25->embed_base(f5->add(a, b)));
        }
    }
}

TEST_CASE("square counts match brute-force enumeration") {
    for (auto [p, e] : {std::pair<unsigned, unsigned>{5, 1}, {7, 1}, {3, 2}, {2, 3}, {5, 2}}) {
        auto f = make_field(p, e);
        for (std::size_t a = 0; a < f->size; ++a)
            REQUIRE(f->sqrt_count((FElem)a) == count_square_roots(f, (FElem)a));
    }
}

TEST_CASE("squares of F_5 are 0, 1, 4") {
    auto f5 = make_field(5, 1);
    std::vector<FElem> sq;
    for (FElem a = 0; a < 5; ++a)
        if (f5->sqrt_count(a) > 0) sq.push_back(a);
    REQUIRE(sq == std::vector<FElem>{0, 1, 4});
}

TEST_CASE("characteristic 2 squaring is a bijection") {
    auto f8 = make_field(2, 3);
    for (std::size_t a = 0; a < 8; ++a) REQUIRE(f8->sqrt_count((FElem)a) == 1);
}

TEST_CASE("discrete log generator choice is deterministic") {
    auto f7 = make_field(7, 1);
    auto t = build_dlog(f7);
    // oracle: orders of 1..6 mod 7 are 1,3,6,3,6,2 so 3 is the first full-order element
    REQUIRE(t.generator == 3);
    REQUIRE(t.log[1] == 0);
    REQUIRE(t.log[3] == 1);
    REQUIRE(t.log[2] == 2);  // 3^2 = 2 mod 7
    // table inverts exponentiation everywhere
    for (FElem a = 1; a < 7; ++a) REQUIRE(f7->pow_u64(t.generator, t.log[a]) == a);

    auto t2 = build_dlog(f7, 1);
    REQUIRE(t2.generator == 5);  // next full-order element after 3
}

TEST_CASE("dlog round trip on an extension field") {
    auto f49 = make_field(7, 2);
    auto t = build_dlog(f49);
    for (std::size_t a = 1; a < f49->size; ++a)
        REQUIRE(f49->pow_u64(t.generator, t.log[a]) == (FElem)a);
}

TEST_CASE("Frobenius fixes exactly the base field") {
    auto f25 = make_field(5, 2);
    std::size_t fixed = 0;
    for (std::size_t a = 0; a < f25->size; ++a) {
        if (f25->frob((FElem)a) == (FElem)a) {
            ++fixed;
            REQUIRE(a < 5);  // the embedded constants come first
        }
    }
    REQUIRE(fixed == 5);

    auto f343 = extend_field(make_field(7, 1), 3);
    fixed = 0;
    for (std::size_t a = 0; a < f343->size; ++a)
        if (f343->frob((FElem)a) == (FElem)a) ++fixed;
    REQUIRE(fixed == 7);
}

TEST_CASE("field axioms hold on sampled triples of a tower") {
    auto f343 = extend_field(make_field(7, 1), 3);
    std::mt19937_64 rng(12345);
    for (int it = 0; it < 200; ++it) {
        FElem a = (FElem)(rng() % f343->size);
        FElem b = (FElem)(rng() % f343->size);
        FElem c = (FElem)(rng() % f343->size);
        REQUIRE(f343->mul(a, f343->mul(b, c)) == f343->mul(f343->mul(a, b), c));
        REQUIRE(f343->mul(a, f343->add(b, c)) == f343->add(f343->mul(a, b), f343->mul(a, c)));
        REQUIRE(f343->add(a, f343->neg(a)) == 0);
    }
    for (std::size_t a = 1; a < f343->size; ++a)
        REQUIRE(f343->mul((FElem)a, f343->inv((FElem)a)) == f343->one());
}

TEST_CASE("multiplicative group order") {
    auto f81 = make_field(3, 4);
    for (std::size_t a = 1; a < f81->size; ++a)
        REQUIRE(f81->pow_u64((FElem)a, f81->size - 1) == f81->one());
}

TEST_CASE("field json round trip") {
    auto f9 = make_field(3, 2);
    auto j = field_to_json(f9);
    auto f9b = field_from_json(j);
    REQUIRE(f9b->size == 9);
    REQUIRE(f9b->rel_modulus == f9->rel_modulus);

    auto tower = extend_field(make_field(7, 1), 2);
    auto jt = field_to_json(tower);
    auto tb = field_from_json(jt);
    REQUIRE(tb->size == 49);
    for (int it = 0; it < 20; ++it) {
        FElem a = (FElem)(it * 7 % 49), b = (FElem)(it * 11 % 49);
        REQUIRE(tb->mul(a, b) == tower->mul(a, b));
    }
}

TEST_CASE("field construction budget") {
    REQUIRE_THROWS_AS(extend_field(make_field(7, 1), 12), BudgetError);
}
