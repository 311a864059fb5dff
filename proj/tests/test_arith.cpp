#include <doctest.h>

#include <random>

#include "oracle/rational_mirror.hpp"
#include "quadent/arith.hpp"
#include "quadent/rng.hpp"

using namespace quadent;
using namespace quadent::arith;

namespace {

FieldPoly random_poly(const PrimeField& F, SplitMix64& rng, int deg) {
    std::vector<Elem> c(deg + 1);
    for (auto& v : c) v = uniform_elem(rng, F.modulus());
    if (c.back() == 0) c.back() = 1;
    return FieldPoly(std::move(c));
}

FieldPoly from_ints(const PrimeField& F, std::initializer_list<std::int64_t> c) {
    std::vector<Elem> v;
    for (auto x : c) v.push_back(F.from_int(x));
    return FieldPoly(std::move(v));
}

}  // namespace

TEST_CASE("primality and field construction") {
    CHECK(is_prime(2));
    CHECK(is_prime(kMersenne61));
    CHECK_FALSE(is_prime(1));
    CHECK_FALSE(is_prime(561));
    CHECK_FALSE(is_prime(3215031751ULL));
    CHECK_THROWS_AS(PrimeField(15), std::invalid_argument);
    CHECK_THROWS_AS(PrimeField((1ULL << 62) + 135), std::invalid_argument);
    CHECK_NOTHROW(PrimeField(1000003));
}

TEST_CASE("Mersenne reduction agrees with 128-bit remainder") {
    PrimeField F;
    const Elem p = F.modulus();
    std::vector<Elem> edge = {0, 1, 2, p - 1, p - 2, p / 2, p / 2 + 1, (1ULL << 60), (1ULL << 31)};
    SplitMix64 rng(11);
    for (int i = 0; i < 2000; ++i) edge.push_back(uniform_elem(rng, p));
    for (std::size_t i = 0; i < edge.size(); ++i)
        for (Elem b : {edge[3], edge[4], edge[7], edge[(i * 7 + 3) % edge.size()]}) {
            const Elem a = edge[i];
            const auto want = static_cast<Elem>((static_cast<unsigned __int128>(a) * b) % p);
            REQUIRE(F.mul(a, b) == want);
        }
}

TEST_CASE("inverse and signed representatives") {
    PrimeField F(101);
    for (Elem a = 1; a < 101; ++a) CHECK(F.mul(a, F.inv(a)) == 1);
    CHECK_THROWS_AS(F.inv(0), DivisionByZero);
    CHECK(F.to_signed(F.from_int(-7)) == -7);
    CHECK(F.from_ratio(1, 2) == 51);
    CHECK_THROWS_AS(F.from_ratio(1, 202), DivisionByZero);
}

TEST_CASE("poly_gcd examples") {
    PrimeField F;
    const FieldPoly x2m1 = from_ints(F, {-1, 0, 1});
    const FieldPoly xm1 = from_ints(F, {-1, 1});
    CHECK(poly_gcd(F, x2m1, xm1) == xm1);

    const FieldPoly a = from_ints(F, {4, 0, 6});
    CHECK(poly_gcd(F, a, FieldPoly{}) == poly_monic(F, a));
    CHECK(poly_gcd(F, FieldPoly{}, FieldPoly{}).is_zero());
    CHECK(FieldPoly{}.degree() < 0);
}

TEST_CASE("poly_gcd recovers a planted common factor") {
    PrimeField F;
    SplitMix64 rng(2024);
    for (int trial = 0; trial < 50; ++trial) {
        const int dh = 1 + static_cast<int>(rng.next() % 8);
        const FieldPoly h = random_poly(F, rng, dh);
        const FieldPoly f = random_poly(F, rng, 1 + static_cast<int>(rng.next() % (20 - dh)));
        const FieldPoly g = random_poly(F, rng, 1 + static_cast<int>(rng.next() % (20 - dh)));
        const FieldPoly fg = poly_gcd(F, f, g);
        const FieldPoly expect = poly_monic(F, poly_mul_schoolbook(F, h, fg.is_zero() ? FieldPoly::constant(1) : fg));
        CHECK(poly_gcd(F, poly_mul_schoolbook(F, f, h), poly_mul_schoolbook(F, g, h)) == expect);
    }
}

TEST_CASE("Karatsuba matches schoolbook") {
    PrimeField F;
    SplitMix64 rng(7);
    for (int n : {63, 64, 65, 130, 257, 600}) {
        const FieldPoly a = random_poly(F, rng, n);
        const FieldPoly b = random_poly(F, rng, n / 2 + 3);
        CHECK(poly_mul(F, a, b) == poly_mul_schoolbook(F, a, b));
        CHECK(poly_mul(F, a, a) == poly_mul_schoolbook(F, a, a));
    }
}

TEST_CASE("polynomial ring laws on random triples") {
    PrimeField F;
    SplitMix64 rng(99);
    for (int i = 0; i < 60; ++i) {
        const auto a = random_poly(F, rng, static_cast<int>(rng.next() % 90));
        const auto b = random_poly(F, rng, static_cast<int>(rng.next() % 90));
        const auto c = random_poly(F, rng, static_cast<int>(rng.next() % 90));
        CHECK(poly_mul(F, a, b) == poly_mul(F, b, a));
        CHECK(poly_mul(F, poly_mul(F, a, b), c) == poly_mul(F, a, poly_mul(F, b, c)));
        FieldPoly q, r;
        poly_divrem(F, a, b, q, r);
        CHECK(r.degree() < b.degree());
        CHECK(poly_add(F, poly_mul(F, q, b), r) == a);
    }
    FieldPoly q, r;
    CHECK_THROWS_AS(poly_divrem(F, FieldPoly::constant(1), FieldPoly{}, q, r), DivisionByZero);
}

TEST_CASE("fraction arithmetic examples") {
    PrimeField F;
    const auto f = ReducedFraction::make(F, from_ints(F, {3, 1}), from_ints(F, {5, 2}));
    const auto zero = frac_combine(F, FracOp::add, f, frac_neg(F, f));
    CHECK(zero.is_zero());
    CHECK(zero.denominator() == FieldPoly::constant(1));

    const auto inv = ReducedFraction::make(F, f.denominator(), f.numerator());
    CHECK(frac_combine(F, FracOp::mul, f, inv) == ReducedFraction::constant(F, 1));

    const auto x_over = ReducedFraction::make(F, from_ints(F, {0, 1}), from_ints(F, {1, 1}));
    const auto one_over = ReducedFraction::make(F, from_ints(F, {1}), from_ints(F, {1, 1}));
    const auto sum = frac_combine(F, FracOp::add, x_over, one_over);
    CHECK(sum == ReducedFraction::constant(F, 1));
    CHECK(is_reduced(F, sum));

    CHECK_THROWS_AS(frac_combine(F, FracOp::div, f, zero), DivisionByZero);
}

TEST_CASE("fraction_degree") {
    PrimeField F;
    SplitMix64 rng(5);
    for (int i = 0; i < 20; ++i) {
        const Elem a0 = uniform_elem(rng, F.modulus()), b0 = uniform_elem(rng, F.modulus());
        const Elem a = uniform_elem(rng, F.modulus()), b = uniform_elem(rng, F.modulus());
        if (F.mul(a, b0) == F.mul(a0, b)) continue;
        CHECK(fraction_degree(ReducedFraction::make(F, FieldPoly::linear(a, b),
                                                    FieldPoly::linear(a0, b0))) == 1);
    }
    CHECK(fraction_degree(ReducedFraction::constant(F, 5)) == 0);
    CHECK(fraction_degree(ReducedFraction{}) == 0);

    // (x^3 + 1) / (x^2 + x + 1), reduced degree from the exact rational mirror.
    const auto q = oracle::make_fraction(oracle::RatPoly{{1, 0, 0, 1}}, oracle::RatPoly{{1, 1, 1}});
    const auto f = ReducedFraction::make(F, from_ints(F, {1, 0, 0, 1}), from_ints(F, {1, 1, 1}));
    CHECK(fraction_degree(f) == q.degree());
    CHECK(is_reduced(F, f));

    const auto g = ReducedFraction::make(F, from_ints(F, {1, 0, 0, 1}), from_ints(F, {1, 1}));
    const auto gq = oracle::make_fraction(oracle::RatPoly{{1, 0, 0, 1}}, oracle::RatPoly{{1, 1}});
    CHECK(fraction_degree(g) == gq.degree());
    CHECK(fraction_degree(g) == 2);
}

TEST_CASE("fraction arithmetic is exact across two primes") {
    const PrimeField F1, F2(1000000007);
    std::mt19937_64 gen(31337);
    std::uniform_int_distribution<int> small(-9, 9), deg(0, 4), pick(0, 3);
    auto ints = [&](int d) {
        std::vector<std::int64_t> c(d + 1);
        for (auto& v : c) v = small(gen);
        if (c.back() == 0) c.back() = 1;
        return c;
    };
    auto to_field = [](const PrimeField& F, const std::vector<std::int64_t>& c) {
        std::vector<Elem> v;
        for (auto x : c) v.push_back(F.from_int(x));
        return FieldPoly(std::move(v));
    };
    for (int i = 0; i < 200; ++i) {
        const auto an = ints(deg(gen)), ad = ints(deg(gen)), bn = ints(deg(gen)), bd = ints(deg(gen));
        const auto op = static_cast<FracOp>(pick(gen));
        int d[2];
        int k = 0;
        for (const PrimeField* F : {&F1, &F2}) {
            const auto a = ReducedFraction::make(*F, to_field(*F, an), to_field(*F, ad));
            const auto b = ReducedFraction::make(*F, to_field(*F, bn), to_field(*F, bd));
            const auto r = frac_combine(*F, op, a, b);
            REQUIRE(is_reduced(*F, r));
            d[k++] = fraction_degree(r);
            if (op != FracOp::div) {
                CHECK(fraction_degree(r) <= fraction_degree(a) + fraction_degree(b));
            }
        }
        CHECK(d[0] == d[1]);
    }
}

TEST_CASE("degree of a product is at most the sum") {
    PrimeField F;
    SplitMix64 rng(77);
    for (int i = 0; i < 100; ++i) {
        const auto f = ReducedFraction::make(F, random_poly(F, rng, static_cast<int>(rng.next() % 6)),
                                             random_poly(F, rng, static_cast<int>(rng.next() % 6)));
        const auto g = ReducedFraction::make(F, random_poly(F, rng, static_cast<int>(rng.next() % 6)),
                                             random_poly(F, rng, static_cast<int>(rng.next() % 6)));
        const auto p = frac_combine(F, FracOp::mul, f, g);
        CHECK(is_reduced(F, p));
        CHECK(fraction_degree(p) <= fraction_degree(f) + fraction_degree(g));
    }
}
