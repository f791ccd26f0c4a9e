#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <random>
#include <thread>

#include "cqm/cyclotomic.hpp"
#include "cqm/errors.hpp"

using namespace cqm;

namespace
{
    Cyclotomic poly(std::uint32_t m, std::vector<Rational> c)
    {
        return Cyclotomic::make(m, c);
    }

    Cyclotomic random_element(std::mt19937_64 &rng, std::uint32_t m, int span = 5)
    {
        std::uniform_int_distribution<int> num(-span, span), den(1, 4);
        std::vector<Rational> c(euler_phi(m));
        for (auto &x : c)
            x = Rational(Integer(num(rng)), Integer(den(rng)));
        return Cyclotomic::make(m, c);
    }

    // Phi_m from its complex roots; independent of the division-based construction.
    std::vector<std::int64_t> numeric_cyclotomic(std::uint32_t m)
    {
        std::vector<std::complex<long double>> p{1.0L};
        for (std::uint32_t k = 1; k <= m; ++k)
        {
            if (std::gcd(k, m) != 1)
                continue;
            long double a = 2.0L * std::numbers::pi_v<long double> * k / m;
            std::complex<long double> r(std::cos(a), std::sin(a));
            std::vector<std::complex<long double>> q(p.size() + 1, 0.0L);
            for (std::size_t i = 0; i < p.size(); ++i)
            {
                q[i + 1] += p[i];
                q[i] -= r * p[i];
            }
            p = std::move(q);
        }
        std::vector<std::int64_t> out;
        for (auto &c : p)
            out.push_back(std::llround(c.real()));
        return out;
    }
} // namespace

TEST_CASE("cyclotomic polynomials match the product over primitive roots")
{
    for (std::uint32_t m : {1u, 2u, 3u, 4u, 5u, 6u, 8u, 12u, 15u, 24u, 30u, 36u, 60u, 105u, 120u})
    {
        CAPTURE(m);
        CHECK(cyclotomic_polynomial(m) == numeric_cyclotomic(m));
        CHECK(CyclotomicField::get(m).degree() == euler_phi(m));
    }
}

TEST_CASE("cyc_make reduces modulo Phi_m")
{
    SUBCASE("x in Q(zeta_4) is i and i*i = -1")
    {
        auto i = poly(4, {0, 1});
        CHECK(i * i == Cyclotomic::from_rational(4, -1));
    }
    SUBCASE("x^4 in Q(zeta_8) is -1")
    {
        CHECK(poly(8, {0, 0, 0, 0, 1}) == Cyclotomic::from_rational(8, -1));
    }
    SUBCASE("x^4 in Q(zeta_12) is x^2 - 1")
    {
        // x^4 = (x^4 - x^2 + 1) + (x^2 - 1)
        CHECK(poly(12, {0, 0, 0, 0, 1}) == poly(12, {-1, 0, 1}));
        auto c = poly(12, {0, 0, 0, 0, 1}).coeffs();
        CHECK(c == std::vector<Rational>{-1, 0, 1, 0});
    }
    SUBCASE("reduction is idempotent on canonical vectors")
    {
        std::mt19937_64 rng(7);
        for (std::uint32_t m : {3u, 8u, 12u, 24u, 120u})
            for (int t = 0; t < 20; ++t)
            {
                auto z = random_element(rng, m);
                auto again = Cyclotomic::make(m, z.coeffs());
                CHECK(again == z);
                CHECK(again.coeffs() == z.coeffs());
            }
    }
}

TEST_CASE("field operations")
{
    auto i = Cyclotomic::zeta(4, 1);
    CHECK(i.conj() == -i);

    auto z8 = Cyclotomic::zeta(8, 1);
    CHECK(z8.inverse() == Cyclotomic::zeta(8, 7));
    CHECK((z8 * Cyclotomic::zeta(8, 7)).is_one());

    auto w = Cyclotomic::zeta(3, 1);
    CHECK((Cyclotomic::one(3) + w + w * w).is_zero());

    CHECK_THROWS_AS(z8 + i, UsageError);
    CHECK_THROWS_AS(Cyclotomic::zero(8).inverse(), ArithmeticError);
}

TEST_CASE("rationality test")
{
    CHECK(Cyclotomic::from_rational(24, Rational(1, 2)).as_rational() == Rational(1, 2));
    auto sqrt2 = Cyclotomic::zeta(8, 1) + Cyclotomic::zeta(8, -1);
    CHECK_FALSE(sqrt2.as_rational().has_value());
    CHECK_FALSE(sqrt2.lift(24).as_rational().has_value());
    auto s = Cyclotomic::zeta(3, 1) + Cyclotomic::zeta(3, 2);
    CHECK(s.as_rational() == Rational(-1));
}

TEST_CASE("sqrt_embed")
{
    SUBCASE("sqrt 2 in Q(zeta_8)")
    {
        auto r = sqrt_embed(2, 8);
        CHECK(r == Cyclotomic::zeta(8, 1) + Cyclotomic::zeta(8, 7));
        CHECK(r * r == Cyclotomic::from_rational(8, 2));
    }
    SUBCASE("sqrt 3 in Q(zeta_12) is -i(2 zeta_3 + 1)")
    {
        auto r = sqrt_embed(3, 12);
        auto i = Cyclotomic::zeta(12, 3);
        auto z3 = Cyclotomic::zeta(12, 4);
        auto expected = -(i * (z3.scaled(2) + Cyclotomic::one(12)));
        CHECK(r == expected);
        CHECK(r * r == Cyclotomic::from_rational(12, 3));
        CHECK(r.to_complex().real() == doctest::Approx(std::sqrt(3.0)));
    }
    SUBCASE("perfect squares are rational")
    {
        for (std::uint32_t m : {1u, 5u, 24u})
            CHECK(sqrt_embed(4, m) == Cyclotomic::from_rational(m, 2));
    }
    SUBCASE("every n <= 25 squares back exactly with a positive embedding")
    {
        for (std::uint64_t n = 1; n <= 25; ++n)
        {
            CAPTURE(n);
            for (std::uint32_t m : {conductor_for(static_cast<std::uint32_t>(n)), conductor_with_sqrt(1, n)})
            {
                CAPTURE(m);
                REQUIRE(contains_sqrt(n, m));
                auto r = sqrt_embed(n, m);
                CHECK(r * r == Cyclotomic::from_rational(m, Integer(n)));
                CHECK(r.to_complex().real() == doctest::Approx(std::sqrt(static_cast<double>(n))));
                CHECK(std::abs(r.to_complex().imag()) < 1e-9);
            }
        }
    }
    SUBCASE("sqrt 21 needs only conductor 21")
    {
        CHECK(conductor_with_sqrt(1, 21) == 21);
        auto r = sqrt_embed(21, 21);
        CHECK(r * r == Cyclotomic::from_rational(21, 21));
    }
    SUBCASE("field too small")
    {
        CHECK_FALSE(contains_sqrt(5, 24));
        CHECK_THROWS_AS(sqrt_embed(5, 24), ConstructionError);
        CHECK_THROWS_AS(sqrt_embed(2, 12), ConstructionError);
    }
}

TEST_CASE("conductor_for")
{
    CHECK(conductor_for(2) == 24);
    CHECK(conductor_for(3) == 24);
    CHECK(conductor_for(5) == 120);

    // Q(zeta_120) holds sqrt 5, tau = -zeta_10 (order 5 for odd N), and zeta_5.
    const std::uint32_t m = conductor_for(5);
    auto s5 = sqrt_embed(5, m);
    CHECK(s5 * s5 == Cyclotomic::from_rational(m, 5));
    auto tau = -Cyclotomic::zeta(m, m / 10);
    CHECK(tau.pow(5).is_one());
    CHECK_FALSE(tau.is_one());
    auto z5 = Cyclotomic::zeta(m, m / 5);
    CHECK(z5.pow(5).is_one());
    CHECK_FALSE(z5.is_one());

    // centers mu_8 and mu_12 embed in Q(zeta_24)
    CHECK(Cyclotomic::zeta(8, 1).lift(24) == Cyclotomic::zeta(24, 3));
    CHECK(Cyclotomic::zeta(12, 1).lift(24) == Cyclotomic::zeta(24, 2));
}

TEST_CASE("field axioms on random samples")
{
    std::mt19937_64 rng(2024);
    for (std::uint32_t m : {3u, 8u, 12u, 24u, 120u})
    {
        CAPTURE(m);
        for (int t = 0; t < 12; ++t)
        {
            auto a = random_element(rng, m), b = random_element(rng, m), c = random_element(rng, m);
            CHECK((a * b) * c == a * (b * c));
            CHECK(a * (b + c) == a * b + a * c);
            CHECK(a * b == b * a);
            CHECK((a - a).is_zero());
            if (!a.is_zero())
                CHECK((a * a.inverse()).is_one());
            // conj is a ring homomorphism and an involution
            CHECK((a * b).conj() == a.conj() * b.conj());
            CHECK((a + b).conj() == a.conj() + b.conj());
            CHECK(a.conj().conj() == a);
            auto n = a * a.conj();
            CHECK(n.conj() == n);
            CHECK(std::abs(n.to_complex().imag()) < 1e-6 * (1 + std::abs(n.to_complex().real())));
        }
        auto z = Cyclotomic::zeta(m, 1);
        CHECK((z.conj() * z).is_one());
    }
}

TEST_CASE("large coefficients fall back to multiprecision")
{
    auto big = Cyclotomic::from_rational(24, Rational(Integer::from_string("123456789012345678901234567890"), Integer(7)));
    auto z = Cyclotomic::zeta(24, 5) + big;
    auto p = z * z * z;
    CHECK(p * p.inverse() == Cyclotomic::one(24));
    CHECK((p * z.inverse()) == z * z);
}

TEST_CASE("roots of unity")
{
    for (std::uint32_t m : {3u, 8u, 24u})
    {
        for (std::uint32_t k = 0; k < m; ++k)
            CHECK(Cyclotomic::zeta(m, k).root_of_unity_exponent() == (m % 2 == 0 ? k : 2 * k));
    }
    CHECK((-Cyclotomic::one(3)).root_of_unity_exponent() == 3u);
    CHECK_FALSE(sqrt_embed(2, 24).root_of_unity_exponent().has_value());
    CHECK_FALSE(Cyclotomic::from_rational(24, 2).root_of_unity_exponent().has_value());
}

TEST_CASE("serialization")
{
    auto z = Cyclotomic::make(12, std::vector<Rational>{Rational(1, 2), 0, Rational(-3, 4)});
    CHECK(z.to_json() == R"({"m":12,"c":["1/2","0","-3/4","0"]})");
    CHECK(Cyclotomic::from_json(z.to_json()) == z);

    std::mt19937_64 rng(99);
    for (int t = 0; t < 50; ++t)
    {
        auto a = random_element(rng, 24, 1000);
        std::string key;
        a.append_key(key);
        std::string_view in = key;
        CHECK(Cyclotomic::read_key(CyclotomicField::get(24), in) == a);
        CHECK(in.empty());
        CHECK(Cyclotomic::from_json(a.to_json()) == a);
    }
}

TEST_CASE("field cache is safe under concurrent first use")
{
    std::vector<std::thread> pool;
    std::vector<const CyclotomicField *> seen(8);
    for (int t = 0; t < 8; ++t)
        pool.emplace_back([&, t]
                          { seen[t] = &CyclotomicField::get(840); });
    for (auto &th : pool)
        th.join();
    for (auto *f : seen)
        CHECK(f == seen[0]);
}
