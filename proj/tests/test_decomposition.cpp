#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <numeric>

#include "json.hpp"

#include "cqm/decomposition.hpp"
#include "cqm/errors.hpp"

using namespace cqm;

namespace
{
    // Product of the factors, checked against N; each factor a prime power.
    bool is_prime_power_split(const CrtSplit &s)
    {
        std::uint64_t prod = 1;
        for (std::size_t i = 0; i < s.factors.size(); ++i)
        {
            std::uint32_t n = s.factors[i], p = s.primes[i];
            if (i > 0 && s.primes[i - 1] >= p)
                return false;
            while (n % p == 0)
                n /= p;
            if (n != 1)
                return false;
            prod *= s.factors[i];
        }
        return prod == s.N;
    }
} // namespace

TEST_CASE("split of small N")
{
    auto s = crt_split(6);
    CHECK(s.factors == std::vector<std::uint32_t>{2, 3});
    CHECK(s.forward(5) == std::vector<std::uint32_t>{1, 2});
    CHECK(s.dual_units == std::vector<std::uint32_t>{1, 2});
    CHECK(crt_split(8).factors == std::vector<std::uint32_t>{8});
    CHECK(crt_split(360).factors == std::vector<std::uint32_t>{8, 9, 5});
    CHECK_THROWS_AS(crt_split(1), UsageError);
    CHECK_THROWS_AS(crt_split(0), UsageError);
}

TEST_CASE("maps are bijections and the dual units invert the cofactors")
{
    for (std::uint32_t N = 2; N <= 200; ++N)
    {
        auto s = crt_split(N);
        REQUIRE(is_prime_power_split(s));
        for (std::size_t i = 0; i < s.factors.size(); ++i)
            CHECK((static_cast<std::uint64_t>(N / s.factors[i]) * s.dual_units[i]) % s.factors[i] == 1 % s.factors[i]);
        std::vector<bool> seen(N, false);
        for (std::uint64_t k = 0; k < N; ++k)
        {
            CHECK(s.from_forward(s.forward(k)) == k);
            CHECK(s.from_dual(s.dual(k)) == k);
            auto t = s.tensor_index(s.forward(k));
            REQUIRE(t < N);
            CHECK_FALSE(seen[t]);
            seen[t] = true;
        }
    }
}

TEST_CASE("energy identity")
{
    for (std::uint32_t N = 2; N <= 100; ++N)
    {
        auto s = crt_split(N);
        for (std::uint64_t k = 0; k < N; ++k)
        {
            CHECK(energy_identity_holds(k, s));
            // oracle: sum k_i N/n_i = k mod N with integer arithmetic only
            std::uint64_t acc = 0;
            for (const auto &e : energy_decompose(k, s))
            {
                CHECK(e.k < e.n);
                acc += static_cast<std::uint64_t>(e.k) * (N / e.n);
            }
            CHECK(acc % N == k);
        }
    }
    auto lv = energy_decompose(7, crt_split(15));
    REQUIRE(lv.size() == 2);
    CHECK(lv[0].frequency == Rational(2, 3));
    CHECK(lv[1].frequency == Rational(4, 5));
    CHECK_THROWS_AS(energy_decompose(15, crt_split(15)), UsageError);
}

TEST_CASE("permutation intertwines the Weyl-Heisenberg generators")
{
    for (std::uint32_t N = 2; N <= 30; ++N)
    {
        auto s = crt_split(N);
        if (s.factors.size() < 2)
            continue;
        const auto m = conductor_for(N);
        auto P = crt_permutation(s, m);
        CHECK(P.is_unitary());
        auto Pinv = P.adjoint();
        UMatrix xs = UMatrix::identity(1, m), zs = UMatrix::identity(1, m);
        for (std::size_t i = 0; i < s.factors.size(); ++i)
        {
            xs = xs.tensor(shift_matrix(s.factors[i], 1, m));
            zs = zs.tensor(clock_matrix(s.factors[i], s.dual_units[i], m));
        }
        CHECK(P * shift_matrix(N, 1, m) * Pinv == xs);
        CHECK(P * clock_matrix(N, 1, m) * Pinv == zs);
    }
    auto s6 = crt_split(6);
    auto P = crt_permutation(s6);
    CHECK(P * clock_matrix(6) * P.adjoint() == clock_matrix(2, 1, 24).tensor(clock_matrix(3, 2, 24)));
}

TEST_CASE("embedding")
{
    auto s = crt_split(6);
    auto X2 = shift_matrix(2, 1, 24), X3 = shift_matrix(3, 1, 24);
    CHECK(embed_local(s, 0, X2) * embed_local(s, 1, X3) == X2.tensor(X3));
    CHECK(embed_local(s, 0, X2) * embed_local(s, 1, X3) == embed_local(s, 1, X3) * embed_local(s, 0, X2));
    CHECK_THROWS_AS(embed_local(s, 0, X3), UsageError);
    CHECK_THROWS_AS(embed_local(s, 2, X2), UsageError);
}

TEST_CASE("product check")
{
    auto r4 = clifford_product_check(4);
    CHECK(r4.skipped);
    CHECK(nlohmann::json::parse(r4.to_json())["skipped"] == true);

    auto r = clifford_product_check(6, {.full = false});
    REQUIRE_FALSE(r.skipped);
    CHECK(r.local_orders == std::vector<std::uint64_t>{192, 2592});
    CHECK(r.local_projective_orders == std::vector<std::uint64_t>{24, 216});
    CHECK(r.direct_product_order == 497664);
    CHECK(r.direct_product_projective == 5184);
    CHECK(r.projective_order == 5184);
    CHECK(r.projective_matches());
    CHECK(r.shift_factorizes);
    CHECK_FALSE(r.full_order.has_value());
    CHECK(r.order == r.projective_order * r.scalar_order);
    // Conjugation by P identifies CL(6) with the group the local generators span.
    CHECK(r.local_group_order == r.order);
    for (const auto &[name, ok] : r.membership)
    {
        INFO(name);
        CHECK(ok);
    }
    auto j = nlohmann::json::parse(r.to_json());
    CHECK(j["factors"] == std::vector<int>{2, 3});
    CHECK(j["full_closure_order"].is_null());

    auto capped = clifford_product_check(6, {.full = true, .max_size = 10000});
    CHECK_FALSE(capped.full_order.has_value());
    CHECK(capped.order == r.order);
}
