#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "json.hpp"

#include "cqm/errors.hpp"
#include "cqm/qgroups.hpp"
#include "cqm/rays.hpp"

using namespace cqm;

namespace
{
    constexpr std::uint32_t M = 24;

    Cyclotomic q(std::int64_t n, std::int64_t d = 1) { return Cyclotomic::from_rational(M, Rational(Integer(n), Integer(d))); }
    Cyclotomic z(std::int64_t k) { return Cyclotomic::zeta(M, k); }

    Cyclotomic random_entry(std::mt19937_64 &rng)
    {
        std::uniform_int_distribution<int> c(-3, 3), k(0, M - 1);
        Cyclotomic x = z(k(rng)).scaled(Rational(c(rng)));
        return x + z(k(rng)).scaled(Rational(c(rng)));
    }

    Ray random_ray(std::mt19937_64 &rng, std::size_t N)
    {
        for (;;)
        {
            std::vector<Cyclotomic> v;
            for (std::size_t i = 0; i < N; ++i)
                v.push_back(random_entry(rng));
            try
            {
                return Ray::canonicalize(v);
            }
            catch (const UsageError &)
            {
            }
        }
    }
} // namespace

TEST_CASE("canonicalization")
{
    CHECK(Ray::canonicalize({q(0), q(5)}).amps() == std::vector<Cyclotomic>{q(0), q(1)});
    auto s = sqrt_embed(2, M).inverse();
    CHECK(Ray::canonicalize({s, -s}).amps() == std::vector<Cyclotomic>{q(1), q(-1)});
    auto i = z(6);
    CHECK(Ray::canonicalize({z(3), z(3) * i}).amps() == std::vector<Cyclotomic>{q(1), i});
    CHECK_THROWS_AS(Ray::canonicalize({q(0), q(0)}), UsageError);
    CHECK(Ray::basis(3, 1, M).norm2().is_one());
}

TEST_CASE("transition probabilities")
{
    auto e0 = Ray::basis(2, 0, M);
    CHECK(transition_probability(e0, e0).is_one());
    auto i = z(6);
    auto a = Ray::canonicalize({q(1), q(1)}), b = Ray::canonicalize({q(1), i});
    CHECK(prob_is_rational(a, b) == Rational(1, 2));
    CHECK_FALSE(prob_is_rational(a, Ray::canonicalize({q(1), z(3)})).has_value());

    // B_X eigenvectors (Fourier columns) against the ontic basis
    for (std::uint32_t N : {2u, 3u, 4u, 5u})
    {
        const auto m = conductor_for(N);
        auto F = fourier_matrix(N, m);
        for (std::size_t l = 0; l < N; ++l)
            for (std::size_t k = 0; k < N; ++k)
                CHECK(prob_is_rational(apply(F, Ray::basis(N, l, m)), Ray::basis(N, k, m)) == Rational(1, N));
    }
    CHECK(prob_is_rational(Ray::basis(3, 0, M), Ray::basis(3, 2, M)) == Rational(0));
}

TEST_CASE("apply")
{
    auto g = wh_generators(2);
    CHECK(apply(g.X, Ray::basis(2, 0, M)) == Ray::basis(2, 1, M));
    CHECK(apply(UMatrix::identity(2, M), Ray::basis(2, 1, M)) == Ray::basis(2, 1, M));
    auto F3 = fourier_matrix(3);
    CHECK(apply(F3, Ray::basis(3, 0, M)) == Ray::canonicalize({q(1), q(1), q(1)}));
    CHECK_THROWS_AS(apply(F3, Ray::basis(2, 0, M)), UsageError);
}

TEST_CASE("probability properties on random rays")
{
    std::mt19937_64 rng(17);
    for (std::uint32_t N : {2u, 3u})
    {
        std::vector<UMatrix> gens{shift_matrix(N), fourier_matrix(N), s_matrix(N)};
        auto table = group_closure(gens);
        for (int t = 0; t < 25; ++t)
        {
            Ray a = random_ray(rng, N), b = random_ray(rng, N);
            auto p = transition_probability(a, b);
            CHECK(p == transition_probability(b, a));
            CHECK(p.conj() == p);

            // scale invariance: rescale the amplitudes before canonicalizing
            Cyclotomic s = random_entry(rng);
            if (!s.is_zero())
            {
                std::vector<Cyclotomic> v = a.amps();
                for (auto &x : v)
                    x = x * s;
                CHECK(transition_probability(Ray::canonicalize(v), b) == p);
            }

            // completeness over the ontic basis
            Cyclotomic sum(M);
            for (std::size_t k = 0; k < N; ++k)
                sum += transition_probability(a, Ray::basis(N, k, M));
            CHECK(sum.is_one());

            // Clifford invariance
            auto U = table.element(rng() % table.order());
            CHECK(transition_probability(apply(U, a), apply(U, b)) == p);
        }
    }
}

TEST_CASE("serialization")
{
    auto r = Ray::canonicalize({q(0), q(1), z(5) + q(1, 3)});
    CHECK(Ray::from_json(r.to_json()) == r);
    auto j = nlohmann::json::parse(r.to_json());
    CHECK(j["dim"] == 3);
    CHECK(j["amps"].size() == 3);
    CHECK_THROWS_AS(Ray::from_json(R"({"dim":1,"amps":[{"m":24,"c":["2","0","0","0","0","0","0","0"]}]})"), UsageError);
    CHECK(r.lift(120).lift(120) == r.lift(120));
    CHECK(transition_probability(r.lift(120), Ray::basis(3, 1, 120)) == transition_probability(r, Ray::basis(3, 1, M)).lift(120));
}
