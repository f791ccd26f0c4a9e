#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <complex>
#include <random>

#include "json.hpp"

#include "cqm/cqs.hpp"
#include "cqm/errors.hpp"
#include "cqm/mub.hpp"
#include "cqm/qgroups.hpp"

using namespace cqm;

namespace
{
    // Floating-point transition probability, independent of the exact path.
    double numeric_prob(const Ray &a, const Ray &b)
    {
        std::complex<double> ip = 0;
        double na = 0, nb = 0;
        for (std::size_t i = 0; i < a.dim(); ++i)
        {
            auto x = a[i].to_complex(), y = b[i].to_complex();
            ip += std::conj(x) * y;
            na += std::norm(x);
            nb += std::norm(y);
        }
        return std::norm(ip) / (na * nb);
    }

    bool numerically_mub(const BasisSet &bs)
    {
        const double N = static_cast<double>(bs.dim);
        for (std::size_t a = 0; a < bs.bases.size(); ++a)
            for (std::size_t b = a; b < bs.bases.size(); ++b)
                for (std::size_t i = 0; i < bs.bases[a].size(); ++i)
                    for (std::size_t j = 0; j < bs.bases[b].size(); ++j)
                    {
                        double want = a != b ? 1 / N : (i == j ? 1 : 0);
                        if (std::abs(numeric_prob(bs.bases[a][i], bs.bases[b][j]) - want) > 1e-9)
                            return false;
                    }
        return true;
    }
} // namespace

TEST_CASE("ontic and Fourier bases")
{
    for (std::uint32_t N : {2u, 3u, 4u, 5u})
    {
        auto bs = wh_bases(N);
        auto rep = verify_mub(bs);
        CHECK(rep.ok());
        CHECK(rep.pairs_checked == N * (N - 1) + N * N);
        CHECK(numerically_mub(bs));

        BasisSet same{N, {bs.bases[1], bs.bases[1]}};
        auto bad = verify_mub(same);
        CHECK(bad.orthonormal);
        CHECK_FALSE(bad.unbiased);
        CHECK(bad.violation_count == N * N);
        CHECK(bad.violations.front().expected == "1/" + std::to_string(N));
        CHECK((bad.violations.front().probability == "0" || bad.violations.front().probability == "1"));
    }
}

TEST_CASE("short and non-orthogonal bases are reported")
{
    auto bs = wh_bases(3);
    bs.bases[0].pop_back();
    auto rep = verify_mub(bs);
    CHECK_FALSE(rep.orthonormal);
    CHECK(rep.violations.front().expected == "3 rays");

    auto b2 = wh_bases(2);
    b2.bases[0][1] = b2.bases[1][0];
    auto r2 = verify_mub(b2);
    CHECK_FALSE(r2.orthonormal);
    CHECK(r2.violations.front().probability == "1/2");
    CHECK(nlohmann::json::parse(r2.to_json())["ok"] == false);
}

TEST_CASE("complete sets")
{
    for (std::uint32_t N : {2u, 3u, 4u, 5u, 7u, 8u, 9u})
    {
        INFO("N = " << N);
        auto bs = mub_complete_set(N);
        CHECK(bs.bases.size() == N + 1);
        for (const auto &b : bs.bases)
            CHECK(b.size() == N);
        auto rep = verify_mub(bs);
        CHECK(rep.ok());
        CHECK(rep.violation_count == 0);
        CHECK(numerically_mub(bs));
    }
    CHECK_THROWS_AS(mub_complete_set(6), UsageError);
    CHECK_THROWS_AS(mub_complete_set(12), UsageError);
    CHECK_THROWS_AS(mub_complete_set(4, 1), UsageError);
    CHECK_THROWS_AS(mub_complete_set(1), UsageError);
}

TEST_CASE("the dimension-2 set is the octahedron")
{
    auto bs = mub_complete_set(2);
    auto orbit = clifford_orbit(Ray::basis(2, 0, conductor_for(2)), CliffordAction::make(2));
    REQUIRE(orbit.size() == 6);
    for (const auto &b : bs.bases)
        for (const auto &r : b)
            CHECK(std::find(orbit.begin(), orbit.end(), r) != orbit.end());
}

TEST_CASE("MUB property is Clifford invariant")
{
    std::mt19937_64 rng(5);
    for (std::uint32_t N : {2u, 3u})
    {
        std::vector<UMatrix> gens{shift_matrix(N), fourier_matrix(N), s_matrix(N)};
        auto table = group_closure(gens);
        auto bs = mub_complete_set(N);
        for (int t = 0; t < 10; ++t)
        {
            auto U = table.element(rng() % table.order());
            BasisSet moved{N, {}};
            for (const auto &b : bs.bases)
            {
                moved.bases.emplace_back();
                for (const auto &r : b)
                    moved.bases.back().push_back(apply(U, r));
            }
            CHECK(verify_mub(moved).ok());
        }
    }
}

TEST_CASE("joint eigenbasis")
{
    auto X = shift_matrix(3), Z = clock_matrix(3);
    auto zb = joint_eigenbasis({Z});
    for (std::size_t k = 0; k < 3; ++k)
        CHECK(std::find(zb.begin(), zb.end(), Ray::basis(3, k, conductor_for(3))) != zb.end());
    // X and Z do not commute, and X alone has a simple spectrum
    CHECK(joint_eigenbasis({X}).size() == 3);
    // the identity has a degenerate spectrum
    CHECK_THROWS_AS(joint_eigenbasis({UMatrix::identity(3, conductor_for(3))}), IntegrityError);
    for (const auto &r : joint_eigenbasis({X * Z}))
    {
        auto v = X * Z * std::span<const Cyclotomic>(r.amps());
        CHECK(Ray::canonicalize(v) == r);
    }
}

TEST_CASE("extraction from orbits")
{
    auto orbit2 = clifford_orbit(Ray::basis(2, 0, conductor_for(2)), CliffordAction::make(2));
    auto e2 = extract_mubs_from_orbit(orbit2);
    CHECK(e2.complete);
    CHECK(e2.found.bases.size() == 3);
    CHECK(e2.leftover.empty());
    CHECK(e2.obstruction.empty());

    auto orbit3 = clifford_orbit(Ray::basis(3, 0, conductor_for(3)), CliffordAction::make(3));
    REQUIRE(orbit3.size() == 12);
    auto e3 = extract_mubs_from_orbit(orbit3);
    CHECK(e3.complete);
    CHECK(e3.found.bases.size() == 4);
    CHECK(e3.unbiased_subset.size() == 4);

    // Reordering the orbit does not change the outcome.
    std::mt19937_64 rng(11);
    for (int t = 0; t < 5; ++t)
    {
        auto shuffled = orbit3;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        auto e = extract_mubs_from_orbit(shuffled);
        CHECK(e.complete);
        CHECK(e.found.bases.size() == 4);
    }

    // A duplicated ray cannot be placed in any basis.
    auto bad = wh_bases(2);
    auto ex = extract_mubs_from_orbit({bad.bases[0][0], bad.bases[0][1], Ray::basis(2, 0, 24)});
    CHECK_FALSE(ex.complete);
    CHECK(ex.leftover.size() == 1);
    CHECK_FALSE(ex.obstruction.empty());
    CHECK(extract_mubs_from_orbit({}).obstruction == "empty orbit");
}

TEST_CASE("the 24-state orbit is not a union of MUBs")
{
    auto run = cqs_generate(2, 1);
    const auto &set = run.set;
    std::vector<Ray> orbit24;
    for (const auto &o : set.orbits())
        if (o.size() == 24)
            for (auto i : o)
                orbit24.push_back(set.states()[i]);
    REQUIRE(orbit24.size() == 24);
    auto ex = extract_mubs_from_orbit(orbit24);
    CHECK_FALSE(ex.complete);
    CHECK(ex.found.bases.size() == 12);
    CHECK(ex.leftover.empty());
    CHECK(ex.report.orthonormal);
    CHECK_FALSE(ex.report.unbiased);
    CHECK(ex.obstruction.find("not unbiased") != std::string::npos);
    // at most N+1 = 3 bases can be pairwise unbiased in dimension 2
    CHECK(ex.unbiased_subset.size() <= 3);
    MESSAGE("24-state orbit: " << ex.found.bases.size() << " orthonormal bases, greedy unbiased subfamily of size "
                               << ex.unbiased_subset.size());
}

TEST_CASE("serialization")
{
    auto bs = mub_complete_set(3);
    auto back = BasisSet::from_json(bs.to_json());
    CHECK(back.dim == 3);
    CHECK(back.bases == bs.bases);
    CHECK(back.to_json() == bs.to_json());
    CHECK_THROWS_AS(BasisSet::from_json(R"({"dim":3,"bases":[[{"dim":1,"amps":[{"m":24,"c":["1","0","0","0","0","0","0","0"]}]}]]})"),
                    UsageError);
}
