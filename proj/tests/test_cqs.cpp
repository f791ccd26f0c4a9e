#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>
#include <set>

#include "json.hpp"

#include "cqm/cqs.hpp"
#include "cqm/errors.hpp"
#include "cqm/qgroups.hpp"

using namespace cqm;

namespace
{
    std::set<std::string> keys(const std::vector<Ray> &rs)
    {
        std::set<std::string> s;
        for (const auto &r : rs)
            s.insert(r.key());
        return s;
    }

    std::vector<std::size_t> sizes(const std::vector<std::vector<std::size_t>> &orbits)
    {
        std::vector<std::size_t> s;
        for (const auto &o : orbits)
            s.push_back(o.size());
        std::sort(s.begin(), s.end());
        return s;
    }
} // namespace

TEST_CASE("orbit of |0>")
{
    SUBCASE("N=2 is the octahedron")
    {
        auto act = CliffordAction::make(2);
        const auto m = act.m;
        auto orbit = clifford_orbit(Ray::basis(2, 0, m), act);
        auto one = Cyclotomic::one(m), i = Cyclotomic::zeta(m, m / 4);
        std::vector<Ray> expected{Ray::basis(2, 0, m), Ray::basis(2, 1, m), Ray::canonicalize({one, one}),
                                  Ray::canonicalize({one, -one}), Ray::canonicalize({one, i}),
                                  Ray::canonicalize({one, -i})};
        CHECK(keys(orbit) == keys(expected));
        CHECK(keys(clifford_orbit(Ray::basis(2, 1, m), act)) == keys(orbit));
    }
    SUBCASE("N=3 matches the twelve listed vectors")
    {
        auto act = CliffordAction::make(3);
        const auto m = act.m;
        auto w = [&](int k)
        { return Cyclotomic::zeta(m, k * (m / 3)); };
        std::vector<Ray> expected{Ray::basis(3, 0, m), Ray::basis(3, 1, m), Ray::basis(3, 2, m)};
        for (auto [a, b] : std::vector<std::pair<int, int>>{{0, 0}, {1, 2}, {2, 1}, {2, 2}, {0, 1}, {1, 0}, {1, 1}, {0, 2}, {2, 0}})
            expected.push_back(Ray::canonicalize({w(0), w(a), w(b)}));
        auto orbit = clifford_orbit(Ray::basis(3, 0, m), act);
        CHECK(orbit.size() == 12);
        CHECK(keys(orbit) == keys(expected));
    }
}

TEST_CASE("center phases")
{
    CHECK(clifford_center(2, 24).size() == 8);
    CHECK(clifford_center(3, 24).size() == 12);
    CHECK_THROWS_AS(clifford_center(3, 8), UsageError);
}

TEST_CASE("N=2 generation")
{
    auto run = cqs_generate(2, 2);
    REQUIRE(run.steps.size() == 3);
    CHECK(run.steps[0].total == 6);
    const auto &s1 = run.steps[1];
    CHECK(s1.candidates.pairs == 15);
    CHECK(s1.kept == 24);
    CHECK(s1.kept + s1.rejected == s1.candidates.fresh);
    CHECK(s1.new_orbit_sizes == std::vector<std::size_t>{24});
    CHECK(s1.total == 30);
    const auto &s2 = run.steps[2];
    CHECK(s2.new_orbit_sizes == std::vector<std::size_t>(16, 24));
    CHECK(s2.total == 414);
    CHECK(s2.conductor == 120);

    auto act = CliffordAction::make(2, run.set.conductor());
    auto orbits = orbit_decompose(run.set, act);
    for (auto s : sizes(orbits))
        CHECK(24 % s == 0);
    CHECK(sizes(orbits) == sizes(run.set.orbits()));
    check_cqs_requirements(run.set, act);

    // monotone: earlier steps are contained in later ones
    auto earlier = cqs_generate(2, 1);
    for (const auto &r : earlier.set.states())
        CHECK(run.set.contains(r.lift(run.set.conductor())));
}

TEST_CASE("N=3 generation")
{
    auto run = cqs_generate(3, 1);
    CHECK(run.steps[0].total == 12);
    CHECK(run.steps[1].kept == 153);
    CHECK(run.steps[1].new_orbit_sizes == std::vector<std::size_t>{9, 36, 108});
    CHECK(run.steps[1].total == 165);
    auto act = CliffordAction::make(3, run.set.conductor());
    for (auto s : sizes(orbit_decompose(run.set, act)))
        CHECK(216 % s == 0);
}

TEST_CASE("filter semantics")
{
    auto act = CliffordAction::make(2);
    StateSet s(2, act.m);
    s.add_orbit(clifford_orbit(Ray::basis(2, 0, act.m), act), 0);
    auto cand = interference_candidates(s);
    CHECK(cand.stats.raw == 120);
    CHECK(cand.stats.distinct == 66);
    auto f = rationality_filter(cand.rays, s);
    for (const auto &r : f.rejected)
    {
        CHECK_FALSE(r.probability.as_rational().has_value());
        CHECK(transition_probability(r.candidate, s.states()[r.witness]) == r.probability);
    }
    // existing states pass trivially
    auto again = rationality_filter(s.states(), s);
    CHECK(again.kept.size() == s.size());

    // result does not depend on candidate order
    std::vector<Ray> shuffled = cand.rays;
    std::mt19937 rng(3);
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(keys(rationality_filter(shuffled, s, 3).kept) == keys(f.kept));
}

TEST_CASE("thread count does not change the result")
{
    auto a = cqs_generate(2, 2, 1), b = cqs_generate(2, 2, 4);
    CHECK(a.set.to_json() == b.set.to_json());
}

TEST_CASE("requirements are asserted")
{
    auto act = CliffordAction::make(2);
    StateSet s(2, act.m);
    s.add_orbit({Ray::basis(2, 0, act.m)}, 0);
    CHECK_THROWS_AS(check_cqs_requirements(s, act), IntegrityError);
    CHECK_THROWS_AS(orbit_decompose(s, act), UsageError);

    StateSet t(2, act.m);
    t.add_orbit(clifford_orbit(Ray::basis(2, 0, act.m), act), 0);
    auto bad = Ray::canonicalize({Cyclotomic::one(act.m), Cyclotomic::zeta(act.m, 3)});
    t.add_orbit(clifford_orbit(bad, act), 1);
    CHECK_THROWS_AS(check_cqs_requirements(t, act), IntegrityError);
}

TEST_CASE("state set serialization and resume")
{
    auto run = cqs_generate(2, 1);
    auto text = run.set.to_json();
    auto back = StateSet::from_json(text);
    CHECK(back.to_json() == text);
    CHECK(back.size() == 30);
    auto j = nlohmann::json::parse(text);
    CHECK(j["orbits"].size() == 2);
    CHECK(j["orbits"][0]["generation"] == 0);

    auto resumed = cqs_continue(back, 1);
    CHECK(resumed.steps.size() == 1);
    CHECK(resumed.steps[0].step == 2);
    CHECK(resumed.set.size() == 414);
    CHECK(resumed.set.to_json() == cqs_generate(2, 2).set.to_json());
}
