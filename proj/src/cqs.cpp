#include "cqm/cqs.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <mutex>
#include <numeric>
#include <unordered_set>

#include "json.hpp"

#include "cqm/errors.hpp"
#include "cqm/parallel.hpp"
#include "cqm/qgroups.hpp"

namespace cqm
{

    CliffordAction CliffordAction::make(std::uint32_t N, std::uint32_t m)
    {
        if (N < 1)
            throw UsageError("dimension must be positive");
        if (m == 0)
            m = conductor_for(N);
        return {N, m, {shift_matrix(N, 1, m), fourier_matrix(N, m), s_matrix(N, m)}};
    }

    CliffordAction CliffordAction::lifted(std::uint32_t target) const
    {
        if (target % m != 0)
            throw UsageError("target conductor must be a multiple of the current one");
        return make(N, target);
    }

    std::vector<Ray> clifford_orbit(const Ray &seed, const CliffordAction &act)
    {
        if (seed.dim() != act.N || seed.conductor() != act.m)
            throw UsageError("seed does not match the Clifford action");
        std::vector<Ray> out{seed};
        std::unordered_set<std::string> seen{seed.key()};
        for (std::size_t i = 0; i < out.size(); ++i)
            for (const auto &g : act.gens)
            {
                Ray r = apply(g, out[i]);
                if (seen.insert(r.key()).second)
                    out.push_back(std::move(r));
            }
        return out;
    }

    std::vector<Cyclotomic> clifford_center(std::uint32_t N, std::uint32_t m)
    {
        static std::mutex mu;
        static std::map<std::uint32_t, std::uint64_t> orders;
        std::uint64_t k;
        {
            std::lock_guard lock(mu);
            auto it = orders.find(N);
            if (it == orders.end())
            {
                auto act = CliffordAction::make(N);
                auto t = group_closure(act.gens, {"X", "F", "S"}, {.projective = true});
                it = orders.emplace(N, t.scalar_order()).first;
            }
            k = it->second;
        }
        if (m % k != 0)
            throw UsageError("conductor does not contain the Clifford center");
        std::vector<Cyclotomic> out;
        for (std::uint64_t j = 0; j < k; ++j)
            out.push_back(Cyclotomic::zeta(m, static_cast<std::int64_t>(j * (m / k))));
        return out;
    }

    // ---------------------------------------------------------------- StateSet

    StateSet::StateSet(std::uint32_t N, std::uint32_t m) : N_(N), m_(m)
    {
        if (N == 0)
            throw UsageError("dimension must be positive");
        CyclotomicField::get(m);
    }

    std::optional<std::size_t> StateSet::index_of(const Ray &r) const
    {
        auto it = index_.find(r.key());
        if (it == index_.end())
            return std::nullopt;
        return it->second;
    }

    std::size_t StateSet::add_orbit(const std::vector<Ray> &orbit, std::uint32_t generation)
    {
        std::vector<std::size_t> ids;
        for (const auto &r : orbit)
        {
            if (r.dim() != N_ || r.conductor() != m_)
                throw UsageError("ray does not match the state set");
            auto [it, fresh] = index_.emplace(r.key(), states_.size());
            if (!fresh)
                continue;
            ids.push_back(states_.size());
            states_.push_back(r);
            gen_.push_back(generation);
        }
        if (!ids.empty())
            orbits_.push_back(ids);
        return ids.size();
    }

    StateSet StateSet::lifted(std::uint32_t target) const
    {
        if (target == m_)
            return *this;
        StateSet out(N_, target);
        out.gen_ = gen_;
        out.orbits_ = orbits_;
        for (std::size_t i = 0; i < states_.size(); ++i)
        {
            out.states_.push_back(states_[i].lift(target));
            out.index_.emplace(out.states_.back().key(), i);
        }
        return out;
    }

    std::string StateSet::to_json() const
    {
        struct Group
        {
            std::uint32_t generation;
            std::vector<std::pair<std::string, std::size_t>> members; // (key, index)
        };
        std::vector<Group> groups;
        for (const auto &o : orbits_)
        {
            Group g{gen_[o[0]], {}};
            for (auto i : o)
                g.members.emplace_back(states_[i].key(), i);
            std::sort(g.members.begin(), g.members.end());
            groups.push_back(std::move(g));
        }
        std::sort(groups.begin(), groups.end(), [](const Group &a, const Group &b)
                  { return std::tie(a.generation, a.members[0].first) < std::tie(b.generation, b.members[0].first); });

        nlohmann::ordered_json j;
        j["dim"] = N_;
        j["m"] = m_;
        j["size"] = states_.size();
        auto arr = nlohmann::ordered_json::array();
        for (const auto &g : groups)
        {
            nlohmann::ordered_json o;
            o["size"] = g.members.size();
            o["generation"] = g.generation;
            auto st = nlohmann::ordered_json::array();
            for (const auto &[k, i] : g.members)
                st.push_back(nlohmann::ordered_json::parse(states_[i].to_json()));
            o["states"] = std::move(st);
            arr.push_back(std::move(o));
        }
        j["orbits"] = std::move(arr);
        return j.dump();
    }

    StateSet StateSet::from_json(std::string_view text)
    {
        auto j = nlohmann::json::parse(text);
        StateSet s(j.at("dim").get<std::uint32_t>(), j.at("m").get<std::uint32_t>());
        for (const auto &o : j.at("orbits"))
        {
            std::vector<Ray> rays;
            for (const auto &r : o.at("states"))
                rays.push_back(Ray::from_json(r.dump()));
            if (s.add_orbit(rays, o.at("generation").get<std::uint32_t>()) != rays.size())
                throw UsageError("state set lists a state twice");
        }
        if (s.size() != j.at("size").get<std::size_t>())
            throw UsageError("state set size field disagrees with its states");
        return s;
    }

    // ---------------------------------------------------------------- pipeline

    namespace
    {
        Rational rational_norm(const Ray &r)
        {
            auto n = r.norm2().as_rational();
            if (!n)
                throw IntegrityError("state with irrational squared norm in a constructive set");
            return *n;
        }

        // num * den of the reduced ratio, so that sqrt(ratio) = sqrt(radicand) / den.
        Integer radicand(const Rational &ratio)
        {
            return ratio.num() * ratio.den();
        }
    } // namespace

    Candidates interference_candidates(const StateSet &current_in, unsigned threads)
    {
        const auto &states_in = current_in.states();
        const std::size_t n = states_in.size();
        std::vector<Rational> norms;
        for (const auto &r : states_in)
            norms.push_back(rational_norm(r));

        std::uint32_t M = current_in.conductor();
        std::map<std::uint64_t, Cyclotomic> roots;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
            {
                Integer rad = radicand(norms[i] / norms[j]);
                if (!rad.is_small())
                    throw ResourceError("norm ratio radicand too large", 0);
                auto v = static_cast<std::uint64_t>(rad.small_value());
                if (roots.emplace(v, Cyclotomic(1)).second)
                    M = conductor_with_sqrt(M, v);
            }
        for (auto &[v, root] : roots)
            root = sqrt_embed(v, M);

        const StateSet current = current_in.lifted(M);
        const auto &states = current.states();
        const auto phases = clifford_center(current.dim(), M);

        Candidates out{{}, {}, M};
        out.stats.pairs = n * (n - 1) / 2;

        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        pairs.reserve(out.stats.pairs);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                pairs.emplace_back(i, j);

        std::vector<std::vector<Ray>> per_pair(pairs.size());
        parallel_for(pairs.size(), threads, [&](std::size_t k)
                     {
                         auto [i, j] = pairs[k];
                         Rational ratio = norms[i] / norms[j];
                         Cyclotomic s = roots.at(static_cast<std::uint64_t>(radicand(ratio).small_value()))
                                            .scaled(Rational(Integer(1), ratio.den()));
                         for (const auto &phi : phases)
                         {
                             Cyclotomic w = phi * s;
                             std::vector<Cyclotomic> v = states[i].amps();
                             for (std::size_t t = 0; t < v.size(); ++t)
                                 if (!states[j][t].is_zero())
                                     v[t] += w * states[j][t];
                             if (std::all_of(v.begin(), v.end(), [](const Cyclotomic &x)
                                             { return x.is_zero(); }))
                                 continue;
                             per_pair[k].push_back(Ray::canonicalize(std::move(v)));
                         } });

        std::map<std::string, const Ray *> distinct;
        for (const auto &rs : per_pair)
            for (const auto &r : rs)
            {
                ++out.stats.raw;
                distinct.emplace(r.key(), &r);
            }
        out.stats.distinct = distinct.size();
        for (const auto &[key, r] : distinct)
        {
            if (current.contains(*r))
                continue;
            ++out.stats.fresh;
            out.rays.push_back(*r);
        }
        return out;
    }

    FilterResult rationality_filter(std::span<const Ray> candidates, const StateSet &existing_in, unsigned threads)
    {
        FilterResult out;
        if (candidates.empty())
            return out;
        const StateSet existing = existing_in.lifted(candidates[0].conductor());
        const auto &states = existing.states();
        std::vector<std::optional<Rejection>> verdict(candidates.size());
        parallel_for(candidates.size(), threads, [&](std::size_t c)
                     {
                         for (std::size_t i = 0; i < states.size(); ++i)
                         {
                             Cyclotomic p = transition_probability(candidates[c], states[i]);
                             if (!p.as_rational())
                             {
                                 verdict[c] = Rejection{candidates[c], i, p};
                                 return;
                             }
                         } });
        for (std::size_t c = 0; c < candidates.size(); ++c)
        {
            if (verdict[c])
                out.rejected.push_back(std::move(*verdict[c]));
            else
                out.kept.push_back(candidates[c]);
        }
        return out;
    }

    void check_cqs_requirements(const StateSet &set, const CliffordAction &act, unsigned threads)
    {
        if (set.conductor() != act.m || set.dim() != act.N)
            throw UsageError("state set and Clifford action disagree");
        const auto &states = set.states();
        for (const auto &r : states)
            for (const auto &g : act.gens)
                if (!set.contains(apply(g, r)))
                    throw IntegrityError("requirement 1 violated: set is not Clifford-invariant");
        for (std::uint32_t k = 0; k < set.dim(); ++k)
            if (!set.contains(Ray::basis(set.dim(), k, set.conductor())))
                throw IntegrityError("requirement 2 violated: ontic vector missing");
        std::vector<char> bad(states.size(), 0);
        parallel_for(states.size(), threads, [&](std::size_t i)
                     {
                         for (std::size_t j = i + 1; j < states.size(); ++j)
                             if (!prob_is_rational(states[i], states[j]))
                             {
                                 bad[i] = 1;
                                 return;
                             } });
        if (std::find(bad.begin(), bad.end(), 1) != bad.end())
            throw IntegrityError("requirement 3 violated: irrational transition probability inside the set");
    }

    std::vector<std::vector<std::size_t>> orbit_decompose(const StateSet &set, const CliffordAction &act)
    {
        std::vector<char> done(set.size(), 0);
        std::vector<std::vector<std::size_t>> out;
        for (std::size_t i = 0; i < set.size(); ++i)
        {
            if (done[i])
                continue;
            std::vector<std::size_t> ids;
            for (const auto &r : clifford_orbit(set.states()[i], act))
            {
                auto j = set.index_of(r);
                if (!j)
                    throw UsageError("state set is not closed under the Clifford action");
                done[*j] = 1;
                ids.push_back(*j);
            }
            std::sort(ids.begin(), ids.end());
            out.push_back(std::move(ids));
        }
        return out;
    }

    CqsRun cqs_continue(StateSet set, std::uint32_t steps, unsigned threads)
    {
        using clock = std::chrono::steady_clock;
        CqsRun run{std::move(set), {}};
        std::uint32_t last = 0;
        for (std::size_t i = 0; i < run.set.size(); ++i)
            last = std::max(last, run.set.generation(i));
        CliffordAction act = CliffordAction::make(run.set.dim(), run.set.conductor());
        for (std::uint32_t step = last + 1; step <= last + steps; ++step)
        {
            auto t0 = clock::now();
            StepReport rep;
            rep.step = step;
            Candidates cand = interference_candidates(run.set, threads);
            if (cand.conductor != run.set.conductor())
            {
                run.set = run.set.lifted(cand.conductor);
                act = act.lifted(cand.conductor);
            }
            rep.conductor = cand.conductor;
            rep.candidates = cand.stats;
            FilterResult f = rationality_filter(cand.rays, run.set, threads);
            rep.kept = f.kept.size();
            rep.rejected = f.rejected.size();
            for (const auto &r : f.kept)
            {
                if (run.set.contains(r))
                    continue;
                auto orbit = clifford_orbit(r, act);
                rep.added += run.set.add_orbit(orbit, step);
                rep.new_orbit_sizes.push_back(orbit.size());
            }
            std::sort(rep.new_orbit_sizes.begin(), rep.new_orbit_sizes.end());
            check_cqs_requirements(run.set, act, threads);
            rep.total = run.set.size();
            rep.seconds = std::chrono::duration<double>(clock::now() - t0).count();
            run.steps.push_back(std::move(rep));
        }
        return run;
    }

    CqsRun cqs_generate(std::uint32_t N, std::uint32_t steps, unsigned threads)
    {
        auto t0 = std::chrono::steady_clock::now();
        const std::uint32_t m = conductor_for(N);
        CliffordAction act = CliffordAction::make(N, m);
        StateSet set(N, m);
        auto orbit = clifford_orbit(Ray::basis(N, 0, m), act);
        set.add_orbit(orbit, 0);
        check_cqs_requirements(set, act, threads);
        StepReport zero;
        zero.conductor = m;
        zero.added = set.size();
        zero.new_orbit_sizes = {orbit.size()};
        zero.total = set.size();
        zero.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        CqsRun run = cqs_continue(std::move(set), steps, threads);
        run.steps.insert(run.steps.begin(), std::move(zero));
        return run;
    }

    std::string step_report_json(const StepReport &r)
    {
        nlohmann::ordered_json j;
        j["step"] = r.step;
        j["conductor"] = r.conductor;
        j["pairs"] = r.candidates.pairs;
        j["raw"] = r.candidates.raw;
        j["distinct"] = r.candidates.distinct;
        j["fresh"] = r.candidates.fresh;
        j["kept"] = r.kept;
        j["rejected"] = r.rejected;
        j["added"] = r.added;
        j["new_orbit_sizes"] = r.new_orbit_sizes;
        j["total"] = r.total;
        return j.dump();
    }

} // namespace cqm
