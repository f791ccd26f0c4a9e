#include "cqm/qgroups.hpp"

#include <algorithm>
#include <exception>
#include <numeric>
#include <thread>

#include "json.hpp"

#include "cqm/errors.hpp"

namespace cqm
{

    namespace
    {
        std::uint32_t resolve(std::uint32_t N, std::uint32_t m)
        {
            if (N == 0)
                throw UsageError("dimension must be positive");
            return m == 0 ? conductor_for(N) : m;
        }

        std::int64_t mod(std::int64_t a, std::int64_t n)
        {
            std::int64_t r = a % n;
            return r < 0 ? r + n : r;
        }

        std::uint64_t key_hash(std::string_view k)
        {
            return std::hash<std::string_view>{}(k);
        }
    } // namespace

    Cyclotomic tau(std::uint32_t N, std::uint32_t m)
    {
        if (N == 0 || m % (2 * N) != 0)
            throw UsageError("conductor " + std::to_string(m) + " does not contain zeta_" + std::to_string(2 * N));
        return -Cyclotomic::zeta(m, m / (2 * N));
    }

    Cyclotomic omega(std::uint32_t N, std::uint32_t m)
    {
        if (N == 0 || m % N != 0)
            throw UsageError("conductor " + std::to_string(m) + " does not contain zeta_" + std::to_string(N));
        return Cyclotomic::zeta(m, m / N);
    }

    std::uint32_t tau_order(std::uint32_t N)
    {
        return N % 2 == 1 ? N : 2 * N;
    }

    UMatrix shift_matrix(std::uint32_t N, std::int64_t v, std::uint32_t m)
    {
        m = resolve(N, m);
        std::vector<std::size_t> perm(N);
        for (std::uint32_t j = 0; j < N; ++j)
            perm[j] = static_cast<std::size_t>(mod(j + v, N));
        return UMatrix::permutation(perm, m);
    }

    UMatrix clock_matrix(std::uint32_t N, std::int64_t v, std::uint32_t m)
    {
        m = resolve(N, m);
        omega(N, m);
        std::vector<Cyclotomic> d;
        for (std::uint32_t j = 0; j < N; ++j)
            d.push_back(Cyclotomic::zeta(m, static_cast<std::int64_t>(m / N) * mod(v * j, N)));
        return UMatrix::diagonal(std::move(d));
    }

    WeylHeisenberg wh_generators(std::uint32_t N, std::uint32_t m)
    {
        m = resolve(N, m);
        return {tau(N, m), shift_matrix(N, 1, m), clock_matrix(N, 1, m)};
    }

    UMatrix fourier_matrix(std::uint32_t N, std::uint32_t m)
    {
        m = resolve(N, m);
        omega(N, m);
        const Cyclotomic inv_sqrt = sqrt_embed(N, m).inverse();
        std::vector<Cyclotomic> e;
        e.reserve(std::size_t{N} * N);
        for (std::uint32_t i = 0; i < N; ++i)
            for (std::uint32_t j = 0; j < N; ++j)
                e.push_back(inv_sqrt.times_zeta(static_cast<std::int64_t>(m / N) * ((std::int64_t{i} * j) % N)));
        return UMatrix(N, std::move(e));
    }

    UMatrix s_matrix(std::uint32_t N, std::uint32_t m)
    {
        m = resolve(N, m);
        const Cyclotomic t = tau(N, m);
        const std::int64_t ord = tau_order(N);
        std::vector<Cyclotomic> d;
        for (std::int64_t i = 0; i < N; ++i)
            d.push_back(t.pow(mod(i * (i + N), ord)));
        return UMatrix::diagonal(std::move(d));
    }

    UMatrix position_operator(std::uint32_t N, std::uint32_t m)
    {
        m = resolve(N, m);
        std::vector<Cyclotomic> d;
        for (std::uint32_t i = 0; i < N; ++i)
            d.push_back(Cyclotomic::from_rational(m, Rational(i)));
        return UMatrix::diagonal(std::move(d), MatrixKind::Operator);
    }

    WeylReport check_weyl_relation(std::uint32_t N, std::uint32_t m)
    {
        auto g = wh_generators(N, m);
        UMatrix zx = g.Z * g.X;
        UMatrix wxz = (g.X * g.Z).scaled(omega(N, g.X.conductor()));
        return {zx == wxz, std::move(zx), std::move(wxz)};
    }

    UMatrix displacement(std::uint32_t N, std::int64_t p1, std::int64_t p2, std::uint32_t m)
    {
        m = resolve(N, m);
        const Cyclotomic phase = tau(N, m).pow(mod(p1 * p2, tau_order(N)));
        // X^{p1} Z^{p2} has entry omega^{p2 j} at (j + p1, j).
        std::vector<Cyclotomic> e(std::size_t{N} * N, Cyclotomic(m));
        for (std::int64_t j = 0; j < N; ++j)
        {
            std::int64_t row = mod(j + p1, N);
            e[row * N + j] = phase.times_zeta(static_cast<std::int64_t>(m / N) * mod(p2 * j, N));
        }
        return UMatrix(N, std::move(e));
    }

    std::int64_t symplectic_form(std::pair<std::int64_t, std::int64_t> p, std::pair<std::int64_t, std::int64_t> q,
                                 std::uint32_t N)
    {
        if (N == 0)
            throw UsageError("dimension must be positive");
        return mod(p.second * q.first - p.first * q.second, tau_order(N));
    }

    std::pair<UMatrix, UMatrix> galois_generators(const GaloisField &field, const GFElement &nu, const GFElement &mu,
                                                  std::uint32_t m)
    {
        if (!(nu.field() == field) || !(mu.field() == field))
            throw UsageError("shift and phase parameters must lie in the given field");
        const auto q = static_cast<std::uint32_t>(field.order());
        const std::uint32_t p = field.characteristic();
        m = resolve(q, m);
        if (m % p != 0)
            throw UsageError("conductor does not contain zeta_p");
        std::vector<std::size_t> perm(q);
        std::vector<Cyclotomic> d;
        for (std::uint32_t g = 0; g < q; ++g)
        {
            GFElement gamma = field.element(g);
            perm[g] = static_cast<std::size_t>((gamma + nu).index());
            std::uint32_t t = (mu * gamma).trace(1).prime_value();
            d.push_back(Cyclotomic::zeta(m, static_cast<std::int64_t>(m / p) * t));
        }
        return {UMatrix::permutation(perm, m), UMatrix::diagonal(std::move(d))};
    }

    std::uint64_t evolve_ontic(std::int64_t x0, std::int64_t v, std::int64_t t, std::uint32_t N)
    {
        if (N == 0)
            throw UsageError("dimension must be positive");
        if (std::gcd(mod(v, N), std::int64_t{N}) != 1)
            throw UsageError("velocity must be coprime to N");
        // (x0 + v t) mod N without overflow
        __int128 r = (static_cast<__int128>(mod(v, N)) * mod(t, N) + mod(x0, N)) % N;
        return static_cast<std::uint64_t>(r);
    }

    // ---------------------------------------------------------------- closure

    UMatrix GroupTable::element(std::size_t i) const
    {
        return UMatrix::from_key(dim_, *field_, element_key(i));
    }

    std::string_view GroupTable::element_key(std::size_t i) const
    {
        if (i >= order())
            throw UsageError("group element index out of range");
        return std::string_view(arena_).substr(offsets_[i], offsets_[i + 1] - offsets_[i]);
    }

    std::vector<std::size_t> GroupTable::word(std::size_t i) const
    {
        if (i >= order())
            throw UsageError("group element index out of range");
        std::vector<std::size_t> w;
        while (i != 0)
        {
            w.push_back(gen_[i]);
            i = parent_[i];
        }
        std::reverse(w.begin(), w.end());
        return w;
    }

    std::optional<std::size_t> GroupTable::find(std::string_view key, std::uint64_t h) const
    {
        const std::size_t mask = slots_.size() - 1;
        for (std::size_t s = h & mask;; s = (s + 1) & mask)
        {
            std::uint32_t v = slots_[s];
            if (v == 0)
                return std::nullopt;
            if (hashes_[v - 1] == h && element_key(v - 1) == key)
                return v - 1;
        }
    }

    void GroupTable::grow()
    {
        std::vector<std::uint32_t> next(std::max<std::size_t>(64, slots_.size() * 2), 0);
        const std::size_t mask = next.size() - 1;
        for (std::size_t i = 0; i < hashes_.size(); ++i)
        {
            std::size_t s = hashes_[i] & mask;
            while (next[s] != 0)
                s = (s + 1) & mask;
            next[s] = static_cast<std::uint32_t>(i + 1);
        }
        slots_ = std::move(next);
    }

    std::size_t GroupTable::insert(std::string_view key, std::uint64_t h, std::size_t parent, std::size_t gen)
    {
        if (2 * (hashes_.size() + 1) > slots_.size())
            grow();
        const std::size_t idx = hashes_.size();
        arena_.append(key);
        offsets_.push_back(arena_.size());
        hashes_.push_back(h);
        parent_.push_back(static_cast<std::uint32_t>(parent));
        gen_.push_back(static_cast<std::uint16_t>(gen));
        const std::size_t mask = slots_.size() - 1;
        std::size_t s = h & mask;
        while (slots_[s] != 0)
            s = (s + 1) & mask;
        slots_[s] = static_cast<std::uint32_t>(idx + 1);
        return idx;
    }

    std::optional<std::size_t> GroupTable::index_of(const UMatrix &m) const
    {
        if (m.dim() != dim_)
            return std::nullopt;
        UMatrix c = m.conductor() == conductor() ? m : m.lift(conductor());
        std::string key = projective_ ? scalar_canonical(c).canonical.key() : c.key();
        return find(key, key_hash(key));
    }

    bool GroupTable::contains_linear(const UMatrix &m) const
    {
        if (!projective_)
            return contains(m);
        if (m.dim() != dim_)
            return false;
        UMatrix c = m.conductor() == conductor() ? m : m.lift(conductor());
        ProjectiveForm f = scalar_canonical(c);
        std::string key = f.canonical.key();
        auto hit = find(key, key_hash(key));
        if (!hit)
            return false;
        // m = f.scale * rep, and the group holds scale_[hit] * rep
        auto e = (f.scale * inv_scale_[*hit]).root_of_unity_exponent();
        return e && *e % scalar_gcd_ == 0;
    }

    std::uint64_t GroupTable::scalar_order() const
    {
        if (!projective_)
            throw UsageError("scalar_order is tracked by projective closures only");
        return std::lcm<std::uint32_t>(2, conductor()) / scalar_gcd_;
    }

    std::vector<std::uint32_t> GroupTable::scalar_exponents() const
    {
        std::vector<std::uint32_t> out;
        const std::uint32_t r = std::lcm<std::uint32_t>(2, conductor());
        for (std::uint32_t e = 0; e < r; e += scalar_gcd_)
            out.push_back(e);
        return out;
    }

    std::string GroupTable::to_json(bool with_elements) const
    {
        nlohmann::ordered_json j;
        j["dim"] = dim_;
        j["projective"] = projective_;
        j["order"] = order();
        j["generators"] = names_;
        if (with_elements)
        {
            std::vector<std::size_t> idx(order());
            std::iota(idx.begin(), idx.end(), 0);
            std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b)
                      { return element_key(a) < element_key(b); });
            auto arr = nlohmann::ordered_json::array();
            for (std::size_t i : idx)
                arr.push_back(nlohmann::ordered_json::parse(element(i).to_json()));
            j["elements"] = std::move(arr);
        }
        return j.dump();
    }

    namespace
    {
        struct Candidate
        {
            std::string key;
            std::uint64_t hash = 0;
            std::optional<Cyclotomic> scale, inv_scale; // projective only; absent means 1
        };

        constexpr std::size_t kBlock = 2048;
    } // namespace

    GroupTable group_closure(std::span<const UMatrix> generators, std::vector<std::string> names,
                             const ClosureOptions &options)
    {
        if (generators.empty())
            throw UsageError("closure needs at least one generator");
        if (generators.size() > 65535)
            throw UsageError("too many generators");
        const UMatrix &g0 = generators[0];
        for (const auto &g : generators)
        {
            if (g.dim() != g0.dim() || g.conductor() != g0.conductor())
                throw UsageError("generators must share dimension and conductor");
            if (g.kind() != MatrixKind::Unitary || !g.is_unitary())
                throw UsageError("closure generators must be unitary");
        }
        if (names.empty())
            for (std::size_t k = 0; k < generators.size(); ++k)
                names.push_back("g" + std::to_string(k));
        if (names.size() != generators.size())
            throw UsageError("one name per generator");

        GroupTable t;
        t.dim_ = g0.dim();
        t.field_ = &g0.field();
        t.projective_ = options.projective;
        t.names_ = std::move(names);
        const std::uint32_t m = g0.conductor();
        t.scalar_gcd_ = std::lcm<std::uint32_t>(2, m);

        {
            std::string k = UMatrix::identity(t.dim_, m).key();
            t.insert(k, key_hash(k), 0, 0);
            if (t.projective_)
            {
                t.scale_.push_back(Cyclotomic::one(m));
                t.inv_scale_.push_back(Cyclotomic::one(m));
            }
        }

        const std::size_t ng = generators.size();
        const unsigned threads = std::max(1u, options.threads);
        std::size_t begin = 0, end = 1;
        std::vector<Candidate> cand;
        while (begin < end)
        {
            for (std::size_t b0 = begin; b0 < end; b0 += kBlock)
            {
                const std::size_t b1 = std::min(end, b0 + kBlock);
                cand.assign((b1 - b0) * ng, Candidate{});
                auto work = [&](std::size_t lo, std::size_t step)
                {
                    for (std::size_t i = b0 + lo; i < b1; i += step)
                    {
                        UMatrix e = t.element(i);
                        for (std::size_t g = 0; g < ng; ++g)
                        {
                            UMatrix p = e * generators[g];
                            Candidate &c = cand[(i - b0) * ng + g];
                            if (t.projective_)
                            {
                                const Cyclotomic &s = p.first_nonzero();
                                if (!s.is_one())
                                {
                                    c.scale = s;
                                    c.inv_scale = s.inverse();
                                    p = p.scaled(*c.inv_scale);
                                }
                            }
                            c.key = p.key();
                            c.hash = key_hash(c.key);
                        }
                    }
                };
                if (threads == 1 || b1 - b0 < 2)
                    work(0, 1);
                else
                {
                    const unsigned nt = static_cast<unsigned>(std::min<std::size_t>(threads, b1 - b0));
                    std::vector<std::exception_ptr> errs(nt);
                    std::vector<std::thread> pool;
                    for (unsigned w = 0; w < nt; ++w)
                        pool.emplace_back([&, w]
                                          {
                                              try
                                              {
                                                  work(w, nt);
                                              }
                                              catch (...)
                                              {
                                                  errs[w] = std::current_exception();
                                              } });
                    for (auto &th : pool)
                        th.join();
                    for (auto &e : errs)
                        if (e)
                            std::rethrow_exception(e);
                }

                // Sequential insertion in (element, generator) order keeps the result deterministic.
                for (std::size_t i = b0; i < b1; ++i)
                    for (std::size_t g = 0; g < ng; ++g)
                    {
                        Candidate &c = cand[(i - b0) * ng + g];
                        auto hit = t.find(c.key, c.hash);
                        if (!hit)
                        {
                            if (t.order() >= options.max_size)
                                throw ResourceError("closure exceeded max_size " + std::to_string(options.max_size),
                                                    t.order());
                            t.insert(c.key, c.hash, i, g);
                            if (t.projective_)
                            {
                                t.scale_.push_back(c.scale ? t.scale_[i] * *c.scale : t.scale_[i]);
                                t.inv_scale_.push_back(c.inv_scale ? t.inv_scale_[i] * *c.inv_scale
                                                                   : t.inv_scale_[i]);
                            }
                        }
                        else if (t.projective_)
                        {
                            // actual product = scale_i * s * rep_hit, rep_hit = scale_hit^{-1} * element_hit
                            Cyclotomic ratio = t.scale_[i] * t.inv_scale_[*hit];
                            if (c.scale)
                                ratio = ratio * *c.scale;
                            if (ratio.is_one())
                                continue;
                            auto e = ratio.root_of_unity_exponent();
                            if (!e)
                                throw IntegrityError("scalar ratio in a unitary closure is not a root of unity");
                            t.scalar_gcd_ = std::gcd(t.scalar_gcd_, *e);
                        }
                    }
            }
            begin = end;
            end = t.order();
        }
        return t;
    }

    std::vector<Cyclotomic> center_of(const GroupTable &table)
    {
        if (table.projective())
            throw UsageError("center_of needs a non-projective table");
        std::vector<Cyclotomic> out;
        for (std::size_t i = 0; i < table.order(); ++i)
        {
            UMatrix e = table.element(i);
            if (auto s = e.as_scalar())
                out.push_back(std::move(*s));
        }
        return out;
    }

} // namespace cqm
