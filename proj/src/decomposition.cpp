#include "cqm/decomposition.hpp"

#include <chrono>

#include "json.hpp"

#include "cqm/errors.hpp"

namespace cqm
{

    namespace
    {
        // Inverse of a mod n (gcd(a, n) = 1, n >= 1).
        std::uint64_t inverse_mod(std::uint64_t a, std::uint64_t n)
        {
            if (n == 1)
                return 0;
            std::int64_t t = 0, nt = 1, r = static_cast<std::int64_t>(n), nr = static_cast<std::int64_t>(a % n);
            while (nr != 0)
            {
                std::int64_t qt = r / nr;
                t = std::exchange(nt, t - qt * nt);
                r = std::exchange(nr, r - qt * nr);
            }
            if (r != 1)
                throw IntegrityError("CRT cofactor is not invertible");
            return static_cast<std::uint64_t>(t < 0 ? t + static_cast<std::int64_t>(n) : t);
        }

        double since(std::chrono::steady_clock::time_point t0)
        {
            return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
    } // namespace

    CrtSplit crt_split(std::uint32_t N)
    {
        if (N < 2)
            throw UsageError("CRT split needs N >= 2");
        CrtSplit s{N, {}, {}, {}};
        std::uint32_t rest = N;
        for (std::uint32_t p = 2; static_cast<std::uint64_t>(p) * p <= rest; ++p)
        {
            if (rest % p != 0)
                continue;
            std::uint32_t q = 1;
            while (rest % p == 0)
            {
                rest /= p;
                q *= p;
            }
            s.factors.push_back(q);
            s.primes.push_back(p);
        }
        if (rest > 1)
        {
            s.factors.push_back(rest);
            s.primes.push_back(rest);
        }
        for (auto n : s.factors)
            s.dual_units.push_back(static_cast<std::uint32_t>(inverse_mod(N / n, n)));
        return s;
    }

    std::vector<std::uint32_t> CrtSplit::forward(std::uint64_t k) const
    {
        std::vector<std::uint32_t> c;
        for (auto n : factors)
            c.push_back(static_cast<std::uint32_t>(k % n));
        return c;
    }

    std::uint64_t CrtSplit::from_forward(const std::vector<std::uint32_t> &c) const
    {
        if (c.size() != factors.size())
            throw UsageError("component count differs from factor count");
        // k = sum c_i (N/n_i) u_i mod N
        std::uint64_t k = 0;
        for (std::size_t i = 0; i < factors.size(); ++i)
            k = (k + static_cast<std::uint64_t>(c[i] % factors[i]) * (N / factors[i]) % N * dual_units[i]) % N;
        return k;
    }

    std::vector<std::uint32_t> CrtSplit::dual(std::uint64_t k) const
    {
        std::vector<std::uint32_t> c;
        for (std::size_t i = 0; i < factors.size(); ++i)
            c.push_back(static_cast<std::uint32_t>(k % factors[i] * dual_units[i] % factors[i]));
        return c;
    }

    std::uint64_t CrtSplit::from_dual(const std::vector<std::uint32_t> &c) const
    {
        if (c.size() != factors.size())
            throw UsageError("component count differs from factor count");
        // dual component c_i = k u_i, so k mod n_i = c_i (N/n_i) mod n_i
        std::vector<std::uint32_t> f;
        for (std::size_t i = 0; i < factors.size(); ++i)
            f.push_back(static_cast<std::uint32_t>(static_cast<std::uint64_t>(c[i]) * (N / factors[i]) % factors[i]));
        return from_forward(f);
    }

    std::uint64_t CrtSplit::tensor_index(const std::vector<std::uint32_t> &c) const
    {
        std::uint64_t idx = 0;
        for (std::size_t i = 0; i < factors.size(); ++i)
            idx = idx * factors[i] + c[i];
        return idx;
    }

    UMatrix crt_permutation(const CrtSplit &split, std::uint32_t m)
    {
        if (m == 0)
            m = conductor_for(split.N);
        std::vector<std::size_t> perm(split.N);
        for (std::uint32_t k = 0; k < split.N; ++k)
            perm[k] = static_cast<std::size_t>(split.tensor_index(split.forward(k)));
        return UMatrix::permutation(perm, m);
    }

    UMatrix embed_local(const CrtSplit &split, std::size_t factor, const UMatrix &g)
    {
        if (factor >= split.factors.size() || g.dim() != split.factors[factor])
            throw UsageError("local generator does not match the factor dimension");
        const std::uint32_t m = g.conductor();
        UMatrix r = UMatrix::identity(1, m);
        for (std::size_t i = 0; i < split.factors.size(); ++i)
            r = r.tensor(i == factor ? g : UMatrix::identity(split.factors[i], m));
        return r;
    }

    std::vector<EnergyLevel> energy_decompose(std::uint64_t k, const CrtSplit &split)
    {
        if (k >= split.N)
            throw UsageError("energy level index out of range");
        std::vector<EnergyLevel> out;
        auto c = split.dual(k);
        for (std::size_t i = 0; i < c.size(); ++i)
            out.push_back({c[i], split.factors[i], Rational(Integer(c[i]), Integer(split.factors[i]))});
        return out;
    }

    bool energy_identity_holds(std::uint64_t k, const CrtSplit &split)
    {
        Rational sum(0);
        for (const auto &e : energy_decompose(k, split))
            sum = sum + e.frequency;
        return (sum - Rational(Integer(k), Integer(split.N))).is_integer();
    }

    std::string ProductReport::to_json() const
    {
        nlohmann::ordered_json j;
        j["N"] = split.N;
        j["factors"] = split.factors;
        j["skipped"] = skipped;
        if (!skipped)
        {
            j["local_orders"] = local_orders;
            j["local_projective_orders"] = local_projective_orders;
            j["direct_product_order"] = direct_product_order;
            j["direct_product_projective_order"] = direct_product_projective;
            j["projective_order"] = projective_order;
            j["scalar_order"] = scalar_order;
            j["full_closure_order"] = full_order ? nlohmann::ordered_json(*full_order) : nlohmann::ordered_json();
            j["order"] = order;
            j["order_matches_direct_product"] = order_matches();
            j["projective_matches_direct_product"] = projective_matches();
            j["local_group_order"] = local_group_order;
            j["shift_factorizes"] = shift_factorizes;
            nlohmann::ordered_json mem;
            for (const auto &[name, ok] : membership)
                mem[name] = ok;
            j["membership"] = std::move(mem);
        }
        return j.dump();
    }

    ProductReport clifford_product_check(std::uint32_t N, const ProductCheckOptions &opt)
    {
        ProductReport rep;
        rep.split = crt_split(N);
        if (rep.split.factors.size() < 2)
        {
            rep.skipped = true;
            return rep;
        }
        const std::uint32_t m = conductor_for(N);
        const auto &split = rep.split;

        UMatrix P = crt_permutation(split, m);
        UMatrix Pinv = P.inverse();

        UMatrix shifts = UMatrix::identity(1, m);
        for (auto n : split.factors)
            shifts = shifts.tensor(shift_matrix(n, 1, m));
        rep.shift_factorizes = P * shift_matrix(N, 1, m) * Pinv == shifts;

        ClosureOptions proj{.projective = true, .max_size = opt.max_size, .threads = opt.threads};
        ClosureOptions full{.projective = false, .max_size = opt.max_size, .threads = opt.threads};
        const std::vector<std::string> names{"X", "F", "S"};

        std::vector<UMatrix> local_gens;
        rep.direct_product_order = rep.direct_product_projective = 1;
        for (std::size_t i = 0; i < split.factors.size(); ++i)
        {
            const std::uint32_t n = split.factors[i];
            std::vector<UMatrix> g{shift_matrix(n, 1, m), fourier_matrix(n, m), s_matrix(n, m)};
            auto pt = group_closure(g, names, proj);
            rep.local_projective_orders.push_back(pt.order());
            rep.local_orders.push_back(pt.order() * pt.scalar_order());
            rep.direct_product_order *= rep.local_orders.back();
            rep.direct_product_projective *= pt.order();
            for (const auto &x : g)
                local_gens.push_back(embed_local(split, i, x));
        }
        auto local = group_closure(local_gens, {}, proj);
        rep.local_group_order = local.order() * local.scalar_order();

        std::vector<UMatrix> global{shift_matrix(N, 1, m), fourier_matrix(N, m), s_matrix(N, m)};
        for (std::size_t k = 0; k < global.size(); ++k)
            rep.membership.emplace_back(names[k], local.contains_linear(P * global[k] * Pinv));

        auto t0 = std::chrono::steady_clock::now();
        auto pg = group_closure(global, names, proj);
        rep.projective_order = pg.order();
        rep.scalar_order = pg.scalar_order();
        rep.seconds_projective = since(t0);
        rep.order = rep.projective_order * rep.scalar_order;

        if (opt.full)
        {
            t0 = std::chrono::steady_clock::now();
            try
            {
                rep.full_order = group_closure(global, names, full).order();
                rep.order = *rep.full_order;
            }
            catch (const ResourceError &)
            {
            }
            rep.seconds_full = since(t0);
        }
        return rep;
    }

} // namespace cqm
