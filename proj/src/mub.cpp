#include "cqm/mub.hpp"

#include <numeric>

#include "json.hpp"

#include "cqm/errors.hpp"
#include "cqm/galois.hpp"
#include "cqm/qgroups.hpp"

namespace cqm
{

    namespace
    {
        // e^{2 pi i e / lcm(2, m)} inside Q(zeta_m).
        Cyclotomic root(std::uint32_t m, std::int64_t e)
        {
            if (m % 2 == 0)
                return Cyclotomic::zeta(m, e);
            // zeta_{2m}^e = -zeta_{2m}^{e+m}
            return e % 2 == 0 ? Cyclotomic::zeta(m, e / 2) : -Cyclotomic::zeta(m, (e + m) / 2);
        }

        struct Spectrum
        {
            std::vector<UMatrix> powers;   // A^0 .. A^{r-1}
            std::vector<Cyclotomic> roots; // lambda with lambda^r = c, where A^r = c I
        };

        Spectrum spectrum(const UMatrix &A)
        {
            const std::uint32_t m = A.conductor();
            const std::uint32_t R = std::lcm(2u, m);
            Spectrum s;
            s.powers.push_back(UMatrix::identity(A.dim(), m));
            for (std::size_t r = 1; r <= 4 * A.dim(); ++r)
            {
                UMatrix p = s.powers.back() * A;
                if (auto c = p.as_scalar())
                {
                    auto k = c->root_of_unity_exponent();
                    if (!k)
                        throw IntegrityError("power of a commuting generator is not a root of unity");
                    for (std::uint32_t e = 0; e < R; ++e)
                        if ((static_cast<std::uint64_t>(e) * r) % R == *k)
                            s.roots.push_back(root(m, e));
                    return s;
                }
                s.powers.push_back(std::move(p));
            }
            throw UsageError("generator has no scalar power within 4 dim");
        }

        std::string prob_string(const Ray &a, const Ray &b)
        {
            auto p = prob_is_rational(a, b);
            return p ? p->to_string() : "irrational";
        }
    } // namespace

    std::string BasisSet::to_json() const
    {
        nlohmann::ordered_json j;
        j["dim"] = dim;
        j["bases"] = nlohmann::ordered_json::array();
        for (const auto &b : bases)
        {
            auto arr = nlohmann::ordered_json::array();
            for (const auto &r : b)
                arr.push_back(nlohmann::ordered_json::parse(r.to_json()));
            j["bases"].push_back(std::move(arr));
        }
        return j.dump();
    }

    BasisSet BasisSet::from_json(std::string_view text)
    {
        auto j = nlohmann::json::parse(text);
        BasisSet bs;
        bs.dim = j.at("dim").get<std::size_t>();
        for (const auto &b : j.at("bases"))
        {
            std::vector<Ray> basis;
            for (const auto &r : b)
            {
                basis.push_back(Ray::from_json(r.dump()));
                if (basis.back().dim() != bs.dim)
                    throw UsageError("ray dimension differs from the basis set dimension");
            }
            bs.bases.push_back(std::move(basis));
        }
        return bs;
    }

    std::string MubReport::to_json() const
    {
        nlohmann::ordered_json j;
        j["ok"] = ok();
        j["orthonormal"] = orthonormal;
        j["unbiased"] = unbiased;
        j["pairs_checked"] = pairs_checked;
        j["violation_count"] = violation_count;
        j["violations"] = nlohmann::ordered_json::array();
        for (const auto &v : violations)
            j["violations"].push_back({{"a", {v.basis_a, v.index_a}},
                                       {"b", {v.basis_b, v.index_b}},
                                       {"probability", v.probability},
                                       {"expected", v.expected}});
        return j.dump();
    }

    MubReport verify_mub(const BasisSet &bs, std::size_t max_listed)
    {
        MubReport rep;
        const std::size_t N = bs.dim;
        const Rational unbiased(Integer(1), Integer(static_cast<std::int64_t>(N)));
        const std::string one_over_n = unbiased.to_string();
        auto record = [&](MubViolation v, bool &flag) {
            flag = false;
            if (rep.violations.size() < max_listed)
                rep.violations.push_back(std::move(v));
            ++rep.violation_count;
        };

        for (std::size_t a = 0; a < bs.bases.size(); ++a)
        {
            const auto &A = bs.bases[a];
            if (A.size() != N)
                record({a, A.size(), a, A.size(), std::to_string(A.size()) + " rays", std::to_string(N) + " rays"},
                       rep.orthonormal);
            for (std::size_t i = 0; i < A.size(); ++i)
                for (std::size_t j = i + 1; j < A.size(); ++j)
                {
                    ++rep.pairs_checked;
                    if (!transition_probability(A[i], A[j]).is_zero())
                        record({a, i, a, j, prob_string(A[i], A[j]), "0"}, rep.orthonormal);
                }
            for (std::size_t b = a + 1; b < bs.bases.size(); ++b)
            {
                const auto &B = bs.bases[b];
                for (std::size_t i = 0; i < A.size(); ++i)
                    for (std::size_t j = 0; j < B.size(); ++j)
                    {
                        ++rep.pairs_checked;
                        auto p = prob_is_rational(A[i], B[j]);
                        if (!p || *p != unbiased)
                            record({a, i, b, j, p ? p->to_string() : "irrational", one_over_n}, rep.unbiased);
                    }
            }
        }
        return rep;
    }

    std::vector<Ray> joint_eigenbasis(const std::vector<UMatrix> &commuting)
    {
        if (commuting.empty())
            throw UsageError("empty generator family");
        const std::size_t n = commuting[0].dim();
        const std::uint32_t m = commuting[0].conductor();
        std::vector<Spectrum> specs;
        for (const auto &A : commuting)
            specs.push_back(spectrum(A));

        // Depth-first over eigenvalue choices; prune zero partial projectors.
        std::vector<Ray> out;
        auto descend = [&](auto &&self, std::size_t g, const UMatrix &proj) -> void {
            if (g == specs.size())
            {
                for (std::size_t col = 0; col < n; ++col)
                {
                    std::vector<Cyclotomic> v;
                    bool nonzero = false;
                    for (std::size_t row = 0; row < n; ++row)
                    {
                        v.push_back(proj(row, col));
                        nonzero = nonzero || !v.back().is_zero();
                    }
                    if (nonzero)
                    {
                        out.push_back(Ray::canonicalize(std::move(v)));
                        return;
                    }
                }
                return;
            }
            const auto &s = specs[g];
            for (const auto &lambda : s.roots)
            {
                // sum_t lambda^{-t} A^t is r times the eigenprojector for lambda
                UMatrix sum(n, m, MatrixKind::Operator);
                Cyclotomic coef = Cyclotomic::one(m), step = lambda.inverse();
                for (const auto &P : s.powers)
                {
                    sum = sum + P.scaled(coef);
                    coef = coef * step;
                }
                UMatrix next = proj * sum;
                next.set_kind(MatrixKind::Operator);
                bool zero = true;
                for (const auto &x : next.entries())
                    if (!x.is_zero())
                    {
                        zero = false;
                        break;
                    }
                if (!zero)
                    self(self, g + 1, next);
            }
        };
        UMatrix start = UMatrix::identity(n, m);
        start.set_kind(MatrixKind::Operator);
        descend(descend, 0, start);
        if (out.size() != n)
            throw IntegrityError("joint spectrum is not simple: " + std::to_string(out.size()) + " eigenvectors in dimension " +
                                 std::to_string(n));
        return out;
    }

    BasisSet wh_bases(std::uint32_t N, std::uint32_t m)
    {
        if (m == 0)
            m = conductor_for(N);
        BasisSet bs{N, {{}, {}}};
        auto F = fourier_matrix(N, m);
        for (std::size_t k = 0; k < N; ++k)
        {
            bs.bases[0].push_back(Ray::basis(N, k, m));
            bs.bases[1].push_back(apply(F, Ray::basis(N, k, m)));
        }
        return bs;
    }

    BasisSet mub_complete_set(std::uint32_t p, std::uint32_t l, std::uint32_t m)
    {
        if (!is_prime(p) || l == 0)
            throw UsageError("complete sets are built for prime powers p^l only");
        auto field = GaloisField::build(p, l);
        const auto N = static_cast<std::uint32_t>(field.order());
        if (m == 0)
            m = conductor_for(N);

        BasisSet bs{N, {}};
        bs.bases.emplace_back();
        for (std::size_t k = 0; k < N; ++k)
            bs.bases[0].push_back(Ray::basis(N, k, m));

        if (l == 1)
        {
            auto X = shift_matrix(N, 1, m);
            auto Z = clock_matrix(N, 1, m);
            for (std::uint32_t k = 0; k < N; ++k)
                bs.bases.push_back(joint_eigenbasis({X * Z.pow(k)}));
            return bs;
        }

        // nu runs over the monomial basis 1, x, ..., x^{l-1} of F_q over F_p
        std::vector<GFElement> nus;
        for (std::uint32_t i = 0; i < l; ++i)
        {
            std::vector<std::uint32_t> c(l, 0);
            c[i] = 1;
            nus.push_back(field.from_coeffs(std::move(c)));
        }
        for (const auto &a : field.elements())
        {
            std::vector<UMatrix> family;
            for (const auto &nu : nus)
            {
                auto [Xn, Zm] = galois_generators(field, nu, a * nu, m);
                family.push_back(Xn * Zm);
            }
            bs.bases.push_back(joint_eigenbasis(family));
        }
        return bs;
    }

    BasisSet mub_complete_set(std::uint32_t N)
    {
        if (N < 2)
            throw UsageError("dimension must be at least 2");
        std::uint32_t p = 2;
        while (N % p != 0)
            ++p;
        std::uint32_t l = 0, rest = N;
        while (rest % p == 0)
        {
            rest /= p;
            ++l;
        }
        if (rest != 1)
            throw UsageError("dimension " + std::to_string(N) + " is not a prime power");
        return mub_complete_set(p, l);
    }

    std::string MubExtraction::to_json() const
    {
        nlohmann::ordered_json j;
        j["complete"] = complete;
        j["bases_found"] = found.bases.size();
        j["leftover"] = leftover.size();
        j["unbiased_subset"] = unbiased_subset;
        j["obstruction"] = obstruction;
        j["report"] = nlohmann::ordered_json::parse(report.to_json());
        j["basis_set"] = nlohmann::ordered_json::parse(found.to_json());
        return j.dump();
    }

    MubExtraction extract_mubs_from_orbit(const std::vector<Ray> &orbit)
    {
        MubExtraction ex;
        if (orbit.empty())
        {
            ex.obstruction = "empty orbit";
            return ex;
        }
        const std::size_t N = orbit[0].dim();
        ex.found.dim = N;
        std::vector<bool> used(orbit.size(), false);
        std::string short_basis;
        for (std::size_t i = 0; i < orbit.size(); ++i)
        {
            if (used[i])
                continue;
            std::vector<std::size_t> pick{i};
            for (std::size_t j = i + 1; j < orbit.size() && pick.size() < N; ++j)
            {
                if (used[j])
                    continue;
                bool orth = true;
                for (auto k : pick)
                    if (!transition_probability(orbit[k], orbit[j]).is_zero())
                    {
                        orth = false;
                        break;
                    }
                if (orth)
                    pick.push_back(j);
            }
            if (pick.size() < N)
            {
                if (short_basis.empty())
                    short_basis = "ray " + std::to_string(i) + " completes only " + std::to_string(pick.size()) +
                                  " of " + std::to_string(N) + " orthogonal rays";
                continue;
            }
            std::vector<Ray> basis;
            for (auto k : pick)
            {
                used[k] = true;
                basis.push_back(orbit[k]);
            }
            ex.found.bases.push_back(std::move(basis));
        }
        for (std::size_t i = 0; i < orbit.size(); ++i)
            if (!used[i])
                ex.leftover.push_back(orbit[i]);

        ex.report = verify_mub(ex.found);

        const Rational unbiased(Integer(1), Integer(static_cast<std::int64_t>(N)));
        auto pair_unbiased = [&](std::size_t a, std::size_t b) {
            for (const auto &x : ex.found.bases[a])
                for (const auto &y : ex.found.bases[b])
                    if (prob_is_rational(x, y) != unbiased)
                        return false;
            return true;
        };
        for (std::size_t a = 0; a < ex.found.bases.size(); ++a)
        {
            bool ok = true;
            for (auto b : ex.unbiased_subset)
                ok = ok && pair_unbiased(b, a);
            if (ok)
                ex.unbiased_subset.push_back(a);
        }

        if (!short_basis.empty())
            ex.obstruction = short_basis;
        else if (!ex.report.unbiased)
        {
            const auto &v = ex.report.violations.front();
            ex.obstruction = std::to_string(ex.found.bases.size()) + " orthonormal bases, but bases " +
                             std::to_string(v.basis_a) + " and " + std::to_string(v.basis_b) +
                             " are not unbiased (probability " + v.probability + ", expected " + v.expected + ")";
        }
        ex.complete = ex.obstruction.empty() && ex.report.ok();
        return ex;
    }

} // namespace cqm
