#include "cqm/cyclotomic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>
#include <ostream>

#include "json.hpp"

#include "cqm/errors.hpp"

namespace cqm
{

    namespace
    {
        using Poly = std::vector<std::int64_t>;

        std::int64_t checked_mul(std::int64_t a, std::int64_t b)
        {
            std::int64_t r;
            if (__builtin_mul_overflow(a, b, &r))
                throw ArithmeticError("cyclotomic polynomial coefficient overflow");
            return r;
        }

        // Exact quotient of a by the monic polynomial b.
        Poly poly_divexact(Poly a, const Poly &b)
        {
            const std::size_t db = b.size() - 1;
            if (a.size() < b.size())
                throw ArithmeticError("polynomial division: dividend degree too small");
            Poly q(a.size() - db, 0);
            for (std::size_t k = a.size(); k-- > db;)
            {
                std::int64_t c = a[k];
                q[k - db] = c;
                if (c == 0)
                    continue;
                for (std::size_t j = 0; j <= db; ++j)
                    a[k - db + j] -= checked_mul(c, b[j]);
            }
            for (std::size_t j = 0; j < db; ++j)
                if (a[j] != 0)
                    throw ArithmeticError("polynomial division is not exact");
            return q;
        }

        Poly cyclotomic_rec(std::uint32_t m, std::map<std::uint32_t, Poly> &memo)
        {
            if (auto it = memo.find(m); it != memo.end())
                return it->second;
            Poly p(m + 1, 0);
            p[0] = -1;
            p[m] = 1;
            for (std::uint32_t d = 1; d < m; ++d)
                if (m % d == 0)
                    p = poly_divexact(std::move(p), cyclotomic_rec(d, memo));
            memo.emplace(m, p);
            return p;
        }

        std::int64_t pos_mod(std::int64_t a, std::int64_t m)
        {
            std::int64_t r = a % m;
            return r < 0 ? r + m : r;
        }

        Integer from_int128(__int128 v)
        {
            if (v >= INT64_MIN && v <= INT64_MAX)
                return Integer(static_cast<std::int64_t>(v));
            bool neg = v < 0;
            unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(v + 1)) + 1 : static_cast<unsigned __int128>(v);
            mpz_class hi(static_cast<unsigned long>(u >> 64));
            mpz_class lo(static_cast<unsigned long>(u & 0xffffffffffffffffULL));
            mpz_class r = (hi << 64) + lo;
            if (neg)
                r = -r;
            return Integer(r);
        }

        double magnitude(const Cyclotomic::Coeffs &v, bool &all_small)
        {
            double m = 0.0;
            all_small = true;
            for (const auto &x : v)
            {
                if (!x.is_small())
                {
                    all_small = false;
                    return 0.0;
                }
                m = std::max(m, std::fabs(static_cast<double>(x.small_value())));
            }
            return m;
        }

        constexpr double kInt128Safe = 4.0e37; // comfortably below 2^127

        // sum_j num[j] * zeta^{stride*j + shift}, reduced.
        Cyclotomic::Coeffs permute_powers(const CyclotomicField &f, const Cyclotomic::Coeffs &num,
                                          std::int64_t stride, std::int64_t shift)
        {
            const std::size_t phi = f.degree();
            const auto m = static_cast<std::int64_t>(f.conductor());
            bool small;
            double mag = magnitude(num, small);
            Cyclotomic::Coeffs out(phi, Integer(0));
            if (small && mag * static_cast<double>(phi) * (1.0 + f.reduction_growth()) < kInt128Safe)
            {
                thread_local std::vector<__int128> acc;
                acc.assign(phi, 0);
                for (std::size_t j = 0; j < phi; ++j)
                {
                    std::int64_t c = num[j].small_value();
                    if (c == 0)
                        continue;
                    auto row = f.power(pos_mod(stride * static_cast<std::int64_t>(j) + shift, m));
                    for (std::size_t i = 0; i < phi; ++i)
                        if (row[i] != 0)
                            acc[i] += static_cast<__int128>(c) * row[i];
                }
                for (std::size_t i = 0; i < phi; ++i)
                    out[i] = from_int128(acc[i]);
                return out;
            }
            for (std::size_t j = 0; j < phi; ++j)
            {
                if (num[j].is_zero())
                    continue;
                auto row = f.power(pos_mod(stride * static_cast<std::int64_t>(j) + shift, m));
                for (std::size_t i = 0; i < phi; ++i)
                    if (row[i] != 0)
                        out[i] += num[j] * Integer(row[i]);
            }
            return out;
        }

        std::uint64_t powmod(std::uint64_t b, std::uint64_t e, std::uint64_t m)
        {
            unsigned __int128 r = 1, x = b % m;
            while (e)
            {
                if (e & 1)
                    r = r * x % m;
                x = x * x % m;
                e >>= 1;
            }
            return static_cast<std::uint64_t>(r);
        }

        struct SqrtShape
        {
            std::uint64_t square = 1;       // s with n = s^2 * core
            std::vector<std::uint64_t> odd; // odd primes of the squarefree core
            bool two = false;               // 2 divides the core
            bool negative = false;          // product of Gauss sums squares to -core
        };

        SqrtShape sqrt_shape(std::uint64_t n)
        {
            SqrtShape s;
            std::uint64_t rest = n;
            for (std::uint64_t p = 2; p * p <= rest; ++p)
            {
                int e = 0;
                while (rest % p == 0)
                {
                    rest /= p;
                    ++e;
                }
                for (int i = 0; i < e / 2; ++i)
                    s.square *= p;
                if (e % 2 == 1)
                {
                    if (p == 2)
                        s.two = true;
                    else
                        s.odd.push_back(p);
                }
            }
            if (rest > 1)
            {
                if (rest == 2)
                    s.two = true;
                else
                    s.odd.push_back(rest);
            }
            std::size_t minus = std::count_if(s.odd.begin(), s.odd.end(), [](auto p)
                                              { return p % 4 == 3; });
            s.negative = minus % 2 == 1;
            return s;
        }

        std::uint64_t sqrt_discriminant(const SqrtShape &s)
        {
            std::uint64_t d = 1;
            for (auto p : s.odd)
                d = std::lcm(d, p);
            if (s.two)
                d = std::lcm<std::uint64_t>(d, 8);
            if (s.negative)
                d = std::lcm<std::uint64_t>(d, 4);
            return d;
        }
    } // namespace

    // ---------------------------------------------------------------- field

    std::vector<std::int64_t> cyclotomic_polynomial(std::uint32_t m)
    {
        if (m == 0)
            throw UsageError("conductor must be positive");
        std::map<std::uint32_t, Poly> memo;
        return cyclotomic_rec(m, memo);
    }

    std::uint32_t euler_phi(std::uint32_t m)
    {
        std::uint32_t r = m, x = m;
        for (std::uint32_t p = 2; p * p <= x; ++p)
        {
            if (x % p == 0)
            {
                while (x % p == 0)
                    x /= p;
                r -= r / p;
            }
        }
        if (x > 1)
            r -= r / x;
        return r;
    }

    CyclotomicField::CyclotomicField(std::uint32_t m)
        : m_(m), phi_(euler_phi(m)), poly_(cyclotomic_polynomial(m))
    {
        powers_.assign(static_cast<std::size_t>(m) * phi_, 0);
        std::vector<std::int64_t> cur(phi_, 0);
        cur[0] = 1;
        for (std::uint32_t k = 0; k < m; ++k)
        {
            std::copy(cur.begin(), cur.end(), powers_.begin() + static_cast<std::ptrdiff_t>(k * phi_));
            // cur *= x mod Phi_m
            std::int64_t top = cur[phi_ - 1];
            for (std::size_t j = phi_ - 1; j > 0; --j)
                cur[j] = cur[j - 1];
            cur[0] = 0;
            if (top != 0)
                for (std::size_t j = 0; j < phi_; ++j)
                    cur[j] -= checked_mul(top, poly_[j]);
        }
        for (std::uint32_t k = 1; k <= m; ++k)
            if (std::gcd(k, m) == 1)
                units_.push_back(k % m);
        std::sort(units_.begin(), units_.end());
        for (std::size_t j = 0; j < phi_; ++j)
        {
            double s = 0.0;
            for (std::size_t k = phi_; k + 1 < 2 * phi_; ++k)
                s += std::fabs(static_cast<double>(power(static_cast<std::int64_t>(k))[j]));
            growth_ = std::max(growth_, s);
        }
    }

    const CyclotomicField &CyclotomicField::get(std::uint32_t m)
    {
        if (m == 0)
            throw UsageError("conductor must be positive");
        static std::mutex mu;
        static std::map<std::uint32_t, std::unique_ptr<CyclotomicField>> cache;
        std::lock_guard lock(mu);
        auto it = cache.find(m);
        if (it == cache.end())
            it = cache.emplace(m, std::unique_ptr<CyclotomicField>(new CyclotomicField(m))).first;
        return *it->second;
    }

    std::span<const std::int64_t> CyclotomicField::power(std::int64_t k) const noexcept
    {
        auto r = static_cast<std::size_t>(pos_mod(k, m_));
        return {powers_.data() + r * phi_, phi_};
    }

    // ---------------------------------------------------------------- element

    void require_same_field(const Cyclotomic &a, const Cyclotomic &b)
    {
        if (&a.field() != &b.field())
            throw UsageError("conductor mismatch: " + std::to_string(a.conductor()) + " vs " +
                             std::to_string(b.conductor()));
    }

    Cyclotomic::Cyclotomic(std::uint32_t m) : Cyclotomic(CyclotomicField::get(m)) {}

    Cyclotomic::Cyclotomic(const CyclotomicField &f) : field_(&f), num_(f.degree(), Integer(0)) {}

    Cyclotomic::Cyclotomic(const CyclotomicField &f, Coeffs num, Integer den)
        : field_(&f), num_(std::move(num)), den_(std::move(den))
    {
        if (num_.size() != f.degree())
            throw UsageError("coefficient vector length must equal phi(m)");
        if (den_.is_zero())
            throw ArithmeticError("zero denominator");
        if (den_.sign() < 0)
        {
            den_ = -den_;
            for (auto &x : num_)
                x = -x;
        }
        normalize();
    }

    Cyclotomic Cyclotomic::from_rational(std::uint32_t m, const Rational &r)
    {
        Cyclotomic z(m);
        z.num_[0] = r.num();
        z.den_ = r.den();
        return z;
    }

    Cyclotomic Cyclotomic::zeta(std::uint32_t m, std::int64_t k)
    {
        const auto &f = CyclotomicField::get(m);
        auto row = f.power(k);
        Coeffs num(row.begin(), row.end());
        Cyclotomic z(f);
        z.num_ = std::move(num);
        return z;
    }

    Cyclotomic Cyclotomic::make(std::uint32_t m, std::span<const Rational> poly)
    {
        const auto &f = CyclotomicField::get(m);
        Integer l(1);
        for (const auto &c : poly)
            l = divexact(l * c.den(), gcd(l, c.den()));
        Coeffs num(f.degree(), Integer(0));
        for (std::size_t k = 0; k < poly.size(); ++k)
        {
            if (poly[k].is_zero())
                continue;
            Integer c = poly[k].num() * divexact(l, poly[k].den());
            auto row = f.power(static_cast<std::int64_t>(k));
            for (std::size_t j = 0; j < f.degree(); ++j)
                if (row[j] != 0)
                    num[j] += c * Integer(row[j]);
        }
        return Cyclotomic(f, std::move(num), std::move(l));
    }

    void Cyclotomic::normalize()
    {
        if (den_.is_one())
            return;
        Integer g = den_;
        for (const auto &x : num_)
        {
            if (x.is_zero())
                continue;
            g = gcd(g, x);
            if (g.is_one())
                return;
        }
        if (is_zero())
        {
            den_ = Integer(1);
            return;
        }
        for (auto &x : num_)
            x = divexact(x, g);
        den_ = divexact(den_, g);
    }

    Rational Cyclotomic::coeff(std::size_t k) const
    {
        return Rational(num_.at(k), den_);
    }

    std::vector<Rational> Cyclotomic::coeffs() const
    {
        std::vector<Rational> out;
        out.reserve(num_.size());
        for (const auto &x : num_)
            out.emplace_back(x, den_);
        return out;
    }

    bool Cyclotomic::is_zero() const noexcept
    {
        return std::all_of(num_.begin(), num_.end(), [](const Integer &x)
                           { return x.is_zero(); });
    }

    bool Cyclotomic::is_one() const noexcept
    {
        if (!den_.is_one() || !num_[0].is_one())
            return false;
        return std::all_of(num_.begin() + 1, num_.end(), [](const Integer &x)
                           { return x.is_zero(); });
    }

    std::optional<Rational> Cyclotomic::as_rational() const
    {
        for (std::size_t k = 1; k < num_.size(); ++k)
            if (!num_[k].is_zero())
                return std::nullopt;
        return Rational(num_[0], den_);
    }

    std::optional<std::uint32_t> Cyclotomic::root_of_unity_exponent() const
    {
        if (!den_.is_one())
            return std::nullopt;
        const std::uint32_t m = conductor();
        const std::size_t phi = field_->degree();
        for (const auto &x : num_)
            if (!x.is_small())
                return std::nullopt;
        for (std::uint32_t k = 0; k < m; ++k)
        {
            auto row = field_->power(k);
            bool plus = true, minus = (m % 2 == 1);
            for (std::size_t j = 0; j < phi && (plus || minus); ++j)
            {
                std::int64_t v = num_[j].small_value();
                plus = plus && v == row[j];
                minus = minus && v == -row[j];
            }
            if (plus)
                return m % 2 == 0 ? k : 2 * k;
            if (minus)
                return (2 * k + m) % (2 * m);
        }
        return std::nullopt;
    }

    Cyclotomic Cyclotomic::operator-() const
    {
        Cyclotomic r = *this;
        for (auto &x : r.num_)
            x = -x;
        return r;
    }

    Cyclotomic &Cyclotomic::operator+=(const Cyclotomic &o)
    {
        require_same_field(*this, o);
        if (den_ == o.den_)
        {
            for (std::size_t j = 0; j < num_.size(); ++j)
                num_[j] += o.num_[j];
        }
        else
        {
            Integer g = gcd(den_, o.den_);
            Integer fa = divexact(o.den_, g);
            Integer fb = divexact(den_, g);
            for (std::size_t j = 0; j < num_.size(); ++j)
            {
                num_[j] *= fa;
                if (!o.num_[j].is_zero())
                    num_[j] += o.num_[j] * fb;
            }
            den_ *= fa;
        }
        normalize();
        return *this;
    }

    Cyclotomic &Cyclotomic::operator-=(const Cyclotomic &o)
    {
        return *this += -o;
    }

    Cyclotomic &Cyclotomic::operator*=(const Cyclotomic &o)
    {
        *this = *this * o;
        return *this;
    }

    Cyclotomic operator*(const Cyclotomic &a, const Cyclotomic &b)
    {
        require_same_field(a, b);
        const auto &f = *a.field_;
        const std::size_t phi = f.degree();
        Cyclotomic r(f);
        r.den_ = a.den_ * b.den_;

        bool sa, sb;
        double ma = magnitude(a.num_, sa);
        double mb = sa ? magnitude(b.num_, sb) : 0.0;
        if (sa && sb && ma * mb * static_cast<double>(phi) * (1.0 + f.reduction_growth()) < kInt128Safe)
        {
            thread_local std::vector<__int128> acc;
            acc.assign(2 * phi - 1, 0);
            for (std::size_t i = 0; i < phi; ++i)
            {
                std::int64_t x = a.num_[i].small_value();
                if (x == 0)
                    continue;
                for (std::size_t j = 0; j < phi; ++j)
                {
                    std::int64_t y = b.num_[j].small_value();
                    if (y != 0)
                        acc[i + j] += static_cast<__int128>(x) * y;
                }
            }
            for (std::size_t k = phi; k < 2 * phi - 1; ++k)
            {
                __int128 c = acc[k];
                if (c == 0)
                    continue;
                auto row = f.power(static_cast<std::int64_t>(k));
                for (std::size_t j = 0; j < phi; ++j)
                    if (row[j] != 0)
                        acc[j] += c * row[j];
            }
            for (std::size_t j = 0; j < phi; ++j)
                r.num_[j] = from_int128(acc[j]);
        }
        else
        {
            std::vector<Integer> acc(2 * phi - 1, Integer(0));
            for (std::size_t i = 0; i < phi; ++i)
            {
                if (a.num_[i].is_zero())
                    continue;
                for (std::size_t j = 0; j < phi; ++j)
                    if (!b.num_[j].is_zero())
                        acc[i + j] += a.num_[i] * b.num_[j];
            }
            for (std::size_t k = phi; k < 2 * phi - 1; ++k)
            {
                if (acc[k].is_zero())
                    continue;
                auto row = f.power(static_cast<std::int64_t>(k));
                for (std::size_t j = 0; j < phi; ++j)
                    if (row[j] != 0)
                        acc[j] += acc[k] * Integer(row[j]);
            }
            for (std::size_t j = 0; j < phi; ++j)
                r.num_[j] = std::move(acc[j]);
        }
        r.normalize();
        return r;
    }

    Cyclotomic Cyclotomic::scaled(const Rational &q) const
    {
        if (q.is_zero())
            return Cyclotomic(*field_);
        Cyclotomic r(*field_);
        r.den_ = den_ * q.den();
        for (std::size_t j = 0; j < num_.size(); ++j)
            r.num_[j] = num_[j] * q.num();
        r.normalize();
        return r;
    }

    Cyclotomic Cyclotomic::times_zeta(std::int64_t k) const
    {
        Cyclotomic r(*field_);
        r.num_ = permute_powers(*field_, num_, 1, k);
        r.den_ = den_;
        r.normalize();
        return r;
    }

    Cyclotomic Cyclotomic::galois(std::int64_t k) const
    {
        const auto m = static_cast<std::int64_t>(conductor());
        std::int64_t kk = pos_mod(k, m);
        if (std::gcd(kk, m) != 1 && m > 1)
            throw UsageError("galois exponent must be a unit mod m");
        Cyclotomic r(*field_);
        r.num_ = permute_powers(*field_, num_, kk, 0);
        r.den_ = den_;
        r.normalize();
        return r;
    }

    Cyclotomic Cyclotomic::inverse() const
    {
        if (is_zero())
            throw ArithmeticError("inverse of zero cyclotomic");
        const std::size_t phi = field_->degree();
        // c * zeta^j
        std::size_t nnz = 0, at = 0;
        for (std::size_t j = 0; j < phi; ++j)
            if (!num_[j].is_zero())
            {
                ++nnz;
                at = j;
            }
        if (nnz == 1)
        {
            Rational c(num_[at], den_);
            return Cyclotomic::zeta(conductor(), -static_cast<std::int64_t>(at)).scaled(c.inverse());
        }
        // a^{-1} = conj(a) / (a conj(a)); b = a conj(a) is real, so its norm only
        // needs the automorphisms k < m/2.
        Cyclotomic ca = conj();
        Cyclotomic b = *this * ca;
        if (auto q = b.as_rational())
            return ca.scaled(q->inverse());
        Cyclotomic prod = Cyclotomic::one(conductor());
        const std::uint32_t m = conductor();
        for (auto k : field_->units())
            if (k != 1 && 2 * k < m)
                prod *= b.galois(k);
        Cyclotomic norm = b * prod;
        auto q = norm.as_rational();
        if (!q || q->is_zero())
            throw IntegrityError("norm of a nonzero cyclotomic is not a nonzero rational");
        return (ca * prod).scaled(q->inverse());
    }

    Cyclotomic Cyclotomic::pow(std::int64_t e) const
    {
        if (e < 0)
            return inverse().pow(-e);
        Cyclotomic result = Cyclotomic::one(conductor());
        Cyclotomic base = *this;
        while (e)
        {
            if (e & 1)
                result *= base;
            e >>= 1;
            if (e)
                base = base * base;
        }
        return result;
    }

    Cyclotomic Cyclotomic::lift(std::uint32_t target) const
    {
        const std::uint32_t m = conductor();
        if (target == m)
            return *this;
        if (target % m != 0)
            throw UsageError("lift target " + std::to_string(target) + " is not a multiple of " + std::to_string(m));
        const auto &g = CyclotomicField::get(target);
        const std::int64_t stride = target / m;
        Coeffs num(g.degree(), Integer(0));
        for (std::size_t j = 0; j < num_.size(); ++j)
        {
            if (num_[j].is_zero())
                continue;
            auto row = g.power(stride * static_cast<std::int64_t>(j));
            for (std::size_t i = 0; i < g.degree(); ++i)
                if (row[i] != 0)
                    num[i] += num_[j] * Integer(row[i]);
        }
        return Cyclotomic(g, std::move(num), den_);
    }

    std::complex<double> Cyclotomic::to_complex() const
    {
        const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
        const long double m = conductor();
        long double re = 0.0L, im = 0.0L;
        for (std::size_t j = 0; j < num_.size(); ++j)
        {
            if (num_[j].is_zero())
                continue;
            long double c = num_[j].to_double();
            re += c * std::cos(two_pi * static_cast<long double>(j) / m);
            im += c * std::sin(two_pi * static_cast<long double>(j) / m);
        }
        long double d = den_.to_double();
        return {static_cast<double>(re / d), static_cast<double>(im / d)};
    }

    bool operator==(const Cyclotomic &a, const Cyclotomic &b) noexcept
    {
        return a.field_ == b.field_ && a.den_ == b.den_ && a.num_ == b.num_;
    }

    std::size_t Cyclotomic::hash() const noexcept
    {
        std::size_t h = std::hash<std::uint32_t>{}(conductor());
        auto mix = [&h](std::size_t v)
        { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
        mix(den_.hash());
        for (const auto &x : num_)
            mix(x.hash());
        return h;
    }

    std::string Cyclotomic::to_json() const
    {
        nlohmann::ordered_json j;
        j["m"] = conductor();
        auto c = nlohmann::ordered_json::array();
        for (const auto &x : num_)
            c.push_back(Rational(x, den_).to_string());
        j["c"] = std::move(c);
        return j.dump();
    }

    Cyclotomic Cyclotomic::from_json(std::string_view text)
    {
        auto j = nlohmann::json::parse(text);
        auto m = j.at("m").get<std::uint32_t>();
        std::vector<Rational> coeffs;
        for (const auto &c : j.at("c"))
            coeffs.push_back(Rational::from_string(c.get<std::string>()));
        return make(m, coeffs);
    }

    namespace
    {
        void put_varint(std::string &out, std::uint64_t v)
        {
            while (v >= 0x80)
            {
                out.push_back(static_cast<char>((v & 0x7f) | 0x80));
                v >>= 7;
            }
            out.push_back(static_cast<char>(v));
        }

        std::uint64_t get_varint(std::string_view &in)
        {
            std::uint64_t v = 0;
            int shift = 0;
            while (true)
            {
                if (in.empty())
                    throw UsageError("truncated key");
                auto b = static_cast<unsigned char>(in.front());
                in.remove_prefix(1);
                v |= static_cast<std::uint64_t>(b & 0x7f) << shift;
                if (!(b & 0x80))
                    return v;
                shift += 7;
            }
        }

        std::uint64_t zigzag(std::int64_t v)
        {
            return (static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63);
        }

        std::int64_t unzigzag(std::uint64_t v)
        {
            return static_cast<std::int64_t>(v >> 1) ^ -static_cast<std::int64_t>(v & 1);
        }
    } // namespace

    void Cyclotomic::append_key(std::string &out) const
    {
        if (is_zero())
        {
            out.push_back('\0');
            return;
        }
        bool small = den_.is_small();
        for (const auto &x : num_)
            small = small && x.is_small();
        if (small)
        {
            out.push_back('\1');
            put_varint(out, static_cast<std::uint64_t>(den_.small_value()));
            for (const auto &x : num_)
                put_varint(out, zigzag(x.small_value()));
            return;
        }
        out.push_back('\2');
        std::string text = den_.to_string();
        for (const auto &x : num_)
            text += "," + x.to_string();
        put_varint(out, text.size());
        out += text;
    }

    Cyclotomic Cyclotomic::read_key(const CyclotomicField &f, std::string_view &in)
    {
        if (in.empty())
            throw UsageError("truncated key");
        char tag = in.front();
        in.remove_prefix(1);
        Cyclotomic z(f);
        if (tag == '\0')
            return z;
        if (tag == '\1')
        {
            z.den_ = Integer(static_cast<std::int64_t>(get_varint(in)));
            for (auto &x : z.num_)
                x = Integer(unzigzag(get_varint(in)));
            return z;
        }
        if (tag != '\2')
            throw UsageError("corrupt key tag");
        auto len = get_varint(in);
        std::string_view text = in.substr(0, len);
        in.remove_prefix(len);
        auto next = [&text]()
        {
            auto comma = text.find(',');
            auto tok = text.substr(0, comma);
            text.remove_prefix(comma == std::string_view::npos ? text.size() : comma + 1);
            return Integer::from_string(tok);
        };
        z.den_ = next();
        for (auto &x : z.num_)
            x = next();
        return z;
    }

    std::ostream &operator<<(std::ostream &os, const Cyclotomic &z)
    {
        bool first = true;
        for (std::size_t j = 0; j < z.num_.size(); ++j)
        {
            if (z.num_[j].is_zero())
                continue;
            if (!first)
                os << " + ";
            os << Rational(z.num_[j], z.den_);
            if (j > 0)
                os << "*z" << z.conductor() << "^" << j;
            first = false;
        }
        if (first)
            os << "0";
        return os;
    }

    // ---------------------------------------------------------------- roots

    bool contains_sqrt(std::uint64_t n, std::uint32_t m)
    {
        if (n == 0)
            return true;
        return m % sqrt_discriminant(sqrt_shape(n)) == 0;
    }

    std::uint32_t conductor_with_sqrt(std::uint32_t m, std::uint64_t n)
    {
        if (n == 0)
            return m;
        auto l = std::lcm<std::uint64_t>(m, sqrt_discriminant(sqrt_shape(n)));
        if (l > UINT32_MAX)
            throw ConstructionError("conductor overflow while adjoining sqrt(" + std::to_string(n) + ")");
        return static_cast<std::uint32_t>(l);
    }

    Cyclotomic sqrt_embed(std::uint64_t n, std::uint32_t m)
    {
        if (n == 0)
            return Cyclotomic(m);
        SqrtShape shape = sqrt_shape(n);
        if (m % sqrt_discriminant(shape) != 0)
            throw ConstructionError("Q(zeta_" + std::to_string(m) + ") does not contain sqrt(" + std::to_string(n) + ")");

        Cyclotomic r = Cyclotomic::from_rational(m, Rational(Integer(shape.square)));
        if (shape.two)
            r *= Cyclotomic::zeta(m, m / 8) + Cyclotomic::zeta(m, -static_cast<std::int64_t>(m / 8));
        for (auto p : shape.odd)
        {
            // Quadratic Gauss sum: g^2 = (-1)^{(p-1)/2} p.
            Cyclotomic g(m);
            const std::int64_t step = m / p;
            for (std::uint64_t a = 1; a < p; ++a)
            {
                bool residue = powmod(a, (p - 1) / 2, p) == 1;
                Cyclotomic t = Cyclotomic::zeta(m, static_cast<std::int64_t>(a) * step);
                if (residue)
                    g += t;
                else
                    g -= t;
            }
            r *= g;
        }
        if (shape.negative)
            r *= Cyclotomic::zeta(m, m / 4);
        if (r.to_complex().real() < 0)
            r = -r;
        if (!(r * r == Cyclotomic::from_rational(m, Rational(Integer(n)))))
            throw IntegrityError("sqrt_embed produced a wrong square root");
        return r;
    }

    std::uint32_t conductor_for(std::uint32_t dim)
    {
        if (dim < 1)
            throw UsageError("dimension must be positive");
        return std::lcm<std::uint32_t>(24, 2 * dim);
    }

} // namespace cqm
