#include "cqm/integer.hpp"

#include <climits>
#include <functional>
#include <numeric>
#include <ostream>

#include "cqm/errors.hpp"

namespace cqm
{

    namespace
    {
        mpz_class from_int64(std::int64_t v)
        {
            mpz_class r;
            mpz_set_si(r.get_mpz_t(), static_cast<long>(v));
            return r;
        }
    } // namespace

    void Integer::assign_big(const mpz_class &v)
    {
        if (mpz_fits_slong_p(v.get_mpz_t()))
        {
            small_ = mpz_get_si(v.get_mpz_t());
            big_.reset();
        }
        else
        {
            small_ = 0;
            big_ = std::make_unique<mpz_class>(v);
        }
    }

    void Integer::assign_big(mpz_class &&v)
    {
        if (mpz_fits_slong_p(v.get_mpz_t()))
        {
            small_ = mpz_get_si(v.get_mpz_t());
            big_.reset();
        }
        else
        {
            small_ = 0;
            big_ = std::make_unique<mpz_class>(std::move(v));
        }
    }

    Integer Integer::from_string(std::string_view s)
    {
        std::string str(s);
        if (str.empty())
            throw UsageError("empty integer literal");
        mpz_class v;
        if (v.set_str(str, 10) != 0)
            throw UsageError("malformed integer literal: " + str);
        return Integer(v);
    }

    mpz_class Integer::to_mpz() const
    {
        return big_ ? *big_ : from_int64(small_);
    }

    double Integer::to_double() const
    {
        return big_ ? big_->get_d() : static_cast<double>(small_);
    }

    std::string Integer::to_string() const
    {
        return big_ ? big_->get_str(10) : std::to_string(small_);
    }

    std::size_t Integer::hash() const noexcept
    {
        if (!big_)
            return std::hash<std::int64_t>{}(small_);
        std::size_t h = 0x9e3779b97f4a7c15ULL;
        const auto *z = big_->get_mpz_t();
        for (int i = 0; i < std::abs(z->_mp_size); ++i)
            h ^= std::hash<mp_limb_t>{}(z->_mp_d[i]) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return h ^ static_cast<std::size_t>(z->_mp_size < 0);
    }

    Integer Integer::operator-() const
    {
        if (!big_ && small_ != INT64_MIN)
            return Integer(-small_);
        return Integer(mpz_class(-to_mpz()));
    }

    Integer &Integer::operator+=(const Integer &o)
    {
        std::int64_t r;
        if (!big_ && !o.big_ && !__builtin_add_overflow(small_, o.small_, &r))
        {
            small_ = r;
            return *this;
        }
        assign_big(mpz_class(to_mpz() + o.to_mpz()));
        return *this;
    }

    Integer &Integer::operator-=(const Integer &o)
    {
        std::int64_t r;
        if (!big_ && !o.big_ && !__builtin_sub_overflow(small_, o.small_, &r))
        {
            small_ = r;
            return *this;
        }
        assign_big(mpz_class(to_mpz() - o.to_mpz()));
        return *this;
    }

    Integer &Integer::operator*=(const Integer &o)
    {
        std::int64_t r;
        if (!big_ && !o.big_ && !__builtin_mul_overflow(small_, o.small_, &r))
        {
            small_ = r;
            return *this;
        }
        assign_big(mpz_class(to_mpz() * o.to_mpz()));
        return *this;
    }

    bool operator==(const Integer &a, const Integer &b) noexcept
    {
        if (!a.big_ && !b.big_)
            return a.small_ == b.small_;
        if (a.big_ && b.big_)
            return cmp(*a.big_, *b.big_) == 0;
        return false; // normalized: a big value never equals a small one
    }

    std::strong_ordering operator<=>(const Integer &a, const Integer &b) noexcept
    {
        if (!a.big_ && !b.big_)
            return a.small_ <=> b.small_;
        int c;
        if (a.big_ && b.big_)
            c = cmp(*a.big_, *b.big_);
        else if (a.big_)
            c = sgn(*a.big_);
        else
            c = -sgn(*b.big_);
        return c <=> 0;
    }

    Integer divexact(const Integer &a, const Integer &b)
    {
        if (b.is_zero())
            throw ArithmeticError("integer division by zero");
        if (a.is_small() && b.is_small() && !(a.small_ == INT64_MIN && b.small_ == -1))
            return Integer(a.small_ / b.small_);
        mpz_class q;
        mpz_class za = a.to_mpz(), zb = b.to_mpz();
        mpz_divexact(q.get_mpz_t(), za.get_mpz_t(), zb.get_mpz_t());
        return Integer(q);
    }

    Integer tdiv(const Integer &a, const Integer &b)
    {
        if (b.is_zero())
            throw ArithmeticError("integer division by zero");
        if (a.is_small() && b.is_small() && !(a.small_ == INT64_MIN && b.small_ == -1))
            return Integer(a.small_ / b.small_);
        mpz_class q;
        mpz_class za = a.to_mpz(), zb = b.to_mpz();
        mpz_tdiv_q(q.get_mpz_t(), za.get_mpz_t(), zb.get_mpz_t());
        return Integer(q);
    }

    Integer mod(const Integer &a, const Integer &m)
    {
        if (m.sign() <= 0)
            throw ArithmeticError("modulus must be positive");
        if (a.is_small() && m.is_small())
        {
            std::int64_t r = a.small_ % m.small_;
            return Integer(r < 0 ? r + m.small_ : r);
        }
        mpz_class r;
        mpz_class za = a.to_mpz(), zm = m.to_mpz();
        mpz_fdiv_r(r.get_mpz_t(), za.get_mpz_t(), zm.get_mpz_t());
        return Integer(r);
    }

    Integer gcd(const Integer &a, const Integer &b)
    {
        if (a.is_small() && b.is_small() && a.small_ != INT64_MIN && b.small_ != INT64_MIN)
            return Integer(std::gcd(a.small_, b.small_));
        mpz_class g;
        mpz_class za = a.to_mpz(), zb = b.to_mpz();
        mpz_gcd(g.get_mpz_t(), za.get_mpz_t(), zb.get_mpz_t());
        return Integer(g);
    }

    Integer abs(const Integer &a)
    {
        return a.sign() < 0 ? -a : a;
    }

    std::ostream &operator<<(std::ostream &os, const Integer &v)
    {
        return os << v.to_string();
    }

} // namespace cqm
