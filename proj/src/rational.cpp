#include "cqm/rational.hpp"

#include <ostream>

#include "cqm/errors.hpp"

namespace cqm
{

    Rational::Rational(Integer n, Integer d)
    {
        if (d.is_zero())
            throw ArithmeticError("rational with zero denominator");
        if (d.sign() < 0)
        {
            n = -n;
            d = -d;
        }
        Integer g = gcd(n, d);
        if (!g.is_one())
        {
            n = divexact(n, g);
            d = divexact(d, g);
        }
        num_ = std::move(n);
        den_ = std::move(d);
    }

    Rational Rational::from_string(std::string_view s)
    {
        auto slash = s.find('/');
        if (slash == std::string_view::npos)
            return Rational(Integer::from_string(s));
        return Rational(Integer::from_string(s.substr(0, slash)), Integer::from_string(s.substr(slash + 1)));
    }

    Rational &Rational::operator+=(const Rational &o)
    {
        if (den_.is_one() && o.den_.is_one())
        {
            num_ += o.num_;
            return *this;
        }
        *this = Rational(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
        return *this;
    }

    Rational &Rational::operator-=(const Rational &o)
    {
        return *this += -o;
    }

    Rational &Rational::operator*=(const Rational &o)
    {
        *this = Rational(num_ * o.num_, den_ * o.den_);
        return *this;
    }

    Rational &Rational::operator/=(const Rational &o)
    {
        return *this *= o.inverse();
    }

    Rational Rational::inverse() const
    {
        if (num_.is_zero())
            throw ArithmeticError("inverse of zero rational");
        return Rational(den_, num_);
    }

    std::strong_ordering operator<=>(const Rational &a, const Rational &b)
    {
        return a.num_ * b.den_ <=> b.num_ * a.den_;
    }

    double Rational::to_double() const
    {
        if (num_.is_small() && den_.is_small())
            return static_cast<double>(num_.small_value()) / static_cast<double>(den_.small_value());
        mpq_class q(num_.to_mpz(), den_.to_mpz());
        return q.get_d();
    }

    std::string Rational::to_string() const
    {
        if (den_.is_one())
            return num_.to_string();
        return num_.to_string() + "/" + den_.to_string();
    }

    std::ostream &operator<<(std::ostream &os, const Rational &r)
    {
        return os << r.to_string();
    }

} // namespace cqm
