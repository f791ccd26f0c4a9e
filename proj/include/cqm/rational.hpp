#pragma once

#include <compare>
#include <iosfwd>
#include <string>
#include <string_view>

#include "cqm/integer.hpp"

namespace cqm
{

    // Exact rational, always reduced with a positive denominator.
    class Rational
    {
    public:
        Rational() = default;
        Rational(Integer n) : num_(std::move(n)), den_(1) {}
        template <std::integral T>
            requires(!std::same_as<T, bool>)
        Rational(T n) : num_(n), den_(1) {}
        Rational(Integer n, Integer d);

        // Accepts "a", "-a" and "a/b".
        static Rational from_string(std::string_view s);

        const Integer &num() const noexcept { return num_; }
        const Integer &den() const noexcept { return den_; }

        int sign() const noexcept { return num_.sign(); }
        bool is_zero() const noexcept { return num_.is_zero(); }
        bool is_integer() const noexcept { return den_.is_one(); }

        Rational operator-() const { return Rational(-num_, den_, Reduced{}); }
        Rational &operator+=(const Rational &o);
        Rational &operator-=(const Rational &o);
        Rational &operator*=(const Rational &o);
        Rational &operator/=(const Rational &o);

        friend Rational operator+(Rational a, const Rational &b) { return a += b; }
        friend Rational operator-(Rational a, const Rational &b) { return a -= b; }
        friend Rational operator*(Rational a, const Rational &b) { return a *= b; }
        friend Rational operator/(Rational a, const Rational &b) { return a /= b; }

        Rational inverse() const;

        friend bool operator==(const Rational &a, const Rational &b) noexcept = default;
        friend std::strong_ordering operator<=>(const Rational &a, const Rational &b);

        double to_double() const;
        // "n" for integers, otherwise "n/d".
        std::string to_string() const;

        friend std::ostream &operator<<(std::ostream &os, const Rational &r);

    private:
        struct Reduced
        {
        };
        Rational(Integer n, Integer d, Reduced) : num_(std::move(n)), den_(std::move(d)) {}

        Integer num_{0};
        Integer den_{1};
    };

} // namespace cqm
