#pragma once

#include <compare>
#include <concepts>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace cqm
{

    /**
     * Arbitrary-precision integer with an inline int64 fast path.
     *
     * Values that fit in int64 never allocate; anything larger lives in a GMP
     * integer. The representation is normalized after every operation, so
     * `is_small()` is a function of the value alone.
     */
    class Integer
    {
    public:
        Integer() noexcept = default;

        template <std::signed_integral T>
        Integer(T v) noexcept : small_(static_cast<std::int64_t>(v)) {}

        template <std::unsigned_integral T>
            requires(!std::same_as<T, bool>)
        Integer(T v)
        {
            if (static_cast<std::uint64_t>(v) <= static_cast<std::uint64_t>(INT64_MAX))
                small_ = static_cast<std::int64_t>(v);
            else
                assign_big(mpz_class(std::to_string(static_cast<std::uint64_t>(v))));
        }

        explicit Integer(const mpz_class &v) { assign_big(v); }

        Integer(const Integer &o) : small_(o.small_)
        {
            if (o.big_)
                big_ = std::make_unique<mpz_class>(*o.big_);
        }
        Integer(Integer &&o) noexcept = default;
        Integer &operator=(const Integer &o)
        {
            if (this != &o)
            {
                small_ = o.small_;
                big_ = o.big_ ? std::make_unique<mpz_class>(*o.big_) : nullptr;
            }
            return *this;
        }
        Integer &operator=(Integer &&o) noexcept = default;
        ~Integer() = default;

        // Parses an optionally signed decimal string.
        static Integer from_string(std::string_view s);

        bool is_small() const noexcept { return !big_; }
        std::int64_t small_value() const noexcept { return small_; }
        mpz_class to_mpz() const;

        int sign() const noexcept
        {
            if (big_)
                return sgn(*big_);
            return (small_ > 0) - (small_ < 0);
        }
        bool is_zero() const noexcept { return !big_ && small_ == 0; }
        bool is_one() const noexcept { return !big_ && small_ == 1; }

        bool fits_int64() const noexcept { return !big_; }
        double to_double() const;
        std::string to_string() const;
        std::size_t hash() const noexcept;

        Integer operator-() const;
        Integer &operator+=(const Integer &o);
        Integer &operator-=(const Integer &o);
        Integer &operator*=(const Integer &o);

        friend Integer operator+(Integer a, const Integer &b) { return a += b; }
        friend Integer operator-(Integer a, const Integer &b) { return a -= b; }
        friend Integer operator*(Integer a, const Integer &b) { return a *= b; }

        friend bool operator==(const Integer &a, const Integer &b) noexcept;
        friend std::strong_ordering operator<=>(const Integer &a, const Integer &b) noexcept;

        // Quotient of an exact division; the caller guarantees b | a.
        friend Integer divexact(const Integer &a, const Integer &b);
        // Truncating division, as C++ '/' and '%' on int.
        friend Integer tdiv(const Integer &a, const Integer &b);
        // Least non-negative residue; m > 0.
        friend Integer mod(const Integer &a, const Integer &m);
        friend Integer gcd(const Integer &a, const Integer &b);
        friend Integer abs(const Integer &a);

        friend std::ostream &operator<<(std::ostream &os, const Integer &v);

    private:
        void assign_big(const mpz_class &v);
        void assign_big(mpz_class &&v);

        std::int64_t small_ = 0;
        std::unique_ptr<mpz_class> big_;
    };

} // namespace cqm

template <>
struct std::hash<cqm::Integer>
{
    std::size_t operator()(const cqm::Integer &v) const noexcept { return v.hash(); }
};
