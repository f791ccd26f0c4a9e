#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/container/small_vector.hpp>

#include "cqm/integer.hpp"
#include "cqm/rational.hpp"

namespace cqm
{

    /**
     * Per-conductor data for Q(zeta_m): the cyclotomic polynomial and the
     * power-basis images of every zeta_m^k.
     *
     * Instances are created once per conductor by `get` and live for the rest
     * of the process; concurrent `get` calls are safe.
     */
    class CyclotomicField
    {
    public:
        static const CyclotomicField &get(std::uint32_t m);

        std::uint32_t conductor() const noexcept { return m_; }
        std::size_t degree() const noexcept { return phi_; }

        // Phi_m, lowest coefficient first, length degree()+1.
        const std::vector<std::int64_t> &cyclotomic_poly() const noexcept { return poly_; }

        // zeta_m^k reduced mod Phi_m, for any integer k.
        std::span<const std::int64_t> power(std::int64_t k) const noexcept;

        // Bound on sum_k |power(k)[j]| over the high degrees folded during reduction.
        double reduction_growth() const noexcept { return growth_; }

        // Units of Z/m, i.e. the exponents of the Galois automorphisms.
        const std::vector<std::uint32_t> &units() const noexcept { return units_; }

        CyclotomicField(const CyclotomicField &) = delete;
        CyclotomicField &operator=(const CyclotomicField &) = delete;

    private:
        explicit CyclotomicField(std::uint32_t m);

        std::uint32_t m_;
        std::size_t phi_;
        std::vector<std::int64_t> poly_;
        std::vector<std::int64_t> powers_; // m rows of phi entries
        std::vector<std::uint32_t> units_;
        double growth_ = 0.0;
    };

    // Cyclotomic polynomial Phi_m computed by exact division of x^m - 1.
    std::vector<std::int64_t> cyclotomic_polynomial(std::uint32_t m);

    std::uint32_t euler_phi(std::uint32_t m);

    /**
     * Exact element of Q(zeta_m), stored as integer numerators over one
     * positive common denominator in the power basis 1, x, ..., x^{phi(m)-1}.
     *
     * The representation is canonical: gcd(numerators, denominator) = 1 and
     * the denominator is positive, so two elements are equal exactly when
     * their fields and stored data agree.
     */
    class Cyclotomic
    {
    public:
        using Coeffs = boost::container::small_vector<Integer, 8>;

        // Zero of Q(zeta_m).
        explicit Cyclotomic(std::uint32_t m);
        explicit Cyclotomic(const CyclotomicField &f);
        Cyclotomic(const CyclotomicField &f, Coeffs num, Integer den);

        static Cyclotomic zero(std::uint32_t m) { return Cyclotomic(m); }
        static Cyclotomic one(std::uint32_t m) { return from_rational(m, Rational(1)); }
        static Cyclotomic from_rational(std::uint32_t m, const Rational &r);
        // zeta_m^k for any integer k.
        static Cyclotomic zeta(std::uint32_t m, std::int64_t k);
        // Reduction of sum_k c_k x^k modulo Phi_m; c may be longer than phi(m).
        static Cyclotomic make(std::uint32_t m, std::span<const Rational> poly);

        const CyclotomicField &field() const noexcept { return *field_; }
        std::uint32_t conductor() const noexcept { return field_->conductor(); }

        const Coeffs &numerators() const noexcept { return num_; }
        const Integer &denominator() const noexcept { return den_; }
        // Canonical coefficient of x^k as a reduced rational.
        Rational coeff(std::size_t k) const;
        std::vector<Rational> coeffs() const;

        bool is_zero() const noexcept;
        bool is_one() const noexcept;
        // Returns the value when every non-constant coefficient vanishes.
        std::optional<Rational> as_rational() const;
        // k in [0, r) with *this == e^{2 pi i k / r}, where r = lcm(2, m); absent if not a root of unity.
        std::optional<std::uint32_t> root_of_unity_exponent() const;

        Cyclotomic operator-() const;
        Cyclotomic &operator+=(const Cyclotomic &o);
        Cyclotomic &operator-=(const Cyclotomic &o);
        Cyclotomic &operator*=(const Cyclotomic &o);

        friend Cyclotomic operator+(Cyclotomic a, const Cyclotomic &b) { return a += b; }
        friend Cyclotomic operator-(Cyclotomic a, const Cyclotomic &b) { return a -= b; }
        friend Cyclotomic operator*(const Cyclotomic &a, const Cyclotomic &b);
        friend Cyclotomic operator/(const Cyclotomic &a, const Cyclotomic &b) { return a * b.inverse(); }

        Cyclotomic scaled(const Rational &r) const;
        // Multiplication by zeta_m^k; cheaper than a general product.
        Cyclotomic times_zeta(std::int64_t k) const;
        Cyclotomic inverse() const;
        // Complex conjugation, zeta -> zeta^{-1}.
        Cyclotomic conj() const { return galois(-1); }
        // Field automorphism zeta -> zeta^k, gcd(k, m) = 1.
        Cyclotomic galois(std::int64_t k) const;
        Cyclotomic pow(std::int64_t e) const;
        // Image under Q(zeta_m) -> Q(zeta_target); target must be a multiple of m.
        Cyclotomic lift(std::uint32_t target) const;

        std::complex<double> to_complex() const;

        friend bool operator==(const Cyclotomic &a, const Cyclotomic &b) noexcept;
        std::size_t hash() const noexcept;

        // {"m": m, "c": ["n/d", ...]} with one reduced fraction per power-basis coefficient.
        std::string to_json() const;
        static Cyclotomic from_json(std::string_view text);

        // Compact byte encoding used for hashing sets of matrices and rays; the
        // conductor is implied by context.
        void append_key(std::string &out) const;
        static Cyclotomic read_key(const CyclotomicField &f, std::string_view &in);

        friend std::ostream &operator<<(std::ostream &os, const Cyclotomic &z);

    private:
        void normalize();

        const CyclotomicField *field_;
        Coeffs num_;
        Integer den_{1};
    };

    // Both operands must live in the same field; throws UsageError otherwise.
    void require_same_field(const Cyclotomic &a, const Cyclotomic &b);

    /**
     * Positive square root of n inside Q(zeta_m), built from quadratic Gauss
     * sums. Throws ConstructionError when Q(zeta_m) does not contain sqrt(n).
     */
    Cyclotomic sqrt_embed(std::uint64_t n, std::uint32_t m);

    // True when sqrt(n) lies in Q(zeta_m).
    bool contains_sqrt(std::uint64_t n, std::uint32_t m);

    // Smallest multiple of m whose field contains sqrt(n).
    std::uint32_t conductor_with_sqrt(std::uint32_t m, std::uint64_t n);

    // Working conductor for dimension N: lcm(24, 2N).
    std::uint32_t conductor_for(std::uint32_t dim);

} // namespace cqm

template <>
struct std::hash<cqm::Cyclotomic>
{
    std::size_t operator()(const cqm::Cyclotomic &z) const noexcept { return z.hash(); }
};
