#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace cqm
{

    class GFElement;

    /**
     * The finite field F_{p^l} = F_p[x] / (f), with f the lexicographically
     * smallest monic irreducible polynomial of degree l (compared from the
     * highest non-leading coefficient down). For l = 1 the modulus is x.
     *
     * Elements are indexed by reading their coefficient vector as a base-p
     * integer with the highest degree most significant; that index is the row
     * and column label used by every matrix built over the field.
     */
    class GaloisField
    {
    public:
        // Throws UsageError if p is not prime or l == 0.
        static GaloisField build(std::uint32_t p, std::uint32_t l);

        std::uint32_t characteristic() const noexcept { return data_->p; }
        std::uint32_t degree() const noexcept { return data_->l; }
        std::uint64_t order() const noexcept { return data_->q; }
        // Monic modulus, lowest coefficient first, length degree()+1.
        const std::vector<std::uint32_t> &modulus() const noexcept { return data_->modulus; }

        GFElement zero() const;
        GFElement one() const;
        GFElement element(std::uint64_t index) const;
        GFElement from_coeffs(std::vector<std::uint32_t> coeffs) const;
        // All q elements in index order.
        std::vector<GFElement> elements() const;

        // {"p":…, "l":…, "modulus":[…]}
        std::string to_json() const;

        friend bool operator==(const GaloisField &a, const GaloisField &b) noexcept;

    private:
        struct Data
        {
            std::uint32_t p;
            std::uint32_t l;
            std::uint64_t q;
            std::vector<std::uint32_t> modulus;
        };
        explicit GaloisField(std::shared_ptr<const Data> d) : data_(std::move(d)) {}

        std::shared_ptr<const Data> data_;
        friend class GFElement;
    };

    // Irreducibility over F_p by trial division with every monic polynomial of degree <= deg/2.
    bool is_irreducible(const std::vector<std::uint32_t> &poly, std::uint32_t p);

    bool is_prime(std::uint64_t n);

    class GFElement
    {
    public:
        const GaloisField &field() const noexcept { return field_; }
        // Coefficients of 1, x, ..., x^{l-1}.
        const std::vector<std::uint32_t> &coeffs() const noexcept { return c_; }
        std::uint64_t index() const noexcept;

        bool is_zero() const noexcept;

        GFElement operator+(const GFElement &o) const;
        GFElement operator-(const GFElement &o) const;
        GFElement operator-() const;
        GFElement operator*(const GFElement &o) const;
        GFElement pow(std::uint64_t e) const;
        GFElement inverse() const;
        // alpha^{p^k}
        GFElement frobenius(std::uint32_t k) const;

        // Relative trace F_{p^l} -> F_{p^m}; m must divide l. The value is
        // returned inside F_{p^l} and is checked to be fixed by Frobenius^m.
        GFElement trace(std::uint32_t m) const;
        // Trace of an element of the subfield F_{p^from} down to F_{p^to}.
        GFElement trace_between(std::uint32_t from, std::uint32_t to) const;
        // Residue mod p of an element of the prime field.
        std::uint32_t prime_value() const;
        bool in_subfield(std::uint32_t m) const;

        friend bool operator==(const GFElement &a, const GFElement &b) noexcept;

        std::string to_string() const;

    private:
        GFElement(GaloisField f, std::vector<std::uint32_t> c) : field_(std::move(f)), c_(std::move(c)) {}
        void require_same(const GFElement &o) const;

        GaloisField field_;
        std::vector<std::uint32_t> c_;
        friend class GaloisField;
    };

} // namespace cqm
