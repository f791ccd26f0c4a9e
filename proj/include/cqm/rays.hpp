#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cqm/cyclotomic.hpp"
#include "cqm/matrix.hpp"

namespace cqm
{

    /**
     * Projective state: a nonzero amplitude vector whose first nonzero entry
     * is 1. Two rays are the same state exactly when their amplitudes agree.
     * Representatives are not normalized; the squared norm is kept alongside.
     */
    class Ray
    {
    public:
        // Throws UsageError for the zero vector.
        static Ray canonicalize(std::vector<Cyclotomic> v);
        // Ontic basis vector |k> in C^N.
        static Ray basis(std::size_t N, std::size_t k, std::uint32_t m);

        std::size_t dim() const noexcept { return a_.size(); }
        std::uint32_t conductor() const noexcept { return a_[0].conductor(); }
        const std::vector<Cyclotomic> &amps() const noexcept { return a_; }
        const Cyclotomic &operator[](std::size_t i) const { return a_[i]; }
        // sum_i |a_i|^2 of this representative.
        const Cyclotomic &norm2() const noexcept { return norm2_; }

        Ray lift(std::uint32_t target) const;

        std::string key() const;
        // {"dim": N, "amps": [cyclotomic, ...]}
        std::string to_json() const;
        static Ray from_json(std::string_view text);

        friend bool operator==(const Ray &a, const Ray &b) noexcept { return a.a_ == b.a_; }

    private:
        explicit Ray(std::vector<Cyclotomic> a);

        std::vector<Cyclotomic> a_;
        Cyclotomic norm2_;
    };

    // <a|b> = sum conj(a_i) b_i
    Cyclotomic inner_product(const Ray &a, const Ray &b);

    // |<a|b>|^2 / (|a|^2 |b|^2); real, scale-invariant, no square roots.
    Cyclotomic transition_probability(const Ray &a, const Ray &b);

    std::optional<Rational> prob_is_rational(const Ray &a, const Ray &b);

    // Canonicalized M a.
    Ray apply(const UMatrix &M, const Ray &a);

} // namespace cqm
