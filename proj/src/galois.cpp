#include "cqm/galois.hpp"

#include <algorithm>

#include "json.hpp"

#include "cqm/errors.hpp"

namespace cqm
{

    namespace
    {
        using Poly = std::vector<std::uint32_t>;

        void trim(Poly &a)
        {
            while (!a.empty() && a.back() == 0)
                a.pop_back();
        }

        // Remainder of a modulo the monic polynomial b over F_p.
        Poly poly_rem(Poly a, const Poly &b, std::uint32_t p)
        {
            for (auto &x : a)
                x %= p;
            trim(a);
            const std::size_t db = b.size() - 1;
            while (a.size() > db)
            {
                std::uint64_t c = a.back();
                std::size_t shift = a.size() - 1 - db;
                for (std::size_t j = 0; j <= db; ++j)
                    a[shift + j] = static_cast<std::uint32_t>((a[shift + j] + (p - c) * b[j]) % p);
                trim(a);
            }
            return a;
        }

        Poly poly_mul(const Poly &a, const Poly &b, std::uint32_t p)
        {
            if (a.empty() || b.empty())
                return {};
            std::vector<std::uint64_t> r(a.size() + b.size() - 1, 0);
            for (std::size_t i = 0; i < a.size(); ++i)
                for (std::size_t j = 0; j < b.size(); ++j)
                    r[i + j] = (r[i + j] + static_cast<std::uint64_t>(a[i]) * b[j]) % p;
            return Poly(r.begin(), r.end());
        }

        // Monic polynomial of degree d whose lower coefficients are the base-p digits of code.
        Poly monic_from_code(std::uint64_t code, std::uint32_t d, std::uint32_t p)
        {
            Poly f(d + 1, 0);
            for (std::uint32_t k = 0; k < d; ++k)
            {
                f[k] = static_cast<std::uint32_t>(code % p);
                code /= p;
            }
            f[d] = 1;
            return f;
        }

        std::uint64_t ipow(std::uint64_t b, std::uint32_t e)
        {
            std::uint64_t r = 1;
            while (e--)
            {
                if (r > UINT64_MAX / b)
                    throw UsageError("field order overflow");
                r *= b;
            }
            return r;
        }
    } // namespace

    bool is_prime(std::uint64_t n)
    {
        if (n < 2)
            return false;
        for (std::uint64_t d = 2; d * d <= n; ++d)
            if (n % d == 0)
                return false;
        return true;
    }

    bool is_irreducible(const std::vector<std::uint32_t> &poly, std::uint32_t p)
    {
        Poly f = poly;
        trim(f);
        if (f.size() < 2)
            return false;
        const auto deg = static_cast<std::uint32_t>(f.size() - 1);
        if (deg == 1)
            return true;
        for (std::uint32_t d = 1; 2 * d <= deg; ++d)
        {
            const std::uint64_t count = ipow(p, d);
            for (std::uint64_t code = 0; code < count; ++code)
            {
                Poly g = monic_from_code(code, d, p);
                if (poly_rem(f, g, p).empty())
                    return false;
            }
        }
        return true;
    }

    GaloisField GaloisField::build(std::uint32_t p, std::uint32_t l)
    {
        if (!is_prime(p))
            throw UsageError("characteristic " + std::to_string(p) + " is not prime");
        if (l == 0)
            throw UsageError("extension degree must be positive");
        auto d = std::make_shared<Data>();
        d->p = p;
        d->l = l;
        d->q = ipow(p, l);
        if (l == 1)
        {
            d->modulus = {0, 1};
            return GaloisField(std::move(d));
        }
        // Lexicographic order with the x^{l-1} coefficient most significant is
        // the order of the base-p code whose top digit is that coefficient.
        const std::uint64_t count = ipow(p, l);
        for (std::uint64_t code = 0; code < count; ++code)
        {
            Poly f = monic_from_code(code, l, p);
            if (is_irreducible(f, p))
            {
                d->modulus = std::move(f);
                return GaloisField(std::move(d));
            }
        }
        throw IntegrityError("no irreducible polynomial found");
    }

    GFElement GaloisField::zero() const
    {
        return GFElement(*this, Poly(degree(), 0));
    }

    GFElement GaloisField::one() const
    {
        Poly c(degree(), 0);
        c[0] = 1;
        return GFElement(*this, std::move(c));
    }

    GFElement GaloisField::element(std::uint64_t index) const
    {
        if (index >= order())
            throw UsageError("element index out of range");
        Poly c(degree(), 0);
        for (auto &x : c)
        {
            x = static_cast<std::uint32_t>(index % characteristic());
            index /= characteristic();
        }
        return GFElement(*this, std::move(c));
    }

    GFElement GaloisField::from_coeffs(std::vector<std::uint32_t> coeffs) const
    {
        Poly r = poly_rem(std::move(coeffs), modulus(), characteristic());
        r.resize(degree(), 0);
        return GFElement(*this, std::move(r));
    }

    std::vector<GFElement> GaloisField::elements() const
    {
        std::vector<GFElement> out;
        out.reserve(order());
        for (std::uint64_t i = 0; i < order(); ++i)
            out.push_back(element(i));
        return out;
    }

    std::string GaloisField::to_json() const
    {
        nlohmann::ordered_json j;
        j["p"] = characteristic();
        j["l"] = degree();
        j["modulus"] = modulus();
        return j.dump();
    }

    bool operator==(const GaloisField &a, const GaloisField &b) noexcept
    {
        return a.data_ == b.data_ ||
               (a.data_->p == b.data_->p && a.data_->l == b.data_->l && a.data_->modulus == b.data_->modulus);
    }

    // ---------------------------------------------------------------- elements

    void GFElement::require_same(const GFElement &o) const
    {
        if (!(field_ == o.field_))
            throw UsageError("elements belong to different Galois fields");
    }

    std::uint64_t GFElement::index() const noexcept
    {
        std::uint64_t idx = 0;
        for (std::size_t k = c_.size(); k-- > 0;)
            idx = idx * field_.characteristic() + c_[k];
        return idx;
    }

    bool GFElement::is_zero() const noexcept
    {
        return std::all_of(c_.begin(), c_.end(), [](auto x)
                           { return x == 0; });
    }

    GFElement GFElement::operator+(const GFElement &o) const
    {
        require_same(o);
        const auto p = field_.characteristic();
        Poly r(c_.size());
        for (std::size_t k = 0; k < c_.size(); ++k)
            r[k] = (c_[k] + o.c_[k]) % p;
        return GFElement(field_, std::move(r));
    }

    GFElement GFElement::operator-() const
    {
        const auto p = field_.characteristic();
        Poly r(c_.size());
        for (std::size_t k = 0; k < c_.size(); ++k)
            r[k] = (p - c_[k]) % p;
        return GFElement(field_, std::move(r));
    }

    GFElement GFElement::operator-(const GFElement &o) const
    {
        return *this + (-o);
    }

    GFElement GFElement::operator*(const GFElement &o) const
    {
        require_same(o);
        return field_.from_coeffs(poly_mul(c_, o.c_, field_.characteristic()));
    }

    GFElement GFElement::pow(std::uint64_t e) const
    {
        GFElement r = field_.one(), b = *this;
        while (e)
        {
            if (e & 1)
                r = r * b;
            b = b * b;
            e >>= 1;
        }
        return r;
    }

    GFElement GFElement::inverse() const
    {
        if (is_zero())
            throw ArithmeticError("inverse of zero in a Galois field");
        return pow(field_.order() - 2);
    }

    GFElement GFElement::frobenius(std::uint32_t k) const
    {
        GFElement r = *this;
        for (std::uint32_t i = 0; i < k; ++i)
            r = r.pow(field_.characteristic());
        return r;
    }

    bool GFElement::in_subfield(std::uint32_t m) const
    {
        return m > 0 && field_.degree() % m == 0 && frobenius(m) == *this;
    }

    GFElement GFElement::trace_between(std::uint32_t from, std::uint32_t to) const
    {
        if (to == 0 || from % to != 0 || field_.degree() % from != 0)
            throw UsageError("trace degrees must satisfy to | from | l");
        if (!in_subfield(from))
            throw UsageError("element does not lie in the source subfield");
        GFElement sum = field_.zero(), term = *this;
        for (std::uint32_t i = 0; i < from / to; ++i)
        {
            sum = sum + term;
            term = term.frobenius(to);
        }
        if (!sum.in_subfield(to))
            throw IntegrityError("trace left the target subfield");
        return sum;
    }

    GFElement GFElement::trace(std::uint32_t m) const
    {
        if (m == 0 || field_.degree() % m != 0)
            throw UsageError("subfield degree " + std::to_string(m) + " does not divide " +
                             std::to_string(field_.degree()));
        return trace_between(field_.degree(), m);
    }

    std::uint32_t GFElement::prime_value() const
    {
        for (std::size_t k = 1; k < c_.size(); ++k)
            if (c_[k] != 0)
                throw UsageError("element is not in the prime field");
        return c_[0];
    }

    bool operator==(const GFElement &a, const GFElement &b) noexcept
    {
        return a.field_ == b.field_ && a.c_ == b.c_;
    }

    std::string GFElement::to_string() const
    {
        std::string s;
        for (std::size_t k = c_.size(); k-- > 0;)
        {
            if (c_[k] == 0)
                continue;
            if (!s.empty())
                s += "+";
            if (k == 0 || c_[k] != 1)
                s += std::to_string(c_[k]);
            if (k > 0)
                s += k == 1 ? "x" : "x^" + std::to_string(k);
        }
        return s.empty() ? "0" : s;
    }

} // namespace cqm
