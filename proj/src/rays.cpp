#include "cqm/rays.hpp"

#include "json.hpp"

#include "cqm/errors.hpp"

namespace cqm
{

    namespace
    {
        Cyclotomic squared_norm(const std::vector<Cyclotomic> &a)
        {
            Cyclotomic s(a[0].field());
            for (const auto &x : a)
                if (!x.is_zero())
                    s += x * x.conj();
            return s;
        }

        // 1/x, cheap when x is rational.
        Cyclotomic inverse_of(const Cyclotomic &x)
        {
            if (auto r = x.as_rational())
                return Cyclotomic::from_rational(x.conductor(), r->inverse());
            return x.inverse();
        }
    } // namespace

    Ray::Ray(std::vector<Cyclotomic> a) : a_(std::move(a)), norm2_(squared_norm(a_)) {}

    Ray Ray::canonicalize(std::vector<Cyclotomic> v)
    {
        if (v.empty())
            throw UsageError("empty state vector");
        for (const auto &x : v)
            require_same_field(v[0], x);
        std::size_t first = 0;
        while (first < v.size() && v[first].is_zero())
            ++first;
        if (first == v.size())
            throw UsageError("zero vector has no ray");
        if (!v[first].is_one())
        {
            Cyclotomic inv = v[first].inverse();
            for (std::size_t i = first; i < v.size(); ++i)
                if (!v[i].is_zero())
                    v[i] = v[i] * inv;
        }
        return Ray(std::move(v));
    }

    Ray Ray::basis(std::size_t N, std::size_t k, std::uint32_t m)
    {
        if (k >= N)
            throw UsageError("basis index out of range");
        std::vector<Cyclotomic> v(N, Cyclotomic(m));
        v[k] = Cyclotomic::one(m);
        return Ray(std::move(v));
    }

    Ray Ray::lift(std::uint32_t target) const
    {
        if (target == conductor())
            return *this;
        std::vector<Cyclotomic> v;
        v.reserve(a_.size());
        for (const auto &x : a_)
            v.push_back(x.lift(target));
        return Ray(std::move(v));
    }

    std::string Ray::key() const
    {
        std::string out;
        for (const auto &x : a_)
            x.append_key(out);
        return out;
    }

    std::string Ray::to_json() const
    {
        nlohmann::ordered_json j;
        j["dim"] = a_.size();
        auto arr = nlohmann::ordered_json::array();
        for (const auto &x : a_)
            arr.push_back(nlohmann::ordered_json::parse(x.to_json()));
        j["amps"] = std::move(arr);
        return j.dump();
    }

    Ray Ray::from_json(std::string_view text)
    {
        auto j = nlohmann::json::parse(text);
        std::vector<Cyclotomic> v;
        for (const auto &x : j.at("amps"))
            v.push_back(Cyclotomic::from_json(x.dump()));
        if (v.size() != j.at("dim").get<std::size_t>())
            throw UsageError("ray dim does not match amplitude count");
        Ray r = canonicalize(v);
        if (r.a_ != v)
            throw UsageError("serialized ray is not in canonical form");
        return r;
    }

    Cyclotomic inner_product(const Ray &a, const Ray &b)
    {
        if (a.dim() != b.dim())
            throw UsageError("rays have different dimensions");
        Cyclotomic s(a[0].field());
        for (std::size_t i = 0; i < a.dim(); ++i)
            if (!a[i].is_zero() && !b[i].is_zero())
                s += a[i].conj() * b[i];
        return s;
    }

    Cyclotomic transition_probability(const Ray &a, const Ray &b)
    {
        Cyclotomic ip = inner_product(a, b);
        if (ip.is_zero())
            return ip;
        return ip * ip.conj() * inverse_of(a.norm2() * b.norm2());
    }

    std::optional<Rational> prob_is_rational(const Ray &a, const Ray &b)
    {
        return transition_probability(a, b).as_rational();
    }

    Ray apply(const UMatrix &M, const Ray &a)
    {
        if (M.dim() != a.dim())
            throw UsageError("matrix and ray dimensions differ");
        return Ray::canonicalize(M * std::span<const Cyclotomic>(a.amps()));
    }

} // namespace cqm
