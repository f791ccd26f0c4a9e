#include "cqm/matrix.hpp"

#include "json.hpp"

#include "cqm/errors.hpp"

namespace cqm
{

    UMatrix::UMatrix(std::size_t dim, std::uint32_t m, MatrixKind kind)
        : n_(dim), field_(&CyclotomicField::get(m)), a_(dim * dim, Cyclotomic(*field_)), kind_(kind)
    {
        if (dim == 0)
            throw UsageError("matrix dimension must be positive");
    }

    UMatrix::UMatrix(std::size_t dim, std::vector<Cyclotomic> entries, MatrixKind kind)
        : n_(dim), field_(nullptr), a_(std::move(entries)), kind_(kind)
    {
        if (dim == 0 || a_.size() != dim * dim)
            throw UsageError("matrix needs dim*dim entries");
        field_ = &a_[0].field();
        for (const auto &x : a_)
            if (&x.field() != field_)
                throw UsageError("matrix entries must share one conductor");
    }

    UMatrix UMatrix::identity(std::size_t dim, std::uint32_t m)
    {
        UMatrix r(dim, m);
        for (std::size_t i = 0; i < dim; ++i)
            r.a_[i * dim + i] = Cyclotomic::one(m);
        return r;
    }

    UMatrix UMatrix::diagonal(std::vector<Cyclotomic> diag, MatrixKind kind)
    {
        if (diag.empty())
            throw UsageError("empty diagonal");
        const std::size_t n = diag.size();
        UMatrix r(n, diag[0].conductor(), kind);
        for (std::size_t i = 0; i < n; ++i)
        {
            require_same_field(diag[0], diag[i]);
            r.a_[i * n + i] = std::move(diag[i]);
        }
        return r;
    }

    UMatrix UMatrix::permutation(std::span<const std::size_t> perm, std::uint32_t m)
    {
        const std::size_t n = perm.size();
        UMatrix r(n, m);
        std::vector<bool> hit(n, false);
        for (std::size_t j = 0; j < n; ++j)
        {
            if (perm[j] >= n || hit[perm[j]])
                throw UsageError("not a permutation");
            hit[perm[j]] = true;
            r.a_[perm[j] * n + j] = Cyclotomic::one(m);
        }
        return r;
    }

    void UMatrix::set(std::size_t i, std::size_t j, Cyclotomic v)
    {
        if (i >= n_ || j >= n_)
            throw UsageError("matrix index out of range");
        if (&v.field() != field_)
            throw UsageError("entry conductor differs from matrix conductor");
        a_[i * n_ + j] = std::move(v);
    }

    void UMatrix::require_compatible(const UMatrix &o) const
    {
        if (n_ != o.n_)
            throw UsageError("matrix dimensions differ");
        if (field_ != o.field_)
            throw UsageError("matrix conductors differ");
    }

    UMatrix UMatrix::operator*(const UMatrix &o) const
    {
        require_compatible(o);
        const std::size_t n = n_;
        // Column support of each row of o, so sparse factors cost little.
        std::vector<std::vector<std::size_t>> support(n);
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t j = 0; j < n; ++j)
                if (!o.a_[k * n + j].is_zero())
                    support[k].push_back(j);

        UMatrix r(n, conductor(),
                  kind_ == MatrixKind::Unitary && o.kind_ == MatrixKind::Unitary ? MatrixKind::Unitary
                                                                                 : MatrixKind::Operator);
        std::vector<bool> touched(n);
        for (std::size_t i = 0; i < n; ++i)
        {
            std::fill(touched.begin(), touched.end(), false);
            for (std::size_t k = 0; k < n; ++k)
            {
                const Cyclotomic &x = a_[i * n + k];
                if (x.is_zero())
                    continue;
                for (std::size_t j : support[k])
                {
                    Cyclotomic p = x * o.a_[k * n + j];
                    if (touched[j])
                        r.a_[i * n + j] += p;
                    else
                    {
                        r.a_[i * n + j] = std::move(p);
                        touched[j] = true;
                    }
                }
            }
        }
        return r;
    }

    UMatrix UMatrix::operator+(const UMatrix &o) const
    {
        require_compatible(o);
        UMatrix r = *this;
        r.kind_ = MatrixKind::Operator;
        for (std::size_t k = 0; k < a_.size(); ++k)
            r.a_[k] += o.a_[k];
        return r;
    }

    UMatrix UMatrix::operator-(const UMatrix &o) const
    {
        require_compatible(o);
        UMatrix r = *this;
        r.kind_ = MatrixKind::Operator;
        for (std::size_t k = 0; k < a_.size(); ++k)
            r.a_[k] -= o.a_[k];
        return r;
    }

    std::vector<Cyclotomic> UMatrix::operator*(std::span<const Cyclotomic> v) const
    {
        if (v.size() != n_)
            throw UsageError("vector length differs from matrix dimension");
        std::vector<Cyclotomic> out(n_, Cyclotomic(*field_));
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t k = 0; k < n_; ++k)
            {
                const Cyclotomic &x = a_[i * n_ + k];
                if (!x.is_zero() && !v[k].is_zero())
                    out[i] += x * v[k];
            }
        return out;
    }

    UMatrix UMatrix::scaled(const Cyclotomic &s) const
    {
        UMatrix r = *this;
        for (auto &x : r.a_)
            if (!x.is_zero())
                x = x * s;
        return r;
    }

    UMatrix UMatrix::adjoint() const
    {
        UMatrix r(n_, conductor(), kind_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j)
                r.a_[j * n_ + i] = a_[i * n_ + j].conj();
        return r;
    }

    UMatrix UMatrix::inverse() const
    {
        if (kind_ != MatrixKind::Unitary)
            throw UsageError("inverse is only provided for unitary matrices");
        return adjoint();
    }

    UMatrix UMatrix::pow(std::int64_t e) const
    {
        UMatrix base = e < 0 ? inverse() : *this;
        std::uint64_t k = e < 0 ? static_cast<std::uint64_t>(-(e + 1)) + 1 : static_cast<std::uint64_t>(e);
        UMatrix r = identity(n_, conductor());
        r.kind_ = kind_;
        while (k)
        {
            if (k & 1)
                r = r * base;
            k >>= 1;
            if (k)
                base = base * base;
        }
        return r;
    }

    UMatrix UMatrix::tensor(const UMatrix &o) const
    {
        if (field_ != o.field_)
            throw UsageError("matrix conductors differ");
        const std::size_t n = n_ * o.n_;
        UMatrix r(n, conductor(),
                  kind_ == MatrixKind::Unitary && o.kind_ == MatrixKind::Unitary ? MatrixKind::Unitary
                                                                                 : MatrixKind::Operator);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j)
            {
                const Cyclotomic &x = a_[i * n_ + j];
                if (x.is_zero())
                    continue;
                for (std::size_t k = 0; k < o.n_; ++k)
                    for (std::size_t l = 0; l < o.n_; ++l)
                    {
                        const Cyclotomic &y = o.a_[k * o.n_ + l];
                        if (!y.is_zero())
                            r.a_[(i * o.n_ + k) * n + j * o.n_ + l] = x * y;
                    }
            }
        return r;
    }

    UMatrix UMatrix::lift(std::uint32_t target) const
    {
        std::vector<Cyclotomic> e;
        e.reserve(a_.size());
        for (const auto &x : a_)
            e.push_back(x.lift(target));
        return UMatrix(n_, std::move(e), kind_);
    }

    Cyclotomic UMatrix::trace() const
    {
        Cyclotomic t(*field_);
        for (std::size_t i = 0; i < n_; ++i)
            t += a_[i * n_ + i];
        return t;
    }

    bool UMatrix::is_identity() const
    {
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j)
            {
                const Cyclotomic &x = a_[i * n_ + j];
                if (i == j ? !x.is_one() : !x.is_zero())
                    return false;
            }
        return true;
    }

    bool UMatrix::is_unitary() const
    {
        return (*this * adjoint()).is_identity();
    }

    void UMatrix::require_unitary() const
    {
        if (kind_ == MatrixKind::Unitary && !is_unitary())
            throw IntegrityError("matrix tagged unitary fails M M^dagger = I");
    }

    std::optional<Cyclotomic> UMatrix::as_scalar() const
    {
        const Cyclotomic &s = a_[0];
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j)
            {
                const Cyclotomic &x = a_[i * n_ + j];
                if (i == j ? !(x == s) : !x.is_zero())
                    return std::nullopt;
            }
        return s;
    }

    bool UMatrix::is_monomial() const
    {
        std::vector<int> col(n_, 0);
        for (std::size_t i = 0; i < n_; ++i)
        {
            int row = 0;
            for (std::size_t j = 0; j < n_; ++j)
                if (!a_[i * n_ + j].is_zero())
                {
                    ++row;
                    ++col[j];
                }
            if (row != 1)
                return false;
        }
        for (int c : col)
            if (c != 1)
                return false;
        return true;
    }

    const Cyclotomic &UMatrix::first_nonzero() const
    {
        for (const auto &x : a_)
            if (!x.is_zero())
                return x;
        throw UsageError("zero matrix has no first nonzero entry");
    }

    std::string UMatrix::key() const
    {
        std::string out;
        for (const auto &x : a_)
            x.append_key(out);
        return out;
    }

    UMatrix UMatrix::from_key(std::size_t dim, const CyclotomicField &f, std::string_view key, MatrixKind kind)
    {
        std::vector<Cyclotomic> e;
        e.reserve(dim * dim);
        for (std::size_t k = 0; k < dim * dim; ++k)
            e.push_back(Cyclotomic::read_key(f, key));
        if (!key.empty())
            throw UsageError("trailing bytes in matrix key");
        return UMatrix(dim, std::move(e), kind);
    }

    std::string UMatrix::to_json() const
    {
        nlohmann::ordered_json j;
        j["dim"] = n_;
        j["m"] = conductor();
        auto rows = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < n_; ++i)
        {
            auto row = nlohmann::ordered_json::array();
            for (std::size_t k = 0; k < n_; ++k)
                row.push_back(nlohmann::ordered_json::parse(a_[i * n_ + k].to_json()));
            rows.push_back(std::move(row));
        }
        j["entries"] = std::move(rows);
        return j.dump();
    }

    bool operator==(const UMatrix &a, const UMatrix &b) noexcept
    {
        return a.n_ == b.n_ && a.field_ == b.field_ && a.a_ == b.a_;
    }

    ProjectiveForm scalar_canonical(const UMatrix &m)
    {
        Cyclotomic s = m.first_nonzero();
        if (s.is_one())
            return {m, s};
        return {m.scaled(s.inverse()), s};
    }

} // namespace cqm
