#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cqm/cyclotomic.hpp"

namespace cqm
{

    // Validation profile: group elements must be unitary, observables need not be.
    enum class MatrixKind
    {
        Unitary,
        Operator,
    };

    /**
     * Dense square matrix over one cyclotomic field. Row-major.
     *
     * Matrices tagged Unitary are checked (M M^dagger = I, exactly) by
     * `require_unitary`; constructors do not check, so products built during a
     * closure stay cheap.
     */
    class UMatrix
    {
    public:
        UMatrix(std::size_t dim, std::uint32_t m, MatrixKind kind = MatrixKind::Unitary);
        UMatrix(std::size_t dim, std::vector<Cyclotomic> entries, MatrixKind kind = MatrixKind::Unitary);

        static UMatrix identity(std::size_t dim, std::uint32_t m);
        static UMatrix diagonal(std::vector<Cyclotomic> diag, MatrixKind kind = MatrixKind::Unitary);
        // Permutation matrix with a 1 at (perm[j], j).
        static UMatrix permutation(std::span<const std::size_t> perm, std::uint32_t m);

        std::size_t dim() const noexcept { return n_; }
        std::uint32_t conductor() const noexcept { return field_->conductor(); }
        const CyclotomicField &field() const noexcept { return *field_; }
        MatrixKind kind() const noexcept { return kind_; }
        void set_kind(MatrixKind k) noexcept { kind_ = k; }

        const Cyclotomic &operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
        void set(std::size_t i, std::size_t j, Cyclotomic v);
        const std::vector<Cyclotomic> &entries() const noexcept { return a_; }

        UMatrix operator*(const UMatrix &o) const;
        UMatrix operator+(const UMatrix &o) const;
        UMatrix operator-(const UMatrix &o) const;
        std::vector<Cyclotomic> operator*(std::span<const Cyclotomic> v) const;
        UMatrix scaled(const Cyclotomic &s) const;

        UMatrix adjoint() const;
        // Exact inverse of a unitary matrix (its adjoint); throws for Operator matrices.
        UMatrix inverse() const;
        UMatrix pow(std::int64_t e) const;
        // Kronecker product, this factor most significant.
        UMatrix tensor(const UMatrix &o) const;
        UMatrix lift(std::uint32_t target) const;
        Cyclotomic trace() const;

        bool is_identity() const;
        bool is_unitary() const;
        void require_unitary() const;
        // The scalar s when this equals s * I.
        std::optional<Cyclotomic> as_scalar() const;
        // Every row and column has exactly one nonzero entry.
        bool is_monomial() const;

        // First nonzero entry in row-major order; the matrix must be nonzero.
        const Cyclotomic &first_nonzero() const;

        // Byte key of the exact entries; equal keys <=> equal matrices.
        std::string key() const;
        static UMatrix from_key(std::size_t dim, const CyclotomicField &f, std::string_view key,
                                MatrixKind kind = MatrixKind::Unitary);

        // {"dim": n, "m": m, "entries": [[cyclotomic, ...], ...]}
        std::string to_json() const;

        friend bool operator==(const UMatrix &a, const UMatrix &b) noexcept;

    private:
        void require_compatible(const UMatrix &o) const;

        std::size_t n_;
        const CyclotomicField *field_;
        std::vector<Cyclotomic> a_;
        MatrixKind kind_;
    };

    /**
     * Scalar-canonical form of a nonzero matrix: M divided by its first nonzero
     * entry, which therefore becomes 1. Two matrices are proportional exactly
     * when their scalar-canonical forms agree.
     */
    struct ProjectiveForm
    {
        UMatrix canonical;
        Cyclotomic scale; // M = scale * canonical
    };
    ProjectiveForm scalar_canonical(const UMatrix &m);

} // namespace cqm
