#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cqm/cyclotomic.hpp"
#include "cqm/galois.hpp"
#include "cqm/matrix.hpp"

namespace cqm
{

    // tau = -zeta_{2N} inside Q(zeta_m); 2N must divide m.
    Cyclotomic tau(std::uint32_t N, std::uint32_t m);
    // omega = zeta_N inside Q(zeta_m).
    Cyclotomic omega(std::uint32_t N, std::uint32_t m);

    struct WeylHeisenberg
    {
        Cyclotomic tau;
        UMatrix X; // |i> -> |i+1>
        UMatrix Z; // diag(omega^i)
    };

    // All constructions default to the conductor conductor_for(N).
    WeylHeisenberg wh_generators(std::uint32_t N, std::uint32_t m = 0);
    UMatrix shift_matrix(std::uint32_t N, std::int64_t v = 1, std::uint32_t m = 0);
    UMatrix clock_matrix(std::uint32_t N, std::int64_t v = 1, std::uint32_t m = 0);
    // (F)_{ij} = omega^{ij} / sqrt(N); the field must contain sqrt(N).
    UMatrix fourier_matrix(std::uint32_t N, std::uint32_t m = 0);
    // diag(tau^{i(i+N)})
    UMatrix s_matrix(std::uint32_t N, std::uint32_t m = 0);
    // diag(0, 1, ..., N-1), tagged as an operator.
    UMatrix position_operator(std::uint32_t N, std::uint32_t m = 0);

    struct WeylReport
    {
        bool holds;
        UMatrix zx;       // Z X
        UMatrix omega_xz; // omega X Z
    };
    WeylReport check_weyl_relation(std::uint32_t N, std::uint32_t m = 0);

    /**
     * D_p = tau^{p1 p2} X^{p1} Z^{p2} with the integers p1, p2 used literally
     * in the phase; X and Z powers are reduced mod N.
     */
    UMatrix displacement(std::uint32_t N, std::int64_t p1, std::int64_t p2, std::uint32_t m = 0);

    // p2 q1 - p1 q2 reduced mod ord(tau): mod N for odd N, mod 2N for even N.
    std::int64_t symplectic_form(std::pair<std::int64_t, std::int64_t> p, std::pair<std::int64_t, std::int64_t> q,
                                 std::uint32_t N);

    // Multiplicative order of tau: N for odd N, 2N for even N.
    std::uint32_t tau_order(std::uint32_t N);

    /**
     * X_nu = sum_g |g+nu><g| and Z_mu = sum_g exp(2 pi i tr(mu g) / p) |g><g| on
     * C^q, rows labelled by element index. Default conductor conductor_for(q).
     */
    std::pair<UMatrix, UMatrix> galois_generators(const GaloisField &field, const GFElement &nu, const GFElement &mu,
                                                  std::uint32_t m = 0);

    // x0 + v t mod N; throws UsageError unless gcd(v, N) = 1.
    std::uint64_t evolve_ontic(std::int64_t x0, std::int64_t v, std::int64_t t, std::uint32_t N);

    struct ClosureOptions
    {
        bool projective = false;
        std::size_t max_size = 1'000'000;
        unsigned threads = 1;
    };

    /**
     * Breadth-first closure of a finite matrix group. Elements are stored as
     * exact byte keys (scalar-canonical when projective) and decoded on demand.
     *
     * In projective mode the table also records the scalar subgroup of the
     * underlying linear group: every time a product lands on an existing class
     * the ratio of the two representatives is a scalar of the group, and these
     * ratios generate G intersected with the scalars. Hence
     * |G| = order() * scalar_order().
     */
    class GroupTable
    {
    public:
        std::size_t dim() const noexcept { return dim_; }
        std::uint32_t conductor() const noexcept { return field_->conductor(); }
        bool projective() const noexcept { return projective_; }
        std::size_t order() const noexcept { return offsets_.size() - 1; }
        const std::vector<std::string> &generator_names() const noexcept { return names_; }

        UMatrix element(std::size_t i) const;
        std::string_view element_key(std::size_t i) const;
        // Generator indices of a shortest word (by BFS level) for element i, left to right.
        std::vector<std::size_t> word(std::size_t i) const;
        std::optional<std::size_t> index_of(const UMatrix &m) const;
        bool contains(const UMatrix &m) const { return index_of(m).has_value(); }
        // Exact membership in the linear group; on projective tables this combines the
        // class lookup with the recorded scalar subgroup.
        bool contains_linear(const UMatrix &m) const;

        // Projective mode only: order of the scalar subgroup.
        std::uint64_t scalar_order() const;
        // Root-of-unity exponents (units of 1/lcm(2,m)) of the scalar subgroup.
        std::vector<std::uint32_t> scalar_exponents() const;

        // {"dim","projective","order","generators","elements"}; elements sorted by key, omitted when !with_elements.
        std::string to_json(bool with_elements = true) const;

    private:
        friend GroupTable group_closure(std::span<const UMatrix>, std::vector<std::string>, const ClosureOptions &);

        std::optional<std::size_t> find(std::string_view key, std::uint64_t h) const;
        std::size_t insert(std::string_view key, std::uint64_t h, std::size_t parent, std::size_t gen);
        void grow();

        std::size_t dim_ = 0;
        const CyclotomicField *field_ = nullptr;
        bool projective_ = false;
        std::vector<std::string> names_;
        std::string arena_;
        std::vector<std::uint64_t> offsets_{0};
        std::vector<std::uint64_t> hashes_;
        std::vector<std::uint32_t> parent_;
        std::vector<std::uint16_t> gen_;
        std::vector<std::uint32_t> slots_; // open addressing, index+1, 0 = empty
        // projective bookkeeping: representative scale and its inverse per element
        std::vector<Cyclotomic> scale_, inv_scale_;
        std::uint32_t scalar_gcd_ = 0;
    };

    // Throws ResourceError carrying the partial size when max_size is exceeded.
    GroupTable group_closure(std::span<const UMatrix> generators, std::vector<std::string> names = {},
                             const ClosureOptions &options = {});

    // Scalars s with s*I in the group; the table must be non-projective.
    std::vector<Cyclotomic> center_of(const GroupTable &table);

} // namespace cqm
