#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cqm/matrix.hpp"
#include "cqm/rays.hpp"

namespace cqm
{

    struct BasisSet
    {
        std::size_t dim = 0;
        std::vector<std::vector<Ray>> bases;

        // {"dim": N, "bases": [[ray, ...], ...]}
        std::string to_json() const;
        static BasisSet from_json(std::string_view text);
    };

    struct MubViolation
    {
        std::size_t basis_a, index_a, basis_b, index_b;
        std::string probability; // exact value, or "irrational"
        std::string expected;    // "0", "1" or "1/N"; "N rays" for a short basis
    };

    struct MubReport
    {
        bool orthonormal = true; // every basis: N rays, pairwise probability 0
        bool unbiased = true;    // every cross pair: probability 1/N
        std::size_t pairs_checked = 0;
        std::size_t violation_count = 0;
        std::vector<MubViolation> violations; // first max_listed only

        bool ok() const noexcept { return orthonormal && unbiased; }
        std::string to_json() const;
    };

    MubReport verify_mub(const BasisSet &bs, std::size_t max_listed = 32);

    // Joint eigenbasis of commuting unitaries whose joint spectrum is simple.
    // Each generator A must satisfy A^r = c I for some r <= 4 dim; throws
    // IntegrityError if the eigenvectors do not fill a basis.
    std::vector<Ray> joint_eigenbasis(const std::vector<UMatrix> &commuting);

    // Ontic basis B_Z and Fourier basis B_X.
    BasisSet wh_bases(std::uint32_t N, std::uint32_t m = 0);

    /**
     * N+1 bases for N = p^l: the ontic basis followed by
     *   l = 1: eigenbases of X Z^k, k = 0..N-1;
     *   l > 1: joint eigenbases of {X_nu Z_{a nu}} over a basis nu of F_q, one per a in F_q (index order).
     * Throws UsageError unless p is prime and l >= 1.
     */
    BasisSet mub_complete_set(std::uint32_t p, std::uint32_t l, std::uint32_t m = 0);
    // Same, factoring N; throws UsageError for non-prime-powers.
    BasisSet mub_complete_set(std::uint32_t N);

    struct MubExtraction
    {
        bool complete = false; // orbit is a disjoint union of mutually unbiased bases
        BasisSet found;        // orthonormal bases taken greedily, in orbit order
        std::vector<Ray> leftover;
        std::vector<std::size_t> unbiased_subset; // greedy pairwise-unbiased subfamily of found.bases
        std::string obstruction;                  // empty iff complete
        MubReport report;                         // verify_mub(found)

        std::string to_json() const;
    };

    // Greedy partition of the rays into orthonormal bases, then verification.
    MubExtraction extract_mubs_from_orbit(const std::vector<Ray> &orbit);

} // namespace cqm
