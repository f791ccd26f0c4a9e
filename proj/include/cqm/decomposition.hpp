#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cqm/matrix.hpp"
#include "cqm/qgroups.hpp"
#include "cqm/rational.hpp"

namespace cqm
{

    /**
     * Z_N split into prime-power factors n_1 < ... (ascending prime). The
     * forward map is k -> (k mod n_i); the dual map is k -> k u_i mod n_i with
     * u_i = (N/n_i)^{-1} mod n_i. Tensor indices put the first factor most
     * significant.
     */
    struct CrtSplit
    {
        std::uint32_t N;
        std::vector<std::uint32_t> factors;
        std::vector<std::uint32_t> primes;
        std::vector<std::uint32_t> dual_units; // u_i

        std::vector<std::uint32_t> forward(std::uint64_t k) const;
        std::uint64_t from_forward(const std::vector<std::uint32_t> &c) const;
        std::vector<std::uint32_t> dual(std::uint64_t k) const;
        std::uint64_t from_dual(const std::vector<std::uint32_t> &c) const;
        std::uint64_t tensor_index(const std::vector<std::uint32_t> &c) const;
    };

    // Throws UsageError for N < 2.
    CrtSplit crt_split(std::uint32_t N);

    // P|k> = |tensor_index(forward(k))>, so P X_N P^{-1} = X_{n_1} (x) ... (x) X_{n_M}.
    UMatrix crt_permutation(const CrtSplit &split, std::uint32_t m = 0);

    // Generator g of dimension n_i embedded as I (x) ... (x) g (x) ... (x) I.
    UMatrix embed_local(const CrtSplit &split, std::size_t factor, const UMatrix &g);

    struct EnergyLevel
    {
        std::uint32_t k;
        std::uint32_t n;
        Rational frequency; // k / n in units of h
    };

    // Dual-map components of level k; their frequencies sum to k/N mod 1.
    std::vector<EnergyLevel> energy_decompose(std::uint64_t k, const CrtSplit &split);
    bool energy_identity_holds(std::uint64_t k, const CrtSplit &split);

    struct ProductCheckOptions
    {
        bool full = true; // run the full linear closure of CL(N) as well
        std::size_t max_size = 1'000'000;
        unsigned threads = 1;
    };

    struct ProductReport
    {
        bool skipped = false;
        CrtSplit split;
        std::vector<std::uint64_t> local_orders;            // |CL(n_i)|
        std::vector<std::uint64_t> local_projective_orders; // |PCL(n_i)|
        std::uint64_t direct_product_order = 0;             // prod |CL(n_i)|
        std::uint64_t direct_product_projective = 0;        // prod |PCL(n_i)|
        std::uint64_t projective_order = 0;                 // |PCL(N)| by closure
        std::uint64_t scalar_order = 0;                     // |CL(N) ∩ scalars|
        std::optional<std::uint64_t> full_order;            // |CL(N)| by full closure, if run and under cap
        std::uint64_t order = 0;                            // full_order, else projective_order * scalar_order
        std::uint64_t local_group_order = 0;                // |<local generators (x) identities>|
        bool shift_factorizes = false;                      // P X P^{-1} = (x) X_{n_i}
        std::vector<std::pair<std::string, bool>> membership; // P g P^{-1} in the local group
        double seconds_projective = 0;
        double seconds_full = 0;

        bool order_matches() const { return order == direct_product_order; }
        bool projective_matches() const { return projective_order == direct_product_projective; }
        std::string to_json() const;
    };

    ProductReport clifford_product_check(std::uint32_t N, const ProductCheckOptions &opt = {});

} // namespace cqm
