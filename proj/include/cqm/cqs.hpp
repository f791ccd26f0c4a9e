#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "cqm/matrix.hpp"
#include "cqm/rays.hpp"

namespace cqm
{

    // The Clifford generators X, F, S of dimension N over Q(zeta_m).
    struct CliffordAction
    {
        std::uint32_t N;
        std::uint32_t m;
        std::vector<UMatrix> gens;

        static CliffordAction make(std::uint32_t N, std::uint32_t m = 0);
        CliffordAction lifted(std::uint32_t target) const;
    };

    // Rays reachable from seed, in breadth-first order.
    std::vector<Ray> clifford_orbit(const Ray &seed, const CliffordAction &act);

    // Scalars of CL(N), i.e. its center, as elements of Q(zeta_m).
    std::vector<Cyclotomic> clifford_center(std::uint32_t N, std::uint32_t m);

    /**
     * Set of canonical rays over one field, partitioned into Clifford orbits,
     * each state tagged with the step that produced it.
     */
    class StateSet
    {
    public:
        StateSet(std::uint32_t N, std::uint32_t m);

        std::uint32_t dim() const noexcept { return N_; }
        std::uint32_t conductor() const noexcept { return m_; }
        std::size_t size() const noexcept { return states_.size(); }
        const std::vector<Ray> &states() const noexcept { return states_; }
        std::uint32_t generation(std::size_t i) const { return gen_.at(i); }
        const std::vector<std::vector<std::size_t>> &orbits() const noexcept { return orbits_; }

        std::optional<std::size_t> index_of(const Ray &r) const;
        bool contains(const Ray &r) const { return index_of(r).has_value(); }

        // Adds a whole orbit (rays already present are skipped); returns the number added.
        std::size_t add_orbit(const std::vector<Ray> &orbit, std::uint32_t generation);

        StateSet lifted(std::uint32_t target) const;

        // {"dim","m","size","orbits":[{"size","generation","states":[ray...]}]}; orbits sorted by
        // (generation, first key), states inside an orbit by key.
        std::string to_json() const;
        static StateSet from_json(std::string_view text);

    private:
        std::uint32_t N_, m_;
        std::vector<Ray> states_;
        std::vector<std::uint32_t> gen_;
        std::vector<std::vector<std::size_t>> orbits_;
        std::unordered_map<std::string, std::size_t> index_;
    };

    struct CandidateStats
    {
        std::size_t pairs = 0;
        std::size_t raw = 0;      // pair x phase sums that are nonzero
        std::size_t distinct = 0; // distinct rays among them
        std::size_t fresh = 0;    // not already in the current set; these are the candidates
    };

    struct Candidates
    {
        std::vector<Ray> rays; // fresh rays, sorted by key
        CandidateStats stats;
        std::uint32_t conductor;
    };

    /**
     * Pairwise interference a/|a| + phi b/|b| over unordered pairs of distinct
     * states and phi in the center of CL(N). The ratio |a|^2/|b|^2 is rational
     * for states with rational ontic probabilities, so the sum is formed as
     * a + phi sqrt(|a|^2/|b|^2) b; the field is enlarged when that root needs it.
     */
    Candidates interference_candidates(const StateSet &current, unsigned threads = 1);

    struct Rejection
    {
        Ray candidate;
        std::size_t witness; // index into the existing set
        Cyclotomic probability;
    };

    struct FilterResult
    {
        std::vector<Ray> kept;
        std::vector<Rejection> rejected;
    };

    // Keeps candidates whose transition probability with every existing state is rational.
    FilterResult rationality_filter(std::span<const Ray> candidates, const StateSet &existing, unsigned threads = 1);

    // Throws IntegrityError naming the first violated requirement (invariance, ontic, rationality).
    void check_cqs_requirements(const StateSet &set, const CliffordAction &act, unsigned threads = 1);

    // Partition into Clifford orbits; throws UsageError if the set is not closed.
    std::vector<std::vector<std::size_t>> orbit_decompose(const StateSet &set, const CliffordAction &act);

    struct StepReport
    {
        std::uint32_t step = 0;
        std::uint32_t conductor = 0;
        CandidateStats candidates;
        std::size_t kept = 0;
        std::size_t rejected = 0;
        std::size_t added = 0; // states added after orbit closure
        std::vector<std::size_t> new_orbit_sizes;
        std::size_t total = 0;
        double seconds = 0;
    };

    struct CqsRun
    {
        StateSet set;
        std::vector<StepReport> steps;
    };

    // Step 0 is the orbit of |0>; each further step interferes, filters, closes and asserts.
    CqsRun cqs_generate(std::uint32_t N, std::uint32_t steps, unsigned threads = 1);
    // Resumes from an existing set whose last generation is treated as the previous step.
    CqsRun cqs_continue(StateSet set, std::uint32_t steps, unsigned threads = 1);

    std::string step_report_json(const StepReport &r);

} // namespace cqm
