#pragma once

// Concrete decoders for the Lee-metric syndrome decoding problem: an exhaustive
// oracle, the two merge primitives, and the two-level restricted-balls decoder in
// its below-GV and beyond-GV (large-weight) forms.

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "leeisd/asymptotics.hpp"
#include "leeisd/code_algebra.hpp"
#include "leeisd/lee_core.hpp"

namespace leeisd {

using asym::Mode;

struct SolverParams {
    std::size_t ell = 0;
    std::uint64_t v = 0;
    std::size_t eps = 0;
    std::uint32_t r = 0;
    std::size_t u = 0;
    bool amortized = false;
    std::optional<std::size_t> list_cap;
    std::uint64_t max_iters = 0;  // 0 selects the default budget
    Mode mode = Mode::BelowGV;

    /// Throws InvalidArgument naming the first violated constraint.
    void validate(const SdpInstance& inst) const;
    std::string describe() const;
};

struct SolutionReport {
    std::vector<Elem> solution;
    std::uint64_t iterations = 0;  // permutations with a successful elimination
    std::uint64_t pge_failures = 0;
    std::chrono::duration<double> wall_time{0};
    std::size_t lists_peak = 0;
    std::uint64_t budget = 0;
    bool solved = false;

    /// Single-line key=value statistics record.
    std::string record() const;
};

class BudgetExhausted : public Error {
public:
    BudgetExhausted(const std::string& what, SolutionReport report) : Error(what), report_(std::move(report)) {}
    const SolutionReport& report() const { return report_; }

private:
    SolutionReport report_;
};

/// A partial vector together with its full ell-coordinate partial syndrome.
struct IndexedListEntry {
    std::vector<Elem> x;
    std::vector<Elem> syn;
};

using BaseList = std::vector<std::vector<Elem>>;
using MergedList = std::vector<IndexedListEntry>;

/// Every e on the t-sphere with e H^T = s, in enumeration order.
std::vector<LeeVector> brute_force_solve(const SdpInstance& inst, bool stop_at_first,
                                         std::uint64_t guard = kDefaultEnumerationGuard);

/// All concatenations (x1, x2) with x1 B1^T = target - x2 B2^T on the last u
/// coordinates. Output is ordered by key, then by position in B1, then in B2.
/// Each output entry carries x1 B1^T + x2 B2^T on all ell coordinates.
MergedList merge_concatenate(const BaseList& b1, const BaseList& b2, const Matrix& bmat1, const Matrix& bmat2,
                             std::span<const Elem> target, std::size_t u, const RingSpec& ring);

struct SplitSolution {
    std::vector<Elem> e1;
    std::vector<Elem> e2;
};

/// First pair (y1, y2) colliding on all ell coordinates whose sum has weight v and
/// whose induced e1 = s1 - (y1 + y2) A^T has weight t - v.
std::optional<SplitSolution> last_merge(const MergedList& l1, const MergedList& l2, std::span<const Elem> s2,
                                        const Matrix& amat, std::span<const Elem> s1, std::uint64_t v,
                                        std::uint64_t t, const RingSpec& ring);

/// Position sets of the two halves of the k+ell information coordinates.
struct HalfSplit {
    std::size_t left = 0;   // ceil((k+ell)/2)
    std::size_t right = 0;  // floor((k+ell)/2)
};
HalfSplit half_split(std::size_t kl);

/// Base lists of the below-GV decoder. `e_set` holds the eps coordinates (indices
/// into 0..kl-1, ceil(eps/2) of them in the left half) that carry arbitrary nonzero
/// values; all other coordinates are restricted to Lee weight <= r.
std::pair<BaseList, BaseList> build_base_lists_small(std::size_t kl, std::size_t eps, std::uint64_t v,
                                                     std::uint32_t r, const RingSpec& ring,
                                                     const std::vector<std::size_t>& e_set);
/// Per-weight lists of one half: entry w holds the half vectors whose restricted
/// coordinates carry Lee weight exactly w, for w = 0..max_weight.
std::vector<BaseList> build_half_lists_small(std::size_t kl, std::size_t eps, std::uint32_t r, const RingSpec& ring,
                                            const std::vector<std::size_t>& e_set, std::uint64_t max_weight,
                                            bool left);
/// Union over a of merge_concatenate(left[a], right[weight - a]): every concatenation
/// whose restricted weight is `weight`, wherever that weight sits between the halves.
MergedList merge_weight_splits(const std::vector<BaseList>& left, const std::vector<BaseList>& right,
                               std::uint64_t weight, const Matrix& bmat1, const Matrix& bmat2,
                               std::span<const Elem> target, std::size_t u, const RingSpec& ring);
/// Size predicted for one list of build_base_lists_small.
ExactCount base_list_size_small(std::size_t kl, std::size_t eps, std::uint64_t v, std::uint32_t r,
                                const RingSpec& ring, bool left);

/// Base lists of the beyond-GV decoder; all placements of the free, zero and heavy
/// blocks inside each half are enumerated.
std::pair<BaseList, BaseList> build_base_lists_large(std::size_t kl, std::size_t eps, std::uint64_t v,
                                                     std::uint32_t r, const RingSpec& ring);
ExactCount base_list_size_large(std::size_t kl, std::size_t eps, std::uint64_t v, std::uint32_t r,
                                const RingSpec& ring, bool left);

/// Number of representations of e2 used to pick u below GV (fitting compositions of
/// v/2 into the expected composition, times the eps placements and values).
ExactCount representation_count_small(std::uint64_t v, std::size_t kl, std::size_t eps, std::uint32_t r,
                                      const RingSpec& ring);
std::size_t choose_u_small(std::uint64_t v, std::size_t kl, std::size_t eps, std::uint32_t r, const RingSpec& ring,
                           std::size_t ell);

/// Exact representation count R_B of the beyond-GV decoder.
ExactCount representation_count_large(std::size_t kl, std::size_t eps, std::uint32_t r, const RingSpec& ring);
std::size_t choose_u_large(std::size_t kl, std::size_t eps, std::uint32_t r, const RingSpec& ring, std::size_t ell);

/// Probability that a random permutation moves the planted error into the decodable
/// shape, as an exact ratio of sphere counts.
double split_probability(const SdpInstance& inst, const SolverParams& params);
/// min(10^6, 100 ceil(1/P)).
std::uint64_t default_budget(const SdpInstance& inst, const SolverParams& params);

SolutionReport bjmm_small_balls(const SdpInstance& inst, const SolverParams& params, Rng& rng);
SolutionReport bjmm_large_weights(const SdpInstance& inst, const SolverParams& params, Rng& rng);
/// Dispatches on params.mode.
SolutionReport solve(const SdpInstance& inst, const SolverParams& params, Rng& rng);

/// Heuristic parameters for an instance.
SolverParams default_params(const SdpInstance& inst, Mode mode);
/// Below GV when t/n < M/2.
Mode natural_mode(const SdpInstance& inst);

}  // namespace leeisd
