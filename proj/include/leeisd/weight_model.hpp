#pragma once

#include <cstdint>
#include <vector>

#include "leeisd/lee_core.hpp"
#include "leeisd/ring.hpp"

namespace leeisd {

class OutOfRange : public Error {
public:
    using Error::Error;
};

/// Entry law of a uniformly drawn fixed-weight vector: P(E = x) proportional to exp(-beta wt(x)).
struct MarginalDistribution {
    RingSpec ring;
    double beta = 0;
    double normalizer = 0;            // Z(beta)
    std::vector<double> elem_prob;    // indexed by ring element, length q
    std::vector<double> weight_prob;  // indexed by Lee weight, length M + 1

    double mean_weight() const;
};

struct WeightStats {
    double psi = 0;    // expected number of entries heavier than r
    double phi = 0;    // expected weight carried by entries of weight <= r
    double sigma = 0;  // expected support size of a length-ell restriction
};

/// beta with expected entry weight T; bracketed bisection, tolerance 1e-12 on the constraint.
double solve_beta(double T, const RingSpec& ring);
/// Same constraint over the restricted alphabet {0, +-1, ..., +-r}.
double solve_beta_restricted(double T, const RingSpec& ring, std::uint32_t r);

MarginalDistribution marginal(double beta, const RingSpec& ring);
/// Weight law on 0..r of the alphabet restricted to weights <= r.
std::vector<double> restricted_weight_law(double beta, const RingSpec& ring, std::uint32_t r);

WeightStats expected_stats(std::uint32_t r, std::uint64_t t, std::uint64_t n, std::uint64_t ell,
                           const RingSpec& ring);

/// Expected weight composition of a uniform element of the r-restricted sphere of
/// weight v and length nprime. Parts are listed in nonincreasing order.
WeightComposition expected_composition(std::uint64_t v, std::uint64_t nprime, std::uint32_t r, const RingSpec& ring);

}  // namespace leeisd
