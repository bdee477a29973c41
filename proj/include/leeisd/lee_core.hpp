#pragma once

// Exact Lee-weight combinatorics: counts of (restricted) spheres, balls and
// fitting compositions, plus uniform sampling and ordered enumeration.

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "leeisd/ring.hpp"

namespace leeisd {

using ExactCount = mpz_class;
using Rng = std::mt19937_64;

class EmptySet : public Error {
public:
    using Error::Error;
};

class TooLarge : public Error {
public:
    using Error::Error;
};

/// A length-n vector over Z/qZ with its Lee weight cached.
class LeeVector {
public:
    explicit LeeVector(RingSpec ring, std::size_t n = 0);
    LeeVector(RingSpec ring, std::vector<Elem> entries);

    const RingSpec& ring() const { return ring_; }
    std::size_t size() const { return entries_.size(); }
    const std::vector<Elem>& entries() const { return entries_; }
    Elem operator[](std::size_t i) const { return entries_[i]; }
    std::uint64_t weight() const { return weight_; }

    void set(std::size_t i, Elem x);

    friend bool operator==(const LeeVector& a, const LeeVector& b) { return a.entries_ == b.entries_; }
    friend auto operator<=>(const LeeVector& a, const LeeVector& b) { return a.entries_ <=> b.entries_; }

private:
    RingSpec ring_;
    std::vector<Elem> entries_;
    std::uint64_t weight_ = 0;
};

std::uint64_t lee_weight(const LeeVector& v);
std::uint64_t lee_weight(std::span<const Elem> v, const RingSpec& ring);
/// Lee distance wt(x - y).
std::uint64_t lee_distance(const LeeVector& x, const LeeVector& y);

/// Parts lambda_1..lambda_n with 0 <= lambda_i <= M.
class WeightComposition {
public:
    WeightComposition() = default;
    explicit WeightComposition(std::vector<std::uint32_t> parts);

    const std::vector<std::uint32_t>& parts() const { return parts_; }
    std::uint64_t total() const { return total_; }
    std::size_t size() const { return parts_.size(); }
    /// counts()[i] is the number of parts equal to i.
    std::vector<std::uint64_t> counts() const;
    void validate(const RingSpec& ring) const;

private:
    std::vector<std::uint32_t> parts_;
    std::uint64_t total_ = 0;
};

/// Full length-by-weight count table for one alphabet restriction. Row `len`
/// holds F_[rmin,rmax](w, len) for w = 0..max_weight.
class SphereTable {
public:
    SphereTable(const RingSpec& ring, std::uint32_t rmin, std::uint32_t rmax, std::size_t max_len,
                std::uint64_t max_weight);

    const ExactCount& at(std::uint64_t weight, std::size_t len) const;
    std::size_t max_len() const { return rows_.size() - 1; }
    std::uint64_t max_weight() const { return max_weight_; }

private:
    std::vector<std::vector<ExactCount>> rows_;
    std::uint64_t max_weight_;
};

/// Number of vectors of length n, Lee weight exactly t, every entry weight in [rmin, rmax].
ExactCount count_sphere_restricted(std::uint64_t t, std::size_t n, const RingSpec& ring, std::uint32_t rmin,
                                   std::uint32_t rmax);
ExactCount count_sphere(std::uint64_t t, std::size_t n, const RingSpec& ring);
ExactCount count_ball(std::uint64_t t, std::size_t n, const RingSpec& ring);

/// All counts F_[rmin,rmax](w, n) for w = 0..max_weight in one pass.
std::vector<ExactCount> sphere_count_row(std::size_t n, std::uint64_t max_weight, const RingSpec& ring,
                                         std::uint32_t rmin, std::uint32_t rmax);

/// Weak compositions pi of v with 0 <= pi_i <= lambda_i.
ExactCount count_fitting_compositions(std::uint64_t v, const WeightComposition& lambda);

/// Uniform element of the restricted sphere.
LeeVector sample_sphere_restricted(std::uint64_t t, std::size_t n, const RingSpec& ring, std::uint32_t rmin,
                                   std::uint32_t rmax, Rng& rng);
LeeVector sample_sphere(std::uint64_t t, std::size_t n, const RingSpec& ring, Rng& rng);

constexpr std::uint64_t kDefaultEnumerationGuard = 100'000'000;

/// Visits every element of the restricted sphere once, ordered lexicographically by
/// (weight composition, sign pattern). Returning false from the visitor stops early.
void enumerate_sphere_restricted(std::uint64_t t, std::size_t n, const RingSpec& ring, std::uint32_t rmin,
                                 std::uint32_t rmax, const std::function<bool(const LeeVector&)>& visit,
                                 std::uint64_t guard = kDefaultEnumerationGuard);
std::vector<LeeVector> list_sphere_restricted(std::uint64_t t, std::size_t n, const RingSpec& ring,
                                              std::uint32_t rmin, std::uint32_t rmax,
                                              std::uint64_t guard = kDefaultEnumerationGuard);

/// Uniform integer in [0, bound) drawn from rng; bound must be positive.
ExactCount uniform_below(const ExactCount& bound, Rng& rng);

/// floor(log_q(x)) for x >= 1.
std::uint64_t floor_log(const ExactCount& x, std::uint64_t q);
/// Natural logarithm of a positive count (double precision).
double log_count(const ExactCount& x);

ExactCount binomial(std::uint64_t n, std::uint64_t k);
ExactCount power(std::uint64_t base, std::uint64_t exp);

}  // namespace leeisd
