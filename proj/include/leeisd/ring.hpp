#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace leeisd {

using Elem = std::uint32_t;

/// Base error type for everything thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// The ring Z/p^sZ together with q = p^s and M = floor(q/2).
class RingSpec {
public:
    RingSpec(std::uint32_t p, std::uint32_t s);

    /// Factors q as a prime power; throws if q is not one.
    static RingSpec from_modulus(std::uint64_t q);

    std::uint32_t p() const { return p_; }
    std::uint32_t s() const { return s_; }
    std::uint32_t q() const { return q_; }
    std::uint32_t M() const { return M_; }
    bool even() const { return p_ == 2; }

    /// Number of ring elements of Lee weight j (1 for j = 0 and for j = M when q is even, else 2).
    std::uint32_t multiplicity(std::uint32_t j) const {
        if (j > M_) return 0;
        if (j == 0 || (j == M_ && q_ % 2 == 0)) return 1;
        return 2;
    }

    std::uint32_t lee_weight(Elem x) const { return x <= q_ - x ? x : q_ - x; }

    Elem neg(Elem x) const { return x == 0 ? 0 : q_ - x; }
    Elem add(Elem a, Elem b) const {
        std::uint64_t r = std::uint64_t(a) + b;
        return static_cast<Elem>(r >= q_ ? r - q_ : r);
    }
    Elem sub(Elem a, Elem b) const { return a >= b ? a - b : a + (q_ - b); }
    Elem mul(Elem a, Elem b) const { return static_cast<Elem>(std::uint64_t(a) * b % q_); }
    bool is_unit(Elem x) const { return x % p_ != 0; }
    /// Multiplicative inverse of a unit (extended Euclid).
    Elem inverse(Elem x) const;

    std::string to_string() const;

    friend bool operator==(const RingSpec&, const RingSpec&) = default;

private:
    std::uint32_t p_;
    std::uint32_t s_;
    std::uint32_t q_;
    std::uint32_t M_;
};

bool is_prime(std::uint64_t n);

inline std::uint32_t lee_weight(Elem x, const RingSpec& ring) { return ring.lee_weight(x); }

}  // namespace leeisd
