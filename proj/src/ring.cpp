#include "leeisd/ring.hpp"

#include <limits>

namespace leeisd {

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

RingSpec::RingSpec(std::uint32_t p, std::uint32_t s) : p_(p), s_(s) {
    if (!is_prime(p)) throw InvalidArgument("ring: p = " + std::to_string(p) + " is not prime");
    if (s == 0) throw InvalidArgument("ring: s must be positive");
    std::uint64_t q = 1;
    for (std::uint32_t i = 0; i < s; ++i) {
        q *= p;
        // entries are products of two elements held in 64 bits
        if (q > (std::uint64_t(1) << 31)) throw InvalidArgument("ring: p^s exceeds 2^31");
    }
    q_ = static_cast<std::uint32_t>(q);
    M_ = q_ / 2;
}

RingSpec RingSpec::from_modulus(std::uint64_t q) {
    if (q < 2) throw InvalidArgument("ring: modulus must be at least 2");
    std::uint64_t p = 2;
    while (q % p != 0) ++p;
    std::uint32_t s = 0;
    std::uint64_t rest = q;
    while (rest % p == 0) {
        rest /= p;
        ++s;
    }
    if (rest != 1) throw InvalidArgument("ring: " + std::to_string(q) + " is not a prime power");
    return RingSpec(static_cast<std::uint32_t>(p), s);
}

Elem RingSpec::inverse(Elem x) const {
    if (!is_unit(x)) throw InvalidArgument("ring: element is not a unit");
    std::int64_t a = x, m = q_, u0 = 1, u1 = 0;
    while (m != 0) {
        std::int64_t t = a / m;
        a -= t * m;
        std::swap(a, m);
        u0 -= t * u1;
        std::swap(u0, u1);
    }
    std::int64_t r = u0 % std::int64_t(q_);
    if (r < 0) r += q_;
    return static_cast<Elem>(r);
}

std::string RingSpec::to_string() const {
    return "Z/" + std::to_string(q_) + "Z (p=" + std::to_string(p_) + ", s=" + std::to_string(s_) + ")";
}

}  // namespace leeisd
