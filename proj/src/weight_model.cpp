#include "leeisd/weight_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace leeisd {

namespace {

// Weight law on 0..r with P(w = j) proportional to mult(j) exp(-beta j), computed
// with a shift so that large |beta| cannot overflow.
std::vector<double> weight_law(double beta, const RingSpec& ring, std::uint32_t r, double* log_z = nullptr) {
    std::vector<double> lw(r + 1);
    double top = -INFINITY;
    for (std::uint32_t j = 0; j <= r; ++j) {
        lw[j] = std::log(double(ring.multiplicity(j))) - beta * j;
        top = std::max(top, lw[j]);
    }
    double z = 0;
    for (std::uint32_t j = 0; j <= r; ++j) z += (lw[j] = std::exp(lw[j] - top));
    for (auto& x : lw) x /= z;
    if (log_z) *log_z = top + std::log(z);
    return lw;
}

double mean_of(const std::vector<double>& law) {
    double m = 0;
    for (std::size_t j = 0; j < law.size(); ++j) m += j * law[j];
    return m;
}

double solve(double T, const RingSpec& ring, std::uint32_t r) {
    if (!(T > 0) || !(T < r)) throw OutOfRange("solve_beta: target " + std::to_string(T) + " outside (0, " +
                                               std::to_string(r) + ")");
    auto f = [&](double b) { return mean_of(weight_law(b, ring, r)) - T; };  // decreasing in b
    double lo = -50, hi = 50;
    while (f(lo) < 0) lo *= 2;
    while (f(hi) > 0) hi *= 2;
    double mid = 0;
    for (int it = 0; it < 2000; ++it) {
        mid = 0.5 * (lo + hi);
        double v = f(mid);
        if (std::abs(v) < 1e-12 || mid == lo || mid == hi) break;
        (v > 0 ? lo : hi) = mid;
    }
    return mid;
}

}  // namespace

double MarginalDistribution::mean_weight() const { return mean_of(weight_prob); }

double solve_beta(double T, const RingSpec& ring) { return solve(T, ring, ring.M()); }

double solve_beta_restricted(double T, const RingSpec& ring, std::uint32_t r) {
    if (r > ring.M()) throw InvalidArgument("solve_beta_restricted: r > M");
    return solve(T, ring, r);
}

MarginalDistribution marginal(double beta, const RingSpec& ring) {
    if (!std::isfinite(beta)) throw InvalidArgument("marginal: beta must be finite");
    MarginalDistribution m{ring, beta, 0, {}, {}};
    double log_z = 0;
    m.weight_prob = weight_law(beta, ring, ring.M(), &log_z);
    m.normalizer = std::exp(log_z);
    m.elem_prob.resize(ring.q());
    for (Elem x = 0; x < ring.q(); ++x) {
        std::uint32_t w = ring.lee_weight(x);
        m.elem_prob[x] = m.weight_prob[w] / ring.multiplicity(w);
    }
    return m;
}

std::vector<double> restricted_weight_law(double beta, const RingSpec& ring, std::uint32_t r) {
    if (r > ring.M()) throw InvalidArgument("restricted_weight_law: r > M");
    return weight_law(beta, ring, r);
}

WeightStats expected_stats(std::uint32_t r, std::uint64_t t, std::uint64_t n, std::uint64_t ell,
                           const RingSpec& ring) {
    if (r > ring.M()) throw InvalidArgument("expected_stats: r > M");
    if (ell > n) throw InvalidArgument("expected_stats: ell > n");
    const auto law = weight_law(solve_beta(double(t) / double(n), ring), ring, ring.M());
    WeightStats s;
    double heavy = 0, light_weight = 0, nonzero = 0;
    for (std::uint32_t j = 0; j <= ring.M(); ++j) {
        if (j > r) heavy += law[j];
        else light_weight += j * law[j];
        if (j >= 1) nonzero += law[j];
    }
    s.psi = double(n) * heavy;
    s.phi = double(n) * light_weight;
    s.sigma = double(ell) * nonzero;
    return s;
}

WeightComposition expected_composition(std::uint64_t v, std::uint64_t nprime, std::uint32_t r, const RingSpec& ring) {
    if (r > ring.M()) throw InvalidArgument("expected_composition: r > M");
    if (v > nprime * r) throw EmptySet("expected_composition: restricted sphere is empty");
    std::vector<std::uint64_t> count(r + 1, 0);
    if (v == 0) {
        count[0] = nprime;
    } else if (v == nprime * r) {
        count[r] = nprime;
    } else {
        const auto law = weight_law(solve_beta_restricted(double(v) / double(nprime), ring, r), ring, r);
        // Largest-remainder rounding; ties go to the larger part size.
        std::vector<double> rem(r + 1);
        std::uint64_t placed = 0;
        for (std::uint32_t j = 0; j <= r; ++j) {
            double exact = law[j] * double(nprime);
            count[j] = static_cast<std::uint64_t>(std::floor(exact));
            rem[j] = exact - double(count[j]);
            placed += count[j];
        }
        std::vector<std::uint32_t> order(r + 1);
        std::iota(order.begin(), order.end(), 0u);
        std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
            return rem[a] != rem[b] ? rem[a] > rem[b] : a > b;
        });
        for (std::size_t i = 0; placed < nprime; i = (i + 1) % order.size(), ++placed) ++count[order[i]];

        // Shift single parts by one until the total weight is exactly v, always
        // touching the largest part size that can move.
        std::uint64_t w = 0;
        for (std::uint32_t j = 0; j <= r; ++j) w += j * count[j];
        while (w < v) {
            std::uint32_t j = r;
            while (count[j - 1] == 0) --j;  // largest j with a part of size j-1 (exists since w < nprime r)
            --count[j - 1];
            ++count[j];
            ++w;
        }
        while (w > v) {
            std::uint32_t j = r;
            while (count[j] == 0) --j;
            --count[j];
            ++count[j - 1];
            --w;
        }
    }
    std::vector<std::uint32_t> parts;
    parts.reserve(nprime);
    for (std::uint32_t j = r + 1; j-- > 0;) parts.insert(parts.end(), count[j], j);
    return WeightComposition(std::move(parts));
}

}  // namespace leeisd
