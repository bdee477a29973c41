#include "leeisd/lee_core.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <tuple>

namespace leeisd {

// ---------------------------------------------------------------------------
// Vectors and compositions

LeeVector::LeeVector(RingSpec ring, std::size_t n) : ring_(ring), entries_(n, 0) {}

LeeVector::LeeVector(RingSpec ring, std::vector<Elem> entries) : ring_(ring), entries_(std::move(entries)) {
    for (Elem x : entries_) {
        if (x >= ring_.q()) throw InvalidArgument("LeeVector: entry " + std::to_string(x) + " outside [0, q)");
        weight_ += ring_.lee_weight(x);
    }
}

void LeeVector::set(std::size_t i, Elem x) {
    if (x >= ring_.q()) throw InvalidArgument("LeeVector: entry outside [0, q)");
    weight_ -= ring_.lee_weight(entries_.at(i));
    entries_[i] = x;
    weight_ += ring_.lee_weight(x);
}

std::uint64_t lee_weight(const LeeVector& v) { return v.weight(); }

std::uint64_t lee_weight(std::span<const Elem> v, const RingSpec& ring) {
    std::uint64_t w = 0;
    for (Elem x : v) w += ring.lee_weight(x);
    return w;
}

std::uint64_t lee_distance(const LeeVector& x, const LeeVector& y) {
    if (x.size() != y.size() || !(x.ring() == y.ring())) throw InvalidArgument("lee_distance: shape mismatch");
    std::uint64_t d = 0;
    for (std::size_t i = 0; i < x.size(); ++i) d += x.ring().lee_weight(x.ring().sub(x[i], y[i]));
    return d;
}

WeightComposition::WeightComposition(std::vector<std::uint32_t> parts) : parts_(std::move(parts)) {
    for (auto p : parts_) total_ += p;
}

std::vector<std::uint64_t> WeightComposition::counts() const {
    std::uint32_t top = parts_.empty() ? 0 : *std::max_element(parts_.begin(), parts_.end());
    std::vector<std::uint64_t> c(top + 1, 0);
    for (auto p : parts_) ++c[p];
    return c;
}

void WeightComposition::validate(const RingSpec& ring) const {
    for (auto p : parts_)
        if (p > ring.M()) throw InvalidArgument("WeightComposition: part exceeds M");
}

// ---------------------------------------------------------------------------
// Counting

namespace {

void check_bounds(const RingSpec& ring, std::uint32_t rmin, std::uint32_t rmax) {
    if (rmin > rmax || rmax > ring.M())
        throw InvalidArgument("invalid weight bounds [" + std::to_string(rmin) + ", " + std::to_string(rmax) +
                              "] for M = " + std::to_string(ring.M()));
}

// One step of the length recursion: next[w] = sum_j mult(j) * prev[w - j].
void extend_row(const std::vector<ExactCount>& prev, std::vector<ExactCount>& next, const RingSpec& ring,
                std::uint32_t rmin, std::uint32_t rmax) {
    const std::uint64_t top = next.size();
    for (std::uint64_t w = 0; w < top; ++w) {
        ExactCount acc = 0;
        for (std::uint32_t j = rmin; j <= rmax && j <= w; ++j) {
            const ExactCount& p = prev[w - j];
            if (p == 0) continue;
            if (ring.multiplicity(j) == 2)
                acc += 2 * p;
            else
                acc += p;
        }
        next[w] = std::move(acc);
    }
}

// Table memo per (q, rmin, rmax), kept per thread.
using TableKey = std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>;

constexpr double kTableByteBudget = 96.0 * 1024 * 1024;

bool table_fits(std::size_t n, std::uint64_t t, const RingSpec& ring) {
    double cells = double(n + 1) * double(t + 1);
    double bytes = cells * (double(n) * std::log2(double(ring.q())) / 8.0 + 16.0);
    return bytes <= kTableByteBudget;
}

const SphereTable& cached_table(const RingSpec& ring, std::uint32_t rmin, std::uint32_t rmax, std::size_t n,
                                std::uint64_t t) {
    thread_local std::map<TableKey, std::unique_ptr<SphereTable>> memo;
    auto& slot = memo[{ring.q(), rmin, rmax}];
    if (!slot || slot->max_len() < n || slot->max_weight() < t) {
        std::size_t len = slot ? std::max(slot->max_len(), n) : n;
        std::uint64_t wt = slot ? std::max(slot->max_weight(), t) : t;
        if (!table_fits(len, wt, ring)) {
            len = n;
            wt = t;
        }
        slot = std::make_unique<SphereTable>(ring, rmin, rmax, len, wt);
    }
    return *slot;
}

}  // namespace

SphereTable::SphereTable(const RingSpec& ring, std::uint32_t rmin, std::uint32_t rmax, std::size_t max_len,
                         std::uint64_t max_weight)
    : max_weight_(max_weight) {
    check_bounds(ring, rmin, rmax);
    rows_.assign(max_len + 1, std::vector<ExactCount>(max_weight + 1, 0));
    rows_[0][0] = 1;
    for (std::size_t len = 1; len <= max_len; ++len) extend_row(rows_[len - 1], rows_[len], ring, rmin, rmax);
}

const ExactCount& SphereTable::at(std::uint64_t weight, std::size_t len) const {
    static const ExactCount zero = 0;
    if (len >= rows_.size() || weight > max_weight_) {
        if (weight > max_weight_ && len < rows_.size()) return zero;
        throw InvalidArgument("SphereTable: index outside the table");
    }
    return rows_[len][weight];
}

std::vector<ExactCount> sphere_count_row(std::size_t n, std::uint64_t max_weight, const RingSpec& ring,
                                         std::uint32_t rmin, std::uint32_t rmax) {
    check_bounds(ring, rmin, rmax);
    std::vector<ExactCount> row(max_weight + 1, 0), next(max_weight + 1, 0);
    row[0] = 1;
    for (std::size_t len = 1; len <= n; ++len) {
        extend_row(row, next, ring, rmin, rmax);
        std::swap(row, next);
    }
    return row;
}

ExactCount count_sphere_restricted(std::uint64_t t, std::size_t n, const RingSpec& ring, std::uint32_t rmin,
                                   std::uint32_t rmax) {
    check_bounds(ring, rmin, rmax);
    if (t > std::uint64_t(n) * rmax || t < std::uint64_t(n) * rmin) return 0;
    if (table_fits(n, t, ring)) return cached_table(ring, rmin, rmax, n, t).at(t, n);
    return sphere_count_row(n, t, ring, rmin, rmax)[t];
}

ExactCount count_sphere(std::uint64_t t, std::size_t n, const RingSpec& ring) {
    return count_sphere_restricted(t, n, ring, 0, ring.M());
}

ExactCount count_ball(std::uint64_t t, std::size_t n, const RingSpec& ring) {
    std::uint64_t top = std::min<std::uint64_t>(t, std::uint64_t(n) * ring.M());
    ExactCount sum = 0;
    if (table_fits(n, top, ring)) {
        const auto& tab = cached_table(ring, 0, ring.M(), n, top);
        for (std::uint64_t w = 0; w <= top; ++w) sum += tab.at(w, n);
    } else {
        for (const auto& c : sphere_count_row(n, top, ring, 0, ring.M())) sum += c;
    }
    return sum;
}

ExactCount count_fitting_compositions(std::uint64_t v, const WeightComposition& lambda) {
    if (v > lambda.total()) return 0;
    std::vector<ExactCount> dp(v + 1, 0), next(v + 1, 0);
    dp[0] = 1;
    for (std::uint32_t part : lambda.parts()) {
        // next[w] = sum_{j=0}^{part} dp[w-j], via a sliding window
        ExactCount window = 0;
        for (std::uint64_t w = 0; w <= v; ++w) {
            window += dp[w];
            if (w > part) window -= dp[w - part - 1];
            next[w] = window;
        }
        std::swap(dp, next);
    }
    return dp[v];
}

// ---------------------------------------------------------------------------
// Sampling

ExactCount uniform_below(const ExactCount& bound, Rng& rng) {
    if (bound <= 0) throw InvalidArgument("uniform_below: bound must be positive");
    const std::size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
    const std::size_t words = (bits + 63) / 64;
    const unsigned top_bits = bits % 64 == 0 ? 64 : bits % 64;
    std::vector<std::uint64_t> buf(words);
    ExactCount x;
    for (;;) {
        // most significant word first, trimmed to the bit length of the bound
        for (std::size_t i = 0; i < words; ++i) buf[i] = rng();
        if (top_bits < 64) buf[0] &= (std::uint64_t(1) << top_bits) - 1;
        mpz_import(x.get_mpz_t(), words, 1, sizeof(std::uint64_t), 0, 0, buf.data());
        if (x < bound) return x;
    }
}

namespace {

Elem pick_sign(std::uint32_t weight, const RingSpec& ring, Rng& rng) {
    if (ring.multiplicity(weight) == 1) return weight;
    return (rng() & 1) ? ring.q() - weight : weight;
}

LeeVector sample_exact(std::uint64_t t, std::size_t n, const RingSpec& ring, std::uint32_t rmin,
                       std::uint32_t rmax, Rng& rng) {
    const auto& tab = cached_table(ring, rmin, rmax, n, t);
    LeeVector out(ring, n);
    std::uint64_t w = t;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t rest = n - i - 1;
        ExactCount u = uniform_below(tab.at(w, n - i), rng);
        std::uint32_t chosen = rmax;
        for (std::uint32_t j = rmin; j <= rmax && j <= w; ++j) {
            ExactCount share = tab.at(w - j, rest) * ring.multiplicity(j);
            if (u < share) {
                chosen = j;
                break;
            }
            u -= share;
        }
        out.set(i, pick_sign(chosen, ring, rng));
        w -= chosen;
    }
    return out;
}

// Entry weights drawn i.i.d. from the tilted law mult(j) x^j; the last weight is
// forced and accepted with probability p(last)/max p, which makes the output
// exactly uniform on the sphere because the proposal density depends only on the
// total weight.
LeeVector sample_tilted(std::uint64_t t, std::size_t n, const RingSpec& ring, std::uint32_t rmin,
                        std::uint32_t rmax, Rng& rng) {
    const double target = double(t) / double(n);
    const std::uint32_t span = rmax - rmin;
    std::vector<double> logw(span + 1);
    auto law = [&](double lx, std::vector<double>& prob) {
        double top = -INFINITY;
        for (std::uint32_t j = 0; j <= span; ++j) {
            logw[j] = std::log(double(ring.multiplicity(rmin + j))) + (rmin + j) * lx;
            top = std::max(top, logw[j]);
        }
        double z = 0;
        for (std::uint32_t j = 0; j <= span; ++j) z += (prob[j] = std::exp(logw[j] - top));
        double mean = 0;
        for (std::uint32_t j = 0; j <= span; ++j) {
            prob[j] /= z;
            mean += (rmin + j) * prob[j];
        }
        return mean;
    };
    std::vector<double> prob(span + 1);
    double lo = -1, hi = 1;
    while (law(lo, prob) > target) lo *= 2;
    while (law(hi, prob) < target) hi *= 2;
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        double mid = 0.5 * (lo + hi);
        (law(mid, prob) < target ? lo : hi) = mid;
    }
    law(0.5 * (lo + hi), prob);
    const double pmax = *std::max_element(prob.begin(), prob.end());
    std::discrete_distribution<std::uint32_t> draw(prob.begin(), prob.end());
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::uint32_t> weights(n);
    for (;;) {
        std::uint64_t sum = 0;
        for (std::size_t i = 0; i + 1 < n; ++i) sum += (weights[i] = rmin + draw(rng));
        if (sum > t) continue;
        std::uint64_t last = t - sum;
        if (last < rmin || last > rmax) continue;
        if (unit(rng) * pmax >= prob[last - rmin]) continue;
        weights[n - 1] = static_cast<std::uint32_t>(last);
        break;
    }
    LeeVector out(ring, n);
    for (std::size_t i = 0; i < n; ++i) out.set(i, pick_sign(weights[i], ring, rng));
    return out;
}

}  // namespace

LeeVector sample_sphere_restricted(std::uint64_t t, std::size_t n, const RingSpec& ring, std::uint32_t rmin,
                                   std::uint32_t rmax, Rng& rng) {
    check_bounds(ring, rmin, rmax);
    const std::uint64_t lo = std::uint64_t(n) * rmin, hi = std::uint64_t(n) * rmax;
    if (t < lo || t > hi) throw EmptySet("sample_sphere_restricted: restricted sphere is empty");
    if (n == 0) return LeeVector(ring, 0);
    if (t == lo || t == hi) {
        LeeVector out(ring, n);
        for (std::size_t i = 0; i < n; ++i) out.set(i, pick_sign(t == lo ? rmin : rmax, ring, rng));
        return out;
    }
    if (table_fits(n, t, ring)) return sample_exact(t, n, ring, rmin, rmax, rng);
    return sample_tilted(t, n, ring, rmin, rmax, rng);
}

LeeVector sample_sphere(std::uint64_t t, std::size_t n, const RingSpec& ring, Rng& rng) {
    return sample_sphere_restricted(t, n, ring, 0, ring.M(), rng);
}

// ---------------------------------------------------------------------------
// Enumeration

void enumerate_sphere_restricted(std::uint64_t t, std::size_t n, const RingSpec& ring, std::uint32_t rmin,
                                 std::uint32_t rmax, const std::function<bool(const LeeVector&)>& visit,
                                 std::uint64_t guard) {
    check_bounds(ring, rmin, rmax);
    ExactCount total = count_sphere_restricted(t, n, ring, rmin, rmax);
    if (total > ExactCount(std::to_string(guard)))
        throw TooLarge("enumerate_sphere_restricted: " + total.get_str() + " elements exceed the guard of " +
                       std::to_string(guard));
    if (total == 0) return;

    std::vector<std::uint32_t> weights(n);
    LeeVector current(ring, n);
    bool stop = false;

    auto emit_signs = [&]() {
        std::vector<std::size_t> free;
        for (std::size_t i = 0; i < n; ++i)
            if (ring.multiplicity(weights[i]) == 2) free.push_back(i);
        for (std::size_t i = 0; i < n; ++i) current.set(i, weights[i]);
        // Binary counter over the sign pattern, first free position most significant.
        for (;;) {
            if (!visit(current)) {
                stop = true;
                return;
            }
            std::size_t k = free.size();
            while (k > 0) {
                std::size_t pos = free[k - 1];
                if (current[pos] == weights[pos]) {
                    current.set(pos, ring.q() - weights[pos]);
                    break;
                }
                current.set(pos, weights[pos]);
                --k;
            }
            if (k == 0) return;
        }
    };

    std::function<void(std::size_t, std::uint64_t)> rec = [&](std::size_t i, std::uint64_t left) {
        if (stop) return;
        if (i == n) {
            if (left == 0) emit_signs();
            return;
        }
        const std::uint64_t rest = n - i - 1;
        for (std::uint32_t j = rmin; j <= rmax && j <= left && !stop; ++j) {
            const std::uint64_t after = left - j;
            if (after < rest * rmin || after > rest * rmax) continue;
            weights[i] = j;
            rec(i + 1, after);
        }
    };
    rec(0, t);
}

std::vector<LeeVector> list_sphere_restricted(std::uint64_t t, std::size_t n, const RingSpec& ring,
                                              std::uint32_t rmin, std::uint32_t rmax, std::uint64_t guard) {
    std::vector<LeeVector> out;
    enumerate_sphere_restricted(
        t, n, ring, rmin, rmax,
        [&](const LeeVector& v) {
            out.push_back(v);
            return true;
        },
        guard);
    return out;
}

// ---------------------------------------------------------------------------
// Integer helpers

double log_count(const ExactCount& x) {
    if (x <= 0) throw InvalidArgument("log_count: argument must be positive");
    long exp2 = 0;
    double mant = mpz_get_d_2exp(&exp2, x.get_mpz_t());
    return std::log(mant) + double(exp2) * std::log(2.0);
}

ExactCount power(std::uint64_t base, std::uint64_t exp) {
    ExactCount out;
    mpz_ui_pow_ui(out.get_mpz_t(), static_cast<unsigned long>(base), static_cast<unsigned long>(exp));
    return out;
}

std::uint64_t floor_log(const ExactCount& x, std::uint64_t q) {
    if (x < 1) throw InvalidArgument("floor_log: argument must be at least 1");
    if (q < 2) throw InvalidArgument("floor_log: base must be at least 2");
    auto k = static_cast<std::int64_t>(std::floor(log_count(x) / std::log(double(q))));
    if (k < 0) k = 0;
    while (k > 0 && power(q, k) > x) --k;
    while (power(q, k + 1) <= x) ++k;
    return static_cast<std::uint64_t>(k);
}

ExactCount binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    ExactCount out;
    mpz_bin_uiui(out.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return out;
}

}  // namespace leeisd
