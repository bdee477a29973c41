#include "leeisd/isd_engine.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "leeisd/weight_model.hpp"

namespace leeisd {

namespace {

constexpr std::size_t kListGuard = 20'000'000;

std::uint64_t ceil_half(std::uint64_t x) { return (x + 1) / 2; }
std::uint64_t floor_half(std::uint64_t x) { return x / 2; }

// Base-q integer of the last u coordinates of a length-ell vector.
std::uint64_t encode_key(std::span<const Elem> syn, std::size_t u, std::uint64_t q) {
    std::uint64_t key = 0;
    for (std::size_t i = syn.size() - u; i < syn.size(); ++i) key = key * q + syn[i];
    return key;
}

void check_key_width(std::size_t u, const RingSpec& ring) {
    if (double(u) * std::log2(double(ring.q())) > 63.0)
        throw InvalidArgument("merge key of " + std::to_string(u) + " coordinates does not fit in 64 bits");
}

// Calls visit(tuple) for every tuple in {1..q-1}^len in lexicographic order.
template <class F>
void for_each_nonzero_tuple(std::size_t len, const RingSpec& ring, F&& visit) {
    std::vector<Elem> cur(len, 1);
    for (;;) {
        visit(cur);
        std::size_t i = len;
        while (i > 0 && cur[i - 1] == ring.q() - 1) cur[--i] = 1;
        if (i == 0) return;
        ++cur[i - 1];
    }
}

template <class F>
void for_each_tuple(std::size_t len, const RingSpec& ring, F&& visit) {
    std::vector<Elem> cur(len, 0);
    for (;;) {
        visit(cur);
        std::size_t i = len;
        while (i > 0 && cur[i - 1] == ring.q() - 1) cur[--i] = 0;
        if (i == 0) return;
        ++cur[i - 1];
    }
}

// Calls visit(subset) for every k-subset of {0..n-1} in lexicographic order.
template <class F>
void for_each_subset(std::size_t n, std::size_t k, F&& visit) {
    if (k > n) return;
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (;;) {
        visit(idx);
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

void guard_size(const ExactCount& size, const char* what) {
    if (size > ExactCount(static_cast<unsigned long>(kListGuard)))
        throw TooLarge(std::string(what) + ": list of " + size.get_str() + " entries exceeds the guard");
}

double ratio(const ExactCount& num, const ExactCount& den) {
    if (den == 0) throw InvalidArgument("ratio: zero denominator");
    mpq_class q(num, den);
    return q.get_d();
}

}  // namespace

// ---------------------------------------------------------------------------
// Parameters and reports

void SolverParams::validate(const SdpInstance& inst) const {
    const std::size_t n = inst.n, k = inst.k;
    const std::uint32_t M = inst.ring.M();
    auto bad = [](const std::string& why) { throw InvalidArgument("invalid parameters: " + why); };
    if (ell > n - k) bad("ell must satisfy 0 <= ell <= n-k");
    const std::size_t kl = k + ell;
    if (v > inst.t) bad("v must satisfy v <= t");
    if (eps > kl) bad("eps must satisfy eps <= k+ell");
    if (u > ell) bad("u must satisfy u <= ell");
    if (r > M) bad("r must satisfy r <= M");
    if (inst.t - v > std::uint64_t(M) * (n - kl)) bad("t - v exceeds the capacity M(n-k-ell)");
    if (mode == Mode::BelowGV) {
        const HalfSplit h = half_split(kl);
        if (ceil_half(eps) > h.left || floor_half(eps) > h.right) bad("eps does not fit into the halves");
    } else {
        if (2 * eps > kl) bad("beyond-GV needs eps <= (k+ell)/2");
        if (v < std::uint64_t(eps) * (M - r) + std::uint64_t(r) * kl) bad("beyond-GV needs v >= eps(M-r) + r(k+ell)");
        if (v > std::uint64_t(M) * kl) bad("v exceeds M(k+ell)");
    }
    if (list_cap && *list_cap == 0) bad("list_cap must be positive");
}

std::string SolverParams::describe() const {
    std::ostringstream os;
    os << "mode=" << asym::to_string(mode) << " ell=" << ell << " v=" << v << " eps=" << eps << " r=" << r
       << " u=" << u << " amortized=" << (amortized ? 1 : 0);
    if (list_cap) os << " list_cap=" << *list_cap;
    os << " max_iters=" << max_iters;
    return os.str();
}

std::string SolutionReport::record() const {
    std::ostringstream os;
    os << "solved=" << (solved ? 1 : 0) << " iterations=" << iterations << " pge_failures=" << pge_failures
       << " lists_peak=" << lists_peak << " budget=" << budget << " wall_ms=" << wall_time.count() * 1e3;
    return os.str();
}

// ---------------------------------------------------------------------------
// Oracle

std::vector<LeeVector> brute_force_solve(const SdpInstance& inst, bool stop_at_first, std::uint64_t guard) {
    inst.validate();
    std::vector<LeeVector> out;
    enumerate_sphere_restricted(
        inst.t, inst.n, inst.ring, 0, inst.ring.M(),
        [&](const LeeVector& e) {
            if (syndrome(inst.H, e) == inst.s) {
                out.push_back(e);
                if (stop_at_first) return false;
            }
            return true;
        },
        guard);
    return out;
}

// ---------------------------------------------------------------------------
// Merges

MergedList merge_concatenate(const BaseList& b1, const BaseList& b2, const Matrix& bmat1, const Matrix& bmat2,
                             std::span<const Elem> target, std::size_t u, const RingSpec& ring) {
    const std::size_t ell = bmat1.rows();
    if (bmat2.rows() != ell || target.size() != ell) throw DimensionMismatch("merge_concatenate: ell mismatch");
    if (u > ell) throw InvalidArgument("merge_concatenate: u exceeds ell");
    check_key_width(u, ring);
    if (b1.empty() || b2.empty()) return {};

    std::vector<std::vector<Elem>> left(b1.size()), right(b2.size());
    std::vector<std::pair<std::uint64_t, std::size_t>> k1(b1.size()), k2(b2.size());
    for (std::size_t i = 0; i < b1.size(); ++i) {
        left[i] = mul_transpose(b1[i], bmat1, ring);
        k1[i] = {encode_key(left[i], u, ring.q()), i};
    }
    for (std::size_t j = 0; j < b2.size(); ++j) {
        right[j] = mul_transpose(b2[j], bmat2, ring);
        std::vector<Elem> want(ell);
        for (std::size_t c = 0; c < ell; ++c) want[c] = ring.sub(target[c], right[j][c]);
        k2[j] = {encode_key(want, u, ring.q()), j};
    }
    std::sort(k1.begin(), k1.end());
    std::sort(k2.begin(), k2.end());

    MergedList out;
    std::size_t i = 0, j = 0;
    while (i < k1.size() && j < k2.size()) {
        if (k1[i].first < k2[j].first) {
            ++i;
        } else if (k2[j].first < k1[i].first) {
            ++j;
        } else {
            const std::uint64_t key = k1[i].first;
            std::size_t i_end = i, j_end = j;
            while (i_end < k1.size() && k1[i_end].first == key) ++i_end;
            while (j_end < k2.size() && k2[j_end].first == key) ++j_end;
            for (std::size_t a = i; a < i_end; ++a)
                for (std::size_t b = j; b < j_end; ++b) {
                    const auto& x1 = b1[k1[a].second];
                    const auto& x2 = b2[k2[b].second];
                    IndexedListEntry e;
                    e.x.reserve(x1.size() + x2.size());
                    e.x.insert(e.x.end(), x1.begin(), x1.end());
                    e.x.insert(e.x.end(), x2.begin(), x2.end());
                    e.syn.resize(ell);
                    for (std::size_t c = 0; c < ell; ++c)
                        e.syn[c] = ring.add(left[k1[a].second][c], right[k2[b].second][c]);
                    out.push_back(std::move(e));
                }
            if (out.size() > kListGuard) throw TooLarge("merge_concatenate: output exceeds the list guard");
            i = i_end;
            j = j_end;
        }
    }
    return out;
}

std::optional<SplitSolution> last_merge(const MergedList& l1, const MergedList& l2, std::span<const Elem> s2,
                                        const Matrix& amat, std::span<const Elem> s1, std::uint64_t v,
                                        std::uint64_t t, const RingSpec& ring) {
    if (l1.empty() || l2.empty() || v > t) return std::nullopt;
    const std::size_t ell = s2.size();
    // Order L2 by the syndrome it still needs from L1, then look every L1 entry up.
    std::vector<std::pair<std::vector<Elem>, std::size_t>> need(l2.size());
    for (std::size_t j = 0; j < l2.size(); ++j) {
        need[j].first.resize(ell);
        for (std::size_t c = 0; c < ell; ++c) need[j].first[c] = ring.sub(s2[c], l2[j].syn[c]);
        need[j].second = j;
    }
    std::sort(need.begin(), need.end());
    std::vector<std::size_t> order(l1.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return l1[a].syn < l1[b].syn; });

    const std::size_t kl = l1.front().x.size();
    std::vector<Elem> e2(kl);
    for (std::size_t a : order) {
        const auto& y1 = l1[a];
        auto lo = std::lower_bound(need.begin(), need.end(), y1.syn,
                                   [](const auto& p, const std::vector<Elem>& key) { return p.first < key; });
        for (auto it = lo; it != need.end() && it->first == y1.syn; ++it) {
            const auto& y2 = l2[it->second].x;
            std::uint64_t w = 0;
            for (std::size_t c = 0; c < kl && w <= v; ++c) {
                e2[c] = ring.add(y1.x[c], y2[c]);
                w += ring.lee_weight(e2[c]);
            }
            if (w != v) continue;
            auto prod = mul_transpose(e2, amat, ring);
            std::vector<Elem> e1(s1.size());
            std::uint64_t w1 = 0;
            for (std::size_t c = 0; c < s1.size(); ++c) {
                e1[c] = ring.sub(s1[c], prod[c]);
                w1 += ring.lee_weight(e1[c]);
            }
            if (w1 == t - v) return SplitSolution{std::move(e1), e2};
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Base lists

HalfSplit half_split(std::size_t kl) { return {static_cast<std::size_t>(ceil_half(kl)), kl / 2}; }

namespace {

struct SmallHalf {
    std::size_t len, free, weight;
};

SmallHalf small_half(std::size_t kl, std::size_t eps, std::uint64_t v, bool left) {
    const HalfSplit h = half_split(kl);
    const std::uint64_t wy = ceil_half(v);
    const std::size_t len = left ? h.left : h.right;
    const std::size_t free = left ? ceil_half(eps) : floor_half(eps);
    if (free > len) throw InvalidArgument("base lists: eps does not fit into the halves");
    return {len, free, static_cast<std::size_t>(left ? ceil_half(wy) : floor_half(wy))};
}

struct LargeHalf {
    std::size_t len, free, heavy_len, weight;
};

LargeHalf large_half(std::size_t kl, std::size_t eps, std::uint64_t v, std::uint32_t M, bool left) {
    const HalfSplit h = half_split(kl);
    const std::size_t len = left ? h.left : h.right;
    const std::size_t free = left ? ceil_half(eps) : floor_half(eps);
    if (free > len) throw InvalidArgument("base lists: eps does not fit into the halves");
    if (v < std::uint64_t(eps) * M) throw InvalidArgument("base lists: v < eps M");
    const std::uint64_t wy = ceil_half(v - std::uint64_t(eps) * M);
    const std::size_t rest = len - free;
    return {len, free, static_cast<std::size_t>(ceil_half(rest)),
            static_cast<std::size_t>(left ? ceil_half(wy) : floor_half(wy))};
}

}  // namespace

ExactCount base_list_size_small(std::size_t kl, std::size_t eps, std::uint64_t v, std::uint32_t r,
                                const RingSpec& ring, bool left) {
    const SmallHalf h = small_half(kl, eps, v, left);
    return count_sphere_restricted(h.weight, h.len - h.free, ring, 0, r) * power(ring.q() - 1, h.free);
}

std::vector<BaseList> build_half_lists_small(std::size_t kl, std::size_t eps, std::uint32_t r, const RingSpec& ring,
                                            const std::vector<std::size_t>& e_set, std::uint64_t max_weight,
                                            bool left) {
    if (r > ring.M()) throw InvalidArgument("base lists: r > M");
    if (e_set.size() != eps) throw InvalidArgument("base lists: |E| differs from eps");
    const HalfSplit hs = half_split(kl);
    const std::size_t len = left ? hs.left : hs.right;
    const std::size_t free = left ? ceil_half(eps) : floor_half(eps);
    const std::size_t offset = left ? 0 : hs.left;
    std::vector<bool> is_free(len, false);
    std::size_t seen = 0;
    for (std::size_t pos : e_set) {
        if (pos >= kl) throw InvalidArgument("base lists: E index outside 0..k+ell-1");
        if (pos >= offset && pos < offset + len) {
            if (is_free[pos - offset]) throw InvalidArgument("base lists: repeated E index");
            is_free[pos - offset] = true;
            ++seen;
        }
    }
    if (seen != free) throw InvalidArgument("base lists: E must place ceil(eps/2) indices in the left half");
    std::vector<std::size_t> restricted_pos, free_pos;
    for (std::size_t i = 0; i < len; ++i) (is_free[i] ? free_pos : restricted_pos).push_back(i);

    const ExactCount free_values = power(ring.q() - 1, free);
    std::vector<BaseList> out(max_weight + 1);
    for (std::uint64_t w = 0; w <= max_weight; ++w) {
        if (w > std::uint64_t(restricted_pos.size()) * r) break;
        guard_size(count_sphere_restricted(w, restricted_pos.size(), ring, 0, r) * free_values, "base lists");
        enumerate_sphere_restricted(w, restricted_pos.size(), ring, 0, r, [&](const LeeVector& part) {
            for_each_nonzero_tuple(free_pos.size(), ring, [&](const std::vector<Elem>& vals) {
                std::vector<Elem> x(len, 0);
                for (std::size_t i = 0; i < restricted_pos.size(); ++i) x[restricted_pos[i]] = part[i];
                for (std::size_t i = 0; i < free_pos.size(); ++i) x[free_pos[i]] = vals[i];
                out[w].push_back(std::move(x));
            });
            return true;
        });
    }
    return out;
}

std::pair<BaseList, BaseList> build_base_lists_small(std::size_t kl, std::size_t eps, std::uint64_t v,
                                                     std::uint32_t r, const RingSpec& ring,
                                                     const std::vector<std::size_t>& e_set) {
    auto build = [&](bool left) {
        const std::uint64_t w = small_half(kl, eps, v, left).weight;
        return std::move(build_half_lists_small(kl, eps, r, ring, e_set, w, left)[w]);
    };
    return {build(true), build(false)};
}

MergedList merge_weight_splits(const std::vector<BaseList>& left, const std::vector<BaseList>& right,
                               std::uint64_t weight, const Matrix& bmat1, const Matrix& bmat2,
                               std::span<const Elem> target, std::size_t u, const RingSpec& ring) {
    MergedList out;
    for (std::uint64_t a = 0; a <= weight && a < left.size(); ++a) {
        if (weight - a >= right.size()) continue;
        MergedList part = merge_concatenate(left[a], right[weight - a], bmat1, bmat2, target, u, ring);
        if (out.size() + part.size() > kListGuard) throw TooLarge("merged list exceeds the list guard");
        std::move(part.begin(), part.end(), std::back_inserter(out));
    }
    return out;
}

ExactCount base_list_size_large(std::size_t kl, std::size_t eps, std::uint64_t v, std::uint32_t r,
                                const RingSpec& ring, bool left) {
    const LargeHalf h = large_half(kl, eps, v, ring.M(), left);
    return binomial(h.len, h.free) * power(ring.q(), h.free) * binomial(h.len - h.free, h.heavy_len) *
           count_sphere_restricted(h.weight, h.heavy_len, ring, r, ring.M());
}

std::pair<BaseList, BaseList> build_base_lists_large(std::size_t kl, std::size_t eps, std::uint64_t v,
                                                     std::uint32_t r, const RingSpec& ring) {
    if (r > ring.M()) throw InvalidArgument("build_base_lists_large: r > M");
    if (2 * eps > kl) throw InvalidArgument("build_base_lists_large: eps > (k+ell)/2");
    auto build = [&](bool left) {
        const LargeHalf h = large_half(kl, eps, v, ring.M(), left);
        guard_size(base_list_size_large(kl, eps, v, r, ring, left), "build_base_lists_large");
        BaseList out;
        const auto heavy = list_sphere_restricted(h.weight, h.heavy_len, ring, r, ring.M());
        if (heavy.empty()) return out;
        const std::size_t rest = h.len - h.free;
        for_each_subset(h.len, h.free, [&](const std::vector<std::size_t>& free_pos) {
            std::vector<std::size_t> others;
            for (std::size_t i = 0, f = 0; i < h.len; ++i) {
                if (f < free_pos.size() && free_pos[f] == i) ++f;
                else others.push_back(i);
            }
            for_each_tuple(free_pos.size(), ring, [&](const std::vector<Elem>& vals) {
                for_each_subset(rest, h.heavy_len, [&](const std::vector<std::size_t>& wsel) {
                    for (const auto& hv : heavy) {
                        std::vector<Elem> x(h.len, 0);
                        for (std::size_t i = 0; i < free_pos.size(); ++i) x[free_pos[i]] = vals[i];
                        for (std::size_t i = 0; i < wsel.size(); ++i) x[others[wsel[i]]] = hv[i];
                        out.push_back(std::move(x));
                    }
                });
            });
        });
        return out;
    };
    return {build(true), build(false)};
}

// ---------------------------------------------------------------------------
// Choice of u

ExactCount representation_count_small(std::uint64_t v, std::size_t kl, std::size_t eps, std::uint32_t r,
                                      const RingSpec& ring) {
    if (v > std::uint64_t(kl) * r) return 0;
    const WeightComposition lambda = expected_composition(v, kl, r, ring);
    std::size_t sigma = 0;
    for (auto part : lambda.parts()) sigma += part > 0;
    if (eps > kl - sigma) return 0;
    return count_fitting_compositions(ceil_half(v), lambda) * binomial(kl - sigma, eps) * power(ring.q() - 1, eps);
}

std::size_t choose_u_small(std::uint64_t v, std::size_t kl, std::size_t eps, std::uint32_t r, const RingSpec& ring,
                           std::size_t ell) {
    const ExactCount reps = representation_count_small(v, kl, eps, r, ring);
    if (reps < 1) return 0;
    return static_cast<std::size_t>(std::min<std::uint64_t>(floor_log(reps, ring.q()), ell));
}

ExactCount representation_count_large(std::size_t kl, std::size_t eps, std::uint32_t r, const RingSpec& ring) {
    if (2 * eps > kl) throw InvalidArgument("representation_count_large: eps > (k+ell)/2");
    if (r > ring.M()) throw InvalidArgument("representation_count_large: r > M");
    const std::size_t rest = kl - eps;
    const std::uint64_t small = ring.M() - r + 1;
    ExactCount sum = 0;
    for (std::size_t i = 0; i <= eps; ++i) {
        if (i > rest) break;
        sum += binomial(eps, i) * power(small, i) * power(r, eps - i) * binomial(rest, i) * power(small, i) *
               binomial(rest - i, (rest - i) / 2);
    }
    return binomial(kl, eps) * sum;
}

std::size_t choose_u_large(std::size_t kl, std::size_t eps, std::uint32_t r, const RingSpec& ring, std::size_t ell) {
    const ExactCount reps = representation_count_large(kl, eps, r, ring);
    if (reps < 1) return 0;
    return static_cast<std::size_t>(std::min<std::uint64_t>(floor_log(reps, ring.q()), ell));
}

// ---------------------------------------------------------------------------
// Decoders

double split_probability(const SdpInstance& inst, const SolverParams& p) {
    const RingSpec& ring = inst.ring;
    const std::size_t kl = inst.k + p.ell;
    ExactCount head = p.mode == Mode::BelowGV ? count_sphere_restricted(p.v, kl, ring, 0, p.r)
                                              : count_sphere_restricted(p.v, kl, ring, p.r, ring.M());
    ExactCount tail = count_sphere(inst.t - p.v, inst.n - kl, ring);
    return ratio(head * tail, count_sphere(inst.t, inst.n, ring));
}

std::uint64_t default_budget(const SdpInstance& inst, const SolverParams& params) {
    constexpr std::uint64_t kCap = 1'000'000;
    const double P = split_probability(inst, params);
    if (!(P > 0)) return kCap;
    const double inv = std::ceil(1.0 / P);
    if (inv >= double(kCap) / 100.0) return kCap;
    return std::min<std::uint64_t>(kCap, 100 * static_cast<std::uint64_t>(inv));
}

namespace {

BaseList truncate_list(const BaseList& list, std::size_t cap, Rng& rng) {
    if (list.size() <= cap) return list;
    BaseList out;
    out.reserve(cap);
    std::sample(list.begin(), list.end(), std::back_inserter(out), cap, rng);
    return out;
}

std::size_t amortized_cap(const SolverParams& p, const RingSpec& ring) {
    if (p.list_cap) return *p.list_cap;
    double cap = std::pow(double(ring.q()), double(p.u));
    return cap > double(kListGuard) ? kListGuard : static_cast<std::size_t>(cap);
}

SolutionReport run_decoder(const SdpInstance& inst, const SolverParams& params, Rng& rng, Mode mode) {
    inst.validate();
    params.validate(inst);
    if (params.mode != mode) throw InvalidArgument("invalid parameters: mode does not match the decoder");
    const auto start = std::chrono::steady_clock::now();
    const RingSpec& ring = inst.ring;
    const std::size_t n = inst.n, kl = inst.k + params.ell, m = n - kl;
    const HalfSplit hs = half_split(kl);

    SolutionReport rep;
    rep.budget = params.max_iters ? params.max_iters : default_budget(inst, params);

    // Lists that do not depend on the iteration are built once.
    const std::uint64_t w1 = ceil_half(params.v), w2 = floor_half(params.v);
    std::optional<std::pair<BaseList, BaseList>> large;
    std::optional<std::pair<std::vector<BaseList>, std::vector<BaseList>>> halves;
    auto small_halves = [&](const std::vector<std::size_t>& e_set) {
        return std::pair{build_half_lists_small(kl, params.eps, params.r, ring, e_set, w1, true),
                         build_half_lists_small(kl, params.eps, params.r, ring, e_set, w1, false)};
    };
    if (mode == Mode::BeyondGV) large = build_base_lists_large(kl, params.eps, params.v, params.r, ring);
    else if (params.eps == 0) halves = small_halves({});

    std::vector<std::size_t> perm(n), left_idx(hs.left), right_idx(hs.right);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::iota(left_idx.begin(), left_idx.end(), std::size_t{0});
    std::iota(right_idx.begin(), right_idx.end(), hs.left);
    const std::vector<Elem> zero(params.ell, 0);
    const std::uint64_t attempt_cap = 10 * rep.budget + 1000;
    const std::size_t cap = params.amortized ? amortized_cap(params, ring) : 0;
    auto note = [&](std::size_t size) { rep.lists_peak = std::max(rep.lists_peak, size); };

    for (std::uint64_t attempt = 0; rep.iterations < rep.budget && attempt < attempt_cap; ++attempt) {
        std::shuffle(perm.begin(), perm.end(), rng);
        auto pge = partial_gaussian_elimination(inst, params.ell, perm);
        if (!pge) {
            ++rep.pge_failures;
            continue;
        }
        ++rep.iterations;
        const Matrix b1 = pge->B.column_block(0, hs.left);
        const Matrix b2 = pge->B.column_block(hs.left, hs.right);

        MergedList l1, l2;
        if (mode == Mode::BeyondGV) {
            BaseList x1 = large->first, x2 = large->second;
            if (params.amortized) {
                x1 = truncate_list(x1, cap, rng);
                x2 = truncate_list(x2, cap, rng);
            }
            note(std::max(x1.size(), x2.size()));
            l1 = merge_concatenate(x1, x2, b1, b2, zero, params.u, ring);
            l2 = merge_concatenate(x1, x2, b1, b2, pge->s2, params.u, ring);
        } else {
            std::pair<std::vector<BaseList>, std::vector<BaseList>> h;
            if (halves) {
                h = *halves;
            } else {
                std::vector<std::size_t> e_set;
                std::sample(left_idx.begin(), left_idx.end(), std::back_inserter(e_set), ceil_half(params.eps), rng);
                std::sample(right_idx.begin(), right_idx.end(), std::back_inserter(e_set), floor_half(params.eps),
                            rng);
                h = small_halves(e_set);
            }
            for (auto* side : {&h.first, &h.second})
                for (auto& list : *side) {
                    if (params.amortized) list = truncate_list(list, cap, rng);
                    note(list.size());
                }
            // y1 carries the ceiling of v/2 and y2 the floor.
            l1 = merge_weight_splits(h.first, h.second, w1, b1, b2, zero, params.u, ring);
            l2 = merge_weight_splits(h.first, h.second, w2, b1, b2, pge->s2, params.u, ring);
        }
        note(std::max(l1.size(), l2.size()));

        auto found = last_merge(l1, l2, pge->s2, pge->A, pge->s1, params.v, inst.t, ring);
        if (!found) continue;

        std::vector<Elem> e(n);
        for (std::size_t j = 0; j < m; ++j) e[pge->perm[j]] = found->e1[j];
        for (std::size_t j = 0; j < kl; ++j) e[pge->perm[m + j]] = found->e2[j];
        std::string why;
        if (!verify_solution(inst, e, &why)) throw Error("decoder produced an invalid solution: " + why);
        rep.solution = std::move(e);
        rep.solved = true;
        rep.wall_time = std::chrono::steady_clock::now() - start;
        return rep;
    }
    rep.wall_time = std::chrono::steady_clock::now() - start;
    throw BudgetExhausted("iteration budget of " + std::to_string(rep.budget) + " exhausted", rep);
}

}  // namespace

SolutionReport bjmm_small_balls(const SdpInstance& inst, const SolverParams& params, Rng& rng) {
    return run_decoder(inst, params, rng, Mode::BelowGV);
}

SolutionReport bjmm_large_weights(const SdpInstance& inst, const SolverParams& params, Rng& rng) {
    return run_decoder(inst, params, rng, Mode::BeyondGV);
}

SolutionReport solve(const SdpInstance& inst, const SolverParams& params, Rng& rng) {
    return params.mode == Mode::BelowGV ? bjmm_small_balls(inst, params, rng) : bjmm_large_weights(inst, params, rng);
}

Mode natural_mode(const SdpInstance& inst) {
    return 2 * inst.t < std::uint64_t(inst.n) * inst.ring.M() ? Mode::BelowGV : Mode::BeyondGV;
}

// ---------------------------------------------------------------------------
// Default parameters

namespace {

// Expected work of a parameter set: iterations times the list volume of one
// iteration. Returns infinity when lists would exceed the guard.
double concrete_cost(const SdpInstance& inst, const SolverParams& p) {
    const RingSpec& ring = inst.ring;
    const std::size_t kl = inst.k + p.ell;
    double P;
    try {
        P = split_probability(inst, p);
    } catch (const Error&) {
        return INFINITY;
    }
    if (!(P > 0)) return INFINITY;
    const double lq = std::log(double(ring.q()));
    // Expected number of solutions, at least one.
    double log_sols = log_count(count_sphere(inst.t, inst.n, ring)) - double(inst.n - inst.k) * lq;
    double iters = std::max(1.0, 1.0 / (P * std::exp(std::max(0.0, log_sols))));
    double b1 = 0, b2 = 0, merged = 0;
    const double qu = std::pow(double(ring.q()), double(p.u));
    try {
        if (p.mode == Mode::BelowGV) {
            // All half weights up to ceil(v/2) are held; the merge keeps total weight ceil(v/2).
            const HalfSplit hs = half_split(kl);
            const std::uint64_t w1 = ceil_half(p.v);
            const std::size_t f1 = ceil_half(p.eps), f2 = floor_half(p.eps);
            if (f1 > hs.left || f2 > hs.right) return INFINITY;
            for (std::uint64_t a = 0; a <= w1; ++a) {
                b1 += ExactCount(count_sphere_restricted(a, hs.left - f1, ring, 0, p.r) * power(ring.q() - 1, f1)).get_d();
                b2 += ExactCount(count_sphere_restricted(a, hs.right - f2, ring, 0, p.r) * power(ring.q() - 1, f2)).get_d();
            }
            merged = ExactCount(count_sphere_restricted(w1, kl - p.eps, ring, 0, p.r) * power(ring.q() - 1, p.eps)).get_d() / qu;
        } else {
            b1 = base_list_size_large(kl, p.eps, p.v, p.r, ring, true).get_d();
            b2 = base_list_size_large(kl, p.eps, p.v, p.r, ring, false).get_d();
            merged = b1 * b2 / qu;
        }
    } catch (const Error&) {
        return INFINITY;
    }
    if (b1 == 0 || b2 == 0) return INFINITY;
    if (b1 > 2e6 || b2 > 2e6 || merged > 4e6) return INFINITY;
    const double collisions = merged * merged / std::pow(double(ring.q()), double(p.ell - p.u));
    const double pge = double(inst.n) * double(inst.n - inst.k) * double(inst.n - inst.k);
    return iters * (pge + b1 + b2 + 2 * merged + collisions);
}

}  // namespace

SolverParams default_params(const SdpInstance& inst, Mode mode) {
    inst.validate();
    const RingSpec& ring = inst.ring;
    const std::uint32_t M = ring.M();
    const std::size_t n = inst.n, k = inst.k;
    SolverParams p;
    p.mode = mode;
    if (inst.t == 0) {
        p.r = 0;
        return p;
    }
    const bool interior = inst.t < std::uint64_t(n) * M;
    const double T = double(inst.t) / double(n);

    // Threshold r from the expected number of entries outside the allowed band.
    std::vector<double> law;
    if (interior) law = marginal(solve_beta(T, ring), ring).weight_prob;
    if (mode == Mode::BelowGV) {
        p.r = M;
        if (interior)
            for (std::uint32_t r = 0; r <= M; ++r) {
                double psi = 0;
                for (std::uint32_t i = r + 1; i <= M; ++i) psi += double(n) * law[i];
                if (psi < 1) {
                    p.r = r;
                    break;
                }
            }
    } else {
        p.r = interior ? 0 : M;
        if (interior)
            for (std::uint32_t r = M + 1; r-- > 0;) {
                double below = 0;
                for (std::uint32_t i = 0; i < r; ++i) below += double(n) * law[i];
                if (below < 1) {
                    p.r = r;
                    break;
                }
            }
    }

    // ell seeded from the asymptotic optimiser.
    std::size_t ell_seed = 0;
    const double R = double(k) / double(n);
    if (interior) {
        try {
            asym::OptimizerConfig cfg;
            cfg.fixed_r = p.r;
            cfg.starts = 16;
            auto opt = asym::optimize({ring, R, T}, mode, cfg);
            if (opt.found) ell_seed = static_cast<std::size_t>(std::lround(opt.params.L * double(n)));
        } catch (const Error&) {
        }
    }
    ell_seed = std::min(ell_seed, n - k);

    // Expected weight rate on the information coordinates.
    double rate = T;
    if (mode == Mode::BelowGV && interior) {
        double phi = 0, mass = 0;
        for (std::uint32_t i = 0; i <= p.r; ++i) {
            phi += i * law[i];
            mass += law[i];
        }
        rate = mass > 0 ? phi / mass : 0;
    }

    // Refine (ell, v, eps) around the seed with exact list sizes and split probabilities.
    double best = INFINITY;
    SolverParams best_p = p;
    const std::size_t ell_lo = ell_seed > 3 ? ell_seed - 3 : 0, ell_hi = std::min(n - k, ell_seed + 3);
    for (std::size_t ell = ell_lo; ell <= ell_hi; ++ell) {
        const std::size_t kl = k + ell;
        const std::uint64_t v_aim = static_cast<std::uint64_t>(std::llround(rate * double(kl)));
        for (std::size_t eps : {0, 2, 4}) {
            if (eps > kl) continue;
            for (std::int64_t dv = -3; dv <= 3; ++dv) {
                if (std::int64_t(v_aim) + dv < 0) continue;
                SolverParams c = p;
                c.ell = ell;
                c.eps = eps;
                c.v = std::min<std::uint64_t>(std::uint64_t(std::int64_t(v_aim) + dv), inst.t);
                try {
                    c.u = mode == Mode::BelowGV ? choose_u_small(c.v, kl, eps, c.r, ring, ell)
                                                : choose_u_large(kl, eps, c.r, ring, ell);
                    c.validate(inst);
                } catch (const Error&) {
                    continue;
                }
                double cost = concrete_cost(inst, c);
                if (cost < best) {
                    best = cost;
                    best_p = c;
                }
            }
        }
    }
    if (!std::isfinite(best)) {
        // Prange-style fallback: everything in the redundancy part.
        best_p.ell = 0;
        best_p.eps = 0;
        best_p.u = 0;
        best_p.v = inst.t > std::uint64_t(M) * (n - k) ? inst.t - std::uint64_t(M) * (n - k) : 0;
        if (mode == Mode::BeyondGV) best_p.v = std::max<std::uint64_t>(best_p.v, std::uint64_t(best_p.r) * k);
    }
    return best_p;
}

}  // namespace leeisd
