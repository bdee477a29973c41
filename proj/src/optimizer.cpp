#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "leeisd/asymptotics.hpp"

namespace leeisd::asym {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Unit = std::array<double, 3>;

// Maps the unit cube onto (L, V, E) so that the simple box bounds hold by
// construction; the remaining coupled constraints are checked by try_cost.
InternalParams decode(const Unit& x, const AsymptoticPoint& pt, Mode mode, std::uint32_t r,
                      const CostOptions& opt) {
    const double R = pt.R, T = pt.T, M = pt.ring.M();
    InternalParams p;
    p.r = r;
    p.L = x[0] * (1 - R);
    const double K = R + p.L;
    if (mode == Mode::BelowGV) {
        p.E = x[2] * 0.5 * K;
        double vmax = std::min(T, K * r);
        vmax = std::min(vmax, 2 * (K - p.E) * r);
        if (opt.rule == FeasibilityRule::Verbatim) vmax = std::min(vmax, T / 2);
        double vmin = std::max(0.0, T - M * (1 - R - p.L));
        p.V = vmin + x[1] * std::max(0.0, vmax - vmin);
    } else {
        p.E = x[2] * 0.5 * K;
        double vmin = p.E * (M - r) + r * K;
        vmin = std::max(vmin, T - M * (1 - R - p.L));
        double vmax = std::min(T, M * K);
        p.V = vmin + x[1] * std::max(0.0, vmax - vmin);
    }
    return p;
}

struct Evaluated {
    double value = kInf;
    InternalParams params;
    CostBreakdown cost;
};

Evaluated evaluate(const Unit& x, const AsymptoticPoint& pt, Mode mode, std::uint32_t r, const CostOptions& opt) {
    Evaluated out;
    InternalParams p = decode(x, pt, mode, r, opt);
    auto br = u_bracket(pt, p, mode, opt);
    if (!br) return out;
    // Without amortization the cost is nonincreasing in U, so the top of the bracket is
    // optimal. With it the cost is convex piecewise linear in U; its kinks are where the
    // iteration count reaches zero and where 3U - L overtakes U.
    std::vector<double> candidates{br->second};
    if (opt.amortized) {
        InternalParams q = p;
        q.U = br->first;
        candidates.push_back(br->first);
        candidates.push_back(p.L / 2);
        if (auto c = try_cost(pt, q, mode, opt)) candidates.push_back(br->first + c->I / 3);
    }
    for (double u : candidates) {
        InternalParams q = p;
        q.U = std::clamp(u, br->first, br->second);
        auto c = try_cost(pt, q, mode, opt);
        if (!c || !std::isfinite(c->total) || c->total >= out.value) continue;
        out.value = c->total;
        out.params = q;
        out.cost = *c;
    }
    return out;
}

// R2-style additive recurrence in three dimensions (plastic-number generalisation).
Unit low_discrepancy(int i) {
    constexpr double g = 1.22074408460575947536;
    constexpr double a1 = 1.0 / g, a2 = 1.0 / (g * g), a3 = 1.0 / (g * g * g);
    auto frac = [](double v) { return v - std::floor(v); };
    return {frac(0.5 + a1 * (i + 1)), frac(0.5 + a2 * (i + 1)), frac(0.5 + a3 * (i + 1))};
}

Evaluated pattern_search(Unit x, Evaluated best, const AsymptoticPoint& pt, Mode mode, std::uint32_t r,
                         const OptimizerConfig& cfg) {
    static const auto dirs = [] {
        std::vector<Unit> d;
        for (int a = -1; a <= 1; ++a)
            for (int b = -1; b <= 1; ++b)
                for (int c = -1; c <= 1; ++c)
                    if (a || b || c) d.push_back({double(a), double(b), double(c)});
        return d;
    }();
    double h = 0.125;
    int sweeps = 0;
    while (h > cfg.tolerance && sweeps < cfg.sweeps * 8) {
        ++sweeps;
        bool moved = false;
        for (const auto& d : dirs) {
            Unit y;
            for (int k = 0; k < 3; ++k) y[k] = std::clamp(x[k] + h * d[k], 0.0, 1.0);
            if (y == x) continue;
            Evaluated e = evaluate(y, pt, mode, r, cfg.cost);
            if (e.value < best.value - 1e-15) {
                best = e;
                x = y;
                moved = true;
                // Keep going along a productive direction.
                for (int ext = 0; ext < 20; ++ext) {
                    Unit z;
                    for (int k = 0; k < 3; ++k) z[k] = std::clamp(x[k] + h * d[k], 0.0, 1.0);
                    if (z == x) break;
                    Evaluated f = evaluate(z, pt, mode, r, cfg.cost);
                    if (!(f.value < best.value - 1e-15)) break;
                    best = f;
                    x = z;
                }
                break;
            }
        }
        if (!moved) h *= 0.5;
    }
    return best;
}

}  // namespace

OptimumResult optimize(const AsymptoticPoint& pt, Mode mode, const OptimizerConfig& cfg) {
    std::uint32_t r_lo = 0, r_hi = pt.ring.M();
    if (cfg.fixed_r) r_lo = r_hi = *cfg.fixed_r;
    OptimumResult result;
    const int refine = std::max(1, std::min(4, cfg.starts));
    for (std::uint32_t r = r_lo; r <= r_hi; ++r) {
        std::vector<std::pair<Evaluated, Unit>> seeds;
        seeds.reserve(cfg.starts + 1);
        // The corner L = E = 0 with the smallest V is a plain permutation decoder and is
        // admissible whenever anything is, so sparse start sets never come back empty.
        const Unit anchor{0.0, 0.0, 0.0};
        seeds.emplace_back(evaluate(anchor, pt, mode, r, cfg.cost), anchor);
        for (int i = 0; i < cfg.starts; ++i) {
            Unit x = low_discrepancy(i);
            seeds.emplace_back(evaluate(x, pt, mode, r, cfg.cost), x);
        }
        std::sort(seeds.begin(), seeds.end(),
                  [](const auto& a, const auto& b) { return a.first.value < b.first.value; });
        for (int i = 0; i < refine && i < int(seeds.size()); ++i) {
            if (!std::isfinite(seeds[i].first.value)) break;
            Evaluated e = pattern_search(seeds[i].second, seeds[i].first, pt, mode, r, cfg);
            if (!result.found || e.value < result.cost.total) {
                result.found = true;
                result.params = e.params;
                result.cost = e.cost;
            }
        }
    }
    return result;
}

double comparison_weight(double R, const RingSpec& ring, Mode mode) {
    return mode == Mode::BelowGV ? gv_relative_weight(R, ring) : beyond_relative_weight(R, ring);
}

RatePoint optimize_at_rate(double R, const RingSpec& ring, Mode mode, const OptimizerConfig& cfg) {
    RatePoint rp{R, comparison_weight(R, ring, mode), {}};
    rp.opt = optimize({ring, R, rp.T}, mode, cfg);
    return rp;
}

WorstRate worst_rate(const RingSpec& ring, Mode mode, const WorstRateConfig& cfg) {
    auto value = [&](const RatePoint& p) { return p.opt.found ? p.opt.cost.total : -kInf; };
    RatePoint best{0, 0, {}};
    double best_v = -kInf;
    const int steps = static_cast<int>(std::floor((cfg.r_hi - cfg.r_lo) / cfg.step + 1e-9));
    for (int i = 0; i <= steps; ++i) {
        double R = cfg.r_lo + i * cfg.step;
        RatePoint p = optimize_at_rate(R, ring, mode, cfg.optimizer);
        if (value(p) > best_v) {
            best_v = value(p);
            best = p;
        }
    }
    // Golden-section refinement of the maximum inside the neighbouring grid cells.
    double a = std::max(cfg.r_lo, best.R - cfg.step), b = std::min(cfg.r_hi, best.R + cfg.step);
    const double invphi = (std::sqrt(5.0) - 1) / 2;
    double c = b - invphi * (b - a), d = a + invphi * (b - a);
    RatePoint pc = optimize_at_rate(c, ring, mode, cfg.optimizer);
    RatePoint pd = optimize_at_rate(d, ring, mode, cfg.optimizer);
    while (b - a > cfg.refine_tol) {
        if (value(pc) > value(pd)) {
            b = d;
            d = c;
            pd = pc;
            c = b - invphi * (b - a);
            pc = optimize_at_rate(c, ring, mode, cfg.optimizer);
        } else {
            a = c;
            c = d;
            pc = pd;
            d = a + invphi * (b - a);
            pd = optimize_at_rate(d, ring, mode, cfg.optimizer);
        }
    }
    for (const RatePoint* p : {&pc, &pd})
        if (value(*p) > best_v) {
            best_v = value(*p);
            best = *p;
        }
    return {best.R, best_v, best};
}

}  // namespace leeisd::asym
