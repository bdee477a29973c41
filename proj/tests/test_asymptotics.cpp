#include <doctest.h>

#include <cmath>

#include "leeisd/asymptotics.hpp"
#include "leeisd/isd_engine.hpp"
#include "leeisd/lee_core.hpp"
#include "leeisd/weight_model.hpp"

using namespace leeisd;
using namespace leeisd::asym;

namespace {

double logq(const ExactCount& x, double q) { return log_count(x) / std::log(q); }

double threshold(const RingSpec& ring) {
    const double M = ring.M();
    return ring.q() % 2 ? M * (M + 1) / (2 * M + 1) : M / 2;
}

}  // namespace

TEST_CASE("binomial exponent") {
    CHECK(binom_exp(1, 0.5, 2) == doctest::Approx(1));
    CHECK(binom_exp(0.7, 0, 5) == 0);
    CHECK(binom_exp(0.7, 0.7, 5) == 0);
    const double exact = logq(binomial(8000, 2000), 47) / 10000;
    CHECK(std::abs(binom_exp(0.8, 0.2, 47) - exact) < 5e-3);
}

TEST_CASE("saddle points with closed forms") {
    CHECK(saddle_rho(GeneratingFamily::sphere(RingSpec(5, 1), 0, 2), 1.2) == doctest::Approx(1));
    // r = 1: 2(1 - T) x = T.
    CHECK(saddle_rho(GeneratingFamily::sphere(RingSpec(5, 1), 0, 1), 0.5) == doctest::Approx(0.5));
    CHECK(saddle_rho(GeneratingFamily::sphere(RingSpec(7, 1), 0, 3), 1e-6) < 1e-5);
    CHECK_THROWS_AS(saddle_point(GeneratingFamily::sphere(RingSpec(7, 1), 0, 3), 3.5), DomainError);
    auto edge = saddle_point(GeneratingFamily::sphere(RingSpec(7, 1), 0, 3), 3.0);
    CHECK(edge.boundary);
}

TEST_CASE("sphere exponent at the saturation weight is one") {
    for (std::uint32_t q : {5u, 7u, 9u, 11u, 47u}) {
        const RingSpec ring = RingSpec::from_modulus(q);
        CHECK(sphere_exponent(threshold(ring), ring) == doctest::Approx(1).epsilon(1e-9));
        CHECK(saturation_weight(ring) == doctest::Approx(threshold(ring)));
    }
}

TEST_CASE("restricting the alphabet lowers the exponent") {
    const RingSpec ring(47, 1);
    for (double T = 0.5; T < 23; T += 1.5)
        for (std::uint32_t r = 1; r < ring.M(); r += 2) {
            if (T >= r) continue;
            CHECK(sphere_exponent(T, ring, 0, r) <= sphere_exponent(T, ring) + 1e-12);
        }
}

TEST_CASE("sphere exponent converges to exact counts") {
    const RingSpec ring(5, 1);
    const std::size_t n = 3000;
    auto row = sphere_count_row(n, 900, ring, 0, ring.M());
    CHECK(std::abs(sphere_exponent(0.3, ring) - logq(row[900], 5) / n) < 5e-3);
}

TEST_CASE("composition exponent") {
    const std::vector<double> c{0.0, 1.0};
    CHECK(composition_exponent(0, c, 7) == doctest::Approx(0));
    CHECK(composition_exponent(0.5, c, 7) == doctest::Approx(std::log(2) / std::log(7)));
    const std::vector<double> mix{0.2, 0.3, 0.25, 0.25};
    const double total = 0.3 + 2 * 0.25 + 3 * 0.25;
    for (double V : {0.1, 0.4, 0.6})
        CHECK(composition_exponent(V, mix, 11) == doctest::Approx(composition_exponent(total - V, mix, 11)));
}

TEST_CASE("small representation exponent") {
    const RingSpec ring(47, 1);
    const std::vector<double> zero_parts{1.0};
    CHECK(rep_exponent_small(0.4, 0.05, 0.0, 0.0, 0.0, zero_parts, 47.0) == doctest::Approx(0));
    double prev = -1;
    for (double E = 0; E <= 0.1; E += 0.01) {
        double u = rep_exponent_small(0.4, 0.05, E, 0.3, ring, 4).first;
        CHECK(u > prev);
        prev = u;
    }
}

TEST_CASE("small representation exponent against the exact count") {
    const RingSpec ring(47, 1);
    const std::size_t n = 2000;
    const double R = 0.45, L = 0.05, E = 0.02, V = 0.3;
    const std::uint32_t r = 3;
    const std::size_t kl = std::size_t((R + L) * n), eps = std::size_t(E * n);
    const std::uint64_t v = std::uint64_t(V * n);
    auto lam = expected_composition(v, kl, r, ring);
    std::size_t support = 0;
    for (auto p : lam.parts()) support += p > 0;
    const ExactCount exact = count_fitting_compositions(v / 2, lam) * binomial(kl - support, eps) * power(46, eps);
    const double u = rep_exponent_small(R, L, E, V, ring, r).first;
    CHECK(std::abs(u - logq(exact, 47) / n) < 0.01);
}

TEST_CASE("large representation exponent") {
    const RingSpec ring(47, 1);
    CHECK(rep_exponent_large(0.4, 0.1, 0, 5, ring) == doctest::Approx(binom_exp(0.5, 0.25, 47)));
    // r = M: the (M - r + 1) factor is one.
    const double a = rep_exponent_large(0.4, 0.1, 0.05, ring.M(), ring);
    CHECK(a == doctest::Approx(binom_exp(0.5, 0.05, 47) + binom_exp(0.45, 0.05, 47) + binom_exp(0.4, 0.2, 47)));
    // The exponent keeps the i = eps summand of the exact sum; each of its three
    // binomials is at least q^(nH) / (kl + 1).
    const RingSpec r7(7, 1);
    for (std::uint32_t r : {1u, 2u, 3u}) {
        const std::size_t kl = 400, eps = 40, n = 800;
        const double exact = logq(representation_count_large(kl, eps, r, r7), 7) / n;
        const double slack = 3 * std::log(double(kl + 1)) / std::log(7.0) / n;
        CHECK(rep_exponent_large(0.25, 0.25, 0.05, r, r7) <= exact + slack);
    }
}

TEST_CASE("GV and beyond-GV relative weights") {
    const RingSpec ring(47, 1);
    CHECK(gv_relative_weight(0.999, ring) < 0.05);
    CHECK(gv_relative_weight(1e-9, ring) == doctest::Approx(threshold(ring)).epsilon(1e-3));
    const double T = gv_relative_weight(0.451, ring);
    CHECK(std::abs(ball_exponent(T, ring) - (1 - 0.451)) < 1e-9);
    for (double R = 0.05; R < 0.96; R += 0.05) {
        const double Tb = beyond_relative_weight(R, ring);
        CHECK(std::abs(sphere_exponent(Tb, ring) - (1 - R / 2)) < 1e-9);
        CHECK(Tb > gv_relative_weight(R, ring));
    }
}

TEST_CASE("below-GV cost collapses to a plain permutation cost") {
    const RingSpec ring(47, 1);
    const double R = 0.45, T = gv_relative_weight(R, ring);
    InternalParams p;
    p.r = ring.M();
    auto c = cost_small({ring, R, T}, p);
    CHECK(c.B == doctest::Approx(0));
    CHECK(c.D == doctest::Approx(0));
    const double prange = sphere_exponent(T, ring) - (1 - R) * sphere_exponent(T / (1 - R), ring);
    CHECK(c.total == doctest::Approx(prange).epsilon(1e-9));
}

TEST_CASE("amortized cost at the lower end of the U bracket") {
    const RingSpec ring(47, 1);
    const double R = 0.4;
    AsymptoticPoint pt{ring, R, gv_relative_weight(R, ring)};
    auto opt = optimize(pt, Mode::BelowGV, {{true, FeasibilityRule::Verbatim}, 5u, 8});
    REQUIRE(opt.found);
    InternalParams p = opt.params;
    p.U = p.L / 3;
    CostOptions co{true, FeasibilityRule::Verbatim};
    auto c = try_cost(pt, p, Mode::BelowGV, co);
    REQUIRE(c);
    CHECK(c->C == doctest::Approx(p.U));  // max(U, 3U - L) with 3U - L = 0
}

TEST_CASE("beyond-GV list exponents are nonnegative on a grid") {
    const RingSpec ring(47, 1);
    int checked = 0;
    for (double R : {0.2, 0.4, 0.6})
        for (double L = 0.01; L < 0.1; L += 0.03)
            for (std::uint32_t r : {0u, 5u, 15u}) {
                const double T = beyond_relative_weight(R, ring);
                const double K = R + L;
                for (double V = 0.5 * K * ring.M(); V < K * ring.M(); V += 0.1 * K * ring.M()) {
                    InternalParams p{L, V, 0.0, r, 0, 0};
                    AsymptoticPoint pt{ring, R, T};
                    auto br = u_bracket(pt, p, Mode::BeyondGV, {false, FeasibilityRule::Verbatim});
                    if (!br) continue;
                    p.U = br->second;
                    auto c = try_cost(pt, p, Mode::BeyondGV, {false, FeasibilityRule::Verbatim});
                    if (!c) continue;
                    ++checked;
                    CHECK(c->B >= -1e-12);
                    CHECK(c->D >= -1e-12);
                }
            }
    CHECK(checked > 10);
}

TEST_CASE("beyond-GV amortized cost: baseline cap and shape in U") {
    const RingSpec ring(47, 1);
    OptimizerConfig cfg;
    cfg.cost.amortized = true;
    cfg.starts = 8;
    // Wherever the decoder cost exceeds min(1 - R, R/2) the cap replaces it.
    const double R0 = 0.02, cap = std::min(1 - R0, R0 / 2);
    AsymptoticPoint low{ring, R0, beyond_relative_weight(R0, ring)};
    int capped = 0, uncapped = 0;
    for (double L = 0; L <= 0.2; L += 0.02)
        for (double Vf = 0; Vf <= 1; Vf += 0.1) {
            InternalParams p{L, 0, 0, 10, 0, 0};
            const double K = R0 + L;
            const double vmin = std::max(10 * K, low.T - ring.M() * (1 - R0 - L));
            p.V = vmin + Vf * std::max(0.0, std::min(low.T, ring.M() * K) - vmin);
            auto br = u_bracket(low, p, Mode::BeyondGV, cfg.cost);
            if (!br) continue;
            p.U = br->first;
            auto c = try_cost(low, p, Mode::BeyondGV, cfg.cost);
            if (!c) continue;
            const double raw = c->I + c->C;
            CHECK(c->baseline_capped == (raw > cap));
            CHECK(c->total == doctest::Approx(std::min(raw, cap)));
            (c->baseline_capped ? capped : uncapped)++;
        }
    CHECK(capped > 0);

    // Nonincreasing in U while iterations are still paid for.
    auto mid = optimize_at_rate(0.4, ring, Mode::BeyondGV, cfg);
    REQUIRE(mid.opt.found);
    InternalParams p = mid.opt.params;
    AsymptoticPoint pt{ring, 0.4, mid.T};
    auto br = u_bracket(pt, p, Mode::BeyondGV, cfg.cost);
    REQUIRE(br);
    double prev = 1e9;
    for (int i = 0; i <= 20; ++i) {
        p.U = br->first + (br->second - br->first) * i / 20.0;
        auto c = try_cost(pt, p, Mode::BeyondGV, cfg.cost);
        REQUIRE(c);
        if (c->I <= 0) break;
        CHECK(c->total <= prev + 1e-12);
        prev = c->total;
    }
}

TEST_CASE("optimizer") {
    const RingSpec ring(47, 1);
    OptimizerConfig cfg;
    cfg.fixed_r = 5;
    cfg.starts = 16;
    auto pt = optimize_at_rate(0.408, ring, Mode::BelowGV, cfg);
    REQUIRE(pt.opt.found);
    CHECK(pt.opt.cost.total <= 0.1540);
    CHECK(check_feasible({ring, pt.R, pt.T}, pt.opt.params, Mode::BelowGV, cfg.cost).empty());

    OptimizerConfig few = cfg, many = cfg;
    few.starts = 4;
    many.starts = 24;
    for (double R : {0.2, 0.5, 0.7}) {
        auto a = optimize_at_rate(R, ring, Mode::BelowGV, few);
        auto b = optimize_at_rate(R, ring, Mode::BelowGV, many);
        CHECK(b.opt.cost.total <= a.opt.cost.total + 1e-9);
    }

    auto lo = optimize_at_rate(0.01, ring, Mode::BelowGV, cfg);
    auto hi = optimize_at_rate(0.99, ring, Mode::BelowGV, cfg);
    CHECK(lo.opt.cost.total < 0.02);
    CHECK(hi.opt.cost.total < 0.02);
}
