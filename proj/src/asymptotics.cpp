#include "leeisd/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace leeisd::asym {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kMaxRootIters = 200;
constexpr double kSaddleTol = 1e-12;

double xlogx(double x) { return x > 0 ? x * std::log(x) : 0.0; }

double log_sum_exp(std::span<const double> a) {
    double mx = *std::max_element(a.begin(), a.end());
    double s = 0;
    for (double v : a) s += std::exp(v - mx);
    return mx + std::log(s);
}

}  // namespace

double binom_exp(double F, double G, double q) {
    constexpr double slack = 1e-12;
    if (G < -slack || G > F + slack) throw DomainError("binom_exp: need 0 <= G <= F");
    G = std::clamp(G, 0.0, std::max(F, 0.0));
    F = std::max(F, 0.0);
    return (xlogx(F) - xlogx(G) - xlogx(F - G)) / std::log(q);
}

// ---------------------------------------------------------------------------

GeneratingFamily GeneratingFamily::sphere(const RingSpec& ring, std::uint32_t rmin, std::uint32_t rmax) {
    if (rmin > rmax || rmax > ring.M()) throw DomainError("sphere family: need rmin <= rmax <= M");
    std::vector<Term> terms;
    for (std::uint32_t j = rmin; j <= rmax; ++j)
        terms.push_back({static_cast<int>(j), std::log(static_cast<double>(ring.multiplicity(j)))});
    GeneratingFamily f;
    f.add_factor(1.0, std::move(terms));
    return f;
}

GeneratingFamily GeneratingFamily::composition(std::span<const double> c) {
    GeneratingFamily f;
    for (std::size_t i = 1; i < c.size(); ++i) {
        if (c[i] <= 0) continue;
        std::vector<Term> terms;
        for (std::size_t j = 0; j <= i; ++j) terms.push_back({static_cast<int>(j), 0.0});
        f.add_factor(c[i], std::move(terms));
    }
    return f;
}

void GeneratingFamily::add_factor(double power, std::vector<Term> terms) {
    if (terms.empty()) throw DomainError("generating family: empty factor");
    std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.degree < b.degree; });
    factors_.push_back({power, std::move(terms)});
}

double GeneratingFamily::min_rate() const {
    double r = 0;
    for (const auto& f : factors_) r += f.power * f.terms.front().degree;
    return r;
}

double GeneratingFamily::max_rate() const {
    double r = 0;
    for (const auto& f : factors_) r += f.power * f.terms.back().degree;
    return r;
}

double GeneratingFamily::log_min_coeff() const {
    double r = 0;
    for (const auto& f : factors_) r += f.power * f.terms.front().log_coeff;
    return r;
}

double GeneratingFamily::log_max_coeff() const {
    double r = 0;
    for (const auto& f : factors_) r += f.power * f.terms.back().log_coeff;
    return r;
}

GeneratingFamily::Eval GeneratingFamily::eval(double log_x) const {
    Eval out{0, 0, 0};
    double buf[128];
    std::vector<double> heap;
    for (const auto& f : factors_) {
        std::size_t n = f.terms.size();
        double* a = buf;
        if (n > std::size(buf)) {
            heap.resize(n);
            a = heap.data();
        }
        double mx = kNegInf;
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = f.terms[i].log_coeff + f.terms[i].degree * log_x;
            mx = std::max(mx, a[i]);
        }
        double s0 = 0, s1 = 0, s2 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double w = std::exp(a[i] - mx);
            double d = f.terms[i].degree;
            s0 += w;
            s1 += w * d;
            s2 += w * d * d;
        }
        double mean = s1 / s0;
        out.log_f += f.power * (mx + std::log(s0));
        out.delta += f.power * mean;
        out.ddelta += f.power * std::max(s2 / s0 - mean * mean, 0.0);
    }
    return out;
}

double Saddle::rho() const { return std::exp(log_rho); }

Saddle saddle_point(const GeneratingFamily& family, double T) {
    const double lo_rate = family.min_rate();
    const double hi_rate = family.max_rate();
    const double edge = 1e-12 * std::max(1.0, hi_rate);
    if (!(T >= lo_rate - edge && T <= hi_rate + edge))
        throw DomainError("saddle point: T = " + std::to_string(T) + " outside [" + std::to_string(lo_rate) +
                          ", " + std::to_string(hi_rate) + "]");
    // At an endpoint the coefficient is that of the extreme monomial and rho escapes to 0 or infinity.
    if (T <= lo_rate + edge)
        return {-std::numeric_limits<double>::infinity(), family.log_min_coeff(), 0.0, true};
    if (T >= hi_rate - edge)
        return {std::numeric_limits<double>::infinity(), family.log_max_coeff(), 0.0, true};

    // delta is increasing in log x; bracket by doubling, then safeguarded Newton.
    double lo = -1, hi = 1;
    int expand = 0;
    while (family.eval(lo).delta > T) {
        lo *= 2;
        if (++expand > 60) throw DomainError("saddle point: bracket expansion failed");
    }
    while (family.eval(hi).delta < T) {
        hi *= 2;
        if (++expand > 60) throw DomainError("saddle point: bracket expansion failed");
    }
    double x = 0.5 * (lo + hi);
    GeneratingFamily::Eval e = family.eval(x);
    for (int it = 0; it < kMaxRootIters; ++it) {
        double diff = e.delta - T;
        if (std::abs(diff) < kSaddleTol) return {x, e.log_f, std::abs(diff), false};
        if (diff > 0)
            hi = x;
        else
            lo = x;
        double nx = e.ddelta > 0 ? x - diff / e.ddelta : 0.5 * (lo + hi);
        if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
        if (hi - lo < 1e-15 * std::max(1.0, std::abs(x))) {
            e = family.eval(nx);
            return {nx, e.log_f, std::abs(e.delta - T), false};
        }
        x = nx;
        e = family.eval(x);
    }
    throw DomainError("saddle point: no convergence within iteration cap");
}

double saddle_rho(const GeneratingFamily& family, double T) { return saddle_point(family, T).rho(); }

namespace {

double exponent_from_saddle(const Saddle& s, double T, double q) {
    if (s.boundary) return s.log_f / std::log(q);
    return (s.log_f - T * s.log_rho) / std::log(q);
}

// Sphere families get rebuilt millions of times inside the optimiser.
struct FamilyCache {
    std::uint32_t q = 0, rmin = 0, rmax = 0;
    std::optional<GeneratingFamily> family;
};

const GeneratingFamily& cached_sphere(const RingSpec& ring, std::uint32_t rmin, std::uint32_t rmax) {
    thread_local FamilyCache slots[4];
    thread_local unsigned next = 0;
    for (auto& s : slots)
        if (s.family && s.q == ring.q() && s.rmin == rmin && s.rmax == rmax) return *s.family;
    auto& s = slots[next++ % 4];
    s.q = ring.q();
    s.rmin = rmin;
    s.rmax = rmax;
    s.family = GeneratingFamily::sphere(ring, rmin, rmax);
    return *s.family;
}

}  // namespace

double sphere_exponent(double T, const RingSpec& ring, std::uint32_t rmin, std::uint32_t rmax) {
    const auto& fam = cached_sphere(ring, rmin, rmax);
    return exponent_from_saddle(saddle_point(fam, T), T, ring.q());
}

double sphere_exponent(double T, const RingSpec& ring) { return sphere_exponent(T, ring, 0, ring.M()); }

double block_exponent(double length, double weight, const RingSpec& ring, std::uint32_t rmin,
                      std::uint32_t rmax) {
    constexpr double eps = 1e-12;
    if (length < -eps || weight < -eps) return kNegInf;
    if (length <= eps) return weight <= eps ? 0.0 : kNegInf;
    double rate = weight / length;
    if (rate < rmin - 1e-10 || rate > rmax + 1e-10) return kNegInf;
    rate = std::clamp(rate, double(rmin), double(rmax));
    return length * sphere_exponent(rate, ring, rmin, rmax);
}

double saturation_weight(const RingSpec& ring) {
    const double M = ring.M();
    return ring.q() % 2 == 1 ? M * (M + 1) / (2 * M + 1) : M / 2;
}

double ball_exponent(double T, const RingSpec& ring) {
    if (T < 0) throw DomainError("ball exponent: negative weight");
    // Beyond the uniform mean the ball already holds all but a vanishing fraction of the space.
    if (T >= saturation_weight(ring)) return 1.0;
    return sphere_exponent(T, ring);
}

double composition_exponent(double V, std::span<const double> c, double q) {
    auto fam = GeneratingFamily::composition(c);
    return exponent_from_saddle(saddle_point(fam, V), V, q);
}

namespace {

template <class F>
double bisect(F&& f, double lo, double hi, double tol) {
    double flo = f(lo);
    for (int it = 0; it < kMaxRootIters; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if (hi - lo < tol) return 0.5 * (lo + hi);
    }
    throw DomainError("bisection: no convergence within iteration cap");
}

}  // namespace

double gv_relative_weight(double R, const RingSpec& ring) {
    if (!(R > 0 && R < 1)) throw DomainError("gv_relative_weight: need 0 < R < 1");
    const double target = 1 - R;
    return bisect([&](double T) { return sphere_exponent(T, ring) - target; }, 0.0, saturation_weight(ring),
                  1e-14);
}

double beyond_relative_weight(double R, const RingSpec& ring) {
    if (!(R > 0 && R < 1)) throw DomainError("beyond_relative_weight: need 0 < R < 1");
    const double target = 1 - R / 2;
    const double M = ring.M();
    const double floor_exp = sphere_exponent(M, ring);
    if (target <= floor_exp) throw DomainError("beyond_relative_weight: rate too large for this ring");
    return bisect([&](double T) { return sphere_exponent(T, ring) - target; }, saturation_weight(ring), M, 1e-14);
}

// ---------------------------------------------------------------------------

std::string to_string(Mode mode) { return mode == Mode::BelowGV ? "below" : "beyond"; }

Mode mode_from_string(const std::string& s) {
    if (s == "below" || s == "below-gv") return Mode::BelowGV;
    if (s == "beyond" || s == "beyond-gv") return Mode::BeyondGV;
    throw InvalidArgument("unknown mode '" + s + "' (expected below or beyond)");
}

std::vector<double> expected_part_rates(double rate, const RingSpec& ring, std::uint32_t r) {
    std::vector<double> c(r + 1, 0.0);
    if (rate <= 1e-14) {
        c[0] = 1;
        return c;
    }
    if (rate >= r - 1e-14) {
        c[r] = 1;
        return c;
    }
    const auto& fam = cached_sphere(ring, 0, r);
    Saddle s = saddle_point(fam, rate);
    double z = s.log_f;
    for (std::uint32_t j = 0; j <= r; ++j)
        c[j] = std::exp(std::log(double(ring.multiplicity(j))) + j * s.log_rho - z);
    return c;
}

double rep_exponent_small(double R, double L, double E, double S, double Vrate, std::span<const double> part_rates,
                          double q) {
    const double K = R + L;
    if (E > K - S + 1e-12) throw DomainError("rep_exponent_small: need E <= R + L - S");
    double gamma = composition_exponent(Vrate, part_rates, q);
    return K * gamma + binom_exp(K - S, E, q) + E;
}

std::pair<double, double> rep_exponent_small(double R, double L, double E, double V, const RingSpec& ring,
                                             std::uint32_t r) {
    const double K = R + L;
    auto c = expected_part_rates(V / K, ring, r);
    const double S = K * (1 - c[0]);
    double half = 0.5 * V / K;
    return {rep_exponent_small(R, L, E, S, half, c, ring.q()), S};
}

double rep_exponent_large(double R, double L, double E, std::uint32_t r, const RingSpec& ring) {
    const double K = R + L;
    const double q = ring.q();
    if (E < 0 || E > K / 2 + 1e-12) throw DomainError("rep_exponent_large: need 0 <= E <= (R+L)/2");
    if (r > ring.M()) throw DomainError("rep_exponent_large: r > M");
    double rest = std::max(K - 2 * E, 0.0);
    return binom_exp(K, E, q) + 2 * E * std::log(double(ring.M() - r + 1)) / std::log(q) +
           binom_exp(K - E, E, q) + binom_exp(rest, rest / 2, q);
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kSlack = 1e-12;

struct SmallParts {
    double A_full, A_e2, A_e1, B, D_noU, reps, S;
};

struct LargeParts {
    double A_e2, A_e1, B, D_noU, reps;
};

std::string check_common(const AsymptoticPoint& pt, const InternalParams& p) {
    const double R = pt.R, T = pt.T, M = pt.ring.M();
    if (!(R > 0 && R < 1)) return "rate outside (0,1)";
    if (!(T > 0 && T < M)) return "relative weight outside (0,M)";
    if (p.r > pt.ring.M()) return "r > M";
    if (p.L < -kSlack || p.L > 1 - R + kSlack) return "L outside [0, 1-R]";
    if (p.V < -kSlack || p.V > T + kSlack) return "V outside [0, T]";
    if (p.E < -kSlack) return "E < 0";
    if (T - p.V > M * (1 - R - p.L) + kSlack) return "residual weight exceeds M(1-R-L)";
    return {};
}

}  // namespace

std::string check_feasible(const AsymptoticPoint& pt, const InternalParams& p, Mode mode, const CostOptions& opt) {
    if (auto why = check_common(pt, p); !why.empty()) return why;
    const double R = pt.R, T = pt.T, M = pt.ring.M();
    const double K = R + p.L;
    if (mode == Mode::BelowGV) {
        if (p.E > K - kSlack && p.E > 0) return "E >= R+L";
        if (p.V > K * p.r + kSlack) return "V exceeds r(R+L)";
        if (opt.rule == FeasibilityRule::Verbatim) {
            if (T - 2 * p.V < -kSlack || T - 2 * p.V > M * (1 - R - p.L) + kSlack)
                return "violates 0 <= T-2V <= M(1-R-L)";
        }
        if (p.V / 4 > (K - p.E) / 2 * p.r + kSlack) return "base-list weight exceeds r per entry";
    } else {
        if (p.E > K / 2 + kSlack) return "E > (R+L)/2";
        if (p.V < p.E * (M - p.r) + p.r * K - kSlack) return "violates V >= E(M-r) + r(R+L)";
        if (p.V - p.E * M > M * (K - p.E) + kSlack) return "V exceeds M(R+L)";
    }
    return {};
}

namespace {

std::optional<SmallParts> small_parts(const AsymptoticPoint& pt, const InternalParams& p, bool need_d) {
    const auto& ring = pt.ring;
    const double R = pt.R, T = pt.T, q = ring.q(), M = ring.M();
    const double K = R + p.L;
    SmallParts s{};
    s.A_full = sphere_exponent(T, ring);
    s.A_e1 = block_exponent(1 - R - p.L, T - p.V, ring, 0, M);
    s.A_e2 = block_exponent(K, p.V, ring, 0, p.r);
    double half = (K - p.E) / 2;
    s.B = block_exponent(half, p.V / 4, ring, 0, p.r) + binom_exp(K / 2, p.E / 2, q) + p.E / 2;
    if (need_d) s.D_noU = block_exponent(K - p.E, p.V / 2, ring, 0, p.r) + binom_exp(K, p.E, q) + p.E;
    if (!std::isfinite(s.A_e1) || !std::isfinite(s.A_e2) || !std::isfinite(s.B)) return std::nullopt;
    if (need_d && !std::isfinite(s.D_noU)) return std::nullopt;
    if (K <= kSlack) {
        s.reps = 0;
        s.S = 0;
    } else {
        auto c = expected_part_rates(p.V / K, ring, p.r);
        s.S = K * (1 - c[0]);
        if (p.E > K - s.S + 1e-12) return std::nullopt;
        s.reps = K * composition_exponent(0.5 * p.V / K, c, q) + binom_exp(K - s.S, p.E, q) + p.E;
    }
    return s;
}

std::optional<LargeParts> large_parts(const AsymptoticPoint& pt, const InternalParams& p, bool need_d) {
    const auto& ring = pt.ring;
    const double R = pt.R, T = pt.T, q = ring.q(), M = ring.M();
    const double K = R + p.L;
    const double free_len = K - p.E;
    const double heavy = p.V - p.E * M;
    LargeParts s{};
    s.A_e1 = block_exponent(1 - R - p.L, T - p.V, ring, 0, ring.M());
    s.A_e2 = block_exponent(K, p.V, ring, p.r, ring.M());
    s.B = p.E / 2 + binom_exp(K / 2, p.E / 2, q) + binom_exp(free_len / 2, free_len / 4, q) +
          block_exponent(free_len / 4, heavy / 4, ring, p.r, ring.M());
    if (need_d)
        s.D_noU = p.E + binom_exp(K, p.E, q) + binom_exp(free_len, free_len / 2, q) +
                  block_exponent(free_len / 2, heavy / 2, ring, p.r, ring.M());
    if (!std::isfinite(s.A_e1) || !std::isfinite(s.A_e2) || !std::isfinite(s.B)) return std::nullopt;
    if (need_d && !std::isfinite(s.D_noU)) return std::nullopt;
    s.reps = rep_exponent_large(R, p.L, p.E, p.r, ring);
    return s;
}

double psi_rate(const AsymptoticPoint& pt, std::uint32_t r) {
    auto c = expected_part_rates(pt.T, pt.ring, pt.ring.M());
    double psi = 0;
    for (std::uint32_t i = r + 1; i < c.size(); ++i) psi += c[i];
    return psi;
}

}  // namespace

std::optional<std::pair<double, double>> u_bracket(const AsymptoticPoint& pt, const InternalParams& p, Mode mode,
                                                   const CostOptions& opt) {
    if (!check_feasible(pt, p, mode, opt).empty()) return std::nullopt;
    double reps, B, e2;
    if (mode == Mode::BelowGV) {
        auto s = small_parts(pt, p, false);
        if (!s) return std::nullopt;
        reps = s->reps;
        B = s->B;
        e2 = s->A_e2;
    } else {
        auto s = large_parts(pt, p, false);
        if (!s) return std::nullopt;
        reps = s->reps;
        B = s->B;
        e2 = s->A_e2;
    }
    if (opt.amortized) {
        // Truncated lists cannot raise the success probability above the full one: 3U <= A(e2).
        double lo = p.L / 3, hi = std::min({reps, B, p.L, e2 / 3});
        if (hi < lo - kSlack) return std::nullopt;
        return std::pair{lo, std::max(lo, hi)};
    }
    return std::pair{0.0, std::max(0.0, std::min(reps, p.L))};
}

std::optional<CostBreakdown> try_cost(const AsymptoticPoint& pt, InternalParams& p, Mode mode,
                                      const CostOptions& opt) {
    if (!check_feasible(pt, p, mode, opt).empty()) return std::nullopt;
    const double R = pt.R, L = p.L, U = p.U;
    CostBreakdown c;
    double reps, B, D_noU, e2, e1, head;
    if (mode == Mode::BelowGV) {
        auto s = small_parts(pt, p, !opt.amortized);
        if (!s) return std::nullopt;
        p.S = s->S;
        reps = s->reps;
        B = s->B;
        D_noU = s->D_noU;
        e2 = s->A_e2;
        e1 = s->A_e1;
        head = s->A_full;
        c.psi_rate = psi_rate(pt, p.r);
    } else {
        auto s = large_parts(pt, p, !opt.amortized);
        if (!s) return std::nullopt;
        p.S = R + L;
        reps = s->reps;
        B = s->B;
        D_noU = s->D_noU;
        e2 = s->A_e2;
        e1 = s->A_e1;
        head = 1 - R;
    }
    c.reps = reps;
    if (opt.amortized) {
        if (U < L / 3 - kSlack || U > std::min({reps, B, L, e2 / 3}) + kSlack) return std::nullopt;
        c.I = head - 3 * U - e1;
        c.B = U;
        c.D = U;
        c.C = std::max(U, 3 * U - L);
    } else {
        if (U < -kSlack || U > std::min(reps, L) + kSlack) return std::nullopt;
        c.I = head - e2 - e1;
        c.B = B;
        c.D = D_noU - U;
        c.C = std::max({c.B, 2 * c.D - L + U, c.D});
    }
    // With many solutions one iteration may already succeed; at least one iteration is always paid.
    c.I = std::max(c.I, 0.0);
    c.total = c.I + c.C;
    c.memory = std::max(c.B, c.D);
    c.quantum = c.I / 2 + std::max({c.B, c.D, (2 * c.D - L + U) / 2});
    if (mode == Mode::BeyondGV && opt.amortized) {
        double cap = std::min(1 - R, R / 2);
        if (cap < c.total) {
            c.total = cap;
            c.baseline_capped = true;
        }
    }
    return c;
}

namespace {

CostBreakdown must_cost(const AsymptoticPoint& pt, const InternalParams& params, Mode mode, const CostOptions& opt) {
    InternalParams p = params;
    if (auto why = check_feasible(pt, p, mode, opt); !why.empty()) throw Infeasible("infeasible parameters: " + why);
    auto c = try_cost(pt, p, mode, opt);
    if (!c) throw Infeasible("infeasible parameters: U outside its admissible range or empty sub-sphere");
    return *c;
}

}  // namespace

CostBreakdown cost_small(const AsymptoticPoint& pt, const InternalParams& p, FeasibilityRule rule) {
    return must_cost(pt, p, Mode::BelowGV, {false, rule});
}

CostBreakdown cost_small_amortized(const AsymptoticPoint& pt, const InternalParams& p, FeasibilityRule rule) {
    return must_cost(pt, p, Mode::BelowGV, {true, rule});
}

CostBreakdown cost_large(const AsymptoticPoint& pt, const InternalParams& p) {
    return must_cost(pt, p, Mode::BeyondGV, {false, FeasibilityRule::Verbatim});
}

CostBreakdown cost_large_amortized(const AsymptoticPoint& pt, const InternalParams& p) {
    return must_cost(pt, p, Mode::BeyondGV, {true, FeasibilityRule::Verbatim});
}

}  // namespace leeisd::asym
