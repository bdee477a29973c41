#pragma once

// Real-valued asymptotic machinery: saddle-point exponents of (restricted) Lee
// spheres and fitting compositions, representation counts, and the cost
// exponents of the two-level restricted-balls decoder. All exponents are
// base-q logarithms normalised by the code length n.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "leeisd/ring.hpp"

namespace leeisd::asym {

class DomainError : public Error {
public:
    using Error::Error;
};

class Infeasible : public Error {
public:
    using Error::Error;
};

/// Asymptotic binomial exponent lim (1/n) log_q binom(Fn, Gn).
double binom_exp(double F, double G, double q);

/// f(x) = prod_k P_k(x)^{a_k} with every P_k a polynomial with positive coefficients.
class GeneratingFamily {
public:
    struct Term {
        int degree;
        double log_coeff;
    };
    struct Factor {
        double power;
        std::vector<Term> terms;
    };

    /// Per-entry generating polynomial of vectors whose entry weights lie in [rmin, rmax].
    static GeneratingFamily sphere(const RingSpec& ring, std::uint32_t rmin, std::uint32_t rmax);
    /// prod_i (1 + z + ... + z^i)^{c_i}; c[i] is the rate of parts of size i.
    static GeneratingFamily composition(std::span<const double> c);

    void add_factor(double power, std::vector<Term> terms);

    double min_rate() const;
    double max_rate() const;
    /// log of the coefficient attached to x^{min_rate} (resp. x^{max_rate}) in f.
    double log_min_coeff() const;
    double log_max_coeff() const;

    struct Eval {
        double log_f;
        double delta;   // x f'(x) / f(x)
        double ddelta;  // d delta / d log x
    };
    Eval eval(double log_x) const;

private:
    std::vector<Factor> factors_;
};

struct Saddle {
    double log_rho;   // natural log of the saddle point
    double log_f;     // natural log of f(rho)
    double residual;  // |delta(rho) - T|
    bool boundary;    // T sits on an endpoint of the attainable range
    double rho() const;
};

/// Solves x f'(x)/f(x) = T for x > 0. Throws DomainError when T lies outside the
/// closed range [min_rate, max_rate]; endpoints return a boundary record.
Saddle saddle_point(const GeneratingFamily& family, double T);

/// Convenience: the positive root rho itself.
double saddle_rho(const GeneratingFamily& family, double T);

/// lim (1/n) log_q F_{[rmin,rmax]}(Tn, n).
double sphere_exponent(double T, const RingSpec& ring, std::uint32_t rmin, std::uint32_t rmax);
double sphere_exponent(double T, const RingSpec& ring);

/// Exponent of a sphere over a sub-block: length * sphere_exponent(weight / length).
/// Returns -infinity when the block cannot carry that weight.
double block_exponent(double length, double weight, const RingSpec& ring, std::uint32_t rmin,
                      std::uint32_t rmax);

/// lim (1/n) log_q V(Tn, n).
double ball_exponent(double T, const RingSpec& ring);

/// Relative weight at which the full sphere (and ball) exponent reaches 1.
double saturation_weight(const RingSpec& ring);

/// gamma(V) for compositions fitting into a composition with part-size rates c.
double composition_exponent(double V, std::span<const double> c, double q);

/// T with ball exponent 1 - R (full-distance decoding pinned to the GV bound).
double gv_relative_weight(double R, const RingSpec& ring);
/// T above saturation with sphere exponent 1 - R/2 (N = q^{Rn/2} expected solutions).
double beyond_relative_weight(double R, const RingSpec& ring);

// ---------------------------------------------------------------------------
// Decoder cost model

enum class Mode { BelowGV, BeyondGV };

std::string to_string(Mode mode);
Mode mode_from_string(const std::string& s);

struct AsymptoticPoint {
    RingSpec ring;
    double R;
    double T;
};

struct InternalParams {
    double L = 0;
    double V = 0;
    double E = 0;
    std::uint32_t r = 0;
    double U = 0;
    double S = 0;  // expected support rate of e2, filled by the cost routines
};

struct CostBreakdown {
    double I = 0;
    double B = 0;
    double D = 0;
    double C = 0;
    double total = 0;
    double memory = 0;
    double quantum = 0;
    double reps = 0;       // representation exponent bounding U
    double psi_rate = 0;   // expected rate of entries heavier than r (below-GV only)
    bool baseline_capped = false;
};

enum class FeasibilityRule {
    Verbatim,     // 0 <= T - 2V <= M(1 - R - L)
    ResidualRate  // 0 <= T - V <= M(1 - R - L)
};

struct CostOptions {
    bool amortized = false;
    FeasibilityRule rule = FeasibilityRule::Verbatim;
};

/// Part-size rates of e2: the Boltzmann law on weights 0..r conditioned to mean V/(R+L).
std::vector<double> expected_part_rates(double rate, const RingSpec& ring, std::uint32_t r);

/// Representation exponent (R+L) gamma(V/2) + H(R+L-S, E) + E; also returns S.
std::pair<double, double> rep_exponent_small(double R, double L, double E, double V, const RingSpec& ring,
                                             std::uint32_t r);
/// Explicit-composition form used by tests.
double rep_exponent_small(double R, double L, double E, double S, double Vrate,
                          std::span<const double> part_rates, double q);

double rep_exponent_large(double R, double L, double E, std::uint32_t r, const RingSpec& ring);

/// Empty string when feasible, else a reason.
std::string check_feasible(const AsymptoticPoint& point, const InternalParams& params, Mode mode,
                           const CostOptions& options);

/// Non-throwing evaluation; U is taken from params (must lie in its admissible bracket).
std::optional<CostBreakdown> try_cost(const AsymptoticPoint& point, InternalParams& params, Mode mode,
                                      const CostOptions& options);

CostBreakdown cost_small(const AsymptoticPoint& point, const InternalParams& params,
                         FeasibilityRule rule = FeasibilityRule::Verbatim);
CostBreakdown cost_small_amortized(const AsymptoticPoint& point, const InternalParams& params,
                                   FeasibilityRule rule = FeasibilityRule::Verbatim);
CostBreakdown cost_large(const AsymptoticPoint& point, const InternalParams& params);
/// Includes the min(total, 1 - R, R/2) brute-force cap.
CostBreakdown cost_large_amortized(const AsymptoticPoint& point, const InternalParams& params);

/// Admissible range for U at the given (L, V, E, r); nullopt when empty.
std::optional<std::pair<double, double>> u_bracket(const AsymptoticPoint& point, const InternalParams& params,
                                                   Mode mode, const CostOptions& options);

// ---------------------------------------------------------------------------
// Optimisation

struct OptimizerConfig {
    CostOptions cost;
    std::optional<std::uint32_t> fixed_r;
    int starts = 64;
    int sweeps = 60;
    double tolerance = 1e-7;
};

struct OptimumResult {
    InternalParams params;
    CostBreakdown cost;
    bool found = false;
};

OptimumResult optimize(const AsymptoticPoint& point, Mode mode, const OptimizerConfig& config);

/// Relative weight used for a given rate in the comparison methodology.
double comparison_weight(double R, const RingSpec& ring, Mode mode);

struct RatePoint {
    double R;
    double T;
    OptimumResult opt;
};

struct WorstRate {
    double R_star;
    double exponent;
    RatePoint point;
};

struct WorstRateConfig {
    OptimizerConfig optimizer;
    double r_lo = 0.02;
    double r_hi = 0.98;
    double step = 0.002;
    double refine_tol = 1e-4;
};

WorstRate worst_rate(const RingSpec& ring, Mode mode, const WorstRateConfig& config);
RatePoint optimize_at_rate(double R, const RingSpec& ring, Mode mode, const OptimizerConfig& config);

}  // namespace leeisd::asym
