#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "niss/distribution.hpp"
#include "niss/errors.hpp"
#include "niss/feasibility.hpp"

namespace niss {

inline constexpr double kSchemeTol = 1e-10;

/// Degree-1 strategy for one party: conditional mean f0 + f1*z given the
/// shared bit z. P(output = 1 | z) = (1 + f0 + f1 z)/2, so validity needs
/// |f0| + |f1| <= 1.
struct AffinePair {
    double f0 = 0.0;
    double f1 = 0.0;

    double eval(int z) const { return f0 + f1 * static_cast<double>(z); }
    double prob_plus(int z) const { return 0.5 * (1.0 + eval(z)); }
    bool in_range(double tol = kSchemeTol) const { return std::abs(f0) + std::abs(f1) <= 1.0 + tol; }
};

/// Shared-bit strategy pair hitting marginals (a, b) and agreement mass
/// zeta + f1*g1/2 exactly.
struct AffineScheme {
    double a = 0.5;
    double b = 0.5;
    double f1 = 0.0;
    double g1 = 0.0;

    AffinePair alice() const { return {2.0 * a - 1.0, f1}; }
    AffinePair bob() const { return {2.0 * b - 1.0, g1}; }

    void validate(double tol = kSchemeTol) const {
        if (a < -tol || a > 1.0 + tol || b < -tol || b > 1.0 + tol)
            throw std::invalid_argument("AffineScheme: marginals outside [0,1]");
        if (!alice().in_range(tol) || !bob().in_range(tol))
            throw std::invalid_argument("AffineScheme: conditional mean leaves [-1,1]");
    }
};

/// Splits a product c into box-constrained factors: f1*g1 = c with |f1| <= F,
/// |g1| <= G. Canonically gives Alice the full box magnitude (f1 = F) and
/// Bob the sign, which keeps |f1| independent of the other party's index in
/// the patching construction.
inline std::pair<double, double> solve_pair_product(double F, double G, double c) {
    if (F < 0.0 || G < 0.0) throw std::invalid_argument("solve_pair_product: F,G must be >= 0");
    if (std::abs(c) > F * G + kSchemeTol)
        throw infeasible_error("solve_pair_product: |c| = " + std::to_string(std::abs(c)) +
                               " exceeds F*G = " + std::to_string(F * G));
    if (F <= 1e-12) {
        if (std::abs(c) > kSchemeTol)
            throw infeasible_error("solve_pair_product: F ~ 0 but c = " + std::to_string(c));
        return {0.0, 0.0};
    }
    return {F, c / F};
}

/// Degree-1 scheme for a feasible binary target. Feasibility is re-derived
/// from the product constraint |2(s-zeta)| <= 4*beta, so infeasible targets
/// surface as infeasible_error.
inline AffineScheme synthesize_binary_scheme(const BinaryTarget& t) {
    auto [zeta, beta] = zeta_beta(t.a, t.b);
    (void)beta;
    double F = 2.0 * std::min(t.a, 1.0 - t.a);
    double G = 2.0 * std::min(t.b, 1.0 - t.b);
    double c = 2.0 * (t.s - zeta);
    auto [f1, g1] = solve_pair_product(F, G, c);
    AffineScheme sch{t.a, t.b, f1, g1};
    sch.validate();
    return sch;
}

/// Exact output distribution of an affine scheme: average over the fair
/// shared bit of the product of the two conditional laws.
inline JointDistribution evaluate_scheme_exact(const AffineScheme& sch) {
    sch.validate();
    AffinePair fa = sch.alice(), gb = sch.bob();
    double pmf[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    for (int z : {1, -1}) {
        double pu = std::clamp(fa.prob_plus(z), 0.0, 1.0);
        double pv = std::clamp(gb.prob_plus(z), 0.0, 1.0);
        pmf[0][0] += 0.5 * pu * pv;
        pmf[0][1] += 0.5 * pu * (1.0 - pv);
        pmf[1][0] += 0.5 * (1.0 - pu) * pv;
        pmf[1][1] += 0.5 * (1.0 - pu) * (1.0 - pv);
    }
    return JointDistribution({1, -1}, {1, -1},
                             {{pmf[0][0], pmf[0][1]}, {pmf[1][0], pmf[1][1]}});
}

/// Per-realization binary targets P_{U_x, V_y} over all pairs of classical
/// sequences (x^d, y^d), plus the source they are weighted by. Realization
/// keys are d-bit masks: bit (i-1) set means coordinate i equals +1.
struct RealizationTargets {
    int d = 0;
    BivariateBinarySource source;
    std::vector<BinaryTarget> per_pair;  // size 4^d, index x * 2^d + y

    RealizationTargets(int dim, BivariateBinarySource src, std::vector<BinaryTarget> targets)
        : d(dim), source(std::move(src)), per_pair(std::move(targets)) {
        if (d < 0 || d > 12) throw std::invalid_argument("RealizationTargets: d out of range");
        if (per_pair.size() != (std::size_t{1} << (2 * d)))
            throw std::invalid_argument("RealizationTargets: expected 4^d targets");
    }

    std::size_t n() const { return std::size_t{1} << d; }
    const BinaryTarget& target(std::uint32_t x, std::uint32_t y) const {
        return per_pair[(std::size_t{x} << d) | y];
    }

    /// No-signaling consistency: each party's marginal must not depend on the
    /// other party's realization. Also checks every pair target is feasible.
    void validate(double tol = kSchemeTol) const {
        for (std::uint32_t x = 0; x < n(); ++x)
            for (std::uint32_t y = 0; y < n(); ++y) {
                if (std::abs(target(x, y).a - target(x, 0).a) > tol)
                    throw no_signaling_error("Alice marginal at x=" + std::to_string(x) +
                                             " varies with Bob's realization");
                if (std::abs(target(x, y).b - target(0, y).b) > tol)
                    throw no_signaling_error("Bob marginal at y=" + std::to_string(y) +
                                             " varies with Alice's realization");
                if (!check_binary_cr_feasible(target(x, y)).feasible)
                    throw infeasible_error("per-pair target (" + std::to_string(x) + "," +
                                           std::to_string(y) + ") is infeasible");
            }
    }
};

/// Product weights P(x^d, y^d) = prod_i P_{X,Y}(x_i, y_i), flat over
/// realization-pair index x * 2^d + y.
inline std::vector<double> realization_weights(const BivariateBinarySource& src, int d) {
    std::size_t n = std::size_t{1} << d;
    std::vector<double> w(n * n);
    for (std::uint32_t x = 0; x < n; ++x)
        for (std::uint32_t y = 0; y < n; ++y) {
            double p = 1.0;
            for (int i = 0; i < d; ++i)
                p *= src.prob((x >> i) & 1u ? 1 : -1, (y >> i) & 1u ? 1 : -1);
            w[(std::size_t{x} << d) | y] = p;
        }
    return w;
}

/// Patched strategy: per-realization affine pairs with the worst-case slope
/// magnitudes, mixed through Bob's biased coin T with weight p_ts.
struct PatchedScheme {
    int d = 0;
    std::vector<AffinePair> f_plus;   // per x, slope = max_y |f_{x,y,1}|
    std::vector<AffinePair> g_plus;   // per y, slope = max_x |g_{x,y,1}|
    std::vector<AffinePair> g_minus;  // g_plus with the slope sign flipped
    double p_ts = 1.0;
    BivariateBinarySource source;

    std::size_t n() const { return std::size_t{1} << d; }

    void validate(double tol = kSchemeTol) const {
        if (f_plus.size() != n() || g_plus.size() != n() || g_minus.size() != n())
            throw std::invalid_argument("PatchedScheme: expected 2^d entries per table");
        if (p_ts < -tol || p_ts > 1.0 + tol)
            throw std::invalid_argument("PatchedScheme: p_ts outside [0,1]");
        for (std::size_t i = 0; i < n(); ++i) {
            if (!f_plus[i].in_range(tol) || !g_plus[i].in_range(tol) || !g_minus[i].in_range(tol))
                throw std::invalid_argument("PatchedScheme: conditional mean leaves [-1,1]");
            if (std::abs(g_minus[i].f0 - g_plus[i].f0) > tol ||
                std::abs(g_minus[i].f1 + g_plus[i].f1) > tol)
                throw std::invalid_argument("PatchedScheme: g_minus must mirror g_plus");
        }
    }
};

/// First and mixed moments of a scheme's output pair in the +-1 encoding.
struct Moments {
    double eu = 0.0;
    double ev = 0.0;
    double euv = 0.0;
};

/// Builds the patching scheme: split each pair's excess correlation
/// c_{x,y} = E[U_x V_y] - f0(x) g0(y) within the boxes (F_x, G_y), take
/// worst-case slopes f+ and g+, and choose the mixing weight so the weighted
/// correlation lands exactly on the target value rho'.
inline PatchedScheme synthesize_patched_scheme(const RealizationTargets& rt) {
    rt.validate();
    const std::size_t n = rt.n();
    std::vector<double> f0(n), g0(n), F(n), G(n), f1p(n, 0.0), g1p(n, 0.0);
    for (std::uint32_t x = 0; x < n; ++x) {
        f0[x] = rt.target(x, 0).eu();
        F[x] = 2.0 * std::min(rt.target(x, 0).a, 1.0 - rt.target(x, 0).a);
    }
    for (std::uint32_t y = 0; y < n; ++y) {
        g0[y] = rt.target(0, y).ev();
        G[y] = 2.0 * std::min(rt.target(0, y).b, 1.0 - rt.target(0, y).b);
    }
    for (std::uint32_t x = 0; x < n; ++x) {
        for (std::uint32_t y = 0; y < n; ++y) {
            double c = rt.target(x, y).euv() - f0[x] * g0[y];
            auto [fx, gy] = solve_pair_product(F[x], G[y], c);
            f1p[x] = std::max(f1p[x], std::abs(fx));
            g1p[y] = std::max(g1p[y], std::abs(gy));
        }
    }
    auto w = realization_weights(rt.source, rt.d);
    double rho_plus = 0.0, rho_minus = 0.0, rho_target = 0.0;
    for (std::uint32_t x = 0; x < n; ++x)
        for (std::uint32_t y = 0; y < n; ++y) {
            double wxy = w[(std::size_t{x} << rt.d) | y];
            double base = f0[x] * g0[y];
            double swing = f1p[x] * g1p[y];
            rho_plus += wxy * (base + swing);
            rho_minus += wxy * (base - swing);
            rho_target += wxy * rt.target(x, y).euv();
        }
    if (rho_target < rho_minus - kSchemeTol || rho_target > rho_plus + kSchemeTol)
        throw numeric_error("patching: target correlation escapes [rho-, rho+]");

    PatchedScheme ps{rt.d, {}, {}, {}, 1.0, rt.source};
    for (std::uint32_t x = 0; x < n; ++x) ps.f_plus.push_back({f0[x], f1p[x]});
    for (std::uint32_t y = 0; y < n; ++y) {
        ps.g_plus.push_back({g0[y], g1p[y]});
        ps.g_minus.push_back({g0[y], -g1p[y]});
    }
    // degenerate band: any weight gives identical statistics
    ps.p_ts = (rho_plus - rho_minus <= 1e-12)
                  ? 1.0
                  : std::clamp((rho_target - rho_minus) / (rho_plus - rho_minus), 0.0, 1.0);
    ps.validate();
    return ps;
}

/// Exact moments under an explicit joint pmf over realization pairs.
inline Moments evaluate_patched_exact(const PatchedScheme& ps, const std::vector<double>& p_xy) {
    ps.validate();
    const std::size_t n = ps.n();
    if (p_xy.size() != n * n)
        throw std::invalid_argument("evaluate_patched_exact: pmf size must be 4^d");
    Moments mo;
    double rho_plus = 0.0, rho_minus = 0.0;
    for (std::uint32_t x = 0; x < n; ++x)
        for (std::uint32_t y = 0; y < n; ++y) {
            double wxy = p_xy[(std::size_t{x} << ps.d) | y];
            mo.eu += wxy * ps.f_plus[x].f0;
            mo.ev += wxy * ps.g_plus[y].f0;
            rho_plus += wxy * (ps.f_plus[x].f0 * ps.g_plus[y].f0 + ps.f_plus[x].f1 * ps.g_plus[y].f1);
            rho_minus += wxy * (ps.f_plus[x].f0 * ps.g_plus[y].f0 - ps.f_plus[x].f1 * ps.g_plus[y].f1);
        }
    mo.euv = ps.p_ts * rho_plus + (1.0 - ps.p_ts) * rho_minus;
    return mo;
}

/// Moments under the scheme's own source weights.
inline Moments evaluate_patched_exact(const PatchedScheme& ps) {
    return evaluate_patched_exact(ps, realization_weights(ps.source, ps.d));
}

/// Exact 2x2 output distribution of the patched scheme, by conditional
/// algebra over (x, y, z, t). Used as the total-variation target for the
/// Monte Carlo runner.
inline JointDistribution evaluate_patched_joint_exact(const PatchedScheme& ps,
                                                      const std::vector<double>& p_xy) {
    ps.validate();
    const std::size_t n = ps.n();
    double pmf[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    for (std::uint32_t x = 0; x < n; ++x)
        for (std::uint32_t y = 0; y < n; ++y) {
            double wxy = p_xy[(std::size_t{x} << ps.d) | y];
            if (wxy == 0.0) continue;
            for (int z : {1, -1}) {
                double pu = std::clamp(ps.f_plus[x].prob_plus(z), 0.0, 1.0);
                double pvp = std::clamp(ps.g_plus[y].prob_plus(z), 0.0, 1.0);
                double pvm = std::clamp(ps.g_minus[y].prob_plus(z), 0.0, 1.0);
                double pv = ps.p_ts * pvp + (1.0 - ps.p_ts) * pvm;
                double w = 0.5 * wxy;
                pmf[0][0] += w * pu * pv;
                pmf[0][1] += w * pu * (1.0 - pv);
                pmf[1][0] += w * (1.0 - pu) * pv;
                pmf[1][1] += w * (1.0 - pu) * (1.0 - pv);
            }
        }
    return JointDistribution({1, -1}, {1, -1},
                             {{pmf[0][0], pmf[0][1]}, {pmf[1][0], pmf[1][1]}});
}

inline JointDistribution evaluate_patched_joint_exact(const PatchedScheme& ps) {
    return evaluate_patched_joint_exact(ps, realization_weights(ps.source, ps.d));
}

}  // namespace niss
