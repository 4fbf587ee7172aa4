#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "niss/distribution.hpp"
#include "niss/errors.hpp"
#include "niss/quantum.hpp"

namespace niss {

inline constexpr double kFeasibilityTol = 1e-10;
inline constexpr double kConditionTol = 1e-9;
inline constexpr double kRankRelTol = 1e-8;
inline constexpr std::size_t kMaxRankAlphabet = 8;

/// Binary-output target on {-1,1}^2 with the three derived statistics that
/// parameterize the shared-bit feasible set: a = Q_U(1), b = Q_V(1) and the
/// agreement mass s = Q(-1,-1) + Q(1,1).
struct BinaryTarget {
    JointDistribution q;  // canonical alphabets [1,-1]
    double a = 0.0;
    double b = 0.0;
    double s = 0.0;

    static BinaryTarget from_joint(const JointDistribution& j) {
        const std::vector<int> canon{1, -1};
        const std::vector<int> flipped{-1, 1};
        auto index_of = [&](const std::vector<int>& alpha) {
            if (alpha == canon) return std::pair<int, int>{0, 1};
            if (alpha == flipped) return std::pair<int, int>{1, 0};
            throw std::invalid_argument("BinaryTarget: alphabet must be {-1,1}");
        };
        auto [rp, rm] = index_of(j.row_alphabet);
        auto [cp, cm] = index_of(j.col_alphabet);
        JointDistribution c(canon, canon,
                            {{j.pmf[rp][cp], j.pmf[rp][cm]}, {j.pmf[rm][cp], j.pmf[rm][cm]}});
        BinaryTarget t;
        t.a = c.pmf[0][0] + c.pmf[0][1];
        t.b = c.pmf[0][0] + c.pmf[1][0];
        t.s = c.pmf[0][0] + c.pmf[1][1];
        t.q = std::move(c);
        return t;
    }

    /// Builds the unique pmf with the given marginals and agreement mass;
    /// throws numeric_error if those statistics do not form a distribution.
    static BinaryTarget from_stats(double a, double b, double s) {
        double q11 = 0.5 * (a + b + s - 1.0);
        double q1m = 0.5 * (a - b - s + 1.0);
        double qm1 = 0.5 * (b - a - s + 1.0);
        double qmm = 0.5 * (1.0 - a - b + s);
        return from_joint(JointDistribution({1, -1}, {1, -1}, {{q11, q1m}, {qm1, qmm}}));
    }

    /// E[UV] = 2 P(U=V) - 1 in the +-1 encoding.
    double euv() const { return 2.0 * s - 1.0; }
    double eu() const { return 2.0 * a - 1.0; }
    double ev() const { return 2.0 * b - 1.0; }
};

/// Center and half-width parameters of the binary shared-bit feasible set.
inline std::pair<double, double> zeta_beta(double a, double b) {
    if (a < 0.0 || a > 1.0 || b < 0.0 || b > 1.0)
        throw std::invalid_argument("zeta_beta: marginals must lie in [0,1]");
    double zeta = 2.0 * a * b - a - b + 1.0;
    double beta = std::min(a, 1.0 - a) * std::min(b, 1.0 - b);
    return {zeta, beta};
}

struct FeasibilityVerdict {
    bool feasible = false;
    double margin = 0.0;  // 2*beta - |s - zeta|; >= 0 means inside the region
    double zeta = 0.0;
    double beta = 0.0;
};

/// Membership in the one-shared-bit feasible set for binary outputs:
/// feasible iff |s - zeta_{a,b}| <= 2 beta_{a,b}.
inline FeasibilityVerdict check_binary_cr_feasible(const BinaryTarget& t) {
    auto [zeta, beta] = zeta_beta(t.a, t.b);
    FeasibilityVerdict v;
    v.zeta = zeta;
    v.beta = beta;
    v.margin = 2.0 * beta - std::abs(t.s - zeta);
    v.feasible = v.margin >= -kFeasibilityTol;
    return v;
}

namespace detail {

/// One-sided Jacobi (Hestenes) sweeps: each rotation diagonalizes one 2x2
/// block of the column Gram matrix without ever forming it, so small
/// singular values come out at machine scale instead of the sqrt(eps)*s1
/// noise floor that an explicit A^T A introduces. Columns of `a` end up
/// mutually orthogonal; their norms are the singular values.
inline std::vector<double> jacobi_singular_values(std::vector<std::vector<double>> a) {
    const std::size_t rows = a.size();
    const std::size_t cols = rows ? a[0].size() : 0;
    auto dot = [&](std::size_t p, std::size_t q) {
        double acc = 0.0;
        for (std::size_t k = 0; k < rows; ++k) acc += a[k][p] * a[k][q];
        return acc;
    };
    for (int sweep = 0; sweep < 100; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p < cols; ++p) {
            for (std::size_t q = p + 1; q < cols; ++q) {
                double alpha = dot(p, p), beta = dot(q, q), gamma = dot(p, q);
                if (std::abs(gamma) <= 1e-17 * std::sqrt(alpha * beta) || gamma == 0.0) continue;
                double zeta = (beta - alpha) / (2.0 * gamma);
                double t = (zeta >= 0 ? 1.0 : -1.0) /
                           (std::abs(zeta) + std::sqrt(zeta * zeta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = c * t;
                for (std::size_t k = 0; k < rows; ++k) {
                    double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                rotated = true;
            }
        }
        if (!rotated) break;
    }
    std::vector<double> sv(cols);
    for (std::size_t p = 0; p < cols; ++p) sv[p] = std::sqrt(dot(p, p));
    std::sort(sv.rbegin(), sv.rend());
    return sv;
}

}  // namespace detail

/// Singular values (descending) of the pmf matrix and the count exceeding
/// kRankRelTol times the largest. rank >= 3 certifies that no one-shared-bit
/// strategy with local randomness produces the distribution.
inline std::pair<int, std::vector<double>> rank_certificate(const JointDistribution& q) {
    const std::size_t r = q.n_rows(), c = q.n_cols();
    if (r > kMaxRankAlphabet || c > kMaxRankAlphabet)
        throw std::invalid_argument("rank_certificate: alphabets capped at 8 symbols per side");
    auto sv = detail::jacobi_singular_values(q.pmf);
    int rank = 0;
    if (!sv.empty() && sv[0] > 0.0) {
        for (double s : sv)
            if (s > kRankRelTol * sv[0]) ++rank;
    }
    return {rank, sv};
}

/// Residuals of the diagonal-product necessary condition together with the
/// rank certificate of the same pmf.
struct ConditionReport {
    std::vector<int> labels;                     // common label set, in row-alphabet order
    std::vector<std::vector<double>> residuals;  // indexed like labels x labels
    double max_abs_residual = 0.0;
    bool pass = false;
    int rank_estimate = 0;
    std::vector<double> singular_values;

    double residual(std::size_t i, std::size_t j) const { return residuals[i][j]; }
};

/// Checks, for every label pair (i,j) present on both sides, that
///   (Q(i,i)-Qu(i)Qv(i))(Q(j,j)-Qu(j)Qv(j)) = (Q(i,j)-Qu(i)Qv(j))(Q(j,i)-Qu(j)Qv(i)).
/// Every distribution produced from one shared bit plus local randomness
/// satisfies this identity; a violation certifies non-membership. Labels
/// appearing on only one side contribute no constraints.
inline ConditionReport check_diagonal_product_condition(const JointDistribution& q,
                                                        double tol = kConditionTol) {
    auto pu = q.row_marginal();
    auto pv = q.col_marginal();
    ConditionReport rep;
    std::vector<std::size_t> ri, ci;
    for (std::size_t i = 0; i < q.n_rows(); ++i) {
        auto it = std::find(q.col_alphabet.begin(), q.col_alphabet.end(), q.row_alphabet[i]);
        if (it == q.col_alphabet.end()) continue;
        rep.labels.push_back(q.row_alphabet[i]);
        ri.push_back(i);
        ci.push_back(static_cast<std::size_t>(it - q.col_alphabet.begin()));
    }
    const std::size_t n = rep.labels.size();
    auto cov = [&](std::size_t i, std::size_t j) {
        return q.pmf[ri[i]][ci[j]] - pu[ri[i]] * pv[ci[j]];
    };
    rep.residuals.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double lhs = cov(i, i) * cov(j, j);
            double rhs = cov(i, j) * cov(j, i);
            rep.residuals[i][j] = lhs - rhs;
            rep.max_abs_residual = std::max(rep.max_abs_residual, std::abs(lhs - rhs));
        }
    }
    rep.pass = rep.max_abs_residual <= tol;
    auto [rank, sv] = rank_certificate(q);
    rep.rank_estimate = rank;
    rep.singular_values = std::move(sv);
    return rep;
}

/// Everything certify_advantage learned about a measurement pair.
struct AdvantageReport {
    bool advantage = false;
    bool binary_case = false;
    JointDistribution joint;
    std::optional<FeasibilityVerdict> binary_verdict;
    std::optional<ConditionReport> condition;
};

/// Decides whether measuring the Bell state with this pair yields statistics
/// outside the one-shared-bit set. Binary pairs always land inside, so the
/// region check is run as a consistency gate; non-binary pairs are certified
/// via the diagonal-product condition and the rank certificate.
inline AdvantageReport certify_advantage(const Povm& m1, const Povm& m2) {
    AdvantageReport rep;
    rep.joint = bell_joint_distribution(m1, m2);
    rep.binary_case = m1.binary() && m2.binary();
    if (rep.binary_case) {
        auto verdict = check_binary_cr_feasible(BinaryTarget::from_joint(rep.joint));
        rep.binary_verdict = verdict;
        rep.advantage = !verdict.feasible;  // never true; reported honestly
    } else {
        auto cond = check_diagonal_product_condition(rep.joint);
        rep.advantage = !cond.pass || cond.rank_estimate >= 3;
        rep.condition = std::move(cond);
    }
    return rep;
}

}  // namespace niss
