#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "niss/errors.hpp"

namespace niss {

inline constexpr double kProbTol = 1e-10;    // pmf normalization / marginal identities
inline constexpr double kClampTol = 1e-12;   // negative mass attributable to rounding

/// Probability mass over a finite product alphabet. The common currency
/// between the measurement, feasibility, synthesis and simulation layers.
/// Binary alphabets are ordered [+1, -1] by convention, so index 0 is the
/// +1 outcome on both axes.
struct JointDistribution {
    std::vector<int> row_alphabet;
    std::vector<int> col_alphabet;
    std::vector<std::vector<double>> pmf;  // pmf[row][col]

    JointDistribution() = default;

    JointDistribution(std::vector<int> rows, std::vector<int> cols,
                      std::vector<std::vector<double>> mass)
        : row_alphabet(std::move(rows)), col_alphabet(std::move(cols)), pmf(std::move(mass)) {
        validate();
    }

    std::size_t n_rows() const { return row_alphabet.size(); }
    std::size_t n_cols() const { return col_alphabet.size(); }

    double operator()(std::size_t i, std::size_t j) const { return pmf[i][j]; }

    /// Checks shape, nonnegativity (clamping rounding-scale negatives to 0)
    /// and normalization. Throws numeric_error on genuine negativity,
    /// std::invalid_argument on structural problems.
    void validate() {
        if (row_alphabet.empty() || col_alphabet.empty())
            throw std::invalid_argument("JointDistribution: empty alphabet");
        if (pmf.size() != row_alphabet.size())
            throw std::invalid_argument("JointDistribution: pmf row count mismatch");
        double sum = 0.0;
        for (auto& row : pmf) {
            if (row.size() != col_alphabet.size())
                throw std::invalid_argument("JointDistribution: pmf column count mismatch");
            for (double& v : row) {
                if (v < -kClampTol)
                    throw numeric_error("JointDistribution: negative mass " + std::to_string(v));
                if (v < 0.0) v = 0.0;
                sum += v;
            }
        }
        if (std::abs(sum - 1.0) > kProbTol)
            throw numeric_error("JointDistribution: mass sums to " + std::to_string(sum));
        // renormalize away the clamped dust
        for (auto& row : pmf)
            for (double& v : row) v /= sum;
    }

    std::vector<double> row_marginal() const {
        std::vector<double> m(n_rows(), 0.0);
        for (std::size_t i = 0; i < n_rows(); ++i)
            for (std::size_t j = 0; j < n_cols(); ++j) m[i] += pmf[i][j];
        return m;
    }

    std::vector<double> col_marginal() const {
        std::vector<double> m(n_cols(), 0.0);
        for (std::size_t i = 0; i < n_rows(); ++i)
            for (std::size_t j = 0; j < n_cols(); ++j) m[j] += pmf[i][j];
        return m;
    }

    bool same_alphabets(const JointDistribution& other) const {
        return row_alphabet == other.row_alphabet && col_alphabet == other.col_alphabet;
    }
};

/// Row and column marginal pmfs.
inline std::pair<std::vector<double>, std::vector<double>> marginals(const JointDistribution& j) {
    return {j.row_marginal(), j.col_marginal()};
}

/// Half the L1 distance between two pmfs on identical alphabets.
inline double total_variation(const JointDistribution& p, const JointDistribution& q) {
    if (!p.same_alphabets(q))
        throw std::invalid_argument("total_variation: alphabet mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < p.n_rows(); ++i)
        for (std::size_t j = 0; j < p.n_cols(); ++j) acc += std::abs(p.pmf[i][j] - q.pmf[i][j]);
    return 0.5 * acc;
}

/// Convenience product distribution a (x) b on given alphabets.
inline JointDistribution product_distribution(const std::vector<int>& rows,
                                              const std::vector<int>& cols,
                                              const std::vector<double>& a,
                                              const std::vector<double>& b) {
    std::vector<std::vector<double>> pmf(a.size(), std::vector<double>(b.size()));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) pmf[i][j] = a[i] * b[j];
    return JointDistribution(rows, cols, std::move(pmf));
}

/// Joint source P_{X,Y} on {-1,1}^2 with its standardized statistics.
/// Entry (0,0) is P(X=+1, Y=+1).
class BivariateBinarySource {
  public:
    BivariateBinarySource(double pp, double pm, double mp, double mm)
        : p_{{pp, pm}, {mp, mm}} {
        double sum = pp + pm + mp + mm;
        for (auto& row : p_)
            for (double v : row)
                if (v < -kClampTol) throw numeric_error("BivariateBinarySource: negative mass");
        if (std::abs(sum - 1.0) > kProbTol)
            throw numeric_error("BivariateBinarySource: mass sums to " + std::to_string(sum));
    }

    static BivariateBinarySource independent(double px, double py) {
        return BivariateBinarySource(px * py, px * (1 - py), (1 - px) * py, (1 - px) * (1 - py));
    }

    static BivariateBinarySource from_joint(const JointDistribution& j) {
        if (j.row_alphabet != std::vector<int>{1, -1} || j.col_alphabet != std::vector<int>{1, -1})
            throw std::invalid_argument("BivariateBinarySource: alphabets must be [1,-1]");
        return BivariateBinarySource(j.pmf[0][0], j.pmf[0][1], j.pmf[1][0], j.pmf[1][1]);
    }

    /// pmf cell by sign pair; x,y in {-1,+1}.
    double prob(int x, int y) const { return p_[x == 1 ? 0 : 1][y == 1 ? 0 : 1]; }

    double px1() const { return p_[0][0] + p_[0][1]; }  // P(X=+1)
    double py1() const { return p_[0][0] + p_[1][0]; }  // P(Y=+1)

    double mu_x() const { return 2.0 * px1() - 1.0; }
    double mu_y() const { return 2.0 * py1() - 1.0; }
    double sigma_x() const { return 2.0 * std::sqrt(px1() * (1.0 - px1())); }
    double sigma_y() const { return 2.0 * std::sqrt(py1() * (1.0 - py1())); }

    bool degenerate() const { return sigma_x() < 1e-15 || sigma_y() < 1e-15; }

    /// E[(X-mu_X)(Y-mu_Y)] / (sigma_X sigma_Y). Undefined for point-mass
    /// marginals; throws rather than dividing by zero.
    double pearson_rho() const {
        if (degenerate())
            throw std::invalid_argument("pearson_rho: degenerate marginal (sigma = 0)");
        double exy = p_[0][0] - p_[0][1] - p_[1][0] + p_[1][1];
        return (exy - mu_x() * mu_y()) / (sigma_x() * sigma_y());
    }

    JointDistribution as_joint() const {
        return JointDistribution({1, -1}, {1, -1}, {{p_[0][0], p_[0][1]}, {p_[1][0], p_[1][1]}});
    }

  private:
    double p_[2][2];
};

}  // namespace niss
