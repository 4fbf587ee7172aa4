#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "niss/errors.hpp"

namespace niss {

/// Points of {-1,1}^d and parity subsets S of [d] are both encoded as d-bit
/// masks: bit (i-1) set means coordinate i is +1 (for points) or i is a
/// member of S (for subsets).
using Mask = std::uint32_t;

inline constexpr int kMaxFourierDim = 16;

inline int popcount(Mask m) { return std::popcount(m); }

inline void check_dim(int d) {
    if (d < 0 || d > kMaxFourierDim)
        throw std::invalid_argument("dimension must be in [0," + std::to_string(kMaxFourierDim) +
                                    "], got " + std::to_string(d));
}

/// IID source of biased bits: P(X=+1) = p with 0 < p < 1.
class BiasedBitSource {
  public:
    explicit BiasedBitSource(double p) : p_(p) {
        if (!(p > 0.0 && p < 1.0))
            throw std::invalid_argument("BiasedBitSource: p must lie strictly in (0,1), got " +
                                        std::to_string(p));
    }

    double p() const { return p_; }
    double mu() const { return 2.0 * p_ - 1.0; }
    double sigma() const { return 2.0 * std::sqrt(p_ * (1.0 - p_)); }

    /// Standardized coordinate value (x - mu)/sigma for x in {-1,+1}.
    double standardized(int x) const { return (static_cast<double>(x) - mu()) / sigma(); }

    /// Probability of the point encoded by `x` under d IID draws.
    double point_prob(Mask x, int d) const {
        check_dim(d);
        int ones = popcount(x & ((Mask{1} << d) - 1));
        return std::pow(p_, ones) * std::pow(1.0 - p_, d - ones);
    }

  private:
    double p_;
};

/// Subset of coordinate indices in [1..d], stored as a bitmask.
struct ParitySubset {
    Mask mask = 0;

    ParitySubset() = default;
    explicit ParitySubset(Mask m) : mask(m) {}

    static ParitySubset from_indices(const std::vector<int>& indices, int d) {
        check_dim(d);
        Mask m = 0;
        int prev = 0;
        for (int i : indices) {
            if (i <= prev || i > d)
                throw std::invalid_argument("ParitySubset: indices must be strictly increasing in [1.." +
                                            std::to_string(d) + "]");
            m |= Mask{1} << (i - 1);
            prev = i;
        }
        return ParitySubset(m);
    }

    std::vector<int> indices() const {
        std::vector<int> out;
        for (int i = 0; i < kMaxFourierDim; ++i)
            if (mask & (Mask{1} << i)) out.push_back(i + 1);
        return out;
    }

    bool valid_for(int d) const { return d >= 32 || (mask >> d) == 0; }
    int size() const { return popcount(mask); }
};

/// Real-valued function table on {-1,1}^d. Deterministic Boolean functions
/// hold values in {-1,1}; conditional expectations may fill [-1,1].
struct BooleanTable {
    int d = 0;
    std::vector<double> values;  // size 2^d, indexed by point mask

    BooleanTable() = default;

    BooleanTable(int dim, std::vector<double> vals) : d(dim), values(std::move(vals)) {
        check_dim(d);
        if (values.size() != (std::size_t{1} << d))
            throw std::invalid_argument("BooleanTable: expected 2^d entries");
        for (double v : values)
            if (std::abs(v) > 1.0 + 1e-12)
                throw std::invalid_argument("BooleanTable: value outside [-1,1]: " +
                                            std::to_string(v));
    }

    template <typename F>
    static BooleanTable from_function(int dim, F&& fn) {
        check_dim(dim);
        std::vector<double> vals(std::size_t{1} << dim);
        for (Mask x = 0; x < vals.size(); ++x) vals[x] = fn(x);
        return BooleanTable(dim, std::move(vals));
    }

    double operator()(Mask x) const { return values[x]; }
    std::size_t size() const { return values.size(); }

    /// Sign of coordinate i (1-based) at point x.
    static int coord(Mask x, int i) { return (x >> (i - 1)) & 1u ? 1 : -1; }
};

/// Fourier coefficients of a function on {-1,1}^d: one real per subset mask.
struct FourierCoefficients {
    int d = 0;
    std::vector<double> coeffs;  // size 2^d, indexed by subset mask

    FourierCoefficients() = default;
    FourierCoefficients(int dim, std::vector<double> c) : d(dim), coeffs(std::move(c)) {
        check_dim(d);
        if (coeffs.size() != (std::size_t{1} << d))
            throw std::invalid_argument("FourierCoefficients: expected 2^d entries");
    }

    double operator[](Mask s) const { return coeffs[s]; }
    double& operator[](Mask s) { return coeffs[s]; }

    /// Coefficient of the empty subset: the mean of the function.
    double mean() const { return coeffs[0]; }
};

/// phi_S(x) = prod_{i in S} (x_i - mu)/sigma; the empty product is 1.
inline double parity_eval(const ParitySubset& s, Mask x, const BiasedBitSource& src, int d) {
    check_dim(d);
    if (!s.valid_for(d))
        throw std::invalid_argument("parity_eval: subset has indices above d");
    double prod = 1.0;
    Mask rem = s.mask;
    while (rem) {
        int bit = std::countr_zero(rem);
        rem &= rem - 1;
        prod *= src.standardized((x >> bit) & 1u ? 1 : -1);
    }
    return prod;
}

namespace detail {

/// Expansion with one source per coordinate. The single-source public API
/// and the distinguished-Z expansion are both thin wrappers over this.
inline std::vector<double> expand_per_coord(const std::vector<double>& values, int d,
                                            const std::vector<double>& ps) {
    std::size_t n = std::size_t{1} << d;
    std::vector<double> mu(d), sig(d);
    for (int i = 0; i < d; ++i) {
        mu[i] = 2.0 * ps[i] - 1.0;
        sig[i] = 2.0 * std::sqrt(ps[i] * (1.0 - ps[i]));
    }
    std::vector<double> out(n, 0.0);
    for (Mask s = 0; s < n; ++s) {
        double acc = 0.0;
        for (Mask x = 0; x < n; ++x) {
            double w = 1.0, phi = 1.0;
            for (int i = 0; i < d; ++i) {
                bool one = (x >> i) & 1u;
                w *= one ? ps[i] : 1.0 - ps[i];
                if ((s >> i) & 1u) phi *= ((one ? 1.0 : -1.0) - mu[i]) / sig[i];
            }
            acc += w * values[x] * phi;
        }
        out[s] = acc;
    }
    return out;
}

}  // namespace detail

/// Coefficients f_S = E[f(X^d) phi_S(X^d)] for every S, by direct summation
/// over all 2^d points per subset.
inline FourierCoefficients fourier_expand(const BooleanTable& f, const BiasedBitSource& src) {
    std::vector<double> ps(f.d, src.p());
    return FourierCoefficients(f.d, detail::expand_per_coord(f.values, f.d, ps));
}

/// Pointwise sum f(x) = sum_S f_S phi_S(x). Inverse of fourier_expand.
inline BooleanTable fourier_reconstruct(const FourierCoefficients& c, const BiasedBitSource& src) {
    std::size_t n = std::size_t{1} << c.d;
    std::vector<double> vals(n, 0.0);
    for (Mask x = 0; x < n; ++x) {
        double acc = 0.0;
        for (Mask s = 0; s < n; ++s) {
            if (c.coeffs[s] == 0.0) continue;
            acc += c.coeffs[s] * parity_eval(ParitySubset(s), x, src, c.d);
        }
        vals[x] = acc;  // the table ctor tolerates rounding past +-1
    }
    return BooleanTable(c.d, std::move(vals));
}

/// Cross-correlation identity: E[f(X^d) g(Y^d)] = sum_S f_S g_S rho^|S|
/// for (X_i, Y_i) IID pairs with Pearson correlation rho.
inline double correlation_from_coeffs(const FourierCoefficients& fc, const FourierCoefficients& gc,
                                      double rho) {
    if (fc.d != gc.d)
        throw std::invalid_argument("correlation_from_coeffs: dimension mismatch");
    if (std::abs(rho) > 1.0 + 1e-12)
        throw std::invalid_argument("correlation_from_coeffs: |rho| must be <= 1");
    double acc = 0.0;
    for (Mask s = 0; s < fc.coeffs.size(); ++s)
        acc += fc.coeffs[s] * gc.coeffs[s] * std::pow(rho, popcount(s));
    return acc;
}

/// Expansion of a function of (Z, X^d) with Z a distinguished fair coordinate
/// kept outside [d]: f(z, x) = sum_S (even_S + z * odd_S) phi_S(x).
struct ZSplitCoefficients {
    FourierCoefficients even;  // the f_{0,S} family
    FourierCoefficients odd;   // the f_{1,S} family, paired with the Z factor

    /// Affine part evaluated at z: even_empty + z * odd_empty.
    double affine(int z) const { return even.mean() + static_cast<double>(z) * odd.mean(); }
};

/// Expands a table on (Z, X^d), with Z stored in the top bit (bit d), into
/// the Z-split coefficient pair over subsets of [d].
inline ZSplitCoefficients fourier_expand_with_z(const BooleanTable& f, const BiasedBitSource& src) {
    if (f.d < 1) throw std::invalid_argument("fourier_expand_with_z: need the Z coordinate");
    int d = f.d - 1;
    std::vector<double> ps(f.d, src.p());
    ps[d] = 0.5;  // Z is fair
    auto full = detail::expand_per_coord(f.values, f.d, ps);
    std::size_t n = std::size_t{1} << d;
    std::vector<double> even(n), odd(n);
    for (Mask s = 0; s < n; ++s) {
        even[s] = full[s];
        odd[s] = full[s | (Mask{1} << d)];  // phi_{S u {Z}} = Z * phi_S since Z is standard fair
    }
    return {FourierCoefficients(d, std::move(even)), FourierCoefficients(d, std::move(odd))};
}

}  // namespace niss
