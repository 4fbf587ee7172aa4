#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "niss/distribution.hpp"
#include "niss/errors.hpp"

namespace niss {

using Complex = std::complex<double>;

inline constexpr double kOperatorTol = 1e-10;

/// 2x2 complex matrix; the measurement-operator element type. Hermiticity and
/// positivity are validated where required, not enforced by construction.
struct Operator2x2 {
    std::array<std::array<Complex, 2>, 2> m{};

    Operator2x2() = default;
    Operator2x2(Complex a, Complex b, Complex c, Complex d) : m{{{a, b}, {c, d}}} {}

    static Operator2x2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Operator2x2 zero() { return {}; }
    static Operator2x2 diag(double a, double d) { return {a, 0.0, 0.0, d}; }

    Complex operator()(int j, int k) const { return m[j][k]; }
    Complex& operator()(int j, int k) { return m[j][k]; }

    Operator2x2 operator+(const Operator2x2& o) const {
        Operator2x2 r;
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) r.m[j][k] = m[j][k] + o.m[j][k];
        return r;
    }

    Operator2x2 operator-(const Operator2x2& o) const {
        Operator2x2 r;
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) r.m[j][k] = m[j][k] - o.m[j][k];
        return r;
    }

    Operator2x2 scaled(double s) const {
        Operator2x2 r = *this;
        for (auto& row : r.m)
            for (auto& v : row) v *= s;
        return r;
    }

    Complex trace() const { return m[0][0] + m[1][1]; }

    double hermiticity_residual() const {
        double r = 0.0;
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                r = std::max(r, std::abs(m[j][k] - std::conj(m[k][j])));
        return r;
    }

    /// Eigenvalues of the Hermitian part, in closed form (no iteration).
    std::pair<double, double> hermitian_eigenvalues() const {
        double a = m[0][0].real();
        double d = m[1][1].real();
        Complex off = 0.5 * (m[0][1] + std::conj(m[1][0]));
        double mid = 0.5 * (a + d);
        double rad = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(off));
        return {mid - rad, mid + rad};
    }
};

/// Transpose (not conjugate-transpose) inner product of the row-major
/// vectorizations: Vec(A)^T Vec(B) = sum_{j,k} A(j,k) B(j,k).
inline Complex vec_inner(const Operator2x2& a, const Operator2x2& b) {
    Complex acc = 0.0;
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) acc += a(j, k) * b(j, k);
    return acc;
}

/// Outcome-labelled measurement: one operator per outcome, operators PSD and
/// summing to the identity. Binary measurements built by this library label
/// the first operator +1 and the second -1.
struct Povm {
    std::vector<int> outcomes;
    std::vector<Operator2x2> operators;

    std::size_t size() const { return outcomes.size(); }
    bool binary() const { return outcomes.size() == 2; }
};

struct OperatorReport {
    double hermiticity_residual = 0.0;
    double min_eigenvalue = 0.0;
    double max_eigenvalue = 0.0;
};

struct PovmReport {
    std::vector<OperatorReport> per_operator;
    double completeness_residual = 0.0;
    double tolerance = kOperatorTol;
    bool pass = false;

    std::string describe() const {
        std::ostringstream os;
        os << (pass ? "pass" : "fail") << ": completeness residual " << completeness_residual;
        for (std::size_t i = 0; i < per_operator.size(); ++i)
            os << "; op" << i << " herm " << per_operator[i].hermiticity_residual << " eig ["
               << per_operator[i].min_eigenvalue << "," << per_operator[i].max_eigenvalue << "]";
        return os.str();
    }
};

/// Structural checks throw povm_error; numeric quality lands in the report.
inline PovmReport validate_povm(const Povm& m, double tol = kOperatorTol) {
    if (m.outcomes.size() < 2) throw povm_error("POVM needs at least 2 outcomes");
    if (m.outcomes.size() != m.operators.size())
        throw povm_error("POVM outcome/operator count mismatch");
    PovmReport rep;
    rep.tolerance = tol;
    Operator2x2 sum = Operator2x2::zero();
    bool ok = true;
    for (const auto& op : m.operators) {
        OperatorReport r;
        r.hermiticity_residual = op.hermiticity_residual();
        auto [lo, hi] = op.hermitian_eigenvalues();
        r.min_eigenvalue = lo;
        r.max_eigenvalue = hi;
        ok = ok && r.hermiticity_residual <= tol && lo >= -tol && hi <= 1.0 + tol;
        rep.per_operator.push_back(r);
        sum = sum + op;
    }
    Operator2x2 defect = sum - Operator2x2::identity();
    double res = 0.0;
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) res = std::max(res, std::abs(defect(j, k)));
    rep.completeness_residual = res;
    rep.pass = ok && res <= tol;
    return rep;
}

/// Joint outcome statistics of two local measurements on the shared Bell
/// state: pmf(z1,z2) = (1/2) Vec(L1_{z1})^T Vec(L2_{z2}).
inline JointDistribution bell_joint_distribution(const Povm& m1, const Povm& m2,
                                                 double tol = kOperatorTol) {
    auto r1 = validate_povm(m1, tol);
    if (!r1.pass) throw povm_error("first POVM invalid: " + r1.describe());
    auto r2 = validate_povm(m2, tol);
    if (!r2.pass) throw povm_error("second POVM invalid: " + r2.describe());

    std::vector<std::vector<double>> pmf(m1.size(), std::vector<double>(m2.size()));
    for (std::size_t i = 0; i < m1.size(); ++i) {
        for (std::size_t j = 0; j < m2.size(); ++j) {
            Complex v = 0.5 * vec_inner(m1.operators[i], m2.operators[j]);
            if (std::abs(v.imag()) > tol)
                throw numeric_error("bell_joint_distribution: imaginary residue " +
                                    std::to_string(v.imag()));
            pmf[i][j] = v.real();
        }
    }
    return JointDistribution(m1.outcomes, m2.outcomes, std::move(pmf));
}

/// Groups outcomes into a binary measurement by summing operators. The
/// labeling must cover every outcome; a label hit by no outcome yields the
/// zero operator, which is a legal POVM element.
inline Povm coarse_grain(const Povm& m, const std::map<int, int>& labeling) {
    Operator2x2 plus = Operator2x2::zero();
    Operator2x2 minus = Operator2x2::zero();
    for (std::size_t i = 0; i < m.size(); ++i) {
        auto it = labeling.find(m.outcomes[i]);
        if (it == labeling.end())
            throw std::invalid_argument("coarse_grain: no label for outcome " +
                                        std::to_string(m.outcomes[i]));
        if (it->second == 1)
            plus = plus + m.operators[i];
        else if (it->second == -1)
            minus = minus + m.operators[i];
        else
            throw std::invalid_argument("coarse_grain: labels must be +1 or -1");
    }
    return Povm{{1, -1}, {plus, minus}};
}

/// The symmetric three-outcome measurement whose Bell statistics have the
/// 2/9 diagonal, 1/18 off-diagonal joint table.
inline Povm trine_povm() {
    const double s = std::sqrt(3.0) / 4.0;
    Povm m;
    m.outcomes = {1, 2, 3};
    m.operators = {
        Operator2x2::diag(0.0, 1.0).scaled(2.0 / 3.0),
        Operator2x2(0.75, s, s, 0.25).scaled(2.0 / 3.0),
        Operator2x2(0.75, -s, -s, 0.25).scaled(2.0 / 3.0),
    };
    return m;
}

/// Projective measurement in the computational basis; measuring both halves
/// of the Bell state with it hands each party the same fair bit.
inline Povm shared_bit_povm() {
    return Povm{{1, -1}, {Operator2x2::diag(1.0, 0.0), Operator2x2::diag(0.0, 1.0)}};
}

namespace detail {

/// Spectral decomposition of a Hermitian 2x2, closed form.
inline std::pair<std::pair<double, Operator2x2>, std::pair<double, Operator2x2>>
hermitian_spectral(const Operator2x2& h) {
    double a = h(0, 0).real();
    double d = h(1, 1).real();
    Complex f = 0.5 * (h(0, 1) + std::conj(h(1, 0)));
    double mid = 0.5 * (a + d);
    double rad = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(f));
    double lo = mid - rad, hi = mid + rad;
    if (rad < 1e-15) {
        // (near-)scalar matrix: any orthonormal pair works
        return {{lo, Operator2x2::diag(1.0, 0.0)}, {hi, Operator2x2::diag(0.0, 1.0)}};
    }
    auto projector = [&](double lam) {
        // eigenvector (f, lam - a), or (lam - d, conj(f)) when f vanishes
        Complex v0 = f, v1 = Complex(lam - a, 0.0);
        if (std::norm(v0) + std::norm(v1) < 1e-30) {
            v0 = Complex(lam - d, 0.0);
            v1 = std::conj(f);
        }
        double n = std::sqrt(std::norm(v0) + std::norm(v1));
        v0 /= n;
        v1 /= n;
        return Operator2x2(v0 * std::conj(v0), v0 * std::conj(v1), v1 * std::conj(v0),
                           v1 * std::conj(v1));
    };
    return {{lo, projector(lo)}, {hi, projector(hi)}};
}

inline Operator2x2 random_hermitian(std::mt19937_64& g) {
    std::normal_distribution<double> n(0.0, 1.0);
    double a = n(g), d = n(g);
    Complex f(n(g), n(g));
    return Operator2x2(a, f, std::conj(f), d);
}

}  // namespace detail

/// Hermitian matrix function via spectral decomposition.
template <typename F>
Operator2x2 hermitian_apply(const Operator2x2& h, F&& fn) {
    auto [lo, hi] = detail::hermitian_spectral(h);
    return lo.second.scaled(fn(lo.first)) + hi.second.scaled(fn(hi.first));
}

/// Random binary POVM: a random Hermitian with eigenvalues clipped to [0,1]
/// as the +1 operator, complement as the -1 operator.
inline Povm random_binary_povm(std::mt19937_64& g) {
    Operator2x2 h = detail::random_hermitian(g);
    Operator2x2 lam = hermitian_apply(h, [](double x) { return std::clamp(x, 0.0, 1.0); });
    return Povm{{1, -1}, {lam, Operator2x2::identity() - lam}};
}

/// Random n-outcome POVM: random PSD operators A_i whitened by the inverse
/// square root of their sum, S^{-1/2} A_i S^{-1/2}.
inline Povm random_povm(int n_outcomes, std::mt19937_64& g) {
    if (n_outcomes < 2) throw std::invalid_argument("random_povm: need >= 2 outcomes");
    std::vector<Operator2x2> raw;
    Operator2x2 sum = Operator2x2::zero();
    std::normal_distribution<double> nd(0.0, 1.0);
    for (int i = 0; i < n_outcomes; ++i) {
        Operator2x2 b(Complex(nd(g), nd(g)), Complex(nd(g), nd(g)), Complex(nd(g), nd(g)),
                      Complex(nd(g), nd(g)));
        // B^dagger B is PSD
        Operator2x2 a;
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                a(j, k) = std::conj(b(0, j)) * b(0, k) + std::conj(b(1, j)) * b(1, k);
        raw.push_back(a);
        sum = sum + a;
    }
    Operator2x2 wh = hermitian_apply(sum, [](double x) { return 1.0 / std::sqrt(std::max(x, 1e-12)); });
    Povm m;
    for (int i = 0; i < n_outcomes; ++i) {
        // wh * raw[i] * wh
        Operator2x2 t, out;
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) t(j, k) = wh(j, 0) * raw[i](0, k) + wh(j, 1) * raw[i](1, k);
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) out(j, k) = t(j, 0) * wh(0, k) + t(j, 1) * wh(1, k);
        m.operators.push_back(out);
        m.outcomes.push_back(i + 1);
    }
    return m;
}

}  // namespace niss
