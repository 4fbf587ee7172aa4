#include "niss/quantum.hpp"

#include <cmath>

#include "gtest/gtest.h"
#include "testing.hpp"

using namespace niss;
namespace tt = niss::testing;

constexpr double kTol = 1e-10;

TEST(Operator2x2, ClosedFormEigenvalues) {
    auto [lo, hi] = Operator2x2::diag(0.25, 0.75).hermitian_eigenvalues();
    EXPECT_DOUBLE_EQ(lo, 0.25);
    EXPECT_DOUBLE_EQ(hi, 0.75);
    // [[1, i],[-i, 1]] has eigenvalues 0 and 2
    Operator2x2 h(1.0, Complex(0, 1), Complex(0, -1), 1.0);
    auto [l2, h2] = h.hermitian_eigenvalues();
    EXPECT_NEAR(l2, 0.0, 1e-14);
    EXPECT_NEAR(h2, 2.0, 1e-14);
}

TEST(ValidatePovm, ProjectivePasses) {
    auto rep = validate_povm(shared_bit_povm());
    EXPECT_TRUE(rep.pass);
    EXPECT_LE(rep.completeness_residual, 1e-15);
    for (const auto& o : rep.per_operator) {
        EXPECT_LE(o.hermiticity_residual, 1e-15);
        EXPECT_GE(o.min_eigenvalue, -1e-15);
        EXPECT_LE(o.max_eigenvalue, 1.0 + 1e-15);
    }
}

TEST(ValidatePovm, TrinePasses) {
    EXPECT_TRUE(validate_povm(trine_povm()).pass);
}

TEST(ValidatePovm, IncompletePairFails) {
    Povm bad{{1, -1}, {Operator2x2::diag(1.0, 0.0), Operator2x2::diag(0.0, 0.5)}};
    auto rep = validate_povm(bad);
    EXPECT_FALSE(rep.pass);
    EXPECT_NEAR(rep.completeness_residual, 0.5, 1e-15);
}

TEST(ValidatePovm, StructuralErrors) {
    EXPECT_THROW(validate_povm(Povm{{1}, {Operator2x2::identity()}}), povm_error);
    EXPECT_THROW(validate_povm(Povm{{1, -1}, {Operator2x2::identity()}}), povm_error);
}

TEST(BellJoint, SharedBitMeasurement) {
    auto j = bell_joint_distribution(shared_bit_povm(), shared_bit_povm());
    EXPECT_NEAR(j(0, 0), 0.5, 1e-15);
    EXPECT_NEAR(j(0, 1), 0.0, 1e-15);
    EXPECT_NEAR(j(1, 0), 0.0, 1e-15);
    EXPECT_NEAR(j(1, 1), 0.5, 1e-15);
}

TEST(BellJoint, TrineTable) {
    auto j = bell_joint_distribution(trine_povm(), trine_povm());
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k)
            EXPECT_NEAR(j(i, k), i == k ? 2.0 / 9.0 : 1.0 / 18.0, 1e-12) << i << "," << k;
}

TEST(BellJoint, MaximallyNoisyAlice) {
    Povm noisy{{1, -1}, {Operator2x2::identity().scaled(0.5), Operator2x2::identity().scaled(0.5)}};
    auto j = bell_joint_distribution(noisy, shared_bit_povm());
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k) EXPECT_NEAR(j(i, k), 0.25, 1e-15);
}

TEST(BellJoint, RejectsInvalidPovm) {
    Povm bad{{1, -1}, {Operator2x2::diag(1.0, 0.0), Operator2x2::diag(0.0, 0.5)}};
    EXPECT_THROW(bell_joint_distribution(bad, shared_bit_povm()), povm_error);
}

TEST(Marginals, TrineIsUniform) {
    auto [row, col] = marginals(bell_joint_distribution(trine_povm(), trine_povm()));
    for (double v : row) EXPECT_NEAR(v, 1.0 / 3.0, 1e-12);
    for (double v : col) EXPECT_NEAR(v, 1.0 / 3.0, 1e-12);
}

TEST(Marginals, CommonBitIsFair) {
    auto [row, col] = marginals(bell_joint_distribution(shared_bit_povm(), shared_bit_povm()));
    EXPECT_NEAR(row[0], 0.5, 1e-15);
    EXPECT_NEAR(row[1], 0.5, 1e-15);
    EXPECT_NEAR(col[0], 0.5, 1e-15);
    EXPECT_NEAR(col[1], 0.5, 1e-15);
}

TEST(Marginals, ProductRecoversFactors) {
    std::vector<double> a{0.2, 0.5, 0.3}, b{0.7, 0.3};
    auto [row, col] = marginals(product_distribution({1, 2, 3}, {1, -1}, a, b));
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(row[i], a[i], 1e-15);
    for (int i = 0; i < 2; ++i) EXPECT_NEAR(col[i], b[i], 1e-15);
}

TEST(CoarseGrain, TrineToBinary) {
    auto b = coarse_grain(trine_povm(), {{1, 1}, {2, -1}, {3, -1}});
    EXPECT_TRUE(validate_povm(b).pass);
    // +1 operator is (2/3) diag(0,1); -1 operator is its complement
    EXPECT_NEAR(b.operators[0](0, 0).real(), 0.0, 1e-15);
    EXPECT_NEAR(b.operators[0](1, 1).real(), 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(std::abs(b.operators[0](0, 1)), 0.0, 1e-15);
    Operator2x2 compl2 = Operator2x2::identity() - b.operators[0];
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
            EXPECT_NEAR(std::abs(b.operators[1](j, k) - compl2(j, k)), 0.0, 1e-15);
}

TEST(CoarseGrain, IdentityLabelingKeepsBinary) {
    auto m = shared_bit_povm();
    auto b = coarse_grain(m, {{1, 1}, {-1, -1}});
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                EXPECT_NEAR(std::abs(b.operators[i](j, k) - m.operators[i](j, k)), 0.0, 1e-15);
}

TEST(CoarseGrain, AllToPlusGivesPointMass) {
    auto b = coarse_grain(trine_povm(), {{1, 1}, {2, 1}, {3, 1}});
    EXPECT_TRUE(validate_povm(b).pass);
    auto j = bell_joint_distribution(b, shared_bit_povm());
    EXPECT_NEAR(j(0, 0), 0.5, 1e-12);
    EXPECT_NEAR(j(0, 1), 0.5, 1e-12);
    EXPECT_NEAR(j(1, 0), 0.0, 1e-12);
    EXPECT_NEAR(j(1, 1), 0.0, 1e-12);
}

TEST(CoarseGrain, PartialLabelingThrows) {
    EXPECT_THROW(coarse_grain(trine_povm(), {{1, 1}, {2, -1}}), std::invalid_argument);
    EXPECT_THROW(coarse_grain(trine_povm(), {{1, 1}, {2, -1}, {3, 0}}), std::invalid_argument);
}

TEST(Trine, CompletenessByConstruction) {
    auto m = trine_povm();
    Operator2x2 sum = m.operators[0] + m.operators[1] + m.operators[2];
    Operator2x2 defect = sum - Operator2x2::identity();
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) EXPECT_LE(std::abs(defect(j, k)), 1e-12);
    for (const auto& op : m.operators) EXPECT_NEAR(op.trace().real(), 2.0 / 3.0, 1e-15);
}

// property: random POVM pairs produce valid pmfs obeying the trace law
TEST(Properties, RandomPairsValidAndTraceLaw) {
    auto g = tt::seeded(2024);
    for (int rep = 0; rep < 200; ++rep) {
        Povm m1 = rep % 2 ? random_binary_povm(g) : random_povm(2 + rep % 3, g);
        Povm m2 = rep % 3 ? random_binary_povm(g) : random_povm(2 + rep % 4, g);
        ASSERT_TRUE(validate_povm(m1).pass);
        ASSERT_TRUE(validate_povm(m2).pass);
        auto j = bell_joint_distribution(m1, m2);
        double sum = 0.0;
        for (const auto& row : j.pmf)
            for (double v : row) {
                ASSERT_GE(v, 0.0);
                sum += v;
            }
        ASSERT_NEAR(sum, 1.0, kTol);
        auto [row, col] = marginals(j);
        for (std::size_t i = 0; i < m1.size(); ++i)
            ASSERT_NEAR(row[i], 0.5 * m1.operators[i].trace().real(), kTol);
        for (std::size_t i = 0; i < m2.size(); ++i)
            ASSERT_NEAR(col[i], 0.5 * m2.operators[i].trace().real(), kTol);
    }
}

TEST(Properties, SwapTransposesJoint) {
    auto g = tt::seeded(31337);
    for (int rep = 0; rep < 100; ++rep) {
        Povm m1 = random_povm(3, g);
        Povm m2 = random_binary_povm(g);
        auto a = bell_joint_distribution(m1, m2);
        auto b = bell_joint_distribution(m2, m1);
        for (std::size_t i = 0; i < a.n_rows(); ++i)
            for (std::size_t j = 0; j < a.n_cols(); ++j)
                ASSERT_NEAR(a.pmf[i][j], b.pmf[j][i], kTol);
    }
}

TEST(Properties, CoarseGrainCommutesWithMeasurement) {
    auto g = tt::seeded(555);
    for (int rep = 0; rep < 100; ++rep) {
        Povm m1 = random_povm(3, g);
        Povm m2 = random_povm(2 + rep % 3, g);
        std::map<int, int> lab;
        for (int o : m1.outcomes) lab[o] = (g() & 1u) ? 1 : -1;
        auto grouped_first = bell_joint_distribution(coarse_grain(m1, lab), m2);
        auto full = bell_joint_distribution(m1, m2);
        for (std::size_t j = 0; j < m2.size(); ++j) {
            double plus = 0.0, minus = 0.0;
            for (std::size_t i = 0; i < m1.size(); ++i)
                (lab[m1.outcomes[i]] == 1 ? plus : minus) += full.pmf[i][j];
            ASSERT_NEAR(grouped_first.pmf[0][j], plus, kTol);
            ASSERT_NEAR(grouped_first.pmf[1][j], minus, kTol);
        }
    }
}
