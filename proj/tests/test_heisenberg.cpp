#include <random>

#include <gtest/gtest.h>

#include "cvclone/errors.hpp"
#include "cvclone/heisenberg.hpp"
#include "random_circuits.hpp"
#include "test_support.hpp"

using namespace cvclone;
using namespace cvclone::heisenberg;

namespace {

constexpr std::size_t L = 0, A = 1, B = 2;
const std::vector<std::string> kNames{"L", "A", "B"};

Surd coeff(const OperatorTable &t, std::size_t mode, Axis axis, std::size_t in_mode, Axis in_axis) {
    return t.row(mode, axis).expr.coefficient({in_mode, in_axis});
}

// Compare a row against an expected {symbol -> coefficient} list, requiring
// every other coefficient to vanish.
void expect_row(const OperatorTable &t, std::size_t mode, Axis axis, const std::map<Symbol, Surd> &expected) {
    const auto &row = t.row(mode, axis).expr;
    EXPECT_EQ(row.coefficients.size(), expected.size()) << t.to_string();
    for (const auto &[sym, c] : expected)
        EXPECT_TRUE(row.coefficient(sym) == c) << "mode " << mode << " row, symbol " << sym.mode << "\n" << t.to_string();
}

const std::vector<GateDescriptor> kStepOne{QndXp{1, L, A}, QndXp{1, L, B}};
const std::vector<GateDescriptor> kNetwork{QndXp{1, L, A}, QndXp{1, L, B}, QndXp{-1, A, L}, QndXp{-1, B, L}};

} // namespace

TEST(Surd, FieldArithmetic) {
    const Surd r2 = Surd::sqrt2();
    EXPECT_TRUE(r2 * r2 == Surd(2));
    EXPECT_TRUE(Surd(1) / r2 == Surd::sqrt2(rational(1, 2)));
    const Surd x(rational(3, 2), rational(-1, 3));
    const Surd y(rational(1, 5), 2);
    EXPECT_TRUE((x / y) * y == x);
    EXPECT_TRUE(x - x == Surd(0));
    EXPECT_NEAR(x.to_double(), 1.5 - std::sqrt(2.0) / 3, 1e-15);
    EXPECT_THROW(x / Surd(0), DomainError);
    EXPECT_EQ(Surd::sqrt2(rational(1, 2)).to_string(), "sqrt(2)/2");
    EXPECT_EQ(Surd(rational(-3, 4)).to_string(), "-3/4");
    EXPECT_EQ(Surd(1, -1).to_string(), "(1 - sqrt(2))");
}

TEST(Propagate, StepOneReproducesFirstPassTable) {
    auto t = propagate(3, kStepOne, kNames);
    expect_row(t, A, Axis::X, {{{A, Axis::X}, 1}, {{L, Axis::X}, 1}});
    expect_row(t, A, Axis::P, {{{A, Axis::P}, 1}});
    expect_row(t, B, Axis::X, {{{B, Axis::X}, 1}, {{L, Axis::X}, 1}});
    expect_row(t, B, Axis::P, {{{B, Axis::P}, 1}});
    expect_row(t, L, Axis::X, {{{L, Axis::X}, 1}});
    expect_row(t, L, Axis::P, {{{L, Axis::P}, 1}, {{A, Axis::P}, -1}, {{B, Axis::P}, -1}});
}

TEST(Propagate, FullNetworkReproducesOptimalClonerTable) {
    auto t = propagate(3, kNetwork, kNames);
    expect_row(t, A, Axis::X, {{{A, Axis::X}, 1}, {{L, Axis::X}, 1}});
    expect_row(t, A, Axis::P, {{{L, Axis::P}, 1}, {{B, Axis::P}, -1}});
    expect_row(t, B, Axis::X, {{{B, Axis::X}, 1}, {{L, Axis::X}, 1}});
    expect_row(t, B, Axis::P, {{{L, Axis::P}, 1}, {{A, Axis::P}, -1}});
    expect_row(t, L, Axis::X, {{{L, Axis::X}, -1}, {{A, Axis::X}, -1}, {{B, Axis::X}, -1}});
    expect_row(t, L, Axis::P, {{{L, Axis::P}, 1}, {{A, Axis::P}, -1}, {{B, Axis::P}, -1}});
}

TEST(Propagate, MeasurementFeedbackReducesToNetworkOnAtoms) {
    std::vector<GateDescriptor> single = kStepOne;
    single.push_back(MeasureFeed{L, Axis::P, {{A, Axis::P, 1}, {B, Axis::P, 1}}});
    auto t = propagate(3, single, kNames);
    auto net = propagate(3, kNetwork, kNames);
    EXPECT_EQ(t.surviving_modes(), (std::vector<std::size_t>{A, B}));
    for (auto m : {A, B})
        for (auto ax : {Axis::X, Axis::P})
            EXPECT_TRUE(t.row(m, ax).expr.coefficients == net.row(m, ax).expr.coefficients);
    EXPECT_TRUE(check_commutators(t).ok);
}

TEST(Propagate, AtomsPlusLightTable) {
    // Light L, atoms A, second light input B entering the beam splitter.
    const std::vector<GateDescriptor> circuit{
        QndXp{1, L, A}, BeamSplitter{L, B}, MeasureFeed{L, Axis::P, {{A, Axis::P, Surd::sqrt2()}, {B, Axis::P, 1}}}};
    auto t = propagate(3, circuit, kNames);
    const Surd h = Surd::sqrt2(rational(1, 2));
    expect_row(t, A, Axis::X, {{{L, Axis::X}, 1}, {{A, Axis::X}, 1}});
    expect_row(t, B, Axis::X, {{{L, Axis::X}, h}, {{B, Axis::X}, h}});
    expect_row(t, A, Axis::P, {{{L, Axis::P}, 1}, {{B, Axis::P}, -1}});
    expect_row(t, B, Axis::P, {{{L, Axis::P}, Surd::sqrt2()}, {{A, Axis::P}, -Surd::sqrt2()}});
    EXPECT_TRUE(check_commutators(t).ok);
}

TEST(Propagate, UnknownOrMeasuredModeIsAnError) {
    EXPECT_THROW(propagate(2, std::vector<GateDescriptor>{QndXp{1, 0, 3}}), DomainError);
    EXPECT_THROW(propagate(2, std::vector<GateDescriptor>{QndXp{1, 1, 1}}), DomainError);
    const std::vector<GateDescriptor> after{MeasureFeed{0, Axis::P, {}}, Rotation{1, 0}};
    EXPECT_THROW(propagate(2, after), DomainError);
}

TEST(Propagate, PrettyPrint) {
    auto t = propagate(3, kNetwork, kNames);
    const auto text = t.to_string();
    EXPECT_NE(text.find("x_L_out = -x_L_in - x_A_in - x_B_in"), std::string::npos) << text;
    EXPECT_NE(text.find("x_A_out = x_L_in + x_A_in"), std::string::npos) << text;
    EXPECT_NE(text.find("p_A_out = p_L_in - p_B_in"), std::string::npos) << text;

    const std::vector<GateDescriptor> bs{BeamSplitter{0, 1}};
    EXPECT_NE(propagate(2, bs).to_string().find("x_1_out = sqrt(2)/2*x_0_in + sqrt(2)/2*x_1_in"), std::string::npos);
}

TEST(Commutators, IdentityAndNetworkAreCanonical) {
    EXPECT_TRUE(check_commutators(identity_table(3)).ok);
    EXPECT_TRUE(check_commutators(propagate(3, kNetwork, kNames)).ok);
}

TEST(Commutators, CorruptedTableIsReported) {
    auto t = propagate(3, kNetwork, kNames);
    for (auto &row : t.rows)
        if (row.mode == A && row.axis == Axis::P)
            row.expr.coefficients[{B, Axis::P}] = Surd(1); // was -1
    auto report = check_commutators(t);
    EXPECT_FALSE(report.ok);
    ASSERT_FALSE(report.violations.empty());
    bool named = false;
    for (const auto &v : report.violations)
        named = named || v.description.find("p_A_out") != std::string::npos;
    EXPECT_TRUE(named);
}

TEST(AddedNoise, SymmetricClonesOnVacuum) {
    auto t = propagate(3, kNetwork, kNames);
    std::map<Symbol, double> vac;
    for (std::size_t m = 0; m < 3; ++m)
        for (auto ax : {Axis::X, Axis::P})
            vac[{m, ax}] = 0.5;
    auto var = added_noise_variances(t, vac);
    EXPECT_DOUBLE_EQ(var.at({A, Axis::X}), 1.0);
    EXPECT_DOUBLE_EQ(var.at({A, Axis::P}), 1.0);
    const double nbar = var.at({A, Axis::X}) - 0.5;
    EXPECT_DOUBLE_EQ(1.0 / (nbar + 1.0), 2.0 / 3.0);
}

TEST(AddedNoise, SqueezedAncillae) {
    auto t = propagate(3, kNetwork, kNames);
    for (double v : {0.1, 0.25, 0.5, 2.0}) {
        std::map<Symbol, double> in{{{L, Axis::X}, 0.5},           {{L, Axis::P}, 0.5},
                                    {{A, Axis::X}, v},             {{A, Axis::P}, 0.25 / v},
                                    {{B, Axis::X}, 0.25 / v},      {{B, Axis::P}, v}};
        auto var = added_noise_variances(t, in);
        EXPECT_NEAR(var.at({A, Axis::X}), 0.5 + v, 1e-15);
        EXPECT_NEAR(var.at({A, Axis::P}), 0.5 + v, 1e-15);
        EXPECT_NEAR(var.at({B, Axis::X}), 0.5 + 0.25 / v, 1e-15);
        EXPECT_NEAR(var.at({B, Axis::P}), 0.5 + 0.25 / v, 1e-15);
    }
}

TEST(AddedNoise, MissingSymbolIsAnError) {
    auto t = propagate(3, kNetwork, kNames);
    EXPECT_THROW(added_noise_variances(t, {{{L, Axis::X}, 0.5}}), DomainError);
}

TEST(OracleEquivalence, RandomCircuitsMatchNumericCompose) {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<std::size_t> length(0, 10);
    for (int trial = 0; trial < 200; ++trial) {
        const auto circuit = cvclone::testing::random_circuit(3, length(rng), rng);
        const auto table = propagate(3, circuit);
        ASSERT_TRUE(check_commutators(table).ok);

        std::vector<SymplecticOp> ops{identity_op({0, 1, 2})};
        for (const auto &g : circuit)
            ops.push_back(numeric_op(g));
        const auto op = compose(ops);
        cvclone::testing::expect_matrix_near(table.coefficient_matrix(), op.matrix, 1e-12);

        // Constant terms track the displacement part.
        for (std::size_t r = 0; r < table.rows.size(); ++r)
            EXPECT_NEAR(table.rows[r].expr.constant.to_double(), op.displacement(static_cast<Eigen::Index>(r)), 1e-12);

        // Vacuum-input noise equals the numeric covariance diagonal.
        std::map<Symbol, double> vac;
        for (std::size_t m = 0; m < 3; ++m)
            for (auto ax : {Axis::X, Axis::P})
                vac[{m, ax}] = 0.5;
        const auto var = added_noise_variances(table, vac);
        const auto s = apply(op, make_vacuum(3));
        for (const auto &row : table.rows)
            EXPECT_NEAR(var.at({row.mode, row.axis}), s.variance(row.mode, row.axis), 1e-10);
    }
}

TEST(NumericOp, MeasureFeedHasNoMatrix) {
    EXPECT_THROW(numeric_op(MeasureFeed{0, Axis::P, {}}), DomainError);
    EXPECT_NO_THROW(numeric_op(Rotation{3, 0}));
    EXPECT_EQ(describe(QndXp{1, 0, 1}), "qnd_xp(1; 0->1)");
}
