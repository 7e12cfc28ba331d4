#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "cvclone/errors.hpp"
#include "cvclone/phase_space.hpp"
#include "test_support.hpp"

using namespace cvclone;
using cvclone::testing::diag;
using cvclone::testing::expect_matrix_near;
using cvclone::testing::expect_vector_near;
using cvclone::testing::vec;

namespace {

// Tr(rho sigma) = 2 pi * integral of W_rho W_sigma over phase space, evaluated
// on a grid. Independent of the closed-form overlap used by the library.
double overlap_by_quadrature(const GaussianState &s, double ax, double ap) {
    const Matrix vinv = s.cov().inverse();
    const double norm_s = 1.0 / (2 * std::numbers::pi * std::sqrt(s.cov().determinant()));
    const double norm_c = 1.0 / std::numbers::pi;
    const double h = 0.01;
    double total = 0.0;
    for (double x = -10; x <= 10; x += h)
        for (double p = -10; p <= 10; p += h) {
            Vector d(2);
            d << x - s.mean()(0), p - s.mean()(1);
            const double ws = norm_s * std::exp(-0.5 * d.dot(vinv * d));
            const double wc = norm_c * std::exp(-((x - ax) * (x - ax) + (p - ap) * (p - ap)));
            total += ws * wc;
        }
    return 2 * std::numbers::pi * total * h * h;
}

} // namespace

TEST(PhaseSpace, CoherentStates) {
    auto vac = make_coherent(0, 0);
    expect_vector_near(vac.mean(), vec({0, 0}), 0);
    expect_matrix_near(vac.cov(), diag({0.5, 0.5}), 0);

    auto c = make_coherent(3, -1);
    expect_vector_near(c.mean(), vec({3, -1}), 0);
    expect_matrix_near(c.cov(), diag({0.5, 0.5}), 0);

    auto d = make_coherent(1, 2);
    EXPECT_DOUBLE_EQ(d.variance(0, Axis::X), 0.5);
    EXPECT_DOUBLE_EQ(d.variance(0, Axis::P), 0.5);
    EXPECT_TRUE(d.is_pure());
}

TEST(PhaseSpace, SqueezedVacuum) {
    expect_matrix_near(make_squeezed_vacuum(0.5, Axis::X).cov(), diag({0.5, 0.5}), 0);

    // Single-mode oracle: nu = sqrt(det cov).
    auto sx = make_squeezed_vacuum(0.25, Axis::X);
    expect_matrix_near(sx.cov(), diag({0.25, 1.0}), 1e-15);
    EXPECT_NEAR(std::sqrt(sx.cov().determinant()), 0.5, 1e-12);
    EXPECT_NEAR(sx.symplectic_eigenvalues().front(), 0.5, 1e-10);

    auto sp = make_squeezed_vacuum(0.25, Axis::P);
    expect_matrix_near(sp.cov(), diag({1.0, 0.25}), 1e-15);
    EXPECT_TRUE(sp.is_pure());

    EXPECT_THROW(make_squeezed_vacuum(0.0, Axis::X), DomainError);
    EXPECT_THROW(make_squeezed_vacuum(-1.0, Axis::P), DomainError);
}

TEST(PhaseSpace, SqueezedVacuumIsPureForAnyVariance) {
    for (double v : {1e-3, 0.05, 0.1, 0.25, 0.5, 1.0, 7.5, 100.0})
        for (Axis a : {Axis::X, Axis::P}) {
            auto s = make_squeezed_vacuum(v, a);
            EXPECT_TRUE(s.is_pure()) << "V=" << v;
        }
}

TEST(PhaseSpace, Tensor) {
    auto two_vac = tensor({make_vacuum(), make_vacuum()});
    expect_matrix_near(two_vac.cov(), 0.5 * Matrix::Identity(4, 4), 0);

    auto mixed = tensor({make_coherent(3, -1), make_vacuum()});
    expect_vector_near(mixed.mean(), vec({3, -1, 0, 0}), 0);

    auto sq = tensor({make_squeezed_vacuum(0.25, Axis::X), make_squeezed_vacuum(0.25, Axis::P)});
    expect_matrix_near(sq.cov(), diag({0.25, 1, 1, 0.25}), 1e-15);

    EXPECT_THROW(tensor(std::span<const GaussianState>{}), DomainError);
}

TEST(PhaseSpace, ReducedState) {
    auto r = reduced_state(make_vacuum(2), {ModeLabel{0}});
    expect_matrix_near(r.cov(), diag({0.5, 0.5}), 0);

    auto s = tensor({make_coherent(1, 2), make_coherent(3, 4)});
    auto second = reduced_state(s, {ModeLabel{1}});
    expect_vector_near(second.mean(), vec({3, 4}), 0);
    expect_matrix_near(second.cov(), diag({0.5, 0.5}), 0);

    EXPECT_THROW(reduced_state(s, {ModeLabel{2}}), DomainError);
    EXPECT_THROW(reduced_state(s, {ModeLabel{0}, ModeLabel{0}}), DomainError);
}

TEST(PhaseSpace, TensorThenReduceReturnsFactors) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        auto a = cvclone::testing::random_state(1, rng);
        auto b = cvclone::testing::random_state(2, rng);
        auto joint = tensor({a, b});
        auto ra = reduced_state(joint, {ModeLabel{0}});
        auto rb = reduced_state(joint, {ModeLabel{1}, ModeLabel{2}});
        EXPECT_EQ(ra.mean(), a.mean());
        EXPECT_EQ(ra.cov(), a.cov());
        EXPECT_EQ(rb.mean(), b.mean());
        EXPECT_EQ(rb.cov(), b.cov());
    }
}

TEST(PhaseSpace, RejectsUnphysicalCovariance) {
    EXPECT_THROW(GaussianState(vec({0, 0}), diag({0.25, 0.25})), DomainError);
    EXPECT_THROW(GaussianState(vec({0, 0}), diag({-1, 1})), DomainError);
    Matrix asym(2, 2);
    asym << 1, 0.2, 0.0, 1;
    EXPECT_THROW(GaussianState(vec({0, 0}), asym), DomainError);
    EXPECT_THROW(GaussianState(vec({0, 0, 0}), Matrix::Identity(3, 3)), DomainError);
    // Boundary: exactly pure is fine.
    EXPECT_NO_THROW(GaussianState(vec({0, 0}), diag({0.125, 2})));
}

TEST(PhaseSpace, SymplecticEigenvaluesOfTwoModeSqueezedVacuum) {
    // Two-mode squeezed vacuum is pure; each reduced mode is thermal with
    // variance cosh(2r)/2.
    const double r = 0.7;
    const double c = std::cosh(2 * r) / 2, s = std::sinh(2 * r) / 2;
    Matrix cov(4, 4);
    cov << c, 0, s, 0, 0, c, 0, -s, s, 0, c, 0, 0, -s, 0, c;
    GaussianState tmsv(Vector::Zero(4), cov);
    EXPECT_TRUE(tmsv.is_pure(1e-10));
    auto reduced = reduced_state(tmsv, {ModeLabel{0}});
    EXPECT_NEAR(reduced.symplectic_eigenvalues().front(), c, 1e-12);
}

TEST(PhaseSpace, FidelityAnchors) {
    EXPECT_NEAR(fidelity_with_coherent(make_vacuum(), 0, 0), 1.0, 1e-15);

    GaussianState clone(vec({1.5, -2}), diag({1, 1}));
    EXPECT_NEAR(fidelity_with_coherent(clone, 1.5, -2), 2.0 / 3.0, 1e-15);

    const double v = 0.25;
    GaussianState asym(vec({0.3, 0.4}), diag({0.5 + v, 0.5 + v}));
    EXPECT_NEAR(fidelity_with_coherent(asym, 0.3, 0.4), 0.8, 1e-15);

    EXPECT_THROW(fidelity_with_coherent(make_vacuum(2), 0, 0), DomainError);
}

TEST(PhaseSpace, FidelityMatchesThermalPhotonFormula) {
    for (double nbar : {0.0, 0.25, 0.5, 1.0}) {
        GaussianState s(vec({2, 1}), (0.5 + nbar) * Matrix::Identity(2, 2));
        EXPECT_NEAR(fidelity_with_coherent(s, 2, 1), 1.0 / (nbar + 1.0), 1e-12) << "nbar=" << nbar;
    }
}

TEST(PhaseSpace, FidelityMatchesPhaseSpaceQuadrature) {
    Matrix cov(2, 2);
    cov << 0.9, 0.3, 0.3, 0.7;
    GaussianState s(vec({0.4, -0.3}), cov);
    for (auto [ax, ap] : std::vector<std::pair<double, double>>{{0.4, -0.3}, {0, 0}, {1, 0.5}}) {
        EXPECT_NEAR(fidelity_with_coherent(s, ax, ap), overlap_by_quadrature(s, ax, ap), 1e-8);
    }
}

TEST(PhaseSpace, FidelityDecreasesWithAddedNoise) {
    double previous = 1.0 + 1e-15;
    for (double n = 0.0; n <= 3.0; n += 0.1) {
        GaussianState s(vec({1, 1}), (0.5 + n) * Matrix::Identity(2, 2));
        const double f = fidelity_with_coherent(s, 1, 1);
        EXPECT_LT(f, previous);
        previous = f;
    }
    // F = 1 only for the target coherent state itself.
    EXPECT_LT(fidelity_with_coherent(make_coherent(1, 1), 1, 1.001), 1.0);
}

TEST(PhaseSpace, JsonRoundTrip) {
    std::mt19937_64 rng(3);
    auto s = cvclone::testing::random_state(2, rng);
    nlohmann::json j = s;
    EXPECT_EQ(j.at("num_modes"), 2);
    auto back = gaussian_state_from_json(nlohmann::json::parse(j.dump()));
    EXPECT_EQ(back.mean(), s.mean());
    EXPECT_EQ(back.cov(), s.cov());
}

TEST(PhaseSpace, RandomStatesSatisfyUncertainty) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 100; ++i) {
        auto s = cvclone::testing::random_state(3, rng);
        for (double nu : s.symplectic_eigenvalues())
            EXPECT_GE(nu, 0.5 - 1e-10);
    }
}
