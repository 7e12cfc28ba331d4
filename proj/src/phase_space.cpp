#include "cvclone/phase_space.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <set>

#include "cvclone/errors.hpp"

namespace cvclone {

std::string to_string(Axis axis) { return axis == Axis::X ? "x" : "p"; }

std::string to_string(ModeRole role) {
    switch (role) {
    case ModeRole::Light:
        return "L";
    case ModeRole::AtomA:
        return "A";
    case ModeRole::AtomB:
        return "B";
    case ModeRole::Ancilla:
        return "anc";
    }
    return "?";
}

Matrix symplectic_form(std::size_t num_modes) {
    Matrix omega = Matrix::Zero(2 * num_modes, 2 * num_modes);
    for (std::size_t m = 0; m < num_modes; ++m) {
        omega(2 * m, 2 * m + 1) = 1.0;
        omega(2 * m + 1, 2 * m) = -1.0;
    }
    return omega;
}

std::vector<double> symplectic_eigenvalues(const Matrix &cov) {
    if (cov.rows() != cov.cols() || cov.rows() % 2 != 0 || cov.rows() == 0)
        throw DomainError("covariance must be a non-empty square matrix of even dimension");
    if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > kStructuralTol)
        throw DomainError("covariance is not symmetric");

    const Matrix sym = 0.5 * (cov + cov.transpose());
    Eigen::LLT<Matrix> llt(sym);
    if (llt.info() != Eigen::Success)
        throw DomainError("covariance is not positive definite");

    // L^T (i Omega) L is Hermitian and similar to i Omega cov, whose spectrum is {+-nu_k}.
    const Matrix L = llt.matrixL();
    const auto n = static_cast<std::size_t>(cov.rows() / 2);
    const Eigen::MatrixXcd herm =
        std::complex<double>(0.0, 1.0) * (L.transpose() * symplectic_form(n) * L).cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd ev = solver.eigenvalues();

    // Ascending order: the upper half holds the positive branch.
    std::vector<double> nu(n);
    for (std::size_t k = 0; k < n; ++k)
        nu[k] = ev(static_cast<Eigen::Index>(n + k));
    return nu;
}

void validate_covariance(const Matrix &cov, double tol) {
    const auto nu = symplectic_eigenvalues(cov);
    if (nu.front() < kVacuumVariance - tol)
        throw DomainError("covariance violates the uncertainty relation: smallest symplectic eigenvalue " +
                          std::to_string(nu.front()));
}

GaussianState::GaussianState(Vector mean, Matrix cov) : mean_(std::move(mean)), cov_(std::move(cov)) {
    if (mean_.size() == 0 || mean_.size() % 2 != 0)
        throw DomainError("mean vector must have non-zero even length");
    if (cov_.rows() != mean_.size() || cov_.cols() != mean_.size())
        throw DomainError("covariance dimension does not match mean vector");
    if (!mean_.allFinite() || !cov_.allFinite())
        throw DomainError("state contains non-finite entries");
    validate_covariance(cov_);
}

std::vector<double> GaussianState::symplectic_eigenvalues() const { return cvclone::symplectic_eigenvalues(cov_); }

bool GaussianState::is_pure(double tol) const {
    const auto nu = symplectic_eigenvalues();
    return std::all_of(nu.begin(), nu.end(), [tol](double v) { return std::abs(v - kVacuumVariance) <= tol; });
}

GaussianState make_vacuum(std::size_t num_modes) {
    if (num_modes == 0)
        throw DomainError("vacuum needs at least one mode");
    const auto dim = static_cast<Eigen::Index>(2 * num_modes);
    return {Vector::Zero(dim), kVacuumVariance * Matrix::Identity(dim, dim)};
}

GaussianState make_coherent(double alpha_x, double alpha_p) {
    Vector mean(2);
    mean << alpha_x, alpha_p;
    return {std::move(mean), kVacuumVariance * Matrix::Identity(2, 2)};
}

GaussianState make_squeezed_vacuum(double variance, Axis axis) {
    if (!(variance > 0.0) || !std::isfinite(variance))
        throw DomainError("squeezed variance must be positive and finite");
    const double conjugate = 0.25 / variance;
    Matrix cov = Matrix::Zero(2, 2);
    cov(0, 0) = axis == Axis::X ? variance : conjugate;
    cov(1, 1) = axis == Axis::X ? conjugate : variance;
    return {Vector::Zero(2), std::move(cov)};
}

GaussianState tensor(std::span<const GaussianState> states) {
    if (states.empty())
        throw DomainError("tensor of an empty list of states");
    Eigen::Index dim = 0;
    for (const auto &s : states)
        dim += s.mean().size();

    Vector mean(dim);
    Matrix cov = Matrix::Zero(dim, dim);
    Eigen::Index offset = 0;
    for (const auto &s : states) {
        const auto d = s.mean().size();
        mean.segment(offset, d) = s.mean();
        cov.block(offset, offset, d, d) = s.cov();
        offset += d;
    }
    return {std::move(mean), std::move(cov)};
}

GaussianState tensor(std::initializer_list<GaussianState> states) {
    return tensor(std::span<const GaussianState>(states.begin(), states.size()));
}

GaussianState reduced_state(const GaussianState &state, std::span<const ModeLabel> modes) {
    if (modes.empty())
        throw DomainError("reduced_state needs at least one mode");
    std::set<std::size_t> seen;
    std::vector<Eigen::Index> rows;
    for (const auto &m : modes) {
        if (m.index >= state.num_modes())
            throw DomainError("mode index " + std::to_string(m.index) + " out of range");
        if (!seen.insert(m.index).second)
            throw DomainError("duplicate mode index " + std::to_string(m.index));
        rows.push_back(static_cast<Eigen::Index>(2 * m.index));
        rows.push_back(static_cast<Eigen::Index>(2 * m.index + 1));
    }
    return {state.mean()(rows), state.cov()(rows, rows)};
}

GaussianState reduced_state(const GaussianState &state, std::initializer_list<ModeLabel> modes) {
    return reduced_state(state, std::span<const ModeLabel>(modes.begin(), modes.size()));
}

double fidelity_with_coherent(const GaussianState &state, double alpha_x, double alpha_p) {
    if (state.num_modes() != 1)
        throw DomainError("fidelity_with_coherent expects a single-mode state");
    // Overlap of two Gaussian states, one of them pure:
    // F = exp(-d^T (V1+V2)^{-1} d / 2) / sqrt(det(V1+V2)), V2 = I/2.
    const Matrix sum = state.cov() + kVacuumVariance * Matrix::Identity(2, 2);
    Vector delta(2);
    delta << state.mean()(0) - alpha_x, state.mean()(1) - alpha_p;
    const double exponent = -0.5 * delta.dot(sum.ldlt().solve(delta));
    return std::exp(exponent) / std::sqrt(sum.determinant());
}

void to_json(nlohmann::json &j, const GaussianState &state) {
    std::vector<double> mean(state.mean().data(), state.mean().data() + state.mean().size());
    std::vector<std::vector<double>> cov;
    for (Eigen::Index r = 0; r < state.cov().rows(); ++r) {
        std::vector<double> row(static_cast<std::size_t>(state.cov().cols()));
        for (Eigen::Index c = 0; c < state.cov().cols(); ++c)
            row[static_cast<std::size_t>(c)] = state.cov()(r, c);
        cov.push_back(std::move(row));
    }
    j = nlohmann::json{{"num_modes", state.num_modes()}, {"mean", mean}, {"cov", cov}};
}

GaussianState gaussian_state_from_json(const nlohmann::json &j) {
    const auto n = j.at("num_modes").get<std::size_t>();
    const auto mean = j.at("mean").get<std::vector<double>>();
    const auto cov = j.at("cov").get<std::vector<std::vector<double>>>();
    if (mean.size() != 2 * n || cov.size() != 2 * n)
        throw DomainError("state JSON dimensions do not match num_modes");
    Vector m = Eigen::Map<const Vector>(mean.data(), static_cast<Eigen::Index>(mean.size()));
    Matrix c(2 * n, 2 * n);
    for (std::size_t r = 0; r < 2 * n; ++r) {
        if (cov[r].size() != 2 * n)
            throw DomainError("state JSON covariance row has wrong length");
        for (std::size_t k = 0; k < 2 * n; ++k)
            c(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = cov[r][k];
    }
    return {std::move(m), std::move(c)};
}

} // namespace cvclone
