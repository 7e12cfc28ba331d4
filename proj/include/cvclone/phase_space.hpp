#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace cvclone {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Tolerance for structural checks (symmetry, uncertainty, symplecticity).
inline constexpr double kStructuralTol = 1e-10;

/// Variance of each quadrature of the vacuum. Quadratures obey [x,p]=i.
inline constexpr double kVacuumVariance = 0.5;

enum class Axis { X, P };

/// Semantic role of a mode inside a protocol register.
enum class ModeRole { Light, AtomA, AtomB, Ancilla };

struct ModeLabel {
    std::size_t index = 0;
    ModeRole role = ModeRole::Ancilla;

    constexpr ModeLabel() = default;
    constexpr ModeLabel(std::size_t i, ModeRole r = ModeRole::Ancilla) : index(i), role(r) {}

    friend constexpr bool operator==(const ModeLabel &a, const ModeLabel &b) { return a.index == b.index; }
};

std::string to_string(Axis axis);
std::string to_string(ModeRole role);

/// Position of a quadrature in the interleaved ordering (x1,p1,x2,p2,...).
constexpr std::size_t quadrature_index(std::size_t mode, Axis axis) {
    return 2 * mode + (axis == Axis::X ? 0 : 1);
}

/// Standard symplectic form for the interleaved ordering: a direct sum of
/// [[0,1],[-1,0]] blocks, so that [r_j, r_k] = i * Omega(j,k).
Matrix symplectic_form(std::size_t num_modes);

/// Multimode Gaussian state: first moments and covariance matrix
/// Cov(j,k) = <{dr_j, dr_k}>/2 in the interleaved ordering.
///
/// Instances are always validated on construction: the covariance must be
/// symmetric and satisfy cov + (i/2) Omega >= 0.
class GaussianState {
  public:
    GaussianState(Vector mean, Matrix cov);

    std::size_t num_modes() const { return static_cast<std::size_t>(mean_.size() / 2); }
    const Vector &mean() const { return mean_; }
    const Matrix &cov() const { return cov_; }

    double mean(std::size_t mode, Axis axis) const { return mean_(quadrature_index(mode, axis)); }
    double variance(std::size_t mode, Axis axis) const {
        auto q = quadrature_index(mode, axis);
        return cov_(q, q);
    }

    /// Symplectic eigenvalues in ascending order (one per mode).
    std::vector<double> symplectic_eigenvalues() const;

    /// True when every symplectic eigenvalue equals 1/2 within tol.
    bool is_pure(double tol = kStructuralTol) const;

  private:
    Vector mean_;
    Matrix cov_;
};

/// Symplectic eigenvalues of an arbitrary positive-definite covariance.
/// Throws DomainError if cov is not symmetric positive definite.
std::vector<double> symplectic_eigenvalues(const Matrix &cov);

/// Throws DomainError unless cov is a legal quantum covariance matrix.
void validate_covariance(const Matrix &cov, double tol = kStructuralTol);

GaussianState make_vacuum(std::size_t num_modes = 1);
GaussianState make_coherent(double alpha_x, double alpha_p);

/// Pure squeezed vacuum with variance `variance` on `axis` and 1/(4 variance)
/// on the conjugate quadrature.
GaussianState make_squeezed_vacuum(double variance, Axis axis);

GaussianState tensor(std::span<const GaussianState> states);
GaussianState tensor(std::initializer_list<GaussianState> states);

GaussianState reduced_state(const GaussianState &state, std::span<const ModeLabel> modes);
GaussianState reduced_state(const GaussianState &state, std::initializer_list<ModeLabel> modes);

/// Fidelity <alpha| rho |alpha> between a single-mode Gaussian state and the
/// coherent state with quadrature means (alpha_x, alpha_p).
double fidelity_with_coherent(const GaussianState &state, double alpha_x, double alpha_p);

void to_json(nlohmann::json &j, const GaussianState &state);
GaussianState gaussian_state_from_json(const nlohmann::json &j);

} // namespace cvclone
