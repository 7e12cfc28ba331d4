#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cvclone/measurement.hpp"
#include "cvclone/phase_space.hpp"

namespace cvclone {

enum class ProtocolKind { TwoPass, SinglePass, AtomsLight, AtomsLightUnsqueezed, AsymmetricSinglePass, SqueezePrep };

std::string to_string(ProtocolKind kind);
/// Accepts the CLI spellings ("two-pass", "single-pass", "atoms-light",
/// "atoms-light-unsqueezed", "asymmetric", "squeeze-prep").
ProtocolKind protocol_from_string(const std::string &name);

struct ProtocolConfig {
    ProtocolKind protocol = ProtocolKind::TwoPass;
    double alpha_x = 0.0;
    double alpha_p = 0.0;
    /// Squeezed ancilla variance for the asymmetric cloner and squeeze prep.
    double asymmetry_V = 0.5;
    /// Interaction strength of every light-atom coupling.
    double kappa = 1.0;
    /// Common scale applied to the feedback displacement gains.
    double feedback_gain = 1.0;
    OutcomeSource outcome = OutcomeSource::marginalized();
    std::uint64_t trials = 1;

    /// Throws DomainError on an invalid configuration.
    void validate() const;
};

struct CloneReport {
    std::string name;
    /// Fidelity with the input coherent state at the configured alpha.
    double fidelity = 0.0;
    /// Worst case over all coherent inputs: zero unless the clone mean
    /// follows the input with unit gain.
    double universal_fidelity = 0.0;
    /// Closed-form value where one exists (NaN otherwise).
    double analytic_fidelity = 0.0;
    /// Standard error of `fidelity` when it is a Monte Carlo average.
    double fidelity_stderr = 0.0;
    Eigen::Matrix2d mean_gain = Eigen::Matrix2d::Zero();
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
};

struct ProtocolReport {
    ProtocolConfig config;
    std::vector<CloneReport> clones;
    /// Joint state of every surviving mode at the end of the run.
    GaussianState output = make_vacuum(1);
    std::vector<std::string> output_modes;
    /// Ancillae produced by the squeeze-preparation stage, if any.
    std::vector<GaussianState> prepared_ancillae;
    /// Every state produced along the way, in order.
    std::vector<GaussianState> trace;
    std::optional<double> outcome;

    const CloneReport &clone(const std::string &name) const;
};

/// Four-gate network: C-NOT light->A, C-NOT light->B, C-NOT^dagger A->light,
/// C-NOT^dagger B->light.
ProtocolReport run_two_pass(const ProtocolConfig &cfg);

/// First two C-NOTs, homodyne of p_L and feedback p_A,p_B += p_L.
ProtocolReport run_single_pass(const ProtocolConfig &cfg);

/// Single atomic memory plus a flying light clone through a balanced beam
/// splitter; optionally unsqueezes the light clone by sqrt(2).
ProtocolReport run_atoms_light(const ProtocolConfig &cfg);

/// Single-pass scheme with x-squeezed ancilla A and p-squeezed ancilla B.
ProtocolReport run_asymmetric(const ProtocolConfig &cfg);

struct SqueezePrepResult {
    GaussianState atom_a;
    GaussianState atom_b;
    double kappa = 0.0;
    std::vector<double> outcomes;
    std::vector<GaussianState> trace;
};

/// Prepare A (x-squeezed) and B (p-squeezed) with variance cfg.asymmetry_V by
/// two QND probe pulses reading x_A + p_B and x_A - p_B, each measured and
/// followed by a displacement cancelling the acquired coherent component.
SqueezePrepResult run_squeeze_prep(const ProtocolConfig &cfg);

/// QND coupling that prepares squeezed variance V: sqrt(1/(4V) - 1/2).
double squeeze_prep_kappa(double variance);

/// Squeeze-prep followed by the asymmetric cloner using the prepared ancillae.
ProtocolReport run_squeeze_prep_cloner(const ProtocolConfig &cfg);

/// Dispatch on cfg.protocol.
ProtocolReport run_protocol(const ProtocolConfig &cfg);

enum class SweepParameter { V, Kappa, Gain };
SweepParameter sweep_parameter_from_string(const std::string &name);
std::string to_string(SweepParameter p);

/// Inclusive grid start, start+step, ..., stop (computed as start + i*step).
std::vector<double> grid(double start, double stop, double step);

/// One report per value, in grid order. Rows are computed in parallel.
std::vector<ProtocolReport> sweep(SweepParameter parameter, const std::vector<double> &values,
                                  const ProtocolConfig &cfg);

struct TrajectoryRecord {
    std::uint64_t trial = 0;
    double outcome = 0.0;
    std::vector<Eigen::Vector2d> clone_means;
    std::string clone_cov_digest;
};

struct MonteCarloClone {
    std::string name;
    Eigen::Vector2d empirical_mean = Eigen::Vector2d::Zero();
    Eigen::Vector2d mean_stderr = Eigen::Vector2d::Zero();
    /// Conditional covariance averaged over trials plus the spread of the
    /// conditional means (law of total covariance).
    Eigen::Matrix2d empirical_cov = Eigen::Matrix2d::Zero();
    double mean_fidelity = 0.0;
    double fidelity_stderr = 0.0;
    Eigen::Vector2d analytic_mean = Eigen::Vector2d::Zero();
    Eigen::Matrix2d analytic_cov = Eigen::Matrix2d::Zero();
    double analytic_fidelity = 0.0;
};

struct MonteCarloSummary {
    ProtocolConfig config;
    std::uint64_t trials = 0;
    std::uint64_t root_seed = 0;
    std::vector<MonteCarloClone> clones;
    std::vector<TrajectoryRecord> records;
};

/// Per-trial seed derived from the root seed (splitmix64).
std::uint64_t trial_seed(std::uint64_t root_seed, std::uint64_t trial);

/// Sampled-outcome ensemble for a measurement-based protocol. Uses
/// cfg.outcome.seed as the root seed and cfg.trials trials.
MonteCarloSummary run_montecarlo(const ProtocolConfig &cfg, bool keep_records = true);

/// Stable hex digest of a covariance matrix (FNV-1a over its entries).
std::string covariance_digest(const Matrix &cov);

/// Throws InvariantViolation if a report breaks a physical invariant.
void check_report_invariants(const ProtocolReport &report);

} // namespace cvclone
