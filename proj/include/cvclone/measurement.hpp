#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "cvclone/errors.hpp"
#include "cvclone/phase_space.hpp"

namespace cvclone {

/// Where a homodyne outcome comes from.
///
/// `Marginalized` does not pick an outcome at all: the measured record is
/// averaged over, which turns measurement plus feedback into the equivalent
/// deterministic linear channel.
struct OutcomeSource {
    enum class Kind { Sampled, Forced, MeanValue, Marginalized };

    Kind kind = Kind::MeanValue;
    double value = 0.0;
    std::uint64_t seed = 0;

    static OutcomeSource sampled(std::uint64_t seed) { return {Kind::Sampled, 0.0, seed}; }
    static OutcomeSource forced(double value) { return {Kind::Forced, value, 0}; }
    static OutcomeSource mean_value() { return {Kind::MeanValue, 0.0, 0}; }
    static OutcomeSource marginalized() { return {Kind::Marginalized, 0.0, 0}; }
};

/// Rank threshold for the measured quadrature variance.
inline constexpr double kRankTol = 1e-12;

struct HomodyneResult {
    double outcome = 0.0;
    GaussianState post_state;
    ModeLabel measured_mode;
    Axis measured_axis = Axis::X;

    /// Marginal statistics of the measured quadrature before the measurement.
    double prior_mean = 0.0;
    double prior_variance = 0.0;
    /// d(post mean)/d(outcome) for the remaining quadratures (Kalman gain).
    Vector gain;
    bool marginalized = false;
};

struct FeedbackGain {
    ModeLabel target;
    Axis axis = Axis::P;
    double gain = 1.0;
};

/// Outcome-proportional displacements: target quadrature += gain * outcome.
struct FeedbackRule {
    std::vector<FeedbackGain> gains;
};

/// Map a mode index of the register before removing `measured` to its index
/// afterwards.
std::size_t index_after_removal(std::size_t index, std::size_t measured);

/// Ideal homodyne detection of one quadrature. The measured mode is removed
/// from the register; the rest is conditioned on the outcome.
HomodyneResult homodyne(const GaussianState &state, ModeLabel mode, Axis axis, const OutcomeSource &source);

/// Draw one outcome from the quadrature marginal using an external generator.
template <class Rng>
double sample_quadrature(const GaussianState &state, ModeLabel mode, Axis axis, Rng &rng) {
    if (mode.index >= state.num_modes())
        throw DomainError("sample_quadrature: mode out of range");
    std::normal_distribution<double> normal(state.mean(mode.index, axis), std::sqrt(state.variance(mode.index, axis)));
    return normal(rng);
}

/// Shift each targeted quadrature mean by gain * outcome. Targets index `state`.
GaussianState feed_back(const GaussianState &state, const FeedbackRule &rule, double outcome);

struct MeasureFeedResult {
    GaussianState state;
    double outcome = 0.0;
    bool marginalized = false;
};

/// Homodyne followed by feedback. Rule targets index the register *before*
/// the measured mode is removed.
MeasureFeedResult measure_and_feed(const GaussianState &state, ModeLabel mode, Axis axis, const FeedbackRule &rule,
                                   const OutcomeSource &source);

} // namespace cvclone
