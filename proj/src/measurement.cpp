#include "cvclone/measurement.hpp"

#include <cmath>
#include <random>

#include "cvclone/errors.hpp"

namespace cvclone {
namespace {

std::vector<Eigen::Index> remaining_rows(std::size_t num_modes, std::size_t measured) {
    std::vector<Eigen::Index> rows;
    for (std::size_t m = 0; m < num_modes; ++m) {
        if (m == measured)
            continue;
        rows.push_back(static_cast<Eigen::Index>(2 * m));
        rows.push_back(static_cast<Eigen::Index>(2 * m + 1));
    }
    return rows;
}

void check_measurable(const GaussianState &state, ModeLabel mode) {
    if (mode.index >= state.num_modes())
        throw DomainError("homodyne: mode " + std::to_string(mode.index) + " out of range");
    if (state.num_modes() < 2)
        throw DomainError("homodyne: cannot measure the only mode of the register");
}

// Feedback vector over the remaining quadratures, from a rule indexed on the
// full register.
Vector feedback_vector(const FeedbackRule &rule, std::size_t num_modes, std::size_t measured) {
    Vector g = Vector::Zero(static_cast<Eigen::Index>(2 * (num_modes - 1)));
    for (const auto &fg : rule.gains) {
        if (fg.target.index >= num_modes || fg.target.index == measured)
            throw DomainError("feedback target " + std::to_string(fg.target.index) + " is not a surviving mode");
        if (!std::isfinite(fg.gain))
            throw DomainError("feedback gain must be finite");
        g(static_cast<Eigen::Index>(quadrature_index(index_after_removal(fg.target.index, measured), fg.axis))) +=
            fg.gain;
    }
    return g;
}

} // namespace

std::size_t index_after_removal(std::size_t index, std::size_t measured) {
    if (index == measured)
        throw DomainError("mode " + std::to_string(index) + " was measured");
    return index > measured ? index - 1 : index;
}

HomodyneResult homodyne(const GaussianState &state, ModeLabel mode, Axis axis, const OutcomeSource &source) {
    check_measurable(state, mode);

    const auto q = static_cast<Eigen::Index>(quadrature_index(mode.index, axis));
    const auto rows = remaining_rows(state.num_modes(), mode.index);
    const double mu_q = state.mean()(q);
    const double var_q = state.cov()(q, q);
    const Vector cross = state.cov()(rows, q);
    // Pseudoinverse of the rank-1 projected block: a vanishing variance carries no update.
    const Vector gain = var_q > kRankTol ? Vector(cross / var_q) : Vector::Zero(cross.size());

    double outcome = mu_q;
    switch (source.kind) {
    case OutcomeSource::Kind::Sampled: {
        std::mt19937_64 rng(source.seed);
        outcome = sample_quadrature(state, mode, axis, rng);
        break;
    }
    case OutcomeSource::Kind::Forced:
        outcome = source.value;
        break;
    case OutcomeSource::Kind::MeanValue:
    case OutcomeSource::Kind::Marginalized:
        break;
    }

    const bool marginalized = source.kind == OutcomeSource::Kind::Marginalized;
    Vector mean = state.mean()(rows);
    Matrix cov = state.cov()(rows, rows);
    if (!marginalized) {
        mean += gain * (outcome - mu_q);
        cov -= gain * cross.transpose();
        cov = 0.5 * (cov + cov.transpose());
    }

    return HomodyneResult{outcome,
                          GaussianState(std::move(mean), std::move(cov)),
                          mode,
                          axis,
                          mu_q,
                          var_q,
                          gain,
                          marginalized};
}

GaussianState feed_back(const GaussianState &state, const FeedbackRule &rule, double outcome) {
    Vector mean = state.mean();
    for (const auto &fg : rule.gains) {
        if (fg.target.index >= state.num_modes())
            throw DomainError("feedback target " + std::to_string(fg.target.index) + " out of range");
        if (!std::isfinite(fg.gain))
            throw DomainError("feedback gain must be finite");
        mean(static_cast<Eigen::Index>(quadrature_index(fg.target.index, fg.axis))) += fg.gain * outcome;
    }
    return {std::move(mean), state.cov()};
}

MeasureFeedResult measure_and_feed(const GaussianState &state, ModeLabel mode, Axis axis, const FeedbackRule &rule,
                                   const OutcomeSource &source) {
    check_measurable(state, mode);
    const Vector g = feedback_vector(rule, state.num_modes(), mode.index);

    if (source.kind == OutcomeSource::Kind::Marginalized) {
        // Averaging the conditional state over the outcome distribution gives
        // the linear channel B -> B + g q.
        const auto q = static_cast<Eigen::Index>(quadrature_index(mode.index, axis));
        const auto rows = remaining_rows(state.num_modes(), mode.index);
        const double mu_q = state.mean()(q);
        const double var_q = state.cov()(q, q);
        const Vector cross = state.cov()(rows, q);
        Vector mean = state.mean()(rows) + g * mu_q;
        Matrix cov = state.cov()(rows, rows) + cross * g.transpose() + g * cross.transpose() + var_q * g * g.transpose();
        cov = 0.5 * (cov + cov.transpose());
        return {GaussianState(std::move(mean), std::move(cov)), mu_q, true};
    }

    auto measured = homodyne(state, mode, axis, source);
    Vector mean = measured.post_state.mean() + g * measured.outcome;
    return {GaussianState(std::move(mean), measured.post_state.cov()), measured.outcome, false};
}

} // namespace cvclone
